"""Command-line front end.

    cachenet place     --config net.cfg [--d2d]
    cachenet schedule  --config net.cfg [--demand 0,1,2,3] [--oracle]
    cachenet simulate  --config net.cfg [--seed 7] [--noise 0] [--trials 1]
    cachenet analyze   --config net.cfg
    cachenet sweep     --mode vary-t --d 2 --delta 1 --range 2:8
    cachenet perms     --D 2 --t 2 [--circular]

Exit status is 0 only when every validation passes.
"""

from __future__ import annotations

import argparse
import csv
import io
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from . import analytics, combinatorics
from .artifacts import (
    RunManifest,
    config_from_mapping,
    dumps,
    parse_demand,
    read_config_file,
    read_schedule,
    write_schedule,
)
from .errors import CacheNetError, ConfigError, DecodeFailure, DemandError, NotApplicable, TooLarge
from .model import NetworkConfig, distinct_demand, partition_dimensions, validate_demand
from .phy import derived_rng, sample_channel, simulate_schedule
from .placement import place_d2d, place_hypercube, verify_memory, write_placement_table
from .scheduler import (
    build_schedule,
    build_schedule_oracle,
    schedule_stats,
    validate_schedule,
)

EXIT_FAIL = 1
EXIT_CONFIG = 2
EXIT_NOT_APPLICABLE = 3


def _write(out_dir: Path, name: str, text: str) -> Path:
    out_dir.mkdir(parents=True, exist_ok=True)
    path = out_dir / name
    path.write_text(text)
    return path


def _load(args) -> dict[str, Any]:
    values = read_config_file(args.config) if args.config else {}
    if getattr(args, "seed", None) is not None:
        values["seed"] = args.seed
    return values


def _demand(args, values: dict[str, Any], cfg: NetworkConfig) -> tuple[int, ...]:
    text = getattr(args, "demand", None)
    if text == "random":
        rng = derived_rng(values.get("seed", 0), "demand")
        if cfg.n >= cfg.k_r:
            d = rng.permutation(cfg.n)[:cfg.k_r]
        else:
            d = rng.integers(0, cfg.n, cfg.k_r)
        return validate_demand(cfg, [int(x) for x in d])
    if text:
        return validate_demand(cfg, parse_demand(text))
    if "demand" in values:
        return validate_demand(cfg, values["demand"])
    return distinct_demand(cfg)


def _echo(values: dict[str, Any]) -> dict[str, Any]:
    return {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(values.items())}


def cmd_place(args) -> int:
    values = _load(args)
    manifest = RunManifest("place", _echo(values), values.get("seed"))
    out_dir = Path(args.out_dir)
    manifest.outputs = ["d2d_placement.csv"] if args.d2d else ["placement.csv", "memory.json"]
    if args.d2d:
        k = values.get("k", values.get("k_r"))
        m = values.get("m", values.get("m_r"))
        d2d = place_d2d(k, values["n"], m)
        per_user = {len(c) for c in d2d.user_cache}
        buf = io.StringIO()
        buf.write("# manifest: " + dumps(manifest.as_dict()) + "\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["user", "file", "coordinate"])
        for u, cache in enumerate(d2d.user_cache):
            for f, c in sorted(cache):
                w.writerow([u, f, " ".join(map(str, c))])
        _write(out_dir, "d2d_placement.csv", buf.getvalue())
        print(f"d2d placement: K={d2d.k} t={d2d.t} packets/file={d2d.packets_per_file} "
              f"subfiles/user={sorted(per_user)}")
        return 0
    cfg = config_from_mapping(values, placement_only=True)
    pm = place_hypercube(cfg, partition_dimensions(cfg))
    report = verify_memory(cfg, pm)
    buf = io.StringIO()
    buf.write("# manifest: " + dumps(manifest.as_dict()) + "\n")
    write_placement_table(pm, buf)
    _write(out_dir, "placement.csv", buf.getvalue())
    mem = {"manifest": manifest.as_dict(), "subfiles_per_file": pm.subfiles_per_file,
           "tx_loads": [str(x) for x in report.tx_loads],
           "rx_loads": [str(x) for x in report.rx_loads], "ok": report.ok}
    _write(out_dir, "memory.json", dumps(mem) + "\n")
    print(f"placement: {pm.subfiles_per_file} subfiles/file, memory check "
          f"{'pass' if report.ok else 'FAIL'}")
    return 0 if report.ok else EXIT_FAIL


def _schedule(args, values, cfg):
    dims = partition_dimensions(cfg)
    pm = place_hypercube(cfg, dims)
    d = _demand(args, values, cfg)
    s = build_schedule(cfg, dims, pm, d)
    return pm, d, s


def cmd_schedule(args) -> int:
    values = _load(args)
    cfg = config_from_mapping(values, placement_only=True)
    pm, d, s = _schedule(args, values, cfg)
    values["demand"] = d
    manifest = RunManifest("schedule", _echo(values), values.get("seed"), ["schedule.jsonl"])
    report = validate_schedule(cfg, pm, d, s)
    stats = schedule_stats(s)
    ok = report.ok
    line = f"schedule: H={stats.H} packets={stats.total_packets} dof={stats.dof} delta_hcb={s.delta_hcb}"
    if args.oracle:
        try:
            oracle = build_schedule_oracle(cfg, pm, d)
            agree = oracle.H == stats.H and validate_schedule(cfg, pm, d, oracle, structural=False).ok
            ok = ok and agree
            line += f" oracle_H={oracle.H} ({'agree' if agree else 'DISAGREE'})"
        except TooLarge as e:
            line += f" oracle skipped ({e})"
    manifest.verdict = "pass" if ok else "fail"
    buf = io.StringIO()
    write_schedule(s, buf, manifest)
    _write(Path(args.out_dir), "schedule.jsonl", buf.getvalue())
    print(line)
    if not report.ok:
        print(f"validation failed: {report.violation} in block {report.block}: {report.message}")
    return 0 if ok else EXIT_FAIL


def cmd_simulate(args) -> int:
    values = _load(args)
    seed = values.get("seed", 0)
    if args.schedule:
        with open(args.schedule) as fh:
            s = read_schedule(fh)
        cfg = config_from_mapping(s.cfg.as_dict())
        pm = place_hypercube(cfg, partition_dimensions(cfg))
        d = s.demand
        values.update(s.cfg.as_dict())
    else:
        cfg = config_from_mapping(values, placement_only=True)
        pm, d, s = _schedule(args, values, cfg)
    values["demand"] = d
    values["seed"] = seed
    manifest = RunManifest("simulate", _echo(values), seed, ["schedule.jsonl", "simulation.json"])
    manifest.config.update(noise=args.noise, trials=args.trials, power=args.power)
    check = validate_schedule(cfg, pm, d, s)
    channel = sample_channel(cfg, seed)
    report = simulate_schedule(cfg, s, channel, noise_power=args.noise, trials=args.trials,
                               seed=seed, power=args.power, strict=False)
    ok = check.ok and report.passed and (args.noise > 0 or report.dof == schedule_stats(s).dof)
    manifest.verdict = "pass" if ok else "fail"
    out_dir = Path(args.out_dir)
    buf = io.StringIO()
    write_schedule(s, buf, manifest)
    _write(out_dir, "schedule.jsonl", buf.getvalue())
    doc = {
        "manifest": manifest.as_dict(),
        "validation": {"ok": check.ok, "violation": check.violation, "message": check.message},
        "aggregate": {"H": report.H, "total_packets": report.total_packets,
                      "dof": str(report.dof), "max_residual": report.max_residual,
                      "min_gain": report.min_gain, "max_error": report.max_error,
                      "mean_error": report.mean_error, "failures": len(report.failures)},
        "blocks": [[r.block, r.receiver, r.gain, r.residual, r.error] for r in report.decodes],
        "block_columns": ["block", "receiver", "gain", "residual", "error"],
    }
    verdict = (f"VERDICT {manifest.verdict} dof={report.dof} "
               f"max_residual={report.max_residual:.3e} decoded={len(report.decodes)}")
    doc["verdict"] = verdict
    _write(out_dir, "simulation.json", dumps(doc) + "\n")
    print(verdict)
    for f in report.failures[:10]:
        print(f"  failure: {f}")
    return 0 if ok else EXIT_FAIL


def cmd_analyze(args) -> int:
    values = _load(args)
    cfg = config_from_mapping(values, placement_only=True)
    manifest = RunManifest("analyze", _echo(values), values.get("seed"), ["analysis.json"])
    out: dict[str, Any] = {"sum_dof": str(analytics.sum_dof(cfg)),
                           "t_T": cfg.t_t, "t_R": cfg.t_r, "delta": cfg.delta}
    try:
        rep = analytics.subpacketization_report(cfg)
        out.update(F_total_hcb=rep.F_total_hcb, F_hcb=rep.F_hcb, F_nma=rep.F_nma,
                   delta_hcb=rep.delta_hcb, delta_nma=rep.delta_nma,
                   G=str(rep.G), G_float=float(rep.G), log10_G=rep.log10_G)
        line = (f"F_hcb={rep.F_hcb} F_nma={rep.F_nma} G={rep.G} (~{float(rep.G):.4f}) "
                f"sum_dof={out['sum_dof']}")
    except NotApplicable as e:
        out["not_applicable"] = str(e)
        line = f"subpacketization not applicable: {e}; sum_dof={out['sum_dof']}"
    out["manifest"] = manifest.as_dict()
    _write(Path(args.out_dir), "analysis.json", dumps(out) + "\n")
    print(line)
    return 0


def _range(text: str) -> range:
    lo, _, hi = text.partition(":")
    return range(int(lo), int(hi or lo) + 1)


def cmd_sweep(args) -> int:
    values = _range(args.range)
    result = analytics.sweep_gap(args.mode, values, d=args.d, t=args.t, delta=args.delta)
    params = {"mode": args.mode, "d": args.d, "t": args.t, "delta": args.delta,
              "range": args.range}
    name = f"sweep_{args.mode}.csv"
    manifest = RunManifest("sweep", params, outputs=[name])
    buf = io.StringIO()
    buf.write("# manifest: " + dumps(manifest.as_dict()) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(analytics.SWEEP_COLUMNS)
    for row in result.rows:
        w.writerow(row.as_record())
    _write(Path(args.out_dir), name, buf.getvalue())
    print(f"sweep {args.mode}: {len(result.valid_rows)} points, "
          f"strictly decreasing={result.strictly_decreasing}, "
          f"bound threshold={result.bound_threshold}")
    last = result.valid_rows[-1] if result.valid_rows else None
    if last is not None:
        print(f"last point {last.param}: G={float(last.G):.6g} log10 G={last.log10_G:.4f}")
    return 0


def cmd_perms(args) -> int:
    dims = [tuple(range(i * args.D, (i + 1) * args.D)) for i in range(args.t)]
    if args.D * args.t > args.cap:
        raise TooLarge(f"D*t = {args.D * args.t} exceeds the enumeration cap {args.cap}")
    it = combinatorics.iter_circular_hcb(dims) if args.circular else combinatorics.iter_hcb_arrangements(dims)
    for seq in sorted(it):
        print(" ".join(map(str, seq)))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cachenet", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=False):
        sp.add_argument("--config", help="key = value config file")
        sp.add_argument("--out-dir", default="out")
        if seed:
            sp.add_argument("--seed", type=int)

    sp = sub.add_parser("place", help="hypercube placement dump and memory check")
    common(sp, seed=True)
    sp.add_argument("--d2d", action="store_true", help="D2D placement from keys k, n, m")
    sp.set_defaults(func=cmd_place)

    sp = sub.add_parser("schedule", help="build and validate the delivery schedule")
    common(sp, seed=True)
    sp.add_argument("--demand", help="comma list of file indices, or 'random'")
    sp.add_argument("--oracle", action="store_true", help="cross-check H by exact cover")
    sp.set_defaults(func=cmd_schedule)

    sp = sub.add_parser("simulate", help="zero-forcing PHY simulation of the schedule")
    common(sp, seed=True)
    sp.add_argument("--demand")
    sp.add_argument("--schedule", help="schedule document to simulate instead of building one")
    sp.add_argument("--noise", type=float, default=0.0)
    sp.add_argument("--trials", type=int, default=1)
    sp.add_argument("--power", type=float, default=1.0)
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("analyze", help="subpacketization, DoF and gap G for one config")
    common(sp, seed=True)
    sp.set_defaults(func=cmd_analyze)

    sp = sub.add_parser("sweep", help="G over t or d, written as CSV")
    sp.add_argument("--mode", choices=("vary-t", "vary-d"), required=True)
    sp.add_argument("--d", type=int)
    sp.add_argument("--t", type=int)
    sp.add_argument("--delta", type=int, default=1)
    sp.add_argument("--range", required=True, help="inclusive lo:hi")
    sp.add_argument("--out-dir", default="out")
    sp.set_defaults(func=cmd_sweep)

    sp = sub.add_parser("perms", help="list hypercube permutations, one per line")
    sp.add_argument("--D", type=int, required=True)
    sp.add_argument("--t", type=int, required=True)
    sp.add_argument("--circular", action="store_true")
    sp.add_argument("--cap", type=int, default=combinatorics.DEFAULT_CAP)
    sp.set_defaults(func=cmd_perms)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, DemandError, KeyError) as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NotApplicable as e:
        print(f"error: NotApplicable: {e}", file=sys.stderr)
        return EXIT_NOT_APPLICABLE
    except DecodeFailure as e:
        print(f"error: DecodeFailure: {e}", file=sys.stderr)
        return EXIT_FAIL
    except CacheNetError as e:
        print(f"error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
