"""End-to-end acceptance checks, one test per criterion.

Each test prints a single PASS/FAIL line via the conftest hook and also
asserts its runtime budget.
"""

import time
from fractions import Fraction
from itertools import permutations
from math import factorial

import numpy as np
import pytest

from cachenet.analytics import gap, gap_asymptotics, sweep_gap
from cachenet.cli import main
from cachenet.combinatorics import (
    circular_hcb_count,
    enumerate_circular_hcb,
    enumerate_hypercube_permutations,
    hcb_count,
)
from cachenet.model import derive_config, distinct_demand, partition_dimensions
from cachenet.phy import sample_channel, simulate_schedule, zf_vectors
from cachenet.placement import needed_subfiles, place_hypercube
from cachenet.scheduler import (
    build_schedule,
    build_schedule_oracle,
    delta_hcb,
    schedule_stats,
    subpacket_usage,
    validate_schedule,
)

from conftest import dof_grid
from oracles import pairwise_hcb

pytestmark = pytest.mark.acceptance


class Timer:
    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start


@pytest.fixture(scope="module")
def grid():
    """Build and validate every grid schedule once; later criteria reuse it."""
    with Timer() as tm:
        out = []
        for cfg, packets in dof_grid():
            dims = partition_dimensions(cfg)
            pm = place_hypercube(cfg, dims)
            d = distinct_demand(cfg)
            s = build_schedule(cfg, dims, pm, d)
            out.append((cfg, pm, d, s, validate_schedule(cfg, pm, d, s)))
    return out, tm.elapsed


def test_c1_worked_example():
    with Timer() as tm:
        cfg = derive_config(4, 4, 4, 2, 2)
        dims = partition_dimensions(cfg)
        pm = place_hypercube(cfg, dims)
        d = (0, 1, 2, 3)
        assert pm.subfiles_per_file == 16
        assert all(len(needed_subfiles(cfg, pm, d, j)) == 8 for j in range(4))
        assert delta_hcb(cfg) == 1
        s = build_schedule(cfg, dims, pm, d)
        assert validate_schedule(cfg, pm, d, s)
        stats = schedule_stats(s)
        assert (stats.total_packets, stats.H, stats.dof) == (32, 8, 4)
        rep = simulate_schedule(cfg, s, sample_channel(cfg, 0))
        assert rep.passed and len(rep.decodes) == 32
        assert rep.max_residual <= 1e-9 and rep.max_error <= 1e-9
    assert tm.elapsed < 1.0


def test_c2_dof_grid(grid):
    results, elapsed = grid
    with Timer() as tm:
        assert len(results) > 40
        for cfg, pm, d, s, report in results:
            assert report, (cfg, report)
            assert set(subpacket_usage(s).values()) == {s.delta_hcb}
            dof = schedule_stats(s).dof
            assert dof == cfg.t_t + cfg.t_r == Fraction(cfg.k_t * cfg.m_t + cfg.k_r * cfg.m_r, cfg.n)
    assert elapsed + tm.elapsed < 120


def test_c3_oracle_agreement(grid):
    results, _ = grid
    with Timer() as tm:
        small = [r for r in results if r[3].total_packets <= 64]
        assert len(small) >= 10
        for cfg, pm, d, s, _ in small:
            o = build_schedule_oracle(cfg, pm, d)
            assert o.H == s.H, cfg
            assert validate_schedule(cfg, pm, d, o, structural=False)
    assert tm.elapsed < 300


def test_c4_permutation_counts():
    with Timer() as tm:
        assert enumerate_hypercube_permutations(2, 2) == sorted([
            (0, 2, 1, 3), (0, 3, 1, 2), (1, 2, 0, 3), (1, 3, 0, 2),
            (2, 1, 3, 0), (2, 0, 3, 1), (3, 1, 2, 0), (3, 0, 2, 1)])
        assert enumerate_circular_hcb(2, 2) == [(0, 2, 1, 3), (0, 3, 1, 2)]
        for D in range(1, 9):
            for t in range(1, 8 // D + 1):
                n = D * t
                linear, reps = 0, set()
                for p in permutations(range(n)):
                    if pairwise_hcb(p, D, t):
                        linear += 1
                    if pairwise_hcb(p, D, t, circular=True):
                        r = p.index(0)
                        reps.add(p[r:] + p[:r])
                circular = len(reps)
                assert linear == factorial(t) * factorial(D) ** t == hcb_count(D, t)
                assert circular * n == factorial(t) * factorial(D) ** t
                assert circular == circular_hcb_count(D, t)
                assert len(enumerate_hypercube_permutations(D, t)) == linear
                assert len(enumerate_circular_hcb(D, t)) == circular
    assert tm.elapsed < 10


def test_c5_zero_forcing_numerics(grid):
    results, _ = grid
    with Timer() as tm:
        worst_residual, worst_gain = 0.0, np.inf
        for cfg, pm, d, s, _ in results:
            keys = sorted({(a.transmitters, a.zf_targets, a.receiver)
                           for b in s.blocks for a in b.assignments})
            T = np.array([k[0] for k in keys])
            Z = np.array([k[1] for k in keys], dtype=int).reshape(len(keys), -1)
            rx = np.array([k[2] for k in keys])
            for seed in range(100):
                h = sample_channel(cfg, seed).h
                alpha = zf_vectors(h, T, Z)
                sub = h[Z[:, :, None], T[:, None, :]]
                leak = np.linalg.norm(np.einsum("bzt,bt->bz", sub, alpha), axis=1)
                worst_residual = max(worst_residual, float(np.max(leak / np.linalg.norm(alpha, axis=1))))
                gain = np.abs(np.einsum("bt,bt->b", h[rx[:, None], T], alpha))
                worst_gain = min(worst_gain, float(gain.min()))
        print(f"max ZF residual {worst_residual:.3e}, min desired gain {worst_gain:.3e}")
        assert worst_residual <= 1e-12
        assert worst_gain > 1e-9
    assert tm.elapsed < 60


def test_c6_gap_properties():
    with Timer() as tm:
        failures = []
        for delta in (1, 2, 3):
            for d in range(delta + 1, 9):
                for t in range(1, 6):
                    g = gap(d, t, delta)
                    if not g < 1:
                        failures.append((d, t, delta, g))
        vary_t = sweep_gap("vary-t", range(2, 9), d=2, delta=1)
        assert vary_t.strictly_decreasing
        assert float(gap(1000, 2, 1)) == pytest.approx(gap_asymptotics(None, 2, 1).limit_d, rel=0.05)
        for d in range(3, 9):
            res = sweep_gap("vary-t", range(1, 6), d=d, delta=2)
            thr = res.bound_threshold
            if thr is not None:
                beyond = [r for r in res.valid_rows if r.param > thr]
                assert all(r.bound_holds for r in beyond), (d, thr)
        print(f"{len(failures)} grid points with G >= 1: "
              + ", ".join(f"(d={d},t={t},delta={dl}) G={g}" for d, t, dl, g in failures))
        assert not failures
    assert tm.elapsed < 30


def test_c7_determinism(tmp_path):
    cfg = tmp_path / "net.cfg"
    cfg.write_text("k_t = 4\nk_r = 6\nn = 6\nm_t = 3\nm_r = 2\nseed = 11\n")
    for sub in ("a", "b"):
        assert main(["simulate", "--config", str(cfg), "--demand", "5,4,3,2,1,0",
                     "--noise", "0.05", "--trials", "3", "--out-dir", str(tmp_path / sub)]) == 0
    for name in ("schedule.jsonl", "simulation.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
