"""Config intake and the on-disk formats: schedule documents, reports, manifests."""

from __future__ import annotations

import configparser
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, TextIO

from . import __version__
from .model import NetworkConfig, derive_config
from .placement import SubfileId
from .scheduler import Assignment, Block, PacketId, Schedule

INT_KEYS = ("k_t", "k_r", "n", "m_t", "m_r", "seed", "k", "m")


def parse_demand(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.replace(",", " ").split())


def read_config_file(path) -> dict[str, Any]:
    """Read ``key = value`` lines (``#`` comments allowed) into a typed dict."""
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read_string("[config]\n" + Path(path).read_text())
    raw = dict(parser["config"])
    out: dict[str, Any] = {}
    for key, value in raw.items():
        if key in INT_KEYS:
            out[key] = int(value)
        elif key == "demand":
            out[key] = parse_demand(value)
        else:
            out[key] = value
    return out


def config_from_mapping(values: dict[str, Any], placement_only: bool = False) -> NetworkConfig:
    missing = [k for k in ("k_t", "k_r", "n", "m_t", "m_r") if k not in values]
    if missing:
        raise KeyError(f"config is missing keys: {', '.join(missing)}")
    return derive_config(values["k_t"], values["k_r"], values["n"], values["m_t"],
                         values["m_r"], placement_only=placement_only)


@dataclass
class RunManifest:
    command: str
    config: dict[str, Any]
    seed: Optional[int] = None
    outputs: list[str] = field(default_factory=list)
    verdict: str = "pass"
    version: str = __version__

    def as_dict(self) -> dict[str, Any]:
        return {"tool": "cachenet", "version": self.version, "command": self.command,
                "seed": self.seed, "config": self.config, "outputs": sorted(self.outputs),
                "verdict": self.verdict}


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


# Schedule documents: a JSON-lines file, header first, then one record per block.


def _assignment_record(a: Assignment) -> dict[str, Any]:
    sf = a.packet.subfile
    return {"receiver": a.receiver, "file": sf.n, "T": list(sf.T), "R": list(sf.R),
            "k": a.packet.k, "zf_targets": list(a.zf_targets)}


def block_record(index: int, b: Block) -> dict[str, Any]:
    ts = {a.transmitters for a in b.assignments}
    return {"block": index, "members": list(b.members),
            "T": list(next(iter(ts))) if len(ts) == 1 else None,
            "assignments": [_assignment_record(a) for a in b.assignments]}


def write_schedule(s: Schedule, fh: TextIO, manifest: Optional[RunManifest] = None) -> None:
    header = {"kind": "schedule", "config": s.cfg.as_dict(), "demand": list(s.demand),
              "delta_hcb": s.delta_hcb, "H": s.H, "total_packets": s.total_packets}
    if manifest is not None:
        header["manifest"] = manifest.as_dict()
    fh.write(dumps(header) + "\n")
    for i, b in enumerate(s.blocks):
        fh.write(dumps(block_record(i, b)) + "\n")


def read_schedule(fh: TextIO) -> Schedule:
    lines = [ln for ln in fh.read().splitlines() if ln.strip()]
    if not lines:
        raise ValueError("empty schedule document")
    header = json.loads(lines[0])
    if header.get("kind") != "schedule":
        raise ValueError("not a schedule document")
    cfg = config_from_mapping(header["config"], placement_only=True)
    blocks = []
    for ln in lines[1:]:
        rec = json.loads(ln)
        out = tuple(
            Assignment(a["receiver"],
                       PacketId(SubfileId(a["file"], tuple(a["T"]), tuple(a["R"])), a["k"]),
                       tuple(a["zf_targets"]))
            for a in rec["assignments"])
        blocks.append(Block(tuple(rec["members"]), out))
    return Schedule(cfg, tuple(header["demand"]), tuple(blocks), header["delta_hcb"])
