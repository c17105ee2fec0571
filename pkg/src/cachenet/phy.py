"""One-shot linear physical layer: channels, zero-forcing and decoding.

Each packet is abstracted to a single complex symbol per block.  The ``t_T``
transmitters storing a packet send it along a cofactor null vector of the
channel towards its ``t_T - 1`` zero-forcing targets; every other block member
either caches the packet and subtracts it, or is one of those targets.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from .errors import DecodeFailure, DegenerateChannel
from .model import NetworkConfig
from .scheduler import Block, Schedule

ZF_TOL = 1e-12
RESIDUAL_TOL = 1e-9

_STREAMS = {"channel": 0, "symbols": 1, "noise": 2, "demand": 3}


def derived_rng(seed: int, role: str) -> np.random.Generator:
    """Independent generator for one role, all driven by the same run seed."""
    return np.random.default_rng([int(seed), _STREAMS[role]])


@dataclass(frozen=True)
class ChannelMatrix:
    """``h[j, i]`` is the gain from Tx_i to Rx_j, constant over the run."""

    h: np.ndarray
    seed: Optional[int] = None


def sample_channel(cfg: NetworkConfig, seed: int) -> ChannelMatrix:
    rng = derived_rng(seed, "channel")
    shape = (cfg.k_r, cfg.k_t)
    h = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return ChannelMatrix(h, seed)


def _h(H) -> np.ndarray:
    return H.h if isinstance(H, ChannelMatrix) else np.asarray(H)


def zf_vector(H, T: Sequence[int], Z: Sequence[int], tol: float = ZF_TOL) -> np.ndarray:
    """Unit-norm beamformer over ``T`` that nulls every receiver in ``Z``.

    Component k is ``(-1)**k * det(H[Z, T] without column k)``: the
    generalized cross product of the rows of ``H[Z, T]``, so each row dotted
    with it is a determinant with a repeated row.
    """
    T, Z = list(T), list(Z)
    if len(Z) != len(T) - 1:
        raise ValueError(f"|Z| = {len(Z)} must equal |T| - 1 = {len(T) - 1}")
    if len(T) == 1:
        return np.ones(1, dtype=complex)
    sub = _h(H)[np.ix_(Z, T)]
    alpha = np.array([(-1) ** k * np.linalg.det(np.delete(sub, k, axis=1))
                      for k in range(len(T))])
    norm = np.linalg.norm(alpha)
    if norm < tol:
        raise DegenerateChannel(f"cofactor vector for T={T}, Z={Z} has norm {norm:.3e}")
    return alpha / norm


def zf_vectors(H, T: np.ndarray, Z: np.ndarray, tol: float = ZF_TOL) -> np.ndarray:
    """Batched :func:`zf_vector` for index arrays ``T`` (B, t) and ``Z`` (B, t-1)."""
    h = _h(H)
    B, t = T.shape
    if t == 1:
        return np.ones((B, 1), dtype=complex)
    sub = h[Z[:, :, None], T[:, None, :]]                     # (B, t-1, t)
    keep = np.array([[c for c in range(t) if c != k] for k in range(t)])
    minors = sub[:, :, keep].transpose(0, 2, 1, 3)            # (B, t, t-1, t-1)
    sign = (-1.0) ** np.arange(t)
    alpha = sign * np.linalg.det(minors)
    norm = np.linalg.norm(alpha, axis=1)
    bad = np.flatnonzero(norm < tol)
    if bad.size:
        b = bad[0]
        raise DegenerateChannel(f"cofactor vector for T={T[b].tolist()}, Z={Z[b].tolist()} "
                                f"has norm {norm[b]:.3e}")
    return alpha / norm[:, None]


@dataclass(frozen=True)
class PacketBeam:
    receiver: int
    transmitters: tuple[int, ...]
    zf_targets: tuple[int, ...]
    alpha: np.ndarray


def beamforming_plan(H, block: Block) -> list[PacketBeam]:
    return [PacketBeam(a.receiver, a.transmitters, a.zf_targets,
                       zf_vector(H, a.transmitters, a.zf_targets))
            for a in block.assignments]


@dataclass(frozen=True)
class ReceiverDecode:
    """Outcome at one intended receiver; ``residual`` is relative to the desired amplitude."""

    block: int
    receiver: int
    gain: float
    residual: float
    error: float

    def __str__(self) -> str:
        return (f"block {self.block} Rx_{self.receiver}: |gain|={self.gain:.3e} "
                f"residual={self.residual:.3e} error={self.error:.3e}")


def _decode(h: np.ndarray, block: Block, alphas: Sequence[np.ndarray], symbols: np.ndarray,
            noise: Optional[np.ndarray], power: float, cancel_cache: bool,
            index: int) -> list[ReceiverDecode]:
    n = len(block.assignments)
    k_t = h.shape[1]
    W = np.zeros((k_t, n), dtype=complex)                    # per-transmitter coefficients
    for p, (a, alpha) in enumerate(zip(block.assignments, alphas)):
        W[list(a.transmitters), p] = alpha
    # One common scale keeps the nulls intact while meeting E|S_i|^2 <= P.
    scale = np.sqrt(power / np.max(np.sum(np.abs(W) ** 2, axis=1)))
    members = list(block.members)
    G = scale * (h[members] @ W)                             # (members, packets)
    y = G @ symbols
    if noise is not None:
        y = y + noise
    out = []
    for m, a in enumerate(block.assignments):
        cached = np.array([a.receiver in b.packet.subfile.R for b in block.assignments])
        cached[m] = False
        interferers = ~cached
        interferers[m] = False
        if cancel_cache:
            clean = y[m] - G[m, cached] @ symbols[cached]
        else:
            clean = y[m]
            interferers |= cached
        desired = G[m, m]
        resid = np.abs(G[m, interferers] @ symbols[interferers]) / np.abs(desired)
        err = np.abs(clean / desired - symbols[m])
        out.append(ReceiverDecode(index, a.receiver, float(np.abs(desired)),
                                  float(resid.max(initial=0.0)), float(err.max())))
    return out


def _check(results: list[ReceiverDecode], tol: float) -> None:
    bad = [r for r in results if not (r.residual <= tol and r.error <= tol)]
    if bad:
        raise DecodeFailure(bad)


def unit_symbols(rng: np.random.Generator, shape) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(shape))


def simulate_block(H, block: Block, noise_power: float = 0.0,
                   symbols: Optional[np.ndarray] = None, *,
                   rng: Optional[np.random.Generator] = None, power: float = 1.0,
                   cancel_cache: bool = True, strict: Optional[bool] = None,
                   index: int = 0) -> list[ReceiverDecode]:
    """Transmit one block and decode at each intended receiver.

    ``symbols`` has one row per packet (block order) and one column per trial.
    ``strict`` (default: noiseless with cache cancellation) raises
    :class:`DecodeFailure` when a residual or decode error exceeds 1e-9.
    """
    h = _h(H)
    rng = rng if rng is not None else np.random.default_rng(0)
    if symbols is None:
        symbols = unit_symbols(rng, (len(block.assignments), 1))
    symbols = np.asarray(symbols, dtype=complex)
    if symbols.ndim == 1:
        symbols = symbols[:, None]
    noise = None
    if noise_power > 0:
        shape = (len(block.members), symbols.shape[1])
        noise = np.sqrt(noise_power / 2) * (rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    alphas = [zf_vector(h, a.transmitters, a.zf_targets) for a in block.assignments]
    results = _decode(h, block, alphas, symbols, noise, power, cancel_cache, index)
    if strict is None:
        strict = noise_power == 0 and cancel_cache
    if strict:
        _check(results, RESIDUAL_TOL)
    return results


@dataclass
class SimulationReport:
    decodes: list[ReceiverDecode]
    H: int
    total_packets: int
    noise_power: float
    trials: int
    failures: list[ReceiverDecode] = field(default_factory=list)

    @property
    def dof(self) -> Optional[Fraction]:
        return Fraction(self.total_packets, self.H) if self.H else None

    @property
    def max_residual(self) -> float:
        return max((r.residual for r in self.decodes), default=0.0)

    @property
    def min_gain(self) -> float:
        return min((r.gain for r in self.decodes), default=float("inf"))

    @property
    def max_error(self) -> float:
        return max((r.error for r in self.decodes), default=0.0)

    @property
    def mean_error(self) -> float:
        return float(np.mean([r.error for r in self.decodes])) if self.decodes else 0.0

    @property
    def passed(self) -> bool:
        return not self.failures


def _plan_alphas(h: np.ndarray, s: Schedule) -> dict[tuple, np.ndarray]:
    keys = sorted({(a.transmitters, a.zf_targets) for b in s.blocks for a in b.assignments})
    if not keys:
        return {}
    T = np.array([k[0] for k in keys])
    Z = np.array([k[1] for k in keys], dtype=int).reshape(len(keys), -1)
    alphas = zf_vectors(h, T, Z)
    return dict(zip(keys, alphas))


def simulate_schedule(cfg: NetworkConfig, s: Schedule, H, noise_power: float = 0.0,
                      trials: int = 1, seed: int = 0, power: float = 1.0,
                      strict: Optional[bool] = None) -> SimulationReport:
    """Run every block of ``s`` over ``trials`` symbol draws."""
    h = _h(H)
    if h.shape != (cfg.k_r, cfg.k_t):
        raise ValueError(f"channel shape {h.shape} does not match ({cfg.k_r}, {cfg.k_t})")
    sym_rng = derived_rng(seed, "symbols")
    noise_rng = derived_rng(seed, "noise")
    alpha = _plan_alphas(h, s)
    decodes: list[ReceiverDecode] = []
    for bi, block in enumerate(s.blocks):
        n = len(block.assignments)
        symbols = unit_symbols(sym_rng, (n, trials))
        noise = None
        if noise_power > 0:
            z = noise_rng.standard_normal((2, n, trials))
            noise = np.sqrt(noise_power / 2) * (z[0] + 1j * z[1])
        alphas = [alpha[(a.transmitters, a.zf_targets)] for a in block.assignments]
        decodes.extend(_decode(h, block, alphas, symbols, noise, power, True, bi))
    if strict is None:
        strict = noise_power == 0
    failures = []
    if noise_power == 0:
        failures = [r for r in decodes
                    if not (r.residual <= RESIDUAL_TOL and r.error <= RESIDUAL_TOL)]
    report = SimulationReport(decodes, s.H, s.total_packets, noise_power, trials, failures)
    if strict and failures:
        raise DecodeFailure(failures)
    return report
