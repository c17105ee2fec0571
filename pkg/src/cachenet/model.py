"""Network configuration, dimension partitions and demand vectors."""

from __future__ import annotations

from dataclasses import dataclass
from math import lcm
from typing import Sequence

from .errors import (
    BadLength,
    DimensionTooSmall,
    FileIndexOutOfRange,
    InsufficientTxMemory,
    NonDivisible,
    NonIntegerDelta,
)

Demand = tuple[int, ...]


@dataclass(frozen=True)
class NetworkConfig:
    """Validated system parameters of a cache-aided interference network.

    ``k_t``/``k_r`` transmitters/receivers, ``n`` files, caches of ``m_t``/``m_r``
    files.  ``d_t``/``d_r`` are the points per dimension (``n/m_t``, ``n/m_r``),
    ``t_t``/``t_r`` the number of dimensions on each side and ``delta`` their
    ratio.  ``schedulable`` is False for configs that only pass the placement
    constraints (``d_r < delta + 1``).
    """

    k_t: int
    k_r: int
    n: int
    m_t: int
    m_r: int
    d_t: int
    d_r: int
    t_t: int
    t_r: int
    delta: int
    schedulable: bool = True

    @property
    def block_size(self) -> int:
        return self.t_t + self.t_r

    def as_dict(self) -> dict:
        return {"k_t": self.k_t, "k_r": self.k_r, "n": self.n,
                "m_t": self.m_t, "m_r": self.m_r}


@dataclass(frozen=True)
class DimensionPartition:
    tx_dims: tuple[tuple[int, ...], ...]
    rx_dims: tuple[tuple[int, ...], ...]
    d_t: int
    d_r: int

    def tx_dim_of(self, i: int) -> int:
        return i // self.d_t

    def rx_dim_of(self, j: int) -> int:
        return j // self.d_r


def _require_positive(**values):
    for name, v in values.items():
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise ValueError(f"{name} must be a positive integer, got {v!r}")


def derive_config(k_t: int, k_r: int, n: int, m_t: int, m_r: int,
                  placement_only: bool = False) -> NetworkConfig:
    """Validate raw parameters and derive the hypercube dimensions.

    With ``placement_only=True`` a config violating only ``d_r >= delta + 1``
    is returned with ``schedulable=False`` instead of raising.
    """
    _require_positive(k_t=k_t, k_r=k_r, n=n, m_t=m_t, m_r=m_r)
    if n % m_t:
        raise NonDivisible(f"N/M_T = {n}/{m_t} is not an integer")
    if n % m_r:
        raise NonDivisible(f"N/M_R = {n}/{m_r} is not an integer")
    if k_t * m_t < n:
        raise InsufficientTxMemory(
            f"K_T*M_T = {k_t * m_t} < N = {n}: library not cached at transmitters")
    d_t, d_r = n // m_t, n // m_r
    if k_t % d_t:
        raise NonDivisible(f"K_T/D_T = {k_t}/{d_t} is not an integer")
    if k_r % d_r:
        raise NonDivisible(f"K_R/D_R = {k_r}/{d_r} is not an integer")
    t_t, t_r = k_t // d_t, k_r // d_r
    if t_t % t_r:
        raise NonIntegerDelta(f"t_T/t_R = {t_t}/{t_r} is not an integer")
    delta = t_t // t_r
    assert (t_t + t_r) * n == k_t * m_t + k_r * m_r
    schedulable = d_r >= delta + 1
    if not schedulable and not placement_only:
        raise DimensionTooSmall(f"D_R = {d_r} < delta + 1 = {delta + 1}")
    return NetworkConfig(k_t, k_r, n, m_t, m_r, d_t, d_r, t_t, t_r, delta,
                         schedulable)


def config_from_dimensions(d_t: int, t_t: int, d_r: int, t_r: int,
                           n: int | None = None,
                           placement_only: bool = False) -> NetworkConfig:
    """Build a config from dimension sizes; ``n`` defaults to lcm(d_t, d_r)."""
    if n is None:
        n = lcm(d_t, d_r)
    if n % d_t or n % d_r:
        raise NonDivisible(f"N = {n} is not a multiple of both {d_t} and {d_r}")
    return derive_config(d_t * t_t, d_r * t_r, n, n // d_t, n // d_r,
                         placement_only=placement_only)


def partition_dimensions(cfg: NetworkConfig) -> DimensionPartition:
    tx = tuple(tuple(range(i * cfg.d_t, (i + 1) * cfg.d_t)) for i in range(cfg.t_t))
    rx = tuple(tuple(range(j * cfg.d_r, (j + 1) * cfg.d_r)) for j in range(cfg.t_r))
    return DimensionPartition(tx, rx, cfg.d_t, cfg.d_r)


def validate_demand(cfg: NetworkConfig, d: Sequence[int]) -> Demand:
    d = tuple(d)
    if len(d) != cfg.k_r:
        raise BadLength(f"demand has {len(d)} entries, expected K_R = {cfg.k_r}")
    for j, f in enumerate(d):
        if isinstance(f, bool) or not isinstance(f, int) or not 0 <= f < cfg.n:
            raise FileIndexOutOfRange(f"receiver {j} requests file {f!r} not in [0, {cfg.n})")
    return d


def distinct_demand(cfg: NetworkConfig) -> Demand:
    """Receiver j requests file j mod N (all distinct when N >= K_R)."""
    return tuple(j % cfg.n for j in range(cfg.k_r))
