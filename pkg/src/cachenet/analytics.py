"""Subpacketization counts, sum-DoF and the hypercube-vs-baseline gap G.

All counts are exact Python integers.  G is kept as a Fraction and its
log10 is taken from the integer numerator and denominator, so it stays
finite even when G itself underflows a float.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, Optional

from .errors import NotApplicable
from .model import NetworkConfig, config_from_dimensions
from .scheduler import delta_hcb


def delta_nma(cfg: NetworkConfig) -> int:
    if cfg.k_r - cfg.t_r - 1 < cfg.t_t - 1:
        raise NotApplicable(f"K_R - t_R - 1 = {cfg.k_r - cfg.t_r - 1} < t_T - 1 = {cfg.t_t - 1}")
    return factorial(cfg.t_r) * comb(cfg.k_r - cfg.t_r - 1, cfg.t_t - 1) * factorial(cfg.t_t - 1)


def _log10_fraction(x: Fraction) -> float:
    return math.log10(x.numerator) - math.log10(x.denominator)


@dataclass(frozen=True)
class SubpacketizationReport:
    F_total_hcb: int
    F_hcb: int
    F_nma: int
    delta_hcb: int
    delta_nma: int
    G: Fraction

    @property
    def log10_G(self) -> float:
        return _log10_fraction(self.G)


def subpacketization_report(cfg: NetworkConfig) -> SubpacketizationReport:
    dh = delta_hcb(cfg)
    dn = delta_nma(cfg)
    f_total = cfg.d_t ** cfg.t_t * cfg.d_r ** cfg.t_r * dh
    f_hcb = cfg.d_t ** cfg.t_t * cfg.d_r ** (cfg.t_r - 1) * (cfg.d_r - 1) * dh
    f_nma = comb(cfg.k_t, cfg.t_t) * comb(cfg.k_r - 1, cfg.t_r) * dn
    return SubpacketizationReport(f_total, f_hcb, f_nma, dh, dn, Fraction(f_hcb, f_nma))


def sum_dof(cfg: NetworkConfig) -> Fraction:
    return min(Fraction(cfg.m_t * cfg.k_t + cfg.k_r * cfg.m_r, cfg.n), Fraction(cfg.k_r))


def symmetric_config(d: int, t: int, delta: int) -> NetworkConfig:
    """``t_T = delta*t``, ``t_R = t``, ``D_T = D_R = d`` (so ``N = d``, ``M = 1``)."""
    return config_from_dimensions(d, delta * t, d, t, n=d)


def gap(d: int, t: int, delta: int) -> Fraction:
    return subpacketization_report(symmetric_config(d, t, delta)).G


@dataclass(frozen=True)
class GapAsymptotics:
    d: Optional[int]
    t: int
    delta: int
    limit_d: float
    K0: Optional[float] = None
    bound: Optional[float] = None


def log_limit_d(t: int, delta: int) -> float:
    """Natural log of the d -> infinity limit of G(d, t, delta)."""
    return (math.lgamma(t) + math.lgamma(delta * t + 1)
            - delta * t * math.log(delta) - ((2 * delta + 1) * t - 1) * math.log(t))


def gap_asymptotics(d: Optional[int], t: int, delta: int) -> GapAsymptotics:
    """Limit in d and, for ``delta >= 2`` with ``d`` given, the large-t bound on G."""
    if delta < 1 or t < 1:
        raise ValueError("t and delta must be positive")
    limit = math.exp(log_limit_d(t, delta))
    if delta < 2 or d is None:
        return GapAsymptotics(d, t, delta, limit)
    if d < delta + 1:
        raise NotApplicable(f"d = {d} < delta + 1 = {delta + 1}")
    k0 = 2 * math.pi / d * math.sqrt(delta * (d - delta - 1) / (d - 1))
    if k0 == 0:
        bound = 0.0
    else:
        bound = math.exp(math.log(k0) - ((delta - 1) * t - 1) * math.log(t))
    return GapAsymptotics(d, t, delta, limit, k0, bound)


SWEEP_COLUMNS = ("param", "d", "t", "delta", "F_hcb", "F_nma", "G", "log10_G",
                 "bound", "bound_holds", "note")


@dataclass(frozen=True)
class SweepRow:
    param: int
    d: int
    t: int
    delta: int
    F_hcb: Optional[int] = None
    F_nma: Optional[int] = None
    G: Optional[Fraction] = None
    log10_G: Optional[float] = None
    bound: Optional[float] = None
    bound_holds: Optional[bool] = None
    note: str = ""

    def as_record(self) -> list:
        g = "" if self.G is None else repr(float(self.G))
        lg = "" if self.log10_G is None else repr(self.log10_G)
        bd = "" if self.bound is None else repr(self.bound)
        bh = "" if self.bound_holds is None else str(self.bound_holds).lower()
        return [self.param, self.d, self.t, self.delta,
                "" if self.F_hcb is None else self.F_hcb,
                "" if self.F_nma is None else self.F_nma, g, lg, bd, bh, self.note]


@dataclass(frozen=True)
class SweepResult:
    mode: str
    rows: tuple[SweepRow, ...]

    @property
    def valid_rows(self) -> list[SweepRow]:
        return [r for r in self.rows if r.G is not None]

    @property
    def strictly_decreasing(self) -> bool:
        g = [r.G for r in self.valid_rows]
        return all(a > b for a, b in zip(g, g[1:]))

    @property
    def bound_threshold(self) -> Optional[int]:
        """Smallest parameter value at which the large-t bound first holds."""
        for r in self.valid_rows:
            if r.bound_holds:
                return r.param
        return None


def sweep_point(param: int, d: int, t: int, delta: int) -> SweepRow:
    if d < delta + 1:
        return SweepRow(param, d, t, delta, note=f"skipped: d < delta + 1 = {delta + 1}")
    try:
        rep = subpacketization_report(symmetric_config(d, t, delta))
    except NotApplicable as e:
        return SweepRow(param, d, t, delta, note=f"skipped: {e}")
    bound = holds = None
    if delta >= 2:
        bound = gap_asymptotics(d, t, delta).bound
        holds = float(rep.G) <= bound
    return SweepRow(param, d, t, delta, rep.F_hcb, rep.F_nma, rep.G, rep.log10_G, bound, holds)


def sweep_gap(mode: str, values: Iterable[int], *, d: Optional[int] = None,
              t: Optional[int] = None, delta: int = 1) -> SweepResult:
    """Evaluate G over a range of ``t`` (``mode='vary-t'``, fixed ``d``) or of ``d``."""
    if mode == "vary-t":
        if d is None:
            raise ValueError("vary-t needs a fixed d")
        rows = tuple(sweep_point(v, d, v, delta) for v in values)
    elif mode == "vary-d":
        if t is None:
            raise ValueError("vary-d needs a fixed t")
        rows = tuple(sweep_point(v, v, t, delta) for v in values)
    else:
        raise ValueError(f"unknown sweep mode {mode!r}")
    return SweepResult(mode, rows)
