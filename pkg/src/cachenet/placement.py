"""Hypercube cache placement for transmitters/receivers and for D2D users."""

from __future__ import annotations

import csv
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb
from typing import Iterator, NamedTuple, TextIO

from .errors import MemoryViolation, NonDivisible
from .model import DimensionPartition, NetworkConfig, Demand


class SubfileId(NamedTuple):
    """Fragment of file ``n`` stored at transmitter set ``T`` and receiver set ``R``.

    ``T`` and ``R`` are sorted tuples; with floor-based dimensions the i-th
    entry is the member taken from dimension i.
    """

    n: int
    T: tuple[int, ...]
    R: tuple[int, ...]

    def label(self) -> str:
        return f"{self.n}:{''.join(map(str, self.T))},{''.join(map(str, self.R))}"


@dataclass(frozen=True)
class PlacementMap:
    cfg: NetworkConfig
    dims: DimensionPartition
    tx_cache: tuple[frozenset[SubfileId], ...]
    rx_cache: tuple[frozenset[SubfileId], ...]
    subfiles_per_file: int

    def subfiles(self, n: int | None = None) -> Iterator[SubfileId]:
        """Canonical (lexicographic) enumeration of all subfiles, or of file ``n``."""
        files = range(self.cfg.n) if n is None else (n,)
        for f in files:
            for T in product(*self.dims.tx_dims):
                for R in product(*self.dims.rx_dims):
                    yield SubfileId(f, T, R)


def place_hypercube(cfg: NetworkConfig, dims: DimensionPartition) -> PlacementMap:
    tx: list[set[SubfileId]] = [set() for _ in range(cfg.k_t)]
    rx: list[set[SubfileId]] = [set() for _ in range(cfg.k_r)]
    for f in range(cfg.n):
        for T in product(*dims.tx_dims):
            for R in product(*dims.rx_dims):
                sf = SubfileId(f, T, R)
                for i in T:
                    tx[i].add(sf)
                for j in R:
                    rx[j].add(sf)
    return PlacementMap(
        cfg, dims,
        tuple(frozenset(s) for s in tx),
        tuple(frozenset(s) for s in rx),
        cfg.d_t ** cfg.t_t * cfg.d_r ** cfg.t_r,
    )


@dataclass(frozen=True)
class MemoryReport:
    """Cache loads in units of files (subfiles stored / subfiles per file)."""

    tx_loads: tuple[Fraction, ...]
    rx_loads: tuple[Fraction, ...]
    m_t: int
    m_r: int

    @property
    def ok(self) -> bool:
        return (all(x == self.m_t for x in self.tx_loads)
                and all(x == self.m_r for x in self.rx_loads))


def verify_memory(cfg: NetworkConfig, pm: PlacementMap) -> MemoryReport:
    """Check every node stores exactly its cache budget.

    A subfile holds ``F / subfiles_per_file`` packets, so a node storing ``s``
    subfiles uses ``s / subfiles_per_file`` files worth of memory regardless
    of ``F``.
    """
    spf = pm.subfiles_per_file
    tx = tuple(Fraction(len(c), spf) for c in pm.tx_cache)
    rx = tuple(Fraction(len(c), spf) for c in pm.rx_cache)
    for i, load in enumerate(tx):
        if load != cfg.m_t:
            raise MemoryViolation(f"Tx_{i}", load, cfg.m_t)
    for j, load in enumerate(rx):
        if load != cfg.m_r:
            raise MemoryViolation(f"Rx_{j}", load, cfg.m_r)
    return MemoryReport(tx, rx, cfg.m_t, cfg.m_r)


def needed_subfiles(cfg: NetworkConfig, pm: PlacementMap, d: Demand, j: int) -> list[SubfileId]:
    cached = pm.rx_cache[j]
    return [sf for sf in pm.subfiles(d[j]) if sf not in cached]


def needed_count(cfg: NetworkConfig) -> int:
    return cfg.d_t ** cfg.t_t * (cfg.d_r - 1) * cfg.d_r ** (cfg.t_r - 1)


def nma_subfile_count(cfg: NetworkConfig) -> int:
    return comb(cfg.k_t, cfg.t_t) * comb(cfg.k_r, cfg.t_r)


def placement_records(pm: PlacementMap) -> list[tuple[SubfileId, tuple[int, ...], tuple[int, ...]]]:
    """(subfile, caching transmitters, caching receivers), read back from the caches."""
    holders_tx: dict[SubfileId, list[int]] = {}
    holders_rx: dict[SubfileId, list[int]] = {}
    for i, cache in enumerate(pm.tx_cache):
        for sf in cache:
            holders_tx.setdefault(sf, []).append(i)
    for j, cache in enumerate(pm.rx_cache):
        for sf in cache:
            holders_rx.setdefault(sf, []).append(j)
    return [(sf, tuple(holders_tx.get(sf, ())), tuple(holders_rx.get(sf, ())))
            for sf in pm.subfiles()]


def write_placement_table(pm: PlacementMap, fh: TextIO) -> None:
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["file", "T", "R", "caching_tx", "caching_rx"])
    for sf, txs, rxs in placement_records(pm):
        w.writerow([sf.n, " ".join(map(str, sf.T)), " ".join(map(str, sf.R)),
                    " ".join(map(str, txs)), " ".join(map(str, rxs))])


# D2D placement


@dataclass(frozen=True)
class D2DPlacementMap:
    k: int
    n: int
    m: int
    t: int
    points: int
    user_cache: tuple[frozenset[tuple[int, tuple[int, ...]]], ...]

    @property
    def packets_per_file(self) -> int:
        return self.points ** self.t

    def caching_users(self, coord: tuple[int, ...]) -> tuple[int, ...]:
        # Dimension j is served by user j*points + coord[j].
        return tuple(j * self.points + c for j, c in enumerate(coord))


def place_d2d(k: int, n: int, m: int) -> D2DPlacementMap:
    """Each user caches the hyperplane ``coord[u // (n/m)] == u % (n/m)`` of every file."""
    if n % m:
        raise NonDivisible(f"N/M = {n}/{m} is not an integer")
    if (k * m) % n:
        raise NonDivisible(f"t = KM/N = {k * m}/{n} is not an integer")
    points, t = n // m, k * m // n
    if k != t * points:
        raise NonDivisible(f"K = {k} is not t*(N/M) = {t * points}")
    coords = list(product(range(points), repeat=t))
    caches = []
    for u in range(k):
        j, ell = divmod(u, points)
        caches.append(frozenset((f, c) for f in range(n) for c in coords if c[j] == ell))
    return D2DPlacementMap(k, n, m, t, points, tuple(caches))
