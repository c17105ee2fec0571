"""Delivery scheduling: subpacketization, block construction and validation.

Every block serves ``t_T + t_R`` receivers at once.  Its receiver set holds
``delta + 1`` receivers from each receiver dimension arranged as a circular
hypercube permutation; each member gets a packet of the subfile cached by the
``t_R`` receivers following it, so those receivers cancel it from their cache
and the remaining ``t_T - 1`` members are zero-forced by the ``t_T``
transmitters that store it.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, product
from math import comb, factorial
from typing import NamedTuple, Optional

from .combinatorics import is_hcb_arrangement, iter_circular_hcb, successor_window
from .errors import Infeasible, NotApplicable, TooLarge
from .model import Demand, DimensionPartition, NetworkConfig
from .placement import PlacementMap, SubfileId, needed_subfiles

ORACLE_CAP = 64


class PacketId(NamedTuple):
    subfile: SubfileId
    k: int


class Assignment(NamedTuple):
    """One (receiver, packet) delivery inside a block."""

    receiver: int
    packet: PacketId
    zf_targets: tuple[int, ...]

    @property
    def transmitters(self) -> tuple[int, ...]:
        return self.packet.subfile.T


@dataclass(frozen=True)
class Block:
    """``members`` is the circular order; ``assignments`` follow the same order."""

    members: tuple[int, ...]
    assignments: tuple[Assignment, ...]


@dataclass(frozen=True)
class Schedule:
    cfg: NetworkConfig
    demand: Demand
    blocks: tuple[Block, ...]
    delta_hcb: int

    @property
    def H(self) -> int:
        return len(self.blocks)

    @property
    def total_packets(self) -> int:
        return sum(len(b.assignments) for b in self.blocks)


def delta_hcb(cfg: NetworkConfig) -> int:
    """Number of packets each needed subfile is split into."""
    d_r, dl, t_r = cfg.d_r, cfg.delta, cfg.t_r
    if d_r < dl + 1:
        raise NotApplicable(f"D_R = {d_r} < delta + 1 = {dl + 1}")
    num = (comb(d_r - 2, dl - 1) * comb(d_r - 1, dl) ** (t_r - 1)
           * factorial(dl) ** t_r * factorial(t_r - 1))
    assert num % dl == 0
    return num // dl


def block_count(cfg: NetworkConfig) -> int:
    """H of the structured schedule (zero when receivers cache everything)."""
    dl, t_r = cfg.delta, cfg.t_r
    if cfg.d_r == 1:
        return 0
    arrangements = factorial(t_r) * factorial(dl + 1) ** t_r // ((dl + 1) * t_r)
    return cfg.d_t ** cfg.t_t * comb(cfg.d_r, dl + 1) ** t_r * arrangements


def build_schedule(cfg: NetworkConfig, dims: DimensionPartition, pm: PlacementMap,
                   d: Demand) -> Schedule:
    if not cfg.schedulable or cfg.d_r < cfg.delta + 1:
        raise NotApplicable(f"D_R = {cfg.d_r} < delta + 1 = {cfg.delta + 1}")
    dl, t_r = cfg.delta, cfg.t_r
    used: Counter = Counter()
    blocks = []
    for T in product(*dims.tx_dims):
        for B in product(*(combinations(dim, dl + 1) for dim in dims.rx_dims)):
            for arr in iter_circular_hcb(B):
                members = set(arr)
                out = []
                for pos, a in enumerate(arr):
                    window = successor_window(arr, pos, t_r)
                    sf = SubfileId(d[a], T, tuple(sorted(window)))
                    key = (a, sf)
                    k = used[key]
                    used[key] = k + 1
                    zf = tuple(sorted(members.difference(window, (a,))))
                    out.append(Assignment(a, PacketId(sf, k), zf))
                blocks.append(Block(arr, tuple(out)))
    return Schedule(cfg, tuple(d), tuple(blocks), delta_hcb(cfg))


def subpacket_usage(s: Schedule) -> Counter:
    """How many packets of each (receiver, subfile) pair the schedule delivers."""
    return Counter((a.receiver, a.packet.subfile) for b in s.blocks for a in b.assignments)


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    violation: Optional[str] = None
    block: Optional[int] = None
    message: str = ""

    def __bool__(self) -> bool:
        return self.ok


def _fail(kind: str, block: Optional[int], msg: str) -> ValidationReport:
    return ValidationReport(False, kind, block, msg)


def validate_schedule(cfg: NetworkConfig, pm: PlacementMap, d: Demand, s: Schedule,
                      structural: bool = True) -> ValidationReport:
    """Check a schedule against the placement and demand; never raises.

    ``structural`` additionally requires every block's member order to be a
    balanced circular hypercube arrangement (the constructor's shape).
    Schedules found by the exact-cover oracle carry no such order.
    """
    size = cfg.t_t + cfg.t_r
    try:
        dl = delta_hcb(cfg)
    except NotApplicable as e:
        return _fail("NotApplicable", None, str(e))
    delivered: Counter = Counter()
    for bi, block in enumerate(s.blocks):
        members = block.members
        if len(members) != size or len(block.assignments) != size:
            return _fail("BlockSizeViolation", bi,
                         f"{len(members)} members / {len(block.assignments)} packets, expected {size}")
        mset = set(members)
        if len(mset) != size:
            return _fail("DuplicateMember", bi, f"members {members} repeat a receiver")
        if [a.receiver for a in block.assignments] != list(members):
            return _fail("AssignmentMismatch", bi, "assignments do not follow member order")
        for a in block.assignments:
            sf = a.packet.subfile
            if not 0 <= a.receiver < cfg.k_r:
                return _fail("UnknownReceiver", bi, f"receiver {a.receiver}")
            if sf.n != d[a.receiver]:
                return _fail("WrongFile", bi,
                             f"Rx_{a.receiver} requested file {d[a.receiver]}, got {sf.n}")
            if sf in pm.rx_cache[a.receiver]:
                return _fail("SelfCacheViolation", bi,
                             f"Rx_{a.receiver} already caches {sf.label()}")
            holders = {j for j in sf.R if sf in pm.rx_cache[j]}
            if len(holders) != cfg.t_r or not holders <= mset - {a.receiver}:
                return _fail("CacheCoverageViolation", bi,
                             f"{sf.label()} cache set {sf.R} not inside block {members}")
            if len(sf.T) != cfg.t_t or any(sf not in pm.tx_cache[i] for i in sf.T):
                return _fail("TransmitterViolation", bi,
                             f"transmitters {sf.T} do not all store {sf.label()}")
            expected_zf = tuple(sorted(mset - holders - {a.receiver}))
            if tuple(sorted(a.zf_targets)) != expected_zf or len(expected_zf) != cfg.t_t - 1:
                return _fail("ZeroForcingViolation", bi,
                             f"Rx_{a.receiver}: zf targets {a.zf_targets}, expected {expected_zf}")
            if not 0 <= a.packet.k < dl:
                return _fail("SubpacketIndexViolation", bi, f"k = {a.packet.k} not in [0, {dl})")
            key = (a.receiver, a.packet)
            delivered[key] += 1
            if delivered[key] > 1:
                return _fail("DuplicatePacket", bi,
                             f"Rx_{a.receiver} receives {sf.label()}#{a.packet.k} twice")
        if structural:
            per_dim = Counter(j // cfg.d_r for j in members)
            if set(per_dim.values()) != {cfg.delta + 1} or len(per_dim) != cfg.t_r:
                return _fail("DimensionBalanceViolation", bi,
                             f"members {members} do not hold delta+1 per receiver dimension")
            dims = [sorted(m for m in members if m // cfg.d_r == i) for i in sorted(per_dim)]
            if not is_hcb_arrangement(members, dims, circular=True):
                return _fail("ArrangementViolation", bi,
                             f"{members} is not a circular hypercube arrangement")
    needed = set()
    for j in range(cfg.k_r):
        for sf in needed_subfiles(cfg, pm, d, j):
            for k in range(dl):
                needed.add((j, PacketId(sf, k)))
    missing = needed - delivered.keys()
    if missing:
        j, p = min(missing)
        return _fail("MissingPacket", None,
                     f"{len(missing)} needed packets undelivered, e.g. Rx_{j} {p.subfile.label()}#{p.k}")
    extra = delivered.keys() - needed
    if extra:
        j, p = min(extra)
        return _fail("UnexpectedPacket", None, f"Rx_{j} {p.subfile.label()}#{p.k} is not needed")
    return ValidationReport(True)


class ScheduleStats(NamedTuple):
    H: int
    total_packets: int
    dof: Optional[Fraction]


def schedule_stats(s: Schedule) -> ScheduleStats:
    H, total = s.H, s.total_packets
    return ScheduleStats(H, total, Fraction(total, H) if H else None)


# Exact-cover oracle


def build_schedule_oracle(cfg: NetworkConfig, pm: PlacementMap, d: Demand,
                          cap: int = ORACLE_CAP,
                          subpackets: Optional[int] = None) -> Schedule:
    """Exhaustive search for a minimum-H schedule on tiny instances.

    A block can hold at most ``t_T + t_R`` packets: each packet reaches at most
    ``t_R`` members through their caches and ``t_T`` transmitters null it at no
    more than ``t_T - 1`` others.  So ``H >= packets / (t_T + t_R)``, and an exact
    cover by full blocks is optimal.  The search uses only these physical
    rules, not the hypercube arrangement structure.

    ``subpackets`` overrides the split factor (default: Delta_HCB), which lets
    the search probe configs outside the constructor's regime.
    """
    if subpackets is None:
        subpackets = delta_hcb(cfg)
    size = cfg.t_t + cfg.t_r
    items = [(j, sf) for j in range(cfg.k_r) for sf in needed_subfiles(cfg, pm, d, j)]
    total = len(items) * subpackets
    if total > cap:
        raise TooLarge(f"{total} packets exceed the oracle cap {cap}")
    if total == 0:
        return Schedule(cfg, tuple(d), (), subpackets)
    if size > cfg.k_r or total % size:
        raise Infeasible(f"{total} packets cannot fill blocks of {size} among {cfg.k_r} receivers")

    by_receiver: dict[int, list[int]] = {}
    for idx, (j, _) in enumerate(items):
        by_receiver.setdefault(j, []).append(idx)
    candidates: list[tuple[int, ...]] = []
    for members in combinations(range(cfg.k_r), size):
        mset = set(members)
        options = []
        for a in members:
            opts = [i for i in by_receiver.get(a, ()) if set(items[i][1].R) <= mset - {a}]
            if not opts:
                break
            options.append(opts)
        else:
            candidates.extend(product(*options))
    containing: list[list[int]] = [[] for _ in items]
    for c, cand in enumerate(candidates):
        for i in cand:
            containing[i].append(c)

    remaining = [subpackets] * len(items)
    chosen: list[int] = []
    dead: set[tuple[int, ...]] = set()

    def search() -> bool:
        state = tuple(remaining)
        if state in dead:
            return False
        best, best_opts = None, None
        for i, r in enumerate(remaining):
            if r:
                opts = [c for c in containing[i] if all(remaining[x] for x in candidates[c])]
                if best_opts is None or len(opts) < len(best_opts):
                    best, best_opts = i, opts
                    if not opts:
                        break
        if best is None:
            return True
        for c in best_opts:
            for x in candidates[c]:
                remaining[x] -= 1
            chosen.append(c)
            if search():
                return True
            chosen.pop()
            for x in candidates[c]:
                remaining[x] += 1
        dead.add(state)
        return False

    if not search():
        raise Infeasible(f"no partition of {total} packets into blocks of {size}")

    used: Counter = Counter()
    blocks = []
    for c in chosen:
        members = tuple(items[i][0] for i in candidates[c])
        mset = set(members)
        out = []
        for i in candidates[c]:
            a, sf = items[i]
            k = used[(a, sf)]
            used[(a, sf)] += 1
            out.append(Assignment(a, PacketId(sf, k), tuple(sorted(mset - set(sf.R) - {a}))))
        blocks.append(Block(members, tuple(out)))
    return Schedule(cfg, tuple(d), tuple(blocks), subpackets)
