"""Hypercube permutations and circular hypercube arrangements.

A sequence of ``D*t`` labels split into ``t`` dimensions of ``D`` labels is a
hypercube permutation when any two labels of one dimension sit a multiple of
``t`` positions apart.  Equivalently every dimension occupies exactly one
residue class of positions modulo ``t``, which is what the enumerators build
directly.  Circular arrangements are taken up to rotation, represented by the
rotation that puts the smallest label first.
"""

from __future__ import annotations

from itertools import permutations, product
from math import factorial
from typing import Hashable, Iterator, Sequence

from .errors import BadLength, DuplicateLabel, InfeasibleWindow, TooLarge

DEFAULT_CAP = 12

Label = Hashable


def _standard_dims(D: int, t: int) -> list[tuple[int, ...]]:
    return [tuple(range(i * D, (i + 1) * D)) for i in range(t)]


def is_hcb_arrangement(seq: Sequence[Label], dims: Sequence[Sequence[Label]],
                       circular: bool = False) -> bool:
    """Residue-class check of the hypercube condition for arbitrary labels.

    ``circular`` is accepted for symmetry with the definition; since the
    length is a multiple of ``t`` the circular distance is a multiple of ``t``
    exactly when the linear one is, so both variants share one test.
    """
    t = len(dims)
    dim_of = {}
    for i, members in enumerate(dims):
        for u in members:
            if u in dim_of:
                raise DuplicateLabel(f"label {u!r} listed in two dimensions")
            dim_of[u] = i
    if len(seq) != len(dim_of):
        raise BadLength(f"sequence has {len(seq)} labels, expected {len(dim_of)}")
    if len(set(seq)) != len(seq):
        raise DuplicateLabel("sequence repeats a label")
    residue_dim: dict[int, int] = {}
    for pos, u in enumerate(seq):
        if u not in dim_of:
            raise DuplicateLabel(f"label {u!r} is not one of the arrangement's points")
        r = pos % t
        if residue_dim.setdefault(r, dim_of[u]) != dim_of[u]:
            return False
    return True


def is_hypercube_permutation(seq: Sequence[int], D: int, t: int, circular: bool = False) -> bool:
    """Validate ``seq`` over labels ``0..D*t-1`` with dimensions ``{u : u // D == i}``."""
    if len(seq) != D * t:
        raise BadLength(f"sequence has {len(seq)} labels, expected {D * t}")
    if sorted(seq) != list(range(D * t)):
        raise DuplicateLabel(f"{list(seq)} is not a permutation of 0..{D * t - 1}")
    return is_hcb_arrangement(seq, _standard_dims(D, t), circular)


def iter_hcb_arrangements(dims: Sequence[Sequence[Label]]) -> Iterator[tuple]:
    """All linear hypercube arrangements of ``dims`` (unordered)."""
    t = len(dims)
    D = len(dims[0])
    for residue_of in permutations(range(t)):
        for orders in product(*(permutations(m) for m in dims)):
            seq = [None] * (D * t)
            for i, order in enumerate(orders):
                seq[residue_of[i]::t] = order
            yield tuple(seq)


def iter_circular_hcb(dims: Sequence[Sequence[Label]]) -> Iterator[tuple]:
    """Canonical circular hypercube arrangements of ``dims``, one per rotation class.

    The smallest label is pinned at position 0, its dimension takes residue 0
    and every other choice is free, giving ``t!(D!)^t / (Dt)`` classes.
    """
    t = len(dims)
    D = len(dims[0])
    first = min(u for m in dims for u in m)
    i0 = next(i for i, m in enumerate(dims) if first in m)
    rest0 = [u for u in dims[i0] if u != first]
    others = [i for i in range(t) if i != i0]
    for residues in permutations(range(1, t)):
        for order0 in permutations(rest0):
            for orders in product(*(permutations(dims[i]) for i in others)):
                seq = [None] * (D * t)
                seq[0::t] = (first,) + order0
                for r, order in zip(residues, orders):
                    seq[r::t] = order
                yield tuple(seq)


def canonical_rotation(seq: Sequence[Label]) -> tuple:
    p = seq.index(min(seq))
    return tuple(seq[p:]) + tuple(seq[:p])


def successor_window(arrangement: Sequence[Label], pos: int, width: int) -> tuple:
    """The ``width`` labels following position ``pos`` around the circle."""
    n = len(arrangement)
    return tuple(arrangement[(pos + s) % n] for s in range(1, width + 1))


def _check_cap(D: int, t: int, cap: int) -> None:
    if D < 1 or t < 1:
        raise ValueError("D and t must be positive")
    if D * t > cap:
        raise TooLarge(f"D*t = {D * t} exceeds the enumeration cap {cap}")


def enumerate_hypercube_permutations(D: int, t: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    _check_cap(D, t, cap)
    return sorted(iter_hcb_arrangements(_standard_dims(D, t)))


def enumerate_circular_hcb(D: int, t: int, cap: int = DEFAULT_CAP) -> list[tuple[int, ...]]:
    _check_cap(D, t, cap)
    return sorted(iter_circular_hcb(_standard_dims(D, t)))


def hcb_count(D: int, t: int) -> int:
    return factorial(t) * factorial(D) ** t


def circular_hcb_count(D: int, t: int) -> int:
    return hcb_count(D, t) // (D * t)


def enumerate_anchored_arrangements(B: Sequence[Sequence[Label]], anchor: Label,
                                    window: Sequence[Label],
                                    cap: int = DEFAULT_CAP) -> list[tuple]:
    """Circular arrangements of ``B`` whose ``t`` positions after ``anchor`` hold ``window``.

    ``window`` is an unordered constraint set with one member per dimension;
    the arrangement itself fixes the order.
    """
    t = len(B)
    D = len(B[0])
    _check_cap(D, t, cap)
    dim_of = {u: i for i, m in enumerate(B) for u in m}
    if anchor not in dim_of:
        raise InfeasibleWindow(f"anchor {anchor!r} is not in the block")
    wset = set(window)
    if (len(wset) != t or anchor in wset or any(u not in dim_of for u in wset)
            or {dim_of[u] for u in wset} != set(range(t))):
        raise InfeasibleWindow(f"window {sorted(window)} must hold one non-anchor member per dimension")
    out = []
    for arr in iter_circular_hcb(B):
        p = arr.index(anchor)
        if set(successor_window(arr, p, t)) == wset:
            out.append(arr)
    return sorted(out)


def anchored_count(t: int, delta: int) -> int:
    """Closed form for ``enumerate_anchored_arrangements`` with ``D = delta + 1``."""
    return factorial(t - 1) * factorial(delta) ** t // delta
