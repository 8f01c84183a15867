"""Canonical finite encoding of generalized-information sets.

A generalized information is a set of tuples ``(w1, ..., wk)`` of outcomes.
Every construction used here only looks at the first entry and at the
*set* of the remaining entries, so a set is stored as a Boolean table
``phi[w0, b]`` with ``w0`` an outcome index and ``b`` a bitmask over
outcomes: ``phi[w0, b]`` is true iff every tuple whose first entry is
``w0`` and whose remaining entries form exactly the set ``b`` is a member.
The length-1 tuple ``(w0)`` corresponds to ``b = 0``.

Complements are taken relative to ``G(Omega)``, the set of all tuples.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from functools import lru_cache

import numpy as np

from .errors import ContainmentError, DisjointnessError, SpaceMismatchError
from .probability import Event, FiniteProbSpace, RandomVariable

__all__ = [
    "CanonicalSet",
    "from_event",
    "from_rv",
    "cross",
    "relative",
    "multi",
    "from_labeling_family",
    "full",
    "empty",
    "union",
    "intersect",
    "difference",
    "complement",
    "is_empty",
    "is_subset",
    "is_disjoint",
    "contains_tuple",
    "alternating_sums",
    "is_measure_finite",
]


@lru_cache(maxsize=None)
def _masks(n: int) -> np.ndarray:
    return np.arange(1 << n, dtype=np.int64)


@lru_cache(maxsize=None)
def _popcount(n: int) -> np.ndarray:
    m = _masks(n)
    pc = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        pc += (m >> j) & 1
    return pc


@lru_cache(maxsize=None)
def _with_first(n: int) -> np.ndarray:
    """``tuple_set[w0, b] = b | (1 << w0)``: the set of all entries of the tuple."""
    return _masks(n)[None, :] | (np.int64(1) << np.arange(n, dtype=np.int64))[:, None]


class CanonicalSet:
    """An element of the field of generalized-information sets over a finite space.

    Instances are immutable; Boolean operators return new sets:
    ``a | b`` (union), ``a & b`` (intersection), ``a - b`` (difference) and
    ``~a`` (complement relative to ``G(Omega)``).
    """

    __slots__ = ("space", "phi")

    def __init__(self, space: FiniteProbSpace, phi: np.ndarray):
        phi = np.asarray(phi, dtype=bool)
        if phi.shape != (space.n, 1 << space.n):
            raise ValueError(f"phi must have shape {(space.n, 1 << space.n)}, got {phi.shape}")
        if phi.flags.writeable:
            phi = phi.copy()
            phi.flags.writeable = False
        object.__setattr__(self, "space", space)
        object.__setattr__(self, "phi", phi)

    def __setattr__(self, name, value):
        raise AttributeError("CanonicalSet is immutable")

    def _other(self, other: CanonicalSet) -> np.ndarray:
        if not isinstance(other, CanonicalSet):
            raise TypeError(f"expected CanonicalSet, got {type(other).__name__}")
        if other.space is not self.space and other.space != self.space:
            raise SpaceMismatchError("sets live on different spaces")
        return other.phi

    def __or__(self, other):
        return CanonicalSet(self.space, self.phi | self._other(other))

    def __and__(self, other):
        return CanonicalSet(self.space, self.phi & self._other(other))

    def __sub__(self, other):
        return CanonicalSet(self.space, self.phi & ~self._other(other))

    def __xor__(self, other):
        return CanonicalSet(self.space, self.phi ^ self._other(other))

    def __invert__(self):
        return CanonicalSet(self.space, ~self.phi)

    def __eq__(self, other):
        if not isinstance(other, CanonicalSet):
            return NotImplemented
        return self.space == other.space and bool(np.array_equal(self.phi, other.phi))

    __hash__ = None

    def __le__(self, other):
        return is_subset(self, other)

    def __contains__(self, tup) -> bool:
        return contains_tuple(self, tup)

    def __repr__(self) -> str:
        return f"CanonicalSet(n={self.space.n}, members={int(self.phi.sum())})"

    def row(self, u) -> np.ndarray:
        """The table ``b -> phi[u, b]`` for one first entry."""
        return self.phi[self.space.index(u)]


def _space_of(*events: Event) -> FiniteProbSpace:
    space = events[0].space
    for E in events[1:]:
        if E.space != space:
            raise SpaceMismatchError("events live on different spaces")
    return space


def full(space: FiniteProbSpace) -> CanonicalSet:
    """``G(Omega)``: every tuple."""
    return CanonicalSet(space, np.ones((space.n, 1 << space.n), dtype=bool))


def empty(space: FiniteProbSpace) -> CanonicalSet:
    return CanonicalSet(space, np.zeros((space.n, 1 << space.n), dtype=bool))


def cross(E: Event, F: Event) -> CanonicalSet:
    """``G(E, F)``: first entry in ``E``, remaining entries in ``F``."""
    space = _space_of(E, F)
    n = space.n
    first = np.array([bool(E.members >> i & 1) for i in range(n)])[:, None]
    rest = (_masks(n) & ~F.members) == 0
    return CanonicalSet(space, first & rest[None, :])


def from_event(E: Event) -> CanonicalSet:
    """``G(E)``: all tuples with every entry in ``E``."""
    return cross(E, E)


def relative(E: Event, F: Event) -> CanonicalSet:
    """``G(E || F) = G(E, F) minus G(E)`` for ``E <= F``."""
    if not E.issubset(F):
        raise ContainmentError("relative generalized information needs E <= F")
    return cross(E, F) - from_event(E)


def from_labeling_family(W: RandomVariable, family: Iterable[Iterable]) -> CanonicalSet:
    """Tuples whose set of ``W``-values belongs to ``family``.

    ``family`` is a collection of value sets, e.g. ``[{0}, {0, 1}]``.
    """
    space = W.space
    n = space.n
    values = list(W.values)
    vbit = {v: 1 << k for k, v in enumerate(values)}
    wanted = set()
    for s in family:
        m = 0
        for v in s:
            if v not in vbit:
                # values that W never takes cannot occur in any tuple
                m = -1
                break
            m |= vbit[v]
        if m > 0:
            wanted.add(m)
    valset = np.zeros(1 << n, dtype=np.int64)
    for c in range(1, 1 << n):
        low = (c & -c).bit_length() - 1
        valset[c] = valset[c & (c - 1)] | vbit[W.labeling[low]]
    sets = valset[_with_first(n)]
    phi = np.isin(sets, np.fromiter(wanted, dtype=np.int64, count=len(wanted)))
    return CanonicalSet(space, phi)


def from_rv(X: RandomVariable) -> CanonicalSet:
    """``G~(X)``: tuples on which ``X`` is not constant."""
    space = X.space
    tuple_sets = _with_first(space.n)
    inside_block = np.zeros(tuple_sets.shape, dtype=bool)
    for block in X.block_masks.values():
        inside_block |= (tuple_sets & ~block) == 0
    return CanonicalSet(space, ~inside_block)


def multi(*blocks: Event) -> CanonicalSet:
    """``G(B1; ...; Bn)`` for pairwise disjoint events: tuples inside the union
    of the blocks that touch every block."""
    if not blocks:
        raise ValueError("multi() needs at least one event")
    space = _space_of(*blocks)
    seen = 0
    for B in blocks:
        if seen & B.members:
            raise DisjointnessError("multi() needs pairwise disjoint events")
        seen |= B.members
    tuple_sets = _with_first(space.n)
    phi = (tuple_sets & ~seen) == 0
    for B in blocks:
        phi &= (tuple_sets & B.members) != 0
    return CanonicalSet(space, phi)


def union(a: CanonicalSet, b: CanonicalSet) -> CanonicalSet:
    return a | b


def intersect(a: CanonicalSet, b: CanonicalSet) -> CanonicalSet:
    return a & b


def difference(a: CanonicalSet, b: CanonicalSet) -> CanonicalSet:
    return a - b


def complement(a: CanonicalSet) -> CanonicalSet:
    return ~a


def is_empty(a: CanonicalSet) -> bool:
    return not a.phi.any()


def is_subset(a: CanonicalSet, b: CanonicalSet) -> bool:
    return not (a.phi & ~a._other(b)).any()


def is_disjoint(a: CanonicalSet, b: CanonicalSet) -> bool:
    return not (a.phi & a._other(b)).any()


def contains_tuple(a: CanonicalSet, tup: Sequence) -> bool:
    """Membership of a concrete tuple of outcomes (labels or indices)."""
    if len(tup) == 0:
        raise ValueError("tuples have length >= 1")
    space = a.space
    first = space.index(tup[0])
    rest = 0
    for u in tup[1:]:
        rest |= 1 << space.index(u)
    return bool(a.phi[first, rest])


def alternating_sums(a: CanonicalSet, rows=None) -> np.ndarray:
    """``sum_{b <= supp} (-1)^|b| phi[w0, b]`` for each first entry ``w0``.

    The measure of ``a`` is finite iff this vanishes for every support
    outcome: it is the weight left on the path once every support outcome
    has been collected.
    """
    space = a.space
    n = space.n
    cols = (_masks(n) & ~space.support_mask) == 0
    sign = np.where(_popcount(n) % 2 == 0, 1, -1)[cols]
    phi = a.phi if rows is None else a.phi[list(rows)]
    return phi[:, cols].astype(np.int64) @ sign


def is_measure_finite(a: CanonicalSet) -> bool:
    support = a.space.support
    return not alternating_sums(a, support).any()
