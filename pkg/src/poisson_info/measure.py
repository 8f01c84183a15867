"""Exact evaluation of the Poisson information measure of canonical sets.

Closed form
-----------
Fix a first entry ``u`` and write ``g(C) = -sum_{b <= C} (-1)^|b| phi[u, b]``
for the inner inclusion-exclusion sum once the labels collected so far
form the set ``C``.  Along a path, the per-path measure is
``int_{T1}^inf g(C(t)) dt / t`` where ``C(t)`` is the set of labels that have
arrived by time ``t``.  In a rate-1 labeled process each outcome ``w`` has
its own independent Exp(P(w)) first-arrival time, so

    E[g(C(t))] = -sum_b (-1)^|b| phi[u, b] sum_{T <= b} (-1)^|T| exp(-p(T) t).

The coefficients of the constant terms (``T`` empty) sum to the alternating
sum of the row, which must vanish for the measure to be finite; the
remaining exponentials integrate against ``dt / t`` by Frullani's formula
and give

    H_u(A) = sum_{b} (-1)^|b| phi[u, b] sum_{0 != T <= b} (-1)^|T| log p(T)

with ``b`` and ``T`` ranging over subsets of the support and
``p(T) = sum_{w in T} P(w)``.  The same expression comes out of the
harmonic (i.i.d. sequence) variant because ``sum_i (1 - p)^i / i = -log p``.

Swapping the two sums, the coefficient of ``log p(T)`` is
``(-1)^|T| sum_{b >= T} (-1)^|b| phi[u, b]``, a superset-sum transform of
the signed row.  That costs ``O(k 2^k)`` per row (``k`` = support size)
instead of the ``3^k`` of the literal double sum.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .canonical import CanonicalSet, _popcount
from .errors import DisjointnessError, DivergentMeasureError, GuardError
from .probability import Event, FiniteProbSpace

DEFAULT_MAX_OMEGA = 12

__all__ = [
    "DEFAULT_MAX_OMEGA",
    "MeasureValue",
    "pointwise_measure",
    "measure",
    "measure_value",
    "log_terms",
    "measure_interior",
]


@dataclass(frozen=True)
class MeasureValue:
    nats: float

    @property
    def bits(self) -> float:
        return self.nats / math.log(2)

    def in_base(self, base: str | float = "e") -> float:
        if base in ("e", math.e):
            return self.nats
        return self.nats / math.log(float(base))


@dataclass(frozen=True)
class _SupportTables:
    k: int
    support: tuple[int, ...]
    expand: np.ndarray       # k-bit mask -> n-bit mask
    sign: np.ndarray         # (-1)^popcount over k-bit masks
    p_exact: tuple           # p(T) as Fractions, k-bit masks
    logp: np.ndarray         # log p(T); logp[0] unused


@lru_cache(maxsize=64)
def _tables(space: FiniteProbSpace) -> _SupportTables:
    support = space.support
    k = len(support)
    size = 1 << k
    expand = np.zeros(size, dtype=np.int64)
    p_exact = [Fraction(0)] * size
    for T in range(1, size):
        low = (T & -T).bit_length() - 1
        expand[T] = expand[T & (T - 1)] | (1 << support[low])
        p_exact[T] = p_exact[T & (T - 1)] + space.probs[support[low]]
    logp = np.zeros(size)
    for T in range(1, size):
        logp[T] = math.log(p_exact[T])
    sign = np.where(_popcount(k) % 2 == 0, 1, -1).astype(np.int64)
    return _SupportTables(k, support, expand, sign, tuple(p_exact), logp)


def _guard(space: FiniteProbSpace, max_omega: int | None):
    limit = DEFAULT_MAX_OMEGA if max_omega is None else max_omega
    if space.n > limit:
        raise GuardError(
            f"|Omega| = {space.n} exceeds the measure guard {limit}; "
            "evaluation costs O(|Omega|^2 2^|Omega|) per set"
        )


def _superset_sums(arr: np.ndarray, k: int) -> np.ndarray:
    """In-place ``arr[..., T] <- sum_{b >= T} arr[..., b]`` over k-bit masks."""
    rows = arr.shape[0]
    for j in range(k):
        view = arr.reshape(rows, 1 << (k - j - 1), 2, 1 << j)
        view[:, :, 0, :] += view[:, :, 1, :]
    return arr


def _coefficients(A: CanonicalSet, rows: list[int]) -> tuple[np.ndarray, _SupportTables]:
    """Integer coefficients of ``log p(T)`` in ``H_u(A)`` for each requested row.

    Column 0 holds the alternating sum of the row (the finiteness functional).
    """
    t = _tables(A.space)
    signed = A.phi[np.ix_(rows, t.expand)].astype(np.int64) * t.sign
    sums = _superset_sums(signed, t.k)
    return sums * t.sign, t


def _row_value(coef: np.ndarray, logp: np.ndarray) -> float:
    nz = np.flatnonzero(coef[1:]) + 1
    return math.fsum((coef[nz] * logp[nz]).tolist())


def pointwise_measure(A: CanonicalSet, u, *, max_omega: int | None = None) -> float:
    """``H_u(A)``, the average Poisson information measure of ``A`` at ``u``."""
    space = A.space
    _guard(space, max_omega)
    i = space.index(u)
    coef, t = _coefficients(A, [i])
    if coef[0, 0] != 0:
        raise DivergentMeasureError(
            f"H_u(A) diverges at u={space.outcome_labels[i]!r} "
            f"(alternating sum {int(coef[0, 0])})"
        )
    return _row_value(coef[0], t.logp)


def measure(A: CanonicalSet, *, max_omega: int | None = None) -> float:
    """``H(A) = sum_w P(w) H_w(A)`` over the support, in nats."""
    space = A.space
    _guard(space, max_omega)
    rows = list(space.support)
    coef, t = _coefficients(A, rows)
    bad = np.flatnonzero(coef[:, 0])
    if bad.size:
        u = space.outcome_labels[rows[bad[0]]]
        raise DivergentMeasureError(f"measure diverges (first entry {u!r} has nonzero alternating sum)")
    return math.fsum(float(space.probs[w]) * _row_value(coef[r], t.logp) for r, w in enumerate(rows))


def measure_value(A: CanonicalSet, *, max_omega: int | None = None) -> MeasureValue:
    return MeasureValue(measure(A, max_omega=max_omega))


def log_terms(A: CanonicalSet, *, max_omega: int | None = None) -> dict[int, Fraction]:
    """Exact expansion ``H(A) = sum_T c_T log p(T)``.

    Returns ``{T: c_T}`` for the nonzero rational weights ``c_T``, with ``T``
    an outcome bitmask.  Cancellation of the alternating sums can be read off
    directly (e.g. ``G(Omega)`` only keeps ``T = support``, where ``log p = 0``).
    """
    space = A.space
    _guard(space, max_omega)
    rows = list(space.support)
    coef, t = _coefficients(A, rows)
    if coef[:, 0].any():
        raise DivergentMeasureError("measure diverges")
    out: dict[int, Fraction] = {}
    for T in range(1, 1 << t.k):
        c = sum((space.probs[w] * int(coef[r, T]) for r, w in enumerate(rows)), Fraction(0))
        if c:
            out[int(t.expand[T])] = c
    return out


def measure_interior(*blocks: Event) -> float:
    """Interior loss ``sum_{S <= [n]} (-1)^(|S|+n) p(S) log p(S)`` of disjoint events."""
    if not blocks:
        raise ValueError("need at least one event")
    seen = 0
    for B in blocks:
        if B.space != blocks[0].space:
            raise ValueError("events live on different spaces")
        if seen & B.members:
            raise DisjointnessError("blocks must be pairwise disjoint")
        seen |= B.members
    n = len(blocks)
    probs = [B.prob for B in blocks]
    terms = []
    for S in range(1, 1 << n):
        pS = sum((probs[i] for i in range(n) if S >> i & 1), Fraction(0))
        if pS > 0:
            sign = -1 if (bin(S).count("1") + n) % 2 else 1
            terms.append(sign * float(pS) * math.log(pS))
    return math.fsum(terms)
