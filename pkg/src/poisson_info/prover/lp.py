"""Exact rational phase-1 simplex for ``M x = c, x >= 0``.

Either a nonnegative solution ``x`` is returned, or a Farkas certificate
``w`` with ``M^T w >= 0`` and ``c . w < 0`` proving that none exists.  All
arithmetic is on :class:`fractions.Fraction`; Bland's rule (smallest
improving column, smallest leaving basic index on ratio ties) guarantees
termination.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

__all__ = ["FeasibilityResult", "solve_nonneg"]


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    x: tuple[Fraction, ...] | None = None
    farkas: tuple[Fraction, ...] | None = None
    pivots: int = 0


def solve_nonneg(M: list[list[Fraction]], c: list[Fraction]) -> FeasibilityResult:
    """Decide ``exists x >= 0 : M x = c``.

    ``M`` is given as a list of rows (one per equation).
    """
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if rows == 0:
        return FeasibilityResult(True, tuple(Fraction(0) for _ in range(cols)))
    zero, one = Fraction(0), Fraction(1)
    sign = [one if ci >= 0 else -one for ci in c]
    width = cols + rows
    # tableau rows: [x part | artificial part | rhs]
    T = []
    for i in range(rows):
        r = [Fraction(v) * sign[i] for v in M[i]]
        r.extend(one if k == i else zero for k in range(rows))
        r.append(Fraction(c[i]) * sign[i])
        T.append(r)
    basis = [cols + i for i in range(rows)]
    # reduced costs of the phase-1 objective (sum of artificials)
    d = [-sum(T[i][j] for i in range(rows)) for j in range(cols)] + [zero] * rows
    obj = sum(T[i][-1] for i in range(rows))
    pivots = 0
    while True:
        enter = next((j for j in range(cols) if d[j] < 0), None)
        if enter is None:
            break
        leave, best = None, None
        for i in range(rows):
            a = T[i][enter]
            if a > 0:
                ratio = T[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    leave, best = i, ratio
        if leave is None:
            # cannot happen in phase 1 (objective bounded below by 0)
            raise RuntimeError("unbounded phase-1 problem")
        piv = T[leave][enter]
        prow = [v / piv for v in T[leave]]
        T[leave] = prow
        nz = [k for k in range(width + 1) if prow[k]]
        for i in range(rows):
            if i != leave:
                f = T[i][enter]
                if f:
                    Ti = T[i]
                    for k in nz:
                        Ti[k] -= f * prow[k]
        f = d[enter]
        for k in nz:
            if k < width:
                d[k] -= f * prow[k]
        obj += f * prow[-1]
        basis[leave] = enter
        pivots += 1
    if obj == 0:
        x = [zero] * cols
        for i, b in enumerate(basis):
            if b < cols:
                x[b] = T[i][-1]
        return FeasibilityResult(True, tuple(x), pivots=pivots)
    # dual prices of the phase-1 problem: pi_i = 1 - d(artificial_i)
    pi = [one - d[cols + i] for i in range(rows)]
    w = tuple(-sign[i] * pi[i] for i in range(rows))
    return FeasibilityResult(False, farkas=w, pivots=pivots)
