"""Random instance generators and brute-force oracles shared by the tests."""

from __future__ import annotations

import itertools
import math
from fractions import Fraction

import numpy as np

from poisson_info.probability import FiniteProbSpace

LABELS = "abcdefghijklmnop"


def random_space(rng: np.random.Generator, n: int | None = None, *, zeros: bool = False,
                 max_n: int = 8) -> FiniteProbSpace:
    """Space with random rational probabilities (denominator = sum of weights)."""
    if n is None:
        n = int(rng.integers(1, max_n + 1))
    w = rng.integers(1, 10, size=n)
    if zeros and n > 1:
        w[rng.random(n) < 0.2] = 0
        if w.sum() == 0:
            w[0] = 1
    total = int(w.sum())
    return FiniteProbSpace(list(LABELS[:n]), [Fraction(int(x), total) for x in w])


def random_rv(space, rng, k: int | None = None):
    if k is None:
        k = int(rng.integers(1, space.n + 1))
    return space.rv([int(v) for v in rng.integers(0, k, size=space.n)])


def random_event(space, rng, p_in: float = 0.5, nonnull: bool = False):
    while True:
        members = [i for i in range(space.n) if rng.random() < p_in]
        E = space.event(members)
        if not nonnull or E.prob > 0:
            return E


def literal_pointwise(A, u) -> float:
    """The closed form evaluated as a literal double sum over ``b`` and ``T``."""
    space = A.space
    supp = space.support
    i = space.index(u)
    terms = []
    for r in range(1, len(supp) + 1):
        for b in itertools.combinations(supp, r):
            bm = sum(1 << w for w in b)
            if not A.phi[i, bm]:
                continue
            sb = (-1) ** len(b)
            for s in range(1, len(b) + 1):
                for T in itertools.combinations(b, s):
                    pT = sum(space.probs[w] for w in T)
                    terms.append(sb * (-1) ** len(T) * math.log(pT))
    return math.fsum(terms)


def kl_brute(p, q) -> float:
    return math.fsum(float(a) * math.log(a / b) for a, b in zip(p, q) if a > 0)


def random_finite_set(space, rng, *, singleton_free: bool = False, depth: int = 2):
    """Random Boolean combination of generator sets with finite measure.

    With ``singleton_free`` only generators without length-one tuples are
    used (random-variable sets and relative sets), and complements are
    avoided, so ``phi[u, {}]`` is False for every ``u``.
    """
    from poisson_info import canonical as cs

    def generator():
        X = random_rv(space, rng)
        E = random_event(space, rng, nonnull=True)
        F = E | random_event(space, rng)
        kinds = ["rv", "rel"] if singleton_free else ["rv", "rel", "ev", "cross", "multi"]
        k = kinds[int(rng.integers(len(kinds)))]
        if k == "rv":
            return cs.from_rv(X)
        if k == "rel":
            return cs.relative(E, F)
        if k == "ev":
            return cs.from_event(E)
        if k == "cross":
            return cs.cross(random_event(space, rng), F)
        return cs.multi(*X.induced_partition)

    while True:
        A = generator()
        for _ in range(int(rng.integers(0, depth + 1))):
            B = generator()
            op = int(rng.integers(3 if singleton_free else 4))
            A = [A & B, A | B, A - B, ~A if op == 3 else A][op]
        if cs.is_measure_finite(A):
            return A
