"""Finite probability spaces, events, random variables and classical
information quantities.

Everything here is computed directly from probability mass functions, so
these functions double as independent oracles for the set-based engine in
:mod:`poisson_info.measure`.  All logarithms are natural (nats).

Probabilities are exact :class:`~fractions.Fraction` values; information
quantities are floats.  Outcomes are referred to either by label or by
index, events carry their members as a bitmask over outcome indices.
"""

from __future__ import annotations

import math
from collections.abc import Hashable, Iterable, Sequence
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property

import numpy as np

from .errors import (
    ContainmentError,
    SpaceMismatchError,
    UndefinedConditioningError,
    UndefinedValueError,
)

MAX_OUTCOMES = 16

__all__ = [
    "MAX_OUTCOMES",
    "FiniteProbSpace",
    "Event",
    "RandomVariable",
    "joint",
    "entropy",
    "self_info",
    "cond_entropy",
    "mutual_info",
    "cond_mutual_info",
    "multivariate_mi",
    "cond_entropy_event",
    "cross_entropy_events",
    "kl_events",
    "tsallis",
    "i_min",
    "binary_entropy",
]


def _as_fraction(p) -> Fraction:
    if isinstance(p, Fraction):
        return p
    if isinstance(p, str):
        return Fraction(p.strip())
    return Fraction(p)


@dataclass(frozen=True)
class FiniteProbSpace:
    """A finite sample space with exact rational probabilities.

    Zero-probability outcomes are allowed; they are excluded from the
    *support*, which is what every measure formula ranges over.
    """

    outcome_labels: tuple[str, ...]
    probs: tuple[Fraction, ...]
    _index: dict = field(init=False, repr=False, compare=False, hash=False)

    def __init__(self, outcome_labels: Iterable[str], probs: Iterable):
        labels = tuple(str(x) for x in outcome_labels)
        ps = tuple(_as_fraction(p) for p in probs)
        if not 1 <= len(labels) <= MAX_OUTCOMES:
            raise ValueError(f"need 1 <= |Omega| <= {MAX_OUTCOMES}, got {len(labels)}")
        if len(ps) != len(labels):
            raise ValueError("outcome_labels and probs differ in length")
        if len(set(labels)) != len(labels):
            raise ValueError("outcome labels must be distinct")
        if any(p < 0 for p in ps):
            raise ValueError("probabilities must be nonnegative")
        if sum(ps) != 1:
            raise ValueError(f"probabilities sum to {sum(ps)}, not 1")
        object.__setattr__(self, "outcome_labels", labels)
        object.__setattr__(self, "probs", ps)
        object.__setattr__(self, "_index", {lab: i for i, lab in enumerate(labels)})

    @classmethod
    def uniform(cls, labels: Iterable[str]) -> FiniteProbSpace:
        labels = list(labels)
        return cls(labels, [Fraction(1, len(labels))] * len(labels))

    def __len__(self) -> int:
        return len(self.outcome_labels)

    @property
    def n(self) -> int:
        return len(self.outcome_labels)

    @cached_property
    def p(self) -> np.ndarray:
        """Real-valued view of the probabilities."""
        arr = np.array([float(p) for p in self.probs])
        arr.flags.writeable = False
        return arr

    @cached_property
    def full_mask(self) -> int:
        return (1 << self.n) - 1

    @cached_property
    def support_mask(self) -> int:
        return sum(1 << i for i, p in enumerate(self.probs) if p > 0)

    @cached_property
    def support(self) -> tuple[int, ...]:
        return tuple(i for i, p in enumerate(self.probs) if p > 0)

    def index(self, u) -> int:
        """Index of an outcome given by label or index."""
        if isinstance(u, (int, np.integer)) and not isinstance(u, bool):
            if not 0 <= u < self.n:
                raise IndexError(f"outcome index {u} out of range")
            return int(u)
        try:
            return self._index[u]
        except KeyError:
            raise KeyError(f"unknown outcome {u!r}") from None

    def mask_prob(self, mask: int) -> Fraction:
        return sum((self.probs[i] for i in range(self.n) if mask >> i & 1), Fraction(0))

    def event(self, members: Iterable) -> Event:
        mask = 0
        for u in members:
            mask |= 1 << self.index(u)
        return Event(self, mask)

    @property
    def omega(self) -> Event:
        return Event(self, self.full_mask)

    @property
    def empty_event(self) -> Event:
        return Event(self, 0)

    def rv(self, labeling) -> RandomVariable:
        """Random variable from a mapping ``outcome -> value`` or a sequence of values."""
        if isinstance(labeling, dict):
            values = [None] * self.n
            for u, v in labeling.items():
                values[self.index(u)] = v
            if any(v is None for v in values):
                missing = [self.outcome_labels[i] for i, v in enumerate(values) if v is None]
                raise ValueError(f"labeling is not total; missing {missing}")
            return RandomVariable(self, tuple(values))
        return RandomVariable(self, tuple(labeling))

    def identity_rv(self) -> RandomVariable:
        return RandomVariable(self, tuple(range(self.n)))

    def constant_rv(self) -> RandomVariable:
        return RandomVariable(self, (0,) * self.n)


@dataclass(frozen=True)
class Event:
    """A subset of the outcomes of ``space``, stored as a bitmask."""

    space: FiniteProbSpace
    members: int

    def __post_init__(self):
        if self.members & ~self.space.full_mask:
            raise ValueError("event members outside the sample space")

    @cached_property
    def prob(self) -> Fraction:
        return self.space.mask_prob(self.members)

    @property
    def indices(self) -> list[int]:
        return [i for i in range(self.space.n) if self.members >> i & 1]

    @property
    def labels(self) -> list[str]:
        return [self.space.outcome_labels[i] for i in self.indices]

    def __contains__(self, u) -> bool:
        return bool(self.members >> self.space.index(u) & 1)

    def _check(self, other: Event):
        if other.space != self.space:
            raise SpaceMismatchError("events live on different spaces")

    def __and__(self, other: Event) -> Event:
        self._check(other)
        return Event(self.space, self.members & other.members)

    def __or__(self, other: Event) -> Event:
        self._check(other)
        return Event(self.space, self.members | other.members)

    def __sub__(self, other: Event) -> Event:
        self._check(other)
        return Event(self.space, self.members & ~other.members)

    def __invert__(self) -> Event:
        return Event(self.space, self.space.full_mask & ~self.members)

    def issubset(self, other: Event) -> bool:
        self._check(other)
        return self.members & ~other.members == 0

    def __repr__(self) -> str:
        return f"Event({{{', '.join(self.labels)}}})"


@dataclass(frozen=True)
class RandomVariable:
    """A total labeling ``outcome -> value`` of the sample space."""

    space: FiniteProbSpace
    labeling: tuple[Hashable, ...]

    def __post_init__(self):
        if len(self.labeling) != self.space.n:
            raise ValueError("labeling must assign a value to every outcome")

    def value(self, u) -> Hashable:
        return self.labeling[self.space.index(u)]

    @cached_property
    def values(self) -> tuple:
        """Distinct values in order of first appearance."""
        return tuple(dict.fromkeys(self.labeling))

    @cached_property
    def block_masks(self) -> dict:
        masks: dict = {}
        for i, v in enumerate(self.labeling):
            masks[v] = masks.get(v, 0) | (1 << i)
        return masks

    def preimage(self, x) -> Event:
        """The event ``X = x``."""
        return Event(self.space, self.block_masks.get(x, 0))

    @property
    def induced_partition(self) -> list[Event]:
        return [Event(self.space, m) for m in self.block_masks.values()]

    def pmf(self, within: Event | None = None) -> dict:
        """Unnormalized masses ``P(X = x, within)`` per value."""
        within_mask = self.space.full_mask if within is None else within.members
        out: dict = {}
        for i, v in enumerate(self.labeling):
            if within_mask >> i & 1:
                out[v] = out.get(v, Fraction(0)) + self.space.probs[i]
        return out


def joint(*rvs: RandomVariable) -> RandomVariable:
    """The joint random variable ``(X1, ..., Xk)``; constant when ``k == 0``."""
    if not rvs:
        raise ValueError("joint() of no variables needs a space; use space.constant_rv()")
    space = rvs[0].space
    for X in rvs[1:]:
        if X.space != space:
            raise SpaceMismatchError("random variables live on different spaces")
    return RandomVariable(space, tuple(zip(*(X.labeling for X in rvs))))


def _xlogx_sum(masses: Iterable[Fraction], total: Fraction = Fraction(1)) -> float:
    """``-sum q log q`` for the masses normalized by ``total``."""
    terms = []
    for m in masses:
        if m > 0:
            q = m / total
            terms.append(-float(q) * math.log(q))
    return math.fsum(terms)


def _same_space(*rvs):
    space = rvs[0].space
    for X in rvs[1:]:
        if X.space != space:
            raise SpaceMismatchError("random variables live on different spaces")


def entropy(X: RandomVariable) -> float:
    return _xlogx_sum(X.pmf().values())


def self_info(X: RandomVariable, u) -> float:
    p = X.preimage(X.value(u)).prob
    if p == 0:
        raise UndefinedValueError(f"P(X = X({u!r})) = 0")
    return -math.log(p)


def cond_entropy(Y: RandomVariable, X: RandomVariable) -> float:
    """``H(Y|X) = H(X,Y) - H(X)``."""
    _same_space(Y, X)
    return entropy(joint(X, Y)) - entropy(X)


def mutual_info(X: RandomVariable, Y: RandomVariable) -> float:
    _same_space(X, Y)
    return entropy(X) + entropy(Y) - entropy(joint(X, Y))


def cond_mutual_info(X: RandomVariable, Y: RandomVariable, Z: RandomVariable) -> float:
    _same_space(X, Y, Z)
    return (entropy(joint(X, Z)) + entropy(joint(Y, Z))
            - entropy(joint(X, Y, Z)) - entropy(Z))


def multivariate_mi(*rvs: RandomVariable) -> float:
    """McGill's co-information ``I(X1;...;Xn)`` by inclusion-exclusion."""
    if not rvs:
        raise ValueError("need at least one random variable")
    _same_space(*rvs)
    n = len(rvs)
    terms = []
    for mask in range(1, 1 << n):
        sub = [rvs[i] for i in range(n) if mask >> i & 1]
        sign = 1 if bin(mask).count("1") % 2 else -1
        terms.append(sign * entropy(joint(*sub)))
    return math.fsum(terms)


def _require_positive(E: Event, what: str = "E"):
    if E.prob == 0:
        raise UndefinedConditioningError(f"P({what}) = 0")


def cond_entropy_event(X: RandomVariable, E: Event) -> float:
    """``H(X | E)``: entropy of ``X`` under ``P`` conditioned on ``E`` (unscaled)."""
    if E.space != X.space:
        raise SpaceMismatchError("event and random variable live on different spaces")
    _require_positive(E)
    return _xlogx_sum(X.pmf(E).values(), E.prob)


def cross_entropy_events(X: RandomVariable, E: Event, F: Event) -> float:
    """Cross entropy ``H(P_{X|E}, P_{X|F})``; infinite if ``P_{X|E}`` is not
    absolutely continuous with respect to ``P_{X|F}``."""
    if E.space != X.space or F.space != X.space:
        raise SpaceMismatchError("events and random variable live on different spaces")
    _require_positive(E, "E")
    _require_positive(F, "F")
    pe, pf = X.pmf(E), X.pmf(F)
    terms = []
    for x, m in pe.items():
        if m == 0:
            continue
        q = pf.get(x, Fraction(0))
        if q == 0:
            return math.inf
        terms.append(-float(m / E.prob) * math.log(q / F.prob))
    return math.fsum(terms)


def kl_events(X: RandomVariable, E: Event, F: Event) -> float:
    """``D_KL(P_{X|E} || P_{X|F})`` for ``E <= F``."""
    if not E.issubset(F):
        raise ContainmentError("KL divergence between conditionals needs E <= F")
    _require_positive(E, "E")
    pe, pf = X.pmf(E), X.pmf(F)
    terms = []
    for x, m in pe.items():
        if m > 0:
            a = m / E.prob
            b = pf[x] / F.prob
            terms.append(float(a) * math.log(a / b))
    return math.fsum(terms)


def tsallis(X: RandomVariable, k: int) -> float:
    """Order-``k`` Tsallis entropy, ``(k-1) S_k = 1 - sum_x p(x)^k``."""
    if int(k) != k or k < 2:
        raise ValueError("Tsallis order must be an integer >= 2")
    s = 1 - sum(m ** k for m in X.pmf().values())
    return float(s) / (k - 1)


def i_min(X: RandomVariable, Ys: Sequence[RandomVariable]) -> float:
    """Williams-Beer minimum information ``I_min(X; {Y1..Yn})``."""
    if not Ys:
        raise ValueError("need at least one source variable")
    _same_space(X, *Ys)
    omega = X.space.omega
    terms = []
    for x in X.values:
        Ex = X.preimage(x)
        if Ex.prob == 0:
            raise UndefinedConditioningError(f"P(X = {x!r}) = 0")
        terms.append(float(Ex.prob) * min(kl_events(Y, Ex, omega) for Y in Ys))
    return math.fsum(terms)


def binary_entropy(p: float) -> float:
    if not 0 <= p <= 1:
        raise ValueError("binary entropy needs p in [0, 1]")
    if p == 0 or p == 1:
        return 0.0
    return -p * math.log(p) - (1 - p) * math.log1p(-p)
