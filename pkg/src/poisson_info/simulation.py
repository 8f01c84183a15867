"""Monte-Carlo realization of the Poisson and harmonic information measures.

A sample path is a ``P``-labeled rate-1 Poisson process, generated until
every support outcome has appeared (coupon collection).  Once that happens
the inner inclusion-exclusion sum of a finite-measure set is zero for all
later points, so the per-path value computed from the truncated path is
exact rather than an approximation.

Random numbers
--------------
``estimate`` uses NumPy's ``PCG64`` bit generator.  The root
``SeedSequence(seed)`` is spawned into one child stream per block of
``BLOCK_TRIALS`` consecutive trials; inside a block labels are drawn by
inverse-CDF lookup on uniform variates and arrival increments with
``standard_exponential``.  Results therefore depend only on
``(seed, n_trials)``, and blocks can be evaluated in any order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal

import numpy as np

from .canonical import CanonicalSet
from .errors import DivergentMeasureError, UndefinedConditioningError
from .probability import Event, FiniteProbSpace, RandomVariable

BLOCK_TRIALS = 4096
_CHUNK_COLUMNS = 64

__all__ = [
    "BLOCK_TRIALS",
    "SamplePath",
    "Estimate",
    "sample_path",
    "sample_labels",
    "inner_sums",
    "h_rv_sample",
    "h_general_sample",
    "thin",
    "harmonic_sample",
    "harmonic_rv_sample",
    "estimate",
]


@dataclass(frozen=True)
class SamplePath:
    """Finite realization ``((v1, t1), ..., (vN, tN))`` of a labeled process.

    ``labels`` are outcome indices, ``times`` strictly increasing arrival
    times.  ``complete`` records that every outcome of the relevant support
    appears among the labels.
    """

    labels: tuple[int, ...]
    times: tuple[float, ...]
    complete: bool = True

    def __post_init__(self):
        if len(self.labels) != len(self.times):
            raise ValueError("labels and times differ in length")
        if any(t <= 0 for t in self.times[:1]) or any(
            b < a for a, b in zip(self.times, self.times[1:])
        ):
            raise ValueError("arrival times must be positive and nondecreasing")

    def __len__(self) -> int:
        return len(self.labels)

    @property
    def points(self) -> list[tuple[int, float]]:
        return list(zip(self.labels, self.times))

    def scaled(self, c: float) -> SamplePath:
        """The same path with every arrival time multiplied by ``c > 0``."""
        return SamplePath(self.labels, tuple(c * t for t in self.times), self.complete)


@dataclass(frozen=True)
class Estimate:
    mean: float
    stderr: float
    n_trials: int
    seed: int
    mode: str = "poisson"


def _support_cdf(space: FiniteProbSpace) -> tuple[np.ndarray, np.ndarray]:
    support = np.array(space.support, dtype=np.int64)
    if support.size == 0:
        raise ValueError("space has no support outcome")
    cdf = np.cumsum([float(space.probs[i]) for i in support])
    cdf[-1] = 1.0
    return support, cdf


def _draw_labels(rng: np.random.Generator, support, cdf, size) -> np.ndarray:
    return support[np.searchsorted(cdf, rng.random(size), side="right")]


def sample_labels(space: FiniteProbSpace, rng: np.random.Generator) -> tuple[int, ...]:
    """An i.i.d. ``P`` sequence stopped at coupon collection."""
    support, cdf = _support_cdf(space)
    target = space.support_mask
    seen = 0
    out = []
    while seen != target:
        v = int(_draw_labels(rng, support, cdf, None))
        out.append(v)
        seen |= 1 << v
    return tuple(out)


def sample_path(space: FiniteProbSpace, rng: np.random.Generator) -> SamplePath:
    """A rate-1 ``P``-labeled Poisson process stopped at coupon collection."""
    support, cdf = _support_cdf(space)
    target = space.support_mask
    seen, t = 0, 0.0
    labels, times = [], []
    while seen != target:
        v = int(_draw_labels(rng, support, cdf, None))
        t += rng.standard_exponential()
        labels.append(v)
        times.append(t)
        seen |= 1 << v
    return SamplePath(tuple(labels), tuple(times), True)


def inner_sums(A: CanonicalSet, u) -> np.ndarray:
    """``g[C] = -sum_{b <= C} (-1)^|b| phi[u, b]`` for every outcome set ``C``.

    This is the grouped value of the inner sum over index subsets once the
    labels seen so far form ``C``: within each label class the sum of
    ``(-1)^|S|`` over nonempty index subsets is ``-1``.
    """
    space = A.space
    n = space.n
    row = A.row(u).astype(np.int64)
    masks = np.arange(1 << n)
    pc = np.zeros(1 << n, dtype=np.int64)
    for j in range(n):
        pc += (masks >> j) & 1
    g = np.where(pc % 2 == 0, -row, row)
    for j in range(n):
        view = g.reshape(1 << (n - j - 1), 2, 1 << j)
        view[:, 1, :] += view[:, 0, :]
    return g


def h_rv_sample(X: RandomVariable, u, path: SamplePath) -> float:
    """``log(min{t_i : X(v_i) = X(u)} / min t_i)``; ``inf`` if no point matches."""
    if not path.labels:
        return math.inf
    xu = X.value(u)
    for v, t in zip(path.labels, path.times):
        if X.labeling[v] == xu:
            return math.log(t / path.times[0])
    return math.inf


def _runs(values, n_points):
    """Maximal runs of equal consecutive values as ``(value, start, end)``
    index triples; the run covers intervals ``[t_start, t_end]``."""
    start = 0
    for i in range(1, n_points):
        if values[i] != values[start]:
            yield values[start], start, i
            start = i
    yield values[start], start, n_points - 1


def _check_terminal(g_last: int, path: SamplePath):
    if g_last != 0:
        raise DivergentMeasureError("inner sum does not vanish once all labels are collected")
    if not path.complete:
        raise ValueError("path is not complete")


def h_general_sample(A: CanonicalSet, u, path: SamplePath) -> float:
    """Per-path Poisson information measure ``H_{u;v}(A)``.

    Consecutive points with the same inner sum are merged, so the result is
    a sum of ``g * log(t_end / t_start)`` over runs with ``g != 0``.
    """
    if not path.labels:
        raise ValueError("empty path")
    g = inner_sums(A, u)
    vals = []
    seen = 0
    for v in path.labels:
        seen |= 1 << v
        vals.append(int(g[seen]))
    _check_terminal(vals[-1], path)
    total = 0.0
    times = path.times
    for val, s, e in _runs(vals, len(vals)):
        if val and e > s:
            total += val * math.log(times[e] / times[s])
    return total


def thin(path: SamplePath, E: Event) -> SamplePath:
    """Discard the points whose label lies outside ``E``, keeping arrival times."""
    if E.prob == 0:
        raise UndefinedConditioningError("cannot thin by an event of probability zero")
    keep = [(v, t) for v, t in zip(path.labels, path.times) if E.members >> v & 1]
    return SamplePath(tuple(v for v, _ in keep), tuple(t for _, t in keep), path.complete)


def harmonic_rv_sample(X: RandomVariable, u, labels) -> float:
    """``sum_{i < kappa} 1/i`` with ``kappa`` the first index where ``X(v_i) = X(u)``."""
    xu = X.value(u)
    total = 0.0
    for i, v in enumerate(labels, start=1):
        if X.labeling[v] == xu:
            return total
        total += 1.0 / i
    return math.inf


def harmonic_sample(A: CanonicalSet, u, labels) -> float:
    """Per-sequence harmonic information measure ``sum_i g(C_i) / i``."""
    labels = tuple(labels)
    if not labels:
        raise ValueError("empty label sequence")
    g = inner_sums(A, u)
    seen = 0
    total = 0.0
    val = 0
    for i, v in enumerate(labels, start=1):
        seen |= 1 << v
        val = int(g[seen])
        if val:
            total += val * (1.0 / i)
    if val != 0:
        raise DivergentMeasureError("inner sum does not vanish once all labels are collected")
    return total


def _inner_table(A: CanonicalSet) -> tuple[np.ndarray, np.ndarray]:
    space = A.space
    support = np.array(space.support, dtype=np.int64)
    table = np.stack([inner_sums(A, int(w)) for w in support]).astype(np.float64)
    if np.any(table[:, space.support_mask] != 0):
        raise DivergentMeasureError("set does not have finite measure")
    return support, table


def _block_values(rng, support, cdf, table, full, size, mode) -> np.ndarray:
    """Per-trial values for one block of trials (vectorized over trials)."""
    urow = np.searchsorted(cdf, rng.random(size), side="right")
    seen = np.zeros(size, dtype=np.int64)
    acc = np.zeros(size)
    prev_g = np.zeros(size)
    prev_logt = np.zeros(size)
    t = np.zeros(size)
    count = np.zeros(size, dtype=np.int64)
    active = np.arange(size)
    while active.size:
        m = active.size
        labels = support[np.searchsorted(cdf, rng.random((m, _CHUNK_COLUMNS)), side="right")]
        bits = np.left_shift(np.int64(1), labels)
        bits[:, 0] |= seen[active]
        sets = np.bitwise_or.accumulate(bits, axis=1)
        g = table[urow[active][:, None], sets]
        if mode == "poisson":
            inc = rng.standard_exponential((m, _CHUNK_COLUMNS))
            inc[:, 0] += t[active]
            times = np.cumsum(inc, axis=1)
            logt = np.log(times)
            steps = np.empty_like(logt)
            steps[:, 0] = prev_g[active] * (logt[:, 0] - prev_logt[active])
            steps[:, 1:] = g[:, :-1] * np.diff(logt, axis=1)
            t[active] = times[:, -1]
            prev_logt[active] = logt[:, -1]
        else:
            idx = count[active][:, None] + np.arange(1, _CHUNK_COLUMNS + 1)
            steps = g / idx
            count[active] += _CHUNK_COLUMNS
        acc[active] += steps.sum(axis=1)
        prev_g[active] = g[:, -1]
        seen[active] = sets[:, -1]
        active = active[seen[active] != full]
    return acc


def estimate(
    A: CanonicalSet,
    mode: Literal["poisson", "harmonic"] = "poisson",
    n_trials: int = 100_000,
    seed: int = 0,
) -> Estimate:
    """Sample mean and standard error of ``H_{U;V}(A)`` (or ``R_{U;V}(A)``).

    ``U ~ P`` is drawn independently for every trial.  Deterministic in
    ``(seed, n_trials)``.
    """
    if mode not in ("poisson", "harmonic"):
        raise ValueError(f"unknown mode {mode!r}")
    if n_trials < 2:
        raise ValueError("need at least 2 trials")
    space = A.space
    support, table = _inner_table(A)
    _, cdf = _support_cdf(space)
    full = space.support_mask
    n_blocks = -(-n_trials // BLOCK_TRIALS)
    children = np.random.SeedSequence(seed).spawn(n_blocks)
    values = []
    for b, child in enumerate(children):
        size = min(BLOCK_TRIALS, n_trials - b * BLOCK_TRIALS)
        rng = np.random.Generator(np.random.PCG64(child))
        values.append(_block_values(rng, support, cdf, table, full, size, mode))
    vals = np.concatenate(values)
    mean = float(math.fsum(vals.tolist()) / n_trials)
    stderr = float(vals.std(ddof=1) / math.sqrt(n_trials))
    return Estimate(mean, stderr, n_trials, seed, mode)
