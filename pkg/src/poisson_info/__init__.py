"""Poisson information measures on finite probability spaces.

Exact evaluation of the measure of generalized-information sets built from
events and random variables, Monte-Carlo estimation via labeled Poisson
processes, and a linear-programming prover for information-event
inequalities.
"""

from __future__ import annotations

from .canonical import (
    CanonicalSet,
    alternating_sums,
    complement,
    contains_tuple,
    cross,
    difference,
    empty,
    from_event,
    from_labeling_family,
    from_rv,
    full,
    intersect,
    is_disjoint,
    is_empty,
    is_measure_finite,
    is_subset,
    multi,
    relative,
    union,
)
from .errors import (
    CertificateIndexError,
    ContainmentError,
    DisjointnessError,
    DivergentMeasureError,
    FactViolationError,
    GuardError,
    InfoError,
    ParseError,
    SpaceMismatchError,
    UndefinedConditioningError,
    UndefinedValueError,
)
from .measure import (
    DEFAULT_MAX_OMEGA,
    MeasureValue,
    log_terms,
    measure,
    measure_interior,
    measure_value,
    pointwise_measure,
)
from .probability import (
    Event,
    FiniteProbSpace,
    RandomVariable,
    binary_entropy,
    cond_entropy,
    cond_entropy_event,
    cond_mutual_info,
    cross_entropy_events,
    entropy,
    i_min,
    joint,
    kl_events,
    multivariate_mi,
    mutual_info,
    self_info,
    tsallis,
)
from .simulation import (
    Estimate,
    SamplePath,
    estimate,
    h_general_sample,
    h_rv_sample,
    harmonic_rv_sample,
    harmonic_sample,
    sample_path,
    thin,
)

__version__ = "0.1.0"
