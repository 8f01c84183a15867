"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class InfoError(Exception):
    """Base class for all errors raised by :mod:`poisson_info`."""


class UndefinedValueError(InfoError):
    """A self-information was requested for a value of probability zero."""


class UndefinedConditioningError(InfoError):
    """Conditioning on an event (or value) of probability zero."""


class ContainmentError(InfoError):
    """An operation requiring ``E <= F`` was given events violating it."""


class DisjointnessError(InfoError):
    """Blocks that must be pairwise disjoint overlap."""


class SpaceMismatchError(InfoError):
    """Objects defined over different probability spaces were combined."""


class DivergentMeasureError(InfoError):
    """The Poisson information measure of the set is not finite."""


class GuardError(InfoError):
    """A size guard (number of outcomes, variables or events) was exceeded."""


class FactViolationError(InfoError):
    """Concrete bindings do not satisfy a declared structural fact."""


class CertificateIndexError(InfoError):
    """A certificate refers to constraints that do not exist."""


class ParseError(InfoError):
    """Syntax or name-resolution error in a text input.

    ``line`` and ``column`` are 1-based and may be ``None`` when the error
    is not tied to a position (e.g. an undeclared name in a JSON field).
    """

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message)
