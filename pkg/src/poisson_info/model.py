"""Concrete models: a finite space with named random variables and events,
plus numeric evaluation of parsed expressions against such a model.

Space file format (JSON)::

    {"outcomes": ["a", "b"], "probs": ["1/2", "1/2"],
     "rvs": {"X": {"a": 0, "b": 1}}, "events": {"E": ["a"]}}

Quantities are evaluated two independent ways: ``m(...)`` through the set
engine, ``H``/``I``/``P`` through the classical formulas of
:mod:`poisson_info.probability`.  A quantity with an event context denotes a
measure, i.e. it carries the factor ``P(E)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import canonical as cs
from .errors import ParseError
from .expr import (
    OMEGA,
    EvName,
    EvNot,
    EvOp,
    Num,
    QBin,
    QH,
    QI,
    QM,
    QNeg,
    QP,
    SetConst,
    SetCross,
    SetEv,
    SetMulti,
    SetNot,
    SetOp,
    SetRV,
)
from .measure import measure
from .probability import Event, FiniteProbSpace, RandomVariable, joint

__all__ = ["Model", "load_model", "model_from_dict", "eval_event", "eval_set", "eval_quantity"]


@dataclass(frozen=True)
class Model:
    space: FiniteProbSpace
    rvs: dict = field(default_factory=dict)
    events: dict = field(default_factory=dict)

    def rv(self, name: str) -> RandomVariable:
        try:
            return self.rvs[name]
        except KeyError:
            raise ParseError(f"unknown random variable {name!r}") from None

    def event(self, name: str) -> Event:
        if name == OMEGA:
            return self.space.omega
        try:
            return self.events[name]
        except KeyError:
            raise ParseError(f"unknown event {name!r}") from None


def model_from_dict(data: dict) -> Model:
    if not isinstance(data, dict):
        raise ParseError("space definition must be a JSON object")
    try:
        space = FiniteProbSpace(data["outcomes"], [str(p) for p in data["probs"]])
    except KeyError as exc:
        raise ParseError(f"space definition lacks {exc.args[0]!r}") from None
    except (ValueError, ZeroDivisionError) as exc:
        raise ParseError(f"invalid space: {exc}") from None
    rvs = {}
    for name, mapping in data.get("rvs", {}).items():
        if not isinstance(mapping, dict) or set(mapping) != set(space.outcome_labels):
            raise ParseError(f"random variable {name!r} must map every outcome")
        rvs[name] = space.rv({k: _hashable(v) for k, v in mapping.items()})
    events = {}
    for name, members in data.get("events", {}).items():
        if name == OMEGA:
            raise ParseError(f"{OMEGA!r} is reserved for the whole space")
        try:
            events[name] = space.event(members)
        except (KeyError, ValueError) as exc:
            raise ParseError(f"event {name!r}: {exc}") from None
    clash = set(rvs) & set(events)
    if clash:
        raise ParseError(f"names used for both a random variable and an event: {sorted(clash)}")
    return Model(space, rvs, events)


def _hashable(v):
    return tuple(v) if isinstance(v, list) else v


def load_model(path) -> Model:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    return model_from_dict(data)


def eval_event(node, model: Model) -> Event:
    if isinstance(node, EvName):
        return model.event(node.name)
    if isinstance(node, EvNot):
        return ~eval_event(node.arg, model)
    if isinstance(node, EvOp):
        a, b = eval_event(node.left, model), eval_event(node.right, model)
        return {"&": a & b, "|": a | b, "\\": a - b}[node.op]
    raise TypeError(f"not an event expression: {node!r}")


def eval_set(node, model: Model) -> cs.CanonicalSet:
    if isinstance(node, SetRV):
        return cs.from_rv(joint(*(model.rv(n) for n in node.names)))
    if isinstance(node, SetEv):
        return cs.from_event(eval_event(node.event, model))
    if isinstance(node, SetCross):
        E, F = eval_event(node.first, model), eval_event(node.rest, model)
        return cs.cross(E, F) if node.kind == "cross" else cs.relative(E, F)
    if isinstance(node, SetMulti):
        return cs.multi(*(eval_event(b, model) for b in node.blocks))
    if isinstance(node, SetConst):
        return cs.full(model.space) if node.full else cs.empty(model.space)
    if isinstance(node, SetNot):
        return ~eval_set(node.arg, model)
    if isinstance(node, SetOp):
        a, b = eval_set(node.left, model), eval_set(node.right, model)
        return {"&": a & b, "|": a | b, "\\": a - b}[node.op]
    raise TypeError(f"not a set expression: {node!r}")


def _context_event(ctx, model: Model) -> Event:
    E = model.space.omega
    for e in ctx.events:
        E = E & eval_event(e, model)
    return E


def _entropy_within(model: Model, names, E: Event) -> float:
    """``P(E) H(X_names | E)`` computed from the pmf (0 if ``P(E) = 0``)."""
    if E.prob == 0:
        return 0.0
    if not names:
        return 0.0
    X = joint(*(model.rv(n) for n in names))
    terms = []
    for m in X.pmf(E).values():
        if m > 0:
            terms.append(-float(m) * math.log(m / E.prob))
    return math.fsum(terms)


def _h_value(model: Model, names, ctx) -> float:
    E = _context_event(ctx, model)
    given = tuple(dict.fromkeys(ctx.rvs))
    both = tuple(dict.fromkeys(tuple(names) + given))
    return _entropy_within(model, both, E) - _entropy_within(model, given, E)


def _i_value(model: Model, groups, ctx) -> float:
    # McGill form: I(A1;...;Ak|C) = -sum_{T != {}} (-1)^|T| H(A_T | C)
    k = len(groups)
    terms = []
    for T in range(1, 1 << k):
        names = tuple(dict.fromkeys(n for j in range(k) if T >> j & 1 for n in groups[j]))
        sign = 1 if bin(T).count("1") % 2 else -1
        terms.append(sign * _h_value(model, names, ctx))
    return math.fsum(terms)


def eval_quantity(node, model: Model, *, max_omega: int | None = None) -> float:
    """Numeric value of a quantity expression, in nats."""
    if isinstance(node, Num):
        return float(node.value)
    if isinstance(node, QM):
        return measure(eval_set(node.region, model), max_omega=max_omega)
    if isinstance(node, QH):
        return _h_value(model, node.names, node.ctx)
    if isinstance(node, QI):
        return _i_value(model, node.groups, node.ctx)
    if isinstance(node, QP):
        return float(eval_event(node.event, model).prob)
    if isinstance(node, QNeg):
        return -eval_quantity(node.arg, model, max_omega=max_omega)
    if isinstance(node, QBin):
        a = eval_quantity(node.left, model, max_omega=max_omega)
        b = eval_quantity(node.right, model, max_omega=max_omega)
        return {"+": a + b, "-": a - b, "*": a * b}[node.op]
    raise TypeError(f"not a quantity: {node!r}")


def fraction_value(node) -> Fraction | None:
    """Exact value of a constant quantity, ``None`` if it mentions a measure."""
    if isinstance(node, Num):
        return node.value
    if isinstance(node, QNeg):
        v = fraction_value(node.arg)
        return None if v is None else -v
    if isinstance(node, QBin):
        a, b = fraction_value(node.left), fraction_value(node.right)
        if a is None or b is None:
            return None
        return {"+": a + b, "-": a - b, "*": a * b}[node.op]
    return None
