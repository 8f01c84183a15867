"""Information-event problems: declarations, structural facts and a goal.

Two input forms are accepted.  JSON::

    {"rvs": ["X", "Y", "W"], "events": ["EQ", "NEQ"],
     "facts": [{"kind": "induces_partition", "rv": "W", "events": ["EQ", "NEQ"]},
               {"kind": "function_of", "target": "W", "given": ["X", "Y"]},
               {"kind": "function_of", "target": "X", "given": ["Y"], "context": "EQ"}],
     "goal": "H(X|Y) <= H(W) + m((rv(X)\\rv(Y)) & ev(NEQ))"}

and a line-oriented text form (``#`` starts a comment)::

    rvs X Y W
    events EQ NEQ
    partition W : EQ NEQ
    function W of X Y
    function X of Y given EQ
    subset E1 in E2
    disjoint E1 E2
    refines X events E1 E2 within F
    independent X ; Y | Z given E
    prove H(X|Y) <= H(W) + m((rv(X)\\rv(Y)) & ev(NEQ))
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass

from ..errors import ParseError
from ..expr import OMEGA, Relation, names_in, parse_relation

__all__ = ["Fact", "IEProblem", "FACT_KINDS", "MAX_RVS", "MAX_EVENTS", "parse_problem", "load_problem"]

MAX_RVS = 8
MAX_EVENTS = 8

FACT_KINDS = (
    "subset_event",
    "disjoint_events",
    "function_of",
    "refines",
    "induces_partition",
    "independent",
)


@dataclass(frozen=True)
class Fact:
    """One structural fact.

    ``target`` is the random variable a fact is about (``function_of``,
    ``refines``, ``induces_partition``); ``given`` lists conditioning random
    variables; ``events`` the events involved; ``context`` events whose
    intersection restricts the statement; ``within`` the event ``F`` of
    ``refines`` (``None`` meaning the whole space); ``left``/``right`` the
    two sides of ``independent``.
    """

    kind: str
    target: str | None = None
    given: tuple[str, ...] = ()
    events: tuple[str, ...] = ()
    context: tuple[str, ...] = ()
    within: str | None = None
    left: tuple[str, ...] = ()
    right: tuple[str, ...] = ()

    def rv_names(self) -> set:
        out = set(self.given) | set(self.left) | set(self.right)
        if self.target is not None:
            out.add(self.target)
        return out

    def event_names(self) -> set:
        out = set(self.events) | set(self.context)
        if self.within is not None:
            out.add(self.within)
        return out - {OMEGA}

    def describe(self) -> str:
        ctx = f" given {' & '.join(self.context)}" if self.context else ""
        if self.kind == "subset_event":
            return f"{self.events[0]} subset of {self.events[1]}"
        if self.kind == "disjoint_events":
            return "disjoint " + ", ".join(self.events)
        if self.kind == "function_of":
            of = ", ".join(self.given) if self.given else "(constant)"
            return f"{self.target} function of {of}{ctx}"
        if self.kind == "refines":
            w = f" within {self.within}" if self.within else ""
            return f"{self.target} refines {{{', '.join(self.events)}}}{w}"
        if self.kind == "induces_partition":
            return f"{self.target} induces partition {{{', '.join(self.events)}}}"
        g = f" | {', '.join(self.given)}" if self.given else ""
        return f"{', '.join(self.left)} independent of {', '.join(self.right)}{g}{ctx}"

    def to_json(self) -> dict:
        k = self.kind
        if k == "subset_event":
            return {"kind": k, "sub": self.events[0], "sup": self.events[1]}
        if k == "disjoint_events":
            return {"kind": k, "events": list(self.events)}
        if k == "function_of":
            d = {"kind": k, "target": self.target, "given": list(self.given)}
            if self.context:
                d["context"] = list(self.context)
            return d
        if k in ("refines", "induces_partition"):
            d = {"kind": k, "rv": self.target, "events": list(self.events)}
            if self.within:
                d["within"] = self.within
            return d
        d = {"kind": k, "left": list(self.left), "right": list(self.right),
             "given": list(self.given)}
        if self.context:
            d["context"] = list(self.context)
        return d


@dataclass(frozen=True)
class IEProblem:
    rv_names: tuple[str, ...]
    event_names: tuple[str, ...]
    facts: tuple[Fact, ...] = ()
    goal: Relation | None = None
    goal_text: str = ""

    def __post_init__(self):
        names = list(self.rv_names) + list(self.event_names)
        if len(set(names)) != len(names):
            raise ParseError("declared names must be unique across random variables and events")
        for nm in names:
            if nm == OMEGA:
                raise ParseError(f"{OMEGA!r} is reserved for the whole space")
            if nm in ("H", "I", "m", "P", "rv", "ev", "cross", "rel", "multi", "full", "empty"):
                raise ParseError(f"{nm!r} is a reserved word")
        if len(self.rv_names) > MAX_RVS:
            raise ParseError(f"at most {MAX_RVS} random variables are supported")
        if len(self.event_names) > MAX_EVENTS:
            raise ParseError(f"at most {MAX_EVENTS} events are supported")
        rvs, evs = set(self.rv_names), set(self.event_names)
        for f in self.facts:
            _check_fact(f, rvs, evs)
        if self.goal is not None:
            used_r, used_e = names_in(self.goal)
            _check_declared(used_r, rvs, "random variable")
            _check_declared(used_e, evs, "event")

    @property
    def n(self) -> int:
        return len(self.rv_names)

    @property
    def m(self) -> int:
        return len(self.event_names)

    def with_facts(self, facts) -> IEProblem:
        return IEProblem(self.rv_names, self.event_names, tuple(facts), self.goal, self.goal_text)

    def with_goal(self, text: str) -> IEProblem:
        return IEProblem(self.rv_names, self.event_names, self.facts, parse_relation(text), text)

    def to_json(self) -> dict:
        return {"rvs": list(self.rv_names), "events": list(self.event_names),
                "facts": [f.to_json() for f in self.facts], "goal": self.goal_text}


def _check_declared(used, declared, what):
    missing = sorted(set(used) - set(declared))
    if missing:
        raise ParseError(f"undeclared {what}(s): {', '.join(missing)}")


def _check_fact(f: Fact, rvs: set, evs: set):
    if f.kind not in FACT_KINDS:
        raise ParseError(f"unknown fact kind {f.kind!r}")
    _check_declared(f.rv_names(), rvs, "random variable")
    _check_declared(f.event_names(), evs, "event")
    if f.kind == "subset_event" and len(f.events) != 2:
        raise ParseError("subset_event needs exactly two events")
    if f.kind == "disjoint_events" and len(f.events) < 2:
        raise ParseError("disjoint_events needs at least two events")
    if f.kind in ("function_of", "refines", "induces_partition") and f.target is None:
        raise ParseError(f"{f.kind} needs a random variable")
    if f.kind in ("refines", "induces_partition") and not f.events:
        raise ParseError(f"{f.kind} needs at least one event")
    if f.kind == "independent" and (not f.left or not f.right):
        raise ParseError("independent needs two nonempty sides")


# ------------------------------------------------------------------ JSON

def _as_list(v, what) -> tuple[str, ...]:
    if v is None:
        return ()
    if isinstance(v, str):
        return (v,)
    if isinstance(v, list) and all(isinstance(x, str) for x in v):
        return tuple(v)
    raise ParseError(f"{what} must be a name or a list of names")


def fact_from_json(d: dict) -> Fact:
    if not isinstance(d, dict) or "kind" not in d:
        raise ParseError("each fact must be an object with a 'kind'")
    k = d["kind"]
    if k == "subset_event":
        if "sub" in d:
            ev = (d["sub"], d.get("sup"))
        else:
            ev = _as_list(d.get("events"), "events")
        if None in ev:
            raise ParseError("subset_event needs 'sub' and 'sup'")
        return Fact(k, events=tuple(ev))
    if k == "disjoint_events":
        return Fact(k, events=_as_list(d.get("events"), "events"))
    if k == "function_of":
        return Fact(k, target=d.get("target"), given=_as_list(d.get("given"), "given"),
                    context=_as_list(d.get("context"), "context"))
    if k in ("refines", "induces_partition"):
        within = d.get("within")
        if within == OMEGA:
            within = None
        return Fact(k, target=d.get("rv"), events=_as_list(d.get("events"), "events"), within=within)
    if k == "independent":
        return Fact(k, left=_as_list(d.get("left"), "left"), right=_as_list(d.get("right"), "right"),
                    given=_as_list(d.get("given"), "given"),
                    context=_as_list(d.get("context"), "context"))
    raise ParseError(f"unknown fact kind {k!r}")


def problem_from_json(data: dict) -> IEProblem:
    if not isinstance(data, dict):
        raise ParseError("problem must be a JSON object")
    goal_text = data.get("goal", "")
    goal = parse_relation(goal_text) if goal_text else None
    return IEProblem(
        _as_list(data.get("rvs", []), "rvs"),
        _as_list(data.get("events", []), "events"),
        tuple(fact_from_json(f) for f in data.get("facts", [])),
        goal,
        goal_text,
    )


# ------------------------------------------------------------------ text

_WORD = re.compile(r"\S+")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _words(line: str):
    return [(m.group(), m.start() + 1) for m in _WORD.finditer(line)]


def _names(words, lineno, what="name"):
    out = []
    for w, col in words:
        if not _NAME.match(w):
            raise ParseError(f"expected a {what}, found {w!r}", lineno, col)
        out.append(w)
    return tuple(out)


def _split_at(words, key):
    for i, (w, _) in enumerate(words):
        if w == key:
            return words[:i], words[i + 1:], True
    return words, [], False


def _context(words, lineno):
    """``E`` or ``E & F`` after 'given'."""
    names = [(w, c) for w, c in words if w != "&"]
    return _names(names, lineno, "event name")


def _parse_text(text: str) -> IEProblem:
    rvs: list = []
    events: list = []
    facts: list = []
    goal = None
    goal_text = ""
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0]
        words = _words(line)
        if not words:
            continue
        head, col = words[0]
        rest = words[1:]
        end_col = len(line.rstrip()) + 1
        if head == "rvs":
            rvs.extend(_names(rest, lineno))
        elif head == "events":
            events.extend(_names(rest, lineno))
        elif head == "subset":
            a, b, ok = _split_at(rest, "in")
            if not ok or len(a) != 1 or len(b) != 1:
                raise ParseError("expected 'subset E1 in E2'", lineno, col)
            facts.append(Fact("subset_event", events=_names(a, lineno) + _names(b, lineno)))
        elif head == "disjoint":
            if len(rest) < 2:
                raise ParseError("expected 'disjoint E1 E2 ...'", lineno, end_col)
            facts.append(Fact("disjoint_events", events=_names(rest, lineno)))
        elif head == "function":
            tgt, after, ok = _split_at(rest, "of")
            if not ok or len(tgt) != 1:
                raise ParseError("expected 'function Y of X1 X2 [given E]'", lineno, col)
            given, ctx, _ = _split_at(after, "given")
            facts.append(Fact("function_of", target=_names(tgt, lineno)[0],
                              given=_names(given, lineno), context=_context(ctx, lineno)))
        elif head == "refines":
            tgt, after, ok = _split_at(rest, "events")
            if not ok or len(tgt) != 1:
                raise ParseError("expected 'refines X events E1 E2 [within F]'", lineno, col)
            evs, within, has_within = _split_at(after, "within")
            if has_within and len(within) != 1:
                raise ParseError("expected one event after 'within'", lineno, end_col)
            w = _names(within, lineno)[0] if has_within else None
            facts.append(Fact("refines", target=_names(tgt, lineno)[0], events=_names(evs, lineno),
                              within=None if w == OMEGA else w))
        elif head == "partition":
            tgt, evs, ok = _split_at(rest, ":")
            if not ok or len(tgt) != 1:
                raise ParseError("expected 'partition X : E1 E2 ...'", lineno, col)
            facts.append(Fact("induces_partition", target=_names(tgt, lineno)[0],
                              events=_names(evs, lineno)))
        elif head == "independent":
            left, after, ok = _split_at(rest, ";")
            if not ok:
                raise ParseError("expected 'independent X ; Y [| Z] [given E]'", lineno, col)
            after, ctx, _ = _split_at(after, "given")
            right, given, _ = _split_at(after, "|")
            facts.append(Fact("independent", left=_names(left, lineno), right=_names(right, lineno),
                              given=_names(given, lineno), context=_context(ctx, lineno)))
        elif head == "prove":
            if goal is not None:
                raise ParseError("only one 'prove' line is allowed", lineno, col)
            if not rest:
                raise ParseError("expected an inequality after 'prove'", lineno, end_col)
            start = rest[0][1]
            goal_text = line[start - 1:].strip()
            goal = parse_relation(goal_text, lineno, start)
        else:
            raise ParseError(f"unknown statement {head!r}", lineno, col)
    return IEProblem(tuple(rvs), tuple(events), tuple(facts), goal, goal_text)


def parse_problem(text: str) -> IEProblem:
    """Parse a problem in JSON (text starting with ``{``) or in the line format."""
    if text.lstrip().startswith("{"):
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
        return problem_from_json(data)
    return _parse_text(text)


def load_problem(path) -> IEProblem:
    with open(path) as fh:
        return parse_problem(fh.read())
