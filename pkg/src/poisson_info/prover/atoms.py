"""Atoms of the information-event diagram, structural elimination and the
Shannon-type constraint families.

An atom is indexed by ``(S, S')`` with ``S`` a subset of the random
variables and ``S'`` a subset of the events; it is the part of the diagram
inside ``G~(X_i)`` exactly for ``i in S`` and inside ``G(E_j)`` exactly for
``j in S'``.  Its integer id is ``S | (S' << n)``.

Eliminated atoms carry measure zero.  Two reasons are distinguished: a
*structure* atom is empty because of how events and partitions relate
(it is not drawn in a diagram), a *zero* atom is a drawn cell whose
measure vanishes because one variable is determined by others.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from ..errors import ParseError
from ..expr import (
    OMEGA,
    EvName,
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
from ..model import fraction_value
from .problem import IEProblem

__all__ = [
    "LIVE",
    "STRUCTURE",
    "ZERO",
    "AtomTable",
    "Constraint",
    "LinearExpr",
    "apply_structural_rules",
    "generate_constraints",
    "expr_to_linear",
    "region_mask",
]

LIVE, STRUCTURE, ZERO = 0, 1, 2
_STATUS_NAMES = {LIVE: "live", STRUCTURE: "absent", ZERO: "zero"}


@dataclass(frozen=True)
class AtomTable:
    rv_names: tuple[str, ...]
    event_names: tuple[str, ...]
    status: np.ndarray   # per atom id: LIVE, STRUCTURE or ZERO
    reason: tuple[str, ...]

    @property
    def n(self) -> int:
        return len(self.rv_names)

    @property
    def m(self) -> int:
        return len(self.event_names)

    @property
    def size(self) -> int:
        return 1 << (self.n + self.m)

    def split(self, atom: int) -> tuple[int, int]:
        return atom & ((1 << self.n) - 1), atom >> self.n

    @property
    def live(self) -> list[int]:
        return [int(a) for a in np.flatnonzero(self.status == LIVE)]

    def status_name(self, atom: int) -> str:
        return _STATUS_NAMES[int(self.status[atom])]

    def members(self, atom: int) -> tuple[list[str], list[str]]:
        S, Sp = self.split(atom)
        return ([x for i, x in enumerate(self.rv_names) if S >> i & 1],
                [e for j, e in enumerate(self.event_names) if Sp >> j & 1])

    def label(self, atom: int) -> str:
        """Symbolic region of one atom, e.g. ``X&Y\\W @EQ\\NEQ``."""
        S, Sp = self.split(atom)
        ins, evs = self.members(atom)
        outs = [x for i, x in enumerate(self.rv_names) if not S >> i & 1]
        eouts = [e for j, e in enumerate(self.event_names) if not Sp >> j & 1]
        left = "&".join(ins) if ins else "outer"
        if ins and outs:
            left += "\\" + ",".join(outs)
        right = ""
        if self.m:
            right = " @" + ("&".join(evs) if evs else "-")
            if evs and eouts:
                right += "\\" + ",".join(eouts)
        return left + right


def _ids(n, m):
    ids = np.arange(1 << (n + m), dtype=np.int64)
    return ids & ((1 << n) - 1), ids >> n


def _rv_mask(problem: IEProblem, names) -> int:
    idx = {x: i for i, x in enumerate(problem.rv_names)}
    out = 0
    for x in names:
        out |= 1 << idx[x]
    return out


def _ev_mask(problem: IEProblem, names) -> int:
    idx = {e: j for j, e in enumerate(problem.event_names)}
    out = 0
    for e in names:
        if e != OMEGA:
            out |= 1 << idx[e]
    return out


def apply_structural_rules(problem: IEProblem) -> AtomTable:
    """Eliminate atoms implied empty (or measure-zero) by the facts."""
    n, m = problem.n, problem.m
    S, Sp = _ids(n, m)
    status = np.full(1 << (n + m), LIVE, dtype=np.int8)
    reason = [""] * (1 << (n + m))

    def kill(mask, code, why):
        for a in np.flatnonzero(mask & (status == LIVE)):
            status[a] = code
            reason[a] = why

    def disjoint(evs, why):
        for e1, e2 in combinations(evs, 2):
            both = _ev_mask(problem, [e1, e2])
            kill((Sp & both) == both, STRUCTURE, why)

    def function_of(target_mask, given_mask, ctx_mask, code, why):
        kill(((S & target_mask) != 0) & ((S & given_mask) == 0) & ((Sp & ctx_mask) == ctx_mask), code, why)

    def refines(x_mask, ev_mask, within_mask, why):
        kill(((Sp & within_mask) == within_mask) & ((S & x_mask) == 0) & ((Sp & ev_mask) == 0),
             STRUCTURE, why)

    for f in problem.facts:
        why = f.describe()
        if f.kind == "subset_event":
            a, b = _ev_mask(problem, f.events[:1]), _ev_mask(problem, f.events[1:])
            kill(((Sp & a) != 0) & ((Sp & b) == 0), STRUCTURE, why)
        elif f.kind == "disjoint_events":
            disjoint(f.events, why)
        elif f.kind == "function_of":
            function_of(_rv_mask(problem, [f.target]), _rv_mask(problem, f.given),
                        _ev_mask(problem, f.context), ZERO, why)
        elif f.kind == "refines":
            within = _ev_mask(problem, [f.within]) if f.within else 0
            refines(_rv_mask(problem, [f.target]), _ev_mask(problem, f.events), within, why)
        elif f.kind == "induces_partition":
            x = _rv_mask(problem, [f.target])
            for e in f.events:
                function_of(x, 0, _ev_mask(problem, [e]), STRUCTURE, why)
            refines(x, _ev_mask(problem, f.events), 0, why)
            disjoint(f.events, why)
    return AtomTable(problem.rv_names, problem.event_names, status, tuple(reason))


@dataclass(frozen=True)
class LinearExpr:
    """``sum_a coeffs[a] mu(a) + const`` with exact rational coefficients."""

    coeffs: dict
    const: Fraction = Fraction(0)

    def __add__(self, other: LinearExpr) -> LinearExpr:
        c = dict(self.coeffs)
        for a, v in other.coeffs.items():
            c[a] = c.get(a, Fraction(0)) + v
        return LinearExpr({a: v for a, v in c.items() if v}, self.const + other.const)

    def scale(self, k: Fraction) -> LinearExpr:
        if k == 0:
            return LinearExpr({}, Fraction(0))
        return LinearExpr({a: v * k for a, v in self.coeffs.items()}, self.const * k)

    def __neg__(self) -> LinearExpr:
        return self.scale(Fraction(-1))

    def __sub__(self, other: LinearExpr) -> LinearExpr:
        return self + (-other)

    def restrict(self, table: AtomTable) -> LinearExpr:
        """Drop eliminated atoms, whose measure is zero."""
        return LinearExpr({a: v for a, v in self.coeffs.items() if table.status[a] == LIVE}, self.const)

    @classmethod
    def indicator(cls, mask: np.ndarray) -> LinearExpr:
        return cls({int(a): Fraction(1) for a in np.flatnonzero(mask)})

    def format(self, table: AtomTable) -> str:
        parts = []
        for a in sorted(self.coeffs):
            v = self.coeffs[a]
            parts.append(f"{'+' if v > 0 else '-'} {'' if abs(v) == 1 else str(abs(v)) + '*'}mu[{table.label(a)}]")
        if self.const or not parts:
            parts.append(f"{'+' if self.const >= 0 else '-'} {abs(self.const)}")
        s = " ".join(parts)
        return s[2:] if s.startswith("+ ") else "-" + s[2:]


@dataclass(frozen=True)
class Constraint:
    expr: LinearExpr
    relation: str    # '=', '>=' or '<='
    label: str


def _event_context_mask(problem: IEProblem, node) -> int:
    """Event nodes usable in the symbolic prover: names and intersections."""
    if isinstance(node, EvName):
        if node.name == OMEGA:
            return 0
        if node.name not in problem.event_names:
            raise ParseError(f"undeclared event {node.name!r}")
        return _ev_mask(problem, [node.name])
    if isinstance(node, EvOp) and node.op == "&":
        return _event_context_mask(problem, node.left) | _event_context_mask(problem, node.right)
    raise ParseError("the prover only supports events that are names or intersections of names "
                     "(G of a union or complement is not a diagram region)")


def region_mask(node, problem: IEProblem) -> np.ndarray:
    """Atoms making up a set expression, as a Boolean vector over atom ids."""
    n, m = problem.n, problem.m
    S, Sp = _ids(n, m)
    if isinstance(node, SetRV):
        for x in node.names:
            if x not in problem.rv_names:
                raise ParseError(f"undeclared random variable {x!r}")
        return (S & _rv_mask(problem, node.names)) != 0
    if isinstance(node, SetEv):
        J = _event_context_mask(problem, node.event)
        return (Sp & J) == J
    if isinstance(node, SetConst):
        return np.full(S.shape, node.full)
    if isinstance(node, (SetCross, SetMulti)):
        kind = node.kind if isinstance(node, SetCross) else "multi"
        raise ParseError(f"{kind}() sets are not supported by the symbolic prover")
    if isinstance(node, SetNot):
        return ~region_mask(node.arg, problem)
    if isinstance(node, SetOp):
        a, b = region_mask(node.left, problem), region_mask(node.right, problem)
        return {"&": a & b, "|": a | b, "\\": a & ~b}[node.op]
    raise ParseError(f"not a set expression: {type(node).__name__}")


def _info_region(problem, groups, ctx) -> np.ndarray:
    S, Sp = _ids(problem.n, problem.m)
    for g in list(groups) + [ctx.rvs]:
        for x in g:
            if x not in problem.rv_names:
                raise ParseError(f"undeclared random variable {x!r}")
    mask = np.ones(S.shape, dtype=bool)
    for g in groups:
        mask &= (S & _rv_mask(problem, g)) != 0
    mask &= (S & _rv_mask(problem, ctx.rvs)) == 0
    J = 0
    for e in ctx.events:
        J |= _event_context_mask(problem, e)
    return mask & ((Sp & J) == J)


def expr_to_linear(node, problem: IEProblem) -> LinearExpr:
    """Linear form of a quantity over atom measures.

    A quantity with an event context is the *measure* of the conditioned
    region, i.e. ``H(X|@E)`` stands for ``P(E) H(X|E)``.
    """
    if isinstance(node, Num):
        return LinearExpr({}, node.value)
    if isinstance(node, QH):
        return LinearExpr.indicator(_info_region(problem, [node.names], node.ctx))
    if isinstance(node, QI):
        return LinearExpr.indicator(_info_region(problem, node.groups, node.ctx))
    if isinstance(node, QM):
        return LinearExpr.indicator(region_mask(node.region, problem))
    if isinstance(node, QP):
        raise ParseError("P() is not linear in atom measures; use it with 'check' only")
    if isinstance(node, QNeg):
        return -expr_to_linear(node.arg, problem)
    if isinstance(node, QBin):
        if node.op == "*":
            a, b = fraction_value(node.left), fraction_value(node.right)
            if a is not None:
                return expr_to_linear(node.right, problem).scale(a)
            if b is not None:
                return expr_to_linear(node.left, problem).scale(b)
            raise ParseError("products of two measures are not linear")
        a, b = expr_to_linear(node.left, problem), expr_to_linear(node.right, problem)
        return a + b if node.op == "+" else a - b
    raise ParseError(f"not a quantity: {type(node).__name__}")


def _names(names, mask):
    return [x for i, x in enumerate(names) if mask >> i & 1]


def _ctx_text(events, J):
    evs = _names(events, J)
    return ", @" + " & ".join(evs) if evs else ""


def generate_constraints(problem: IEProblem, table: AtomTable) -> list[Constraint]:
    """Total-measure, event and elemental Shannon-type constraints on live atoms.

    All-zero rows are dropped and duplicate rows keep their first label.
    """
    n, m = problem.n, problem.m
    S, Sp = _ids(n, m)
    live = table.status == LIVE
    rows: list[Constraint] = []

    def add(mask, rel, label):
        rows.append(Constraint(LinearExpr.indicator(mask & live), rel, label))

    add(np.ones(S.shape, dtype=bool), "=", "H(G(Omega)) = 0")
    for r in range(1, m + 1):
        for J in combinations(range(m), r):
            Jm = sum(1 << j for j in J)
            add((Sp & Jm) == Jm, "<=", f"m(ev({' & '.join(_names(problem.event_names, Jm))})) <= 0")
    rv = problem.rv_names
    full = (1 << n) - 1
    for J in range(1 << m):
        in_ctx = (Sp & J) == J
        for i in range(n):
            rest = full & ~(1 << i)
            given = ",".join(_names(rv, rest))
            cond = f"|{given}" if given else ""
            ctx = _ctx_text(problem.event_names, J)
            if ctx and not cond:
                ctx = "|" + ctx[2:]
            add(((S >> i) & 1 == 1) & ((S & rest) == 0) & in_ctx, ">=", f"H({rv[i]}{cond}{ctx}) >= 0")
        for i, j in combinations(range(n), 2):
            others = [k for k in range(n) if k not in (i, j)]
            pair = (1 << i) | (1 << j)
            for r in range(len(others) + 1):
                for K in combinations(others, r):
                    Km = sum(1 << k for k in K)
                    given = ",".join(rv[k] for k in K)
                    ctx = _ctx_text(problem.event_names, J)
                    tail = f"|{given}{ctx}" if given else (f"|{ctx[2:]}" if ctx else "")
                    add(((S & pair) == pair) & ((S & Km) == 0) & in_ctx, ">=",
                        f"I({rv[i]};{rv[j]}{tail}) >= 0")
    for f in problem.facts:
        if f.kind == "independent":
            L, R, G = (_rv_mask(problem, x) for x in (f.left, f.right, f.given))
            Jm = _ev_mask(problem, f.context)
            mask = ((S & L) != 0) & ((S & R) != 0) & ((S & G) == 0) & ((Sp & Jm) == Jm)
            add(mask, "=", f"{f.describe()}: I = 0")
    out, seen = [], set()
    for c in rows:
        if not c.expr.coeffs:
            continue
        key = (tuple(sorted(c.expr.coeffs.items())), c.relation)
        if key in seen:
            continue
        seen.add(key)
        out.append(c)
    return out
