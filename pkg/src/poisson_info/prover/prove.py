"""LP-based proving of information-event inequalities with exact certificates.

Every generated constraint is homogeneous, so the feasible atom
assignments form a cone.  A goal normalized to ``c . mu + c0 >= 0`` is
implied exactly when ``c0 >= 0`` and ``c`` is a combination of the
constraint rows with nonnegative weights on inequality rows (equality rows
take weights of either sign).  For a strict goal ``c0 > 0`` is required,
since ``mu = 0`` is feasible.  When no combination exists, the Farkas
vector of the phase-1 problem is a feasible assignment that violates the
goal after scaling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations

from .. import canonical as cs
from ..errors import CertificateIndexError, FactViolationError, ParseError
from ..measure import measure
from ..model import Model, eval_quantity
from .atoms import (
    LIVE,
    AtomTable,
    Constraint,
    LinearExpr,
    apply_structural_rules,
    expr_to_linear,
    generate_constraints,
)
from .lp import solve_nonneg
from .problem import IEProblem

__all__ = [
    "GoalPart",
    "ProofCertificate",
    "ProofResult",
    "NumericReport",
    "goal_parts",
    "prove",
    "verify_certificate",
    "numeric_check",
    "check_facts",
]


@dataclass(frozen=True)
class GoalPart:
    """One normalized half ``expr >= 0`` (or ``> 0``) of the goal."""

    expr: LinearExpr
    strict: bool
    text: str


@dataclass(frozen=True)
class ProofCertificate:
    """Multipliers, aligned with the generated constraint list, for one goal part."""

    part: int
    multipliers: tuple[Fraction, ...]

    def to_json(self) -> dict:
        return {"part": self.part,
                "multipliers": {str(k): str(v) for k, v in enumerate(self.multipliers) if v}}

    @classmethod
    def from_json(cls, data: dict, n_constraints: int) -> ProofCertificate:
        mult = [Fraction(0)] * n_constraints
        for k, v in data["multipliers"].items():
            k = int(k)
            if not 0 <= k < n_constraints:
                raise CertificateIndexError(f"constraint index {k} out of range")
            mult[k] = Fraction(v)
        return cls(int(data["part"]), tuple(mult))


@dataclass(frozen=True)
class ProofResult:
    proved: bool
    table: AtomTable
    constraints: tuple[Constraint, ...]
    parts: tuple[GoalPart, ...]
    certificates: tuple[ProofCertificate, ...] = ()
    witness: dict | None = None          # atom id -> Fraction
    failed_part: int | None = None

    @property
    def status(self) -> str:
        return "Proved" if self.proved else "NotProvable"


def goal_parts(problem: IEProblem, table: AtomTable) -> tuple[GoalPart, ...]:
    if problem.goal is None:
        raise ParseError("problem has no goal")
    g = problem.goal
    lhs = expr_to_linear(g.lhs, problem).restrict(table)
    rhs = expr_to_linear(g.rhs, problem).restrict(table)
    if g.op in (">=", ">"):
        return (GoalPart(lhs - rhs, g.op == ">", "lhs - rhs"),)
    if g.op in ("<=", "<"):
        return (GoalPart(rhs - lhs, g.op == "<", "rhs - lhs"),)
    return (GoalPart(lhs - rhs, False, "lhs - rhs"), GoalPart(rhs - lhs, False, "rhs - lhs"))


def _row_sign(c: Constraint) -> int:
    """Orientation making an inequality row read ``row . mu >= 0``."""
    return -1 if c.relation == "<=" else 1


def _prove_part(part: GoalPart, constraints, live: list[int]):
    """Certificate multipliers for one part, or a violating assignment."""
    zero = Fraction(0)
    need = zero < part.expr.const if part.strict else zero <= part.expr.const
    if not need:
        return None, {a: zero for a in live}
    pos = {a: i for i, a in enumerate(live)}
    columns = []   # (constraint index, sign)
    for k, c in enumerate(constraints):
        s = _row_sign(c)
        columns.append((k, s))
        if c.relation == "=":
            columns.append((k, -1))
    M = [[zero] * len(columns) for _ in live]
    for j, (k, s) in enumerate(columns):
        for a, v in constraints[k].expr.coeffs.items():
            M[pos[a]][j] = v * s
    target = [part.expr.coeffs.get(a, zero) for a in live]
    res = solve_nonneg(M, target)
    if res.feasible:
        mult = [zero] * len(constraints)
        for (k, s), x in zip(columns, res.x):
            if x:
                mult[k] += s * x
        return tuple(mult), None
    w = res.farkas
    cw = sum(t * x for t, x in zip(target, w))
    scale = (part.expr.const + 1) / -cw
    return None, {a: w[i] * scale for i, a in enumerate(live)}


def prove(problem: IEProblem) -> ProofResult:
    """Decide whether the goal follows from the facts and the Shannon-type
    plus event constraints."""
    table = apply_structural_rules(problem)
    constraints = tuple(generate_constraints(problem, table))
    parts = goal_parts(problem, table)
    live = table.live
    certs = []
    for i, part in enumerate(parts):
        mult, witness = _prove_part(part, constraints, live)
        if mult is None:
            return ProofResult(False, table, constraints, parts, tuple(certs), witness, i)
        certs.append(ProofCertificate(i, mult))
    return ProofResult(True, table, constraints, parts, tuple(certs))


def verify_certificate(problem: IEProblem, certificate: ProofCertificate) -> bool:
    """Exact check that the weighted constraints reproduce the goal part.

    Regenerates constraints from ``problem``; raises
    :class:`CertificateIndexError` if the certificate does not line up.
    """
    table = apply_structural_rules(problem)
    constraints = generate_constraints(problem, table)
    parts = goal_parts(problem, table)
    if len(certificate.multipliers) != len(constraints):
        raise CertificateIndexError(
            f"certificate has {len(certificate.multipliers)} multipliers, "
            f"problem generates {len(constraints)} constraints")
    if not 0 <= certificate.part < len(parts):
        raise CertificateIndexError(f"goal part {certificate.part} does not exist")
    part = parts[certificate.part]
    if part.strict and not part.expr.const > 0:
        return False
    if part.expr.const < 0:
        return False
    acc: dict = {}
    for c, y in zip(constraints, certificate.multipliers):
        if not y:
            continue
        if c.relation != "=" and y < 0:
            return False
        y = y * _row_sign(c)
        for a, v in c.expr.coeffs.items():
            acc[a] = acc.get(a, Fraction(0)) + y * v
    acc = {a: v for a, v in acc.items() if v}
    return acc == {a: v for a, v in part.expr.coeffs.items() if v}


# ----------------------------------------------------------- numeric check

@dataclass
class NumericReport:
    atom_values: dict                     # atom id -> float (nats)
    max_eliminated: float
    constraint_residual: float            # worst violation of a generated constraint
    goal_lhs: float
    goal_rhs: float
    goal_atoms: float                     # the normalized goal part(s) evaluated on atoms
    relation: str
    holds: bool
    tol: float
    notes: list = field(default_factory=list)

    @property
    def slack(self) -> float:
        return self.goal_atoms


def _support(model: Model) -> int:
    return model.space.support_mask


def _ctx(model: Model, names) -> int:
    E = model.space.full_mask
    for e in names:
        E &= model.event(e).members
    return E


def _block_masks(model: Model, names, within: int) -> list[int]:
    if not names:
        return [within] if within else []
    from ..probability import joint

    X = joint(*(model.rv(x) for x in names))
    return [b & within for b in X.block_masks.values() if b & within]


def _constant_on(model: Model, name: str, given, region: int) -> bool:
    """Is ``name`` a function of ``given`` on the outcomes in ``region``?"""
    Y = model.rv(name)
    for block in _block_masks(model, given, region):
        vals = {Y.labeling[i] for i in range(model.space.n) if block >> i & 1}
        if len(vals) > 1:
            return False
    return True


def check_facts(problem: IEProblem, model: Model):
    """Raise :class:`FactViolationError` unless the binding satisfies every
    fact on the support of ``P`` (independence is checked exactly)."""
    supp = _support(model)
    for f in problem.facts:
        ok = True
        if f.kind == "subset_event":
            a, b = (model.event(e).members & supp for e in f.events)
            ok = a & ~b == 0
        elif f.kind in ("disjoint_events", "induces_partition"):
            masks = [model.event(e).members & supp for e in f.events]
            ok = all(x & y == 0 for x, y in combinations(masks, 2))
        if ok and f.kind == "function_of":
            ok = _constant_on(model, f.target, f.given, _ctx(model, f.context) & supp)
        if ok and f.kind in ("refines", "induces_partition"):
            within = (model.event(f.within).members if f.within else model.space.full_mask) & supp
            masks = [model.event(e).members for e in f.events]
            for block in _block_masks(model, [f.target], within):
                if not any(block & ~E == 0 for E in masks):
                    ok = False
        if ok and f.kind == "induces_partition":
            ok = all(_constant_on(model, f.target, (), model.event(e).members & supp) for e in f.events)
        if ok and f.kind == "independent":
            ok = _independent(model, f)
        if not ok:
            raise FactViolationError(f"binding violates fact: {f.describe()}")


def _independent(model: Model, f) -> bool:
    from ..probability import joint

    space = model.space
    E = _ctx(model, f.context)
    const = space.constant_rv()

    def rv(names):
        return joint(*(model.rv(x) for x in names)) if names else const

    L, R, G = rv(f.left), rv(f.right), rv(f.given)
    pg, plg, prg, plrg = {}, {}, {}, {}
    for i in range(space.n):
        if not E >> i & 1:
            continue
        p = space.probs[i]
        l, r, g = L.labeling[i], R.labeling[i], G.labeling[i]
        pg[g] = pg.get(g, 0) + p
        plg[l, g] = plg.get((l, g), 0) + p
        prg[r, g] = prg.get((r, g), 0) + p
        plrg[l, r, g] = plrg.get((l, r, g), 0) + p
    for (l, g), a in plg.items():
        for (r, g2), b in prg.items():
            if g2 == g and plrg.get((l, r, g), 0) * pg[g] != a * b:
                return False
    return True


def atom_sets(problem: IEProblem, model: Model) -> dict:
    """Concrete canonical set of every atom."""
    space = model.space
    G = [cs.from_rv(model.rv(x)) for x in problem.rv_names]
    E = [cs.from_event(model.event(e)) for e in problem.event_names]
    n, m = problem.n, problem.m
    out = {}
    for a in range(1 << (n + m)):
        A = cs.full(space)
        for i in range(n):
            A = A & G[i] if a >> i & 1 else A - G[i]
        for j in range(m):
            A = A & E[j] if a >> (n + j) & 1 else A - E[j]
        out[a] = A
    return out


def numeric_check(problem: IEProblem, model: Model, *, tol: float = 1e-9,
                  max_omega: int | None = None) -> NumericReport:
    """Evaluate every atom on a concrete binding and test the goal there.

    The goal's two sides are also evaluated directly (``H``/``I`` through
    the classical formulas, ``m`` through the set engine) as an independent
    cross-check of the atom sums.
    """
    check_facts(problem, model)
    table = apply_structural_rules(problem)
    sets = atom_sets(problem, model)
    values = {a: measure(A, max_omega=max_omega) for a, A in sets.items()}
    elim = [abs(values[a]) for a in range(table.size) if table.status[a] != LIVE]
    max_elim = max(elim, default=0.0)
    worst = 0.0
    for c in generate_constraints(problem, table):
        v = math.fsum(float(k) * values[a] for a, k in c.expr.coeffs.items())
        bad = {"=": abs(v), ">=": -v, "<=": v}[c.relation]
        worst = max(worst, bad)
    g = problem.goal
    lhs = eval_quantity(g.lhs, model, max_omega=max_omega)
    rhs = eval_quantity(g.rhs, model, max_omega=max_omega)
    parts = goal_parts(problem, table)
    atom_vals = [math.fsum(float(k) * values[a] for a, k in p.expr.coeffs.items()) + float(p.expr.const)
                 for p in parts]
    notes = []
    direct = lhs - rhs if g.op in (">=", ">", "=") else rhs - lhs
    if abs(direct - atom_vals[0]) > max(tol, 1e-9) * 10:
        notes.append(f"atom sum {atom_vals[0]:.9g} differs from direct evaluation {direct:.9g}")
    if g.op in (">=", "<="):
        holds = atom_vals[0] >= -tol
    elif g.op in (">", "<"):
        holds = atom_vals[0] > tol
    else:
        holds = abs(atom_vals[0]) <= tol
    return NumericReport(values, max_elim, worst, lhs, rhs, atom_vals[0], g.op, holds, tol, notes)
