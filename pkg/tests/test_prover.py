from __future__ import annotations

import json
import math
import sys
from fractions import Fraction
from itertools import combinations
from pathlib import Path

import numpy as np
import pytest
from scipy.optimize import linprog

from poisson_info.errors import CertificateIndexError, FactViolationError, ParseError
from poisson_info.model import model_from_dict
from poisson_info.probability import binary_entropy
from poisson_info.prover import (
    LIVE,
    STRUCTURE,
    ZERO,
    Fact,
    IEProblem,
    apply_structural_rules,
    generate_constraints,
    load_problem,
    numeric_check,
    parse_problem,
    prove,
    verify_certificate,
)
from poisson_info.prover.prove import ProofCertificate

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"

CHANNEL = {
    "outcomes": ["00", "01", "10", "11"],
    "probs": ["9/20", "1/20", "1/20", "9/20"],
    "rvs": {
        "X": {"00": 0, "01": 0, "10": 1, "11": 1},
        "Y": {"00": 0, "01": 1, "10": 0, "11": 1},
        "W": {"00": 0, "01": 1, "10": 1, "11": 0},
    },
    "events": {"EQ": ["00", "11"], "NEQ": ["01", "10"]},
}


@pytest.fixture(scope="module")
def fano():
    return load_problem(PROBLEMS / "fano.json")


@pytest.fixture(scope="module")
def product_split():
    return load_problem(PROBLEMS / "product_split.txt")


def check_witness(res):
    """A NotProvable witness must satisfy every constraint and violate the goal part."""
    mu = res.witness
    for c in res.constraints:
        v = sum(k * mu.get(a, 0) for a, k in c.expr.coeffs.items())
        assert {"=": v == 0, ">=": v >= 0, "<=": v <= 0}[c.relation], c.label
    part = res.parts[res.failed_part]
    g = sum(k * mu.get(a, 0) for a, k in part.expr.coeffs.items()) + part.expr.const
    assert g <= 0 if part.strict else g < 0


# --------------------------------------------------------------- parsing

def test_fano_problem_parses(fano):
    assert fano.rv_names == ("X", "Y", "W")
    assert fano.event_names == ("EQ", "NEQ")
    assert len(fano.facts) == 4
    assert fano.goal.op == "<="


def test_text_and_json_agree(fano):
    again = parse_problem(json.dumps(fano.to_json()))
    assert again.facts == fano.facts
    assert again.goal == fano.goal


@pytest.mark.parametrize("text, line, col", [
    ("rvs X Y\nfoo X", 2, 1),
    ("rvs X Y\nprove H(X) <= H(Z", 2, 18),
    ("rvs X\n\nfunction X Y", 3, 1),
    ("rvs X Y\nprove H(X) <= $", 2, 15),
])
def test_text_errors_carry_position(text, line, col):
    with pytest.raises(ParseError) as info:
        parse_problem(text)
    assert (info.value.line, info.value.column) == (line, col)


def test_undeclared_names_rejected():
    with pytest.raises(ParseError):
        parse_problem("rvs X\nprove H(Y) >= 0")
    with pytest.raises(ParseError):
        parse_problem("rvs X\nevents E\ndisjoint E F")
    with pytest.raises(ParseError):
        parse_problem("rvs X X")


def test_size_limits():
    rvs = " ".join(f"X{i}" for i in range(9))
    with pytest.raises(ParseError):
        parse_problem(f"rvs {rvs}")


# ---------------------------------------------------- constraint families

def test_constraint_counts():
    one = IEProblem(("X1",), ())
    t = apply_structural_rules(one)
    labels = [c.label for c in generate_constraints(one, t)]
    assert labels == ["H(G(Omega)) = 0", "H(X1) >= 0"]

    two = IEProblem(("X1", "X2"), ())
    cons = generate_constraints(two, apply_structural_rules(two))
    assert len(cons) == 4
    assert sum(c.relation == ">=" for c in cons) == 3

    ev = IEProblem((), ("E1", "E2"))
    cons = generate_constraints(ev, apply_structural_rules(ev))
    assert [c.relation for c in cons] == ["=", "<=", "<=", "<="]


def test_conditional_entropy_nonnegative():
    p = parse_problem("rvs X Y\nprove H(X|Y) >= 0")
    res = prove(p)
    assert res.proved
    # region of H(X|Y) is the single atom {X}\{Y}
    assert dict(res.parts[0].expr.coeffs) == {0b01: 1}


def test_entropy_below_information_not_provable():
    res = prove(parse_problem("rvs X Y\nprove H(X) <= I(X;Y)"))
    assert not res.proved
    check_witness(res)


# ---------------------------------------------------------- worked cases

def test_fano_proved(fano):
    res = prove(fano)
    assert res.proved
    t = res.table
    assert sum(t.status == LIVE) == 9
    assert sum(t.status == ZERO) == 3
    assert sum(t.status == STRUCTURE) == 20
    (cert,) = res.certificates
    used = [res.constraints[k].label for k, y in enumerate(cert.multipliers) if y]
    assert used == ["I(Y;W) >= 0"]
    assert verify_certificate(fano, cert)


def test_fano_outer_atom_absent(fano):
    t = apply_structural_rules(fano)
    assert t.status[0] == STRUCTURE


def test_fano_reverse_not_provable(fano):
    res = prove(fano.with_goal("H(X|Y) >= H(W) + m((rv(X)\\rv(Y)) & ev(NEQ))"))
    assert not res.proved
    check_witness(res)


def test_product_split_proved(product_split):
    res = prove(product_split)
    assert res.proved
    assert len(res.certificates) == 2
    for cert in res.certificates:
        assert verify_certificate(product_split, cert)


@pytest.mark.parametrize("op", ["<", ">"])
def test_product_split_strict_not_provable(product_split, op):
    goal = product_split.goal_text.replace("=", op)
    res = prove(product_split.with_goal(goal))
    assert not res.proved
    check_witness(res)


@pytest.mark.parametrize("drop", ["independent", "function X of XY Y given NZ"])
def test_product_split_needs_each_key_fact(product_split, drop):
    keep = tuple(f for f in product_split.facts
                 if not (f.kind == drop or (drop.startswith("function X") and f.kind == "function_of"
                                             and f.target == "X" and f.context)))
    assert len(keep) == len(product_split.facts) - 1
    res = prove(product_split.with_facts(keep))
    assert not res.proved
    check_witness(res)


def test_strict_goal_with_constant():
    assert prove(parse_problem("rvs X\nprove H(X) + 1 > 0")).proved
    assert not prove(parse_problem("rvs X\nprove H(X) > 0")).proved
    assert not prove(parse_problem("rvs X\nprove H(X) >= 1")).proved


def test_event_measures_are_nonpositive():
    assert prove(parse_problem("events E F\nprove m(ev(E & F)) <= 0")).proved
    assert not prove(parse_problem("events E\nprove m(ev(E)) >= 0")).proved


def test_valid_but_outside_the_constraint_system():
    # P(E) H(X|E) <= H(X) holds for every binding, but the constraint families
    # never relate G(E) to the indicator of E, so it is not derivable here.
    p = parse_problem("rvs X\nevents E\nprove H(X|@E) <= H(X)")
    res = prove(p)
    assert not res.proved
    check_witness(res)
    model = model_from_dict({"outcomes": list("abc"), "probs": ["1/2", "1/3", "1/6"],
                             "rvs": {"X": {"a": 0, "b": 1, "c": 2}}, "events": {"E": ["a", "c"]}})
    assert numeric_check(p, model).holds


def test_unsupported_goal_terms():
    with pytest.raises(ParseError):
        prove(parse_problem("rvs X\nevents E\nprove P(E) >= 0"))
    with pytest.raises(ParseError):
        prove(parse_problem("rvs X\nevents E F\nprove m(cross(E, F)) <= 0"))
    with pytest.raises(ParseError):
        prove(parse_problem("rvs X\nevents E F\nprove m(ev(E | F)) <= 0"))


# ------------------------------------------------------------ certificates

def test_certificate_round_trip(fano):
    res = prove(fano)
    cert = res.certificates[0]
    back = ProofCertificate.from_json(cert.to_json(), len(res.constraints))
    assert back == cert
    assert verify_certificate(fano, back)


def test_corrupted_certificate_rejected(fano):
    res = prove(fano)
    cert = res.certificates[0]
    k = next(i for i, y in enumerate(cert.multipliers) if y)
    bad = list(cert.multipliers)
    bad[k] += Fraction(1, 2)
    assert not verify_certificate(fano, ProofCertificate(cert.part, tuple(bad)))
    neg = [Fraction(0)] * len(bad)
    neg[k] = Fraction(-1)
    assert not verify_certificate(fano, ProofCertificate(cert.part, tuple(neg)))


def test_certificate_index_errors(fano):
    res = prove(fano)
    with pytest.raises(CertificateIndexError):
        verify_certificate(fano, ProofCertificate(0, (Fraction(1),)))
    with pytest.raises(CertificateIndexError):
        ProofCertificate.from_json({"part": 0, "multipliers": {"999": "1"}}, len(res.constraints))
    with pytest.raises(CertificateIndexError):
        verify_certificate(fano, ProofCertificate(5, res.certificates[0].multipliers))


# ------------------------------------------------------------ monotonicity

def _random_problem(rng, n, m):
    rvs = [f"X{i}" for i in range(n)]
    evs = [f"E{j}" for j in range(m)]
    facts = []
    for _ in range(rng.integers(0, 3)):
        kind = rng.choice(["function_of", "subset_event", "disjoint_events", "independent"])
        if kind == "function_of":
            t = rng.choice(rvs)
            given = tuple(x for x in rvs if x != t and rng.random() < 0.5)
            ctx = tuple(e for e in evs if rng.random() < 0.4)
            facts.append(Fact("function_of", target=t, given=given, context=ctx))
        elif kind in ("subset_event", "disjoint_events") and m >= 2:
            facts.append(Fact(kind, events=tuple(rng.choice(evs, 2, replace=False))))
        elif kind == "independent" and n >= 2:
            a, b = rng.choice(rvs, 2, replace=False)
            facts.append(Fact("independent", left=(a,), right=(b,)))
    return rvs, evs, facts


def _random_goal(rng, rvs, evs):
    terms = []
    for _ in range(rng.integers(1, 4)):
        c = int(rng.integers(-2, 3)) or 1
        if evs and rng.random() < 0.3:
            terms.append(f"{c}*m(rv({rng.choice(rvs)}) & ev({rng.choice(evs)}))")
        else:
            x = rng.choice(rvs)
            rest = [y for y in rvs if y != x and rng.random() < 0.5]
            terms.append(f"{c}*H({x}|{','.join(rest)})" if rest else f"{c}*H({x})")
    return " + ".join(terms) + " >= 0"


def test_adding_facts_is_monotone():
    rng = np.random.default_rng(7)
    for _ in range(60):
        n, m = int(rng.integers(1, 4)), int(rng.integers(0, 3))
        rvs, evs, facts = _random_problem(rng, n, m)
        base = IEProblem(tuple(rvs), tuple(evs), ())
        base = base.with_goal(_random_goal(rng, rvs, evs))
        r0 = prove(base).proved
        r1 = prove(base.with_facts(tuple(facts))).proved
        assert r1 or not r0
        if not r1:
            check_witness(prove(base.with_facts(tuple(facts))))


# ---------------------------------------------- classical polymatroid oracle

def _h_index(n):
    subsets = [s for s in range(1, 1 << n)]
    return {s: i for i, s in enumerate(subsets)}


def _elemental_rows(n):
    idx = _h_index(n)
    full = (1 << n) - 1
    rows = []

    def vec(terms):
        v = np.zeros(len(idx))
        for s, c in terms:
            if s:
                v[idx[s]] += c
        return v

    for i in range(n):
        rows.append(vec([(full, 1), (full & ~(1 << i), -1)]))
    for i, j in combinations(range(n), 2):
        others = [k for k in range(n) if k not in (i, j)]
        for r in range(len(others) + 1):
            for K in combinations(others, r):
                Km = sum(1 << k for k in K)
                rows.append(vec([(Km | 1 << i, 1), (Km | 1 << j, 1), (Km | 1 << i | 1 << j, -1), (Km, -1)]))
    return np.array(rows)


def _shannon_provable(n, goal):
    """Is ``goal . h >= 0`` implied by the elemental inequalities?  The cone
    is scaled to a box so the LP is bounded."""
    A = _elemental_rows(n)
    res = linprog(goal, A_ub=-A, b_ub=np.zeros(len(A)), bounds=[(0, 1)] * A.shape[1], method="highs")
    assert res.status == 0
    return res.fun >= -1e-9


def _cmi_terms(a, b, k):
    # I(A;B|K) = h(AK) + h(BK) - h(ABK) - h(K)
    return [(a | k, 1), (b | k, 1), (a | b | k, -1), (k, -1)]


def _terms_to_vec(n, terms):
    idx = _h_index(n)
    v = np.zeros(len(idx))
    for s, c in terms:
        if s:
            v[idx[s]] += c
    return v


def _names(mask, n):
    return ",".join(f"X{i}" for i in range(n) if mask >> i & 1)


def test_classical_cross_check_random():
    rng = np.random.default_rng(11)
    seen = {True: 0, False: 0}
    for _ in range(60):
        n = int(rng.integers(2, 4))
        terms, parts = [], []
        for _ in range(rng.integers(1, 4)):
            c = int(rng.choice([-2, -1, 1, 1, 2]))
            a, b = (int(x) for x in rng.integers(1, 1 << n, 2))
            k = int(rng.integers(0, 1 << n)) & ~(a | b)
            terms += [(s, c * w) for s, w in _cmi_terms(a, b, k)]
            given = f"|{_names(k, n)}" if k else ""
            parts.append(f"{c}*I({_names(a, n)};{_names(b, n)}{given})")
        goal = " + ".join(parts) + " >= 0"
        expected = _shannon_provable(n, _terms_to_vec(n, terms))
        p = IEProblem(tuple(f"X{i}" for i in range(n)), ()).with_goal(goal)
        res = prove(p)
        assert res.proved == expected, goal
        seen[expected] += 1
        if not res.proved:
            check_witness(res)
    assert seen[True] > 5 and seen[False] > 5


def test_zhang_yeung_not_shannon():
    # 2I(C;D) <= I(A;B) + I(A;CD) + 3I(C;D|A) + I(C;D|B) is non-Shannon
    A, B, C, D = 1, 2, 4, 8
    terms = []
    for (a, b, k), c in [((C, D, 0), -2), ((A, B, 0), 1), ((A, C | D, 0), 1), ((C, D, A), 3), ((C, D, B), 1)]:
        terms += [(s, c * w) for s, w in _cmi_terms(a, b, k)]
    assert not _shannon_provable(4, _terms_to_vec(4, terms))
    p = IEProblem(("A", "B", "C", "D"), ()).with_goal(
        "2*I(C;D) <= I(A;B) + I(A;C,D) + 3*I(C;D|A) + I(C;D|B)")
    res = prove(p)
    assert not res.proved
    check_witness(res)


# ------------------------------------------------------------ numeric check

def test_numeric_check_binary_channel(fano):
    model = model_from_dict(CHANNEL)
    rep = numeric_check(fano, model)
    assert rep.holds
    assert rep.goal_lhs == pytest.approx(binary_entropy(0.1), abs=1e-12)
    assert rep.goal_rhs == pytest.approx(binary_entropy(0.1), abs=1e-12)
    assert rep.max_eliminated < 1e-12
    assert rep.constraint_residual < 1e-12
    assert rep.notes == []


def test_numeric_check_atoms_sum_to_quantities(fano):
    model = model_from_dict(CHANNEL)
    rep = numeric_check(fano, model)
    # H(X) is the sum of all atoms inside G~(X)
    hx = math.fsum(v for a, v in rep.atom_values.items() if a & 1)
    assert hx == pytest.approx(math.log(2), abs=1e-12)


def test_binding_violating_disjointness_rejected(fano):
    bad = dict(CHANNEL, events={"EQ": ["00", "11", "01"], "NEQ": ["01", "10"]})
    with pytest.raises(FactViolationError):
        numeric_check(fano, model_from_dict(bad))


def test_binding_violating_function_fact_rejected(fano):
    bad = dict(CHANNEL)
    bad["rvs"] = dict(CHANNEL["rvs"], W={"00": 0, "01": 1, "10": 1, "11": 1})
    with pytest.raises(FactViolationError):
        numeric_check(fano, model_from_dict(bad))


def test_numeric_check_independence_fact():
    p = parse_problem("rvs X Y\nindependent X ; Y\nprove I(X;Y) = 0")
    assert prove(p).proved
    indep = {"outcomes": list("abcd"), "probs": ["1/4"] * 4,
             "rvs": {"X": {"a": 0, "b": 0, "c": 1, "d": 1}, "Y": {"a": 0, "b": 1, "c": 0, "d": 1}}}
    assert numeric_check(p, model_from_dict(indep)).holds
    dep = dict(indep, rvs={"X": indep["rvs"]["X"], "Y": indep["rvs"]["X"]})
    with pytest.raises(FactViolationError):
        numeric_check(p, model_from_dict(dep))


def test_prove_module_reachable():
    # the package re-exports the function under the module's name
    mod = sys.modules["poisson_info.prover.prove"]
    assert mod.prove is prove


def test_partition_diagram_live_atoms():
    p = parse_problem("rvs X\nevents E1 E2\npartition X : E1 E2")
    t = apply_structural_rules(p)
    assert sorted(t.label(a) for a in t.live) == ["X @-", "outer @E1\\E2", "outer @E2\\E1"]
    assert t.status[0] == STRUCTURE


def test_partition_atoms_vanish_numerically():
    p = parse_problem("rvs X\nevents E1 E2\npartition X : E1 E2\nprove H(X) >= 0")
    model = model_from_dict({"outcomes": list("abcd"), "probs": ["1/8", "3/8", "1/4", "1/4"],
                             "rvs": {"X": {"a": 0, "b": 0, "c": 1, "d": 1}},
                             "events": {"E1": ["a", "b"], "E2": ["c", "d"]}})
    rep = numeric_check(p, model)
    assert rep.max_eliminated < 1e-9
    assert rep.holds
