"""Symbolic information-event prover."""

from __future__ import annotations

from .atoms import (
    LIVE,
    STRUCTURE,
    ZERO,
    AtomTable,
    Constraint,
    LinearExpr,
    apply_structural_rules,
    expr_to_linear,
    generate_constraints,
    region_mask,
)
from .lp import FeasibilityResult, solve_nonneg
from .problem import FACT_KINDS, Fact, IEProblem, load_problem, parse_problem
from .prove import (
    NumericReport,
    ProofCertificate,
    ProofResult,
    check_facts,
    goal_parts,
    numeric_check,
    prove,
    verify_certificate,
)
