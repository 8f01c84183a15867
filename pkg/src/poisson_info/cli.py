"""Command-line interface.

Exit codes: 0 success or proved, 1 not provable or check failed, 2 usage,
parse or input error, 3 numeric guard exceeded, 4 divergent measure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from fractions import Fraction

from . import canonical as cs
from .errors import DivergentMeasureError, GuardError, InfoError, ParseError
from .expr import parse_relation, parse_set
from .measure import measure, pointwise_measure
from .model import eval_quantity, eval_set, load_model
from .prover import (
    LIVE,
    ZERO,
    apply_structural_rules,
    load_problem,
    numeric_check,
    prove,
    verify_certificate,
)
from .prover.prove import ProofCertificate
from .simulation import estimate

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_GUARD, EXIT_DIVERGENT = 0, 1, 2, 3, 4

EVENT_NOTE = "note: quantities with an event context @E denote measures, i.e. include the factor P(E)"


def fmt(x: float) -> str:
    if x == 0:
        x = 0.0
    return f"{x:.9g}"


class _Out:
    def __init__(self, base: str):
        self.base = base
        self.unit = "bits" if base == "2" else "nats"
        self.scale = 1 / math.log(2) if base == "2" else 1.0

    def val(self, nats: float) -> str:
        return fmt(nats * self.scale)


def _common(parser: argparse.ArgumentParser, suppress: bool):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    parser.add_argument("--base", choices=("e", "2"), default=d("e"),
                        help="logarithm base for printed values (default e)")
    parser.add_argument("--seed", type=int, default=d(0), help="RNG seed (default 0)")
    parser.add_argument("--trials", type=int, default=d(100_000),
                        help="Monte-Carlo trials (default 100000)")
    parser.add_argument("--tol", type=float, default=d(1e-9), help="tolerance in nats (default 1e-9)")
    parser.add_argument("--max-omega", type=int, default=d(None),
                        help="override the |Omega| guard of the exact engine (default 12)")


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="poisson-info",
        description="Poisson information measures: exact values, Monte-Carlo estimates "
                    "and an information-event inequality prover.")
    _common(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _common(common, suppress=True)

    m = sub.add_parser("measure", parents=[common], help="exact measure of a set expression")
    m.add_argument("space", help="space definition (JSON)")
    m.add_argument("expr", help="set expression, e.g. 'rv(X) & rv(Y)'")
    m.add_argument("--pointwise", action="store_true", help="also print H_u for every outcome")
    m.add_argument("--mc", action="store_true", help="also print a Monte-Carlo estimate")
    m.add_argument("--mode", choices=("poisson", "harmonic"), default="poisson")

    c = sub.add_parser("check", parents=[common], help="numerically verify an identity or inequality")
    c.add_argument("space")
    c.add_argument("identity", help="e.g. 'm(rv(Y)\\rv(X)) = H(Y|X)'")

    e = sub.add_parser("estimate", parents=[common], help="Monte-Carlo estimate of a set's measure")
    e.add_argument("space")
    e.add_argument("expr")
    e.add_argument("--mode", choices=("poisson", "harmonic"), default="poisson")

    pr = sub.add_parser("prove", parents=[common], help="prove an information-event inequality")
    pr.add_argument("problem", help="problem file (JSON or text format)")
    pr.add_argument("--emit-certificate", metavar="PATH", help="write the certificate as JSON")
    pr.add_argument("--check", metavar="SPACE",
                    help="also evaluate the goal on a concrete binding (space file whose rv/event "
                         "names match the problem)")

    v = sub.add_parser("verify", parents=[common], help="check a certificate written by prove")
    v.add_argument("problem")
    v.add_argument("certificate")

    d = sub.add_parser("diagram", parents=[common], help="information-event diagram of a problem")
    d.add_argument("problem")
    d.add_argument("--format", choices=("tsv", "dot"), default="tsv")
    return p


# ---------------------------------------------------------------- commands

def cmd_measure(args, out: _Out) -> int:
    model = load_model(args.space)
    A = eval_set(parse_set(args.expr), model)
    value = measure(A, max_omega=args.max_omega)
    print(f"H({args.expr}) = {out.val(value)} {out.unit}")
    if args.pointwise:
        sp = model.space
        for u in sp.support:
            print(f"H_{sp.outcome_labels[u]} = {out.val(pointwise_measure(A, u, max_omega=args.max_omega))}")
    if args.mc:
        est = estimate(A, args.mode, args.trials, args.seed)
        _print_estimate(est, out)
        z = abs(value - est.mean) / est.stderr if est.stderr > 0 else (0.0 if value == est.mean else math.inf)
        print(f"|exact - mean| / stderr = {fmt(z)}")
    return EXIT_OK


def _print_estimate(est, out: _Out):
    print(f"estimate ({est.mode}, {est.n_trials} trials, seed {est.seed}) = "
          f"{out.val(est.mean)} +/- {out.val(est.stderr)} {out.unit}")


def cmd_estimate(args, out: _Out) -> int:
    model = load_model(args.space)
    A = eval_set(parse_set(args.expr), model)
    if not cs.is_measure_finite(A):
        raise DivergentMeasureError("set does not have finite measure")
    _print_estimate(estimate(A, args.mode, args.trials, args.seed), out)
    return EXIT_OK


def cmd_check(args, out: _Out) -> int:
    model = load_model(args.space)
    rel = parse_relation(args.identity)
    lhs = eval_quantity(rel.lhs, model, max_omega=args.max_omega)
    rhs = eval_quantity(rel.rhs, model, max_omega=args.max_omega)
    diff = lhs - rhs
    tol = args.tol
    ok = {
        "=": abs(diff) <= tol,
        "<=": diff <= tol,
        ">=": diff >= -tol,
        "<": diff < -tol,
        ">": diff > tol,
    }[rel.op]
    print(f"lhs = {out.val(lhs)} {out.unit}")
    print(f"rhs = {out.val(rhs)} {out.unit}")
    print(f"lhs - rhs = {out.val(diff)} {out.unit}")
    print(f"{'PASS' if ok else 'FAIL'}: {args.identity} (tol {fmt(tol)} nats)")
    return EXIT_OK if ok else EXIT_FAIL


def _fr(x: Fraction) -> str:
    return str(x)


def cmd_prove(args, out: _Out) -> int:
    problem = load_problem(args.problem)
    if problem.goal is None:
        raise ParseError("problem has no goal")
    res = prove(problem)
    t = res.table
    print(f"goal: {problem.goal_text}")
    print(f"atoms: {t.size} total, {len(t.live)} live; constraints: {len(res.constraints)}")
    if res.proved:
        print("Proved")
        for cert in res.certificates:
            part = res.parts[cert.part]
            print(f"certificate for {part.text} {'>' if part.strict else '>='} 0:")
            for k, y in enumerate(cert.multipliers):
                if y:
                    print(f"  [{k}] {_fr(y)} * ({res.constraints[k].label})")
            if part.expr.const:
                print(f"  constant {_fr(part.expr.const)}")
    else:
        print("NotProvable: not implied by Shannon-type + event constraints")
        part = res.parts[res.failed_part]
        print(f"witness violating {part.text} {'>' if part.strict else '>='} 0 (atom measures):")
        for a in sorted(res.witness):
            print(f"  mu[{t.label(a)}] = {_fr(res.witness[a])}")
    if problem.goal is not None and _has_event_context(problem):
        print(EVENT_NOTE)
    if args.emit_certificate:
        data = {"problem": problem.to_json(), "proved": res.proved,
                "constraints": [f"{c.label}" for c in res.constraints],
                "certificates": [c.to_json() for c in res.certificates]}
        with open(args.emit_certificate, "w") as fh:
            json.dump(data, fh, indent=2, sort_keys=True)
            fh.write("\n")
    status = EXIT_OK if res.proved else EXIT_FAIL
    if args.check:
        model = load_model(args.check)
        rep = numeric_check(problem, model, tol=args.tol, max_omega=args.max_omega)
        print(f"numeric check: lhs = {out.val(rep.goal_lhs)}, rhs = {out.val(rep.goal_rhs)} {out.unit}")
        print(f"numeric check: max |eliminated atom| = {fmt(rep.max_eliminated)}, "
              f"worst constraint violation = {fmt(rep.constraint_residual)}")
        for note in rep.notes:
            print(f"numeric check: {note}")
        print(f"numeric check: {'holds' if rep.holds else 'VIOLATED'}")
        if not rep.holds:
            status = EXIT_FAIL
    return status


def _has_event_context(problem) -> bool:
    return "@" in problem.goal_text or "ev(" in problem.goal_text


def cmd_verify(args, out: _Out) -> int:
    problem = load_problem(args.problem)
    with open(args.certificate) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", exc.lineno, exc.colno) from None
    n = len(data.get("constraints", []))
    certs = data.get("certificates", [])
    if not certs:
        print("FAIL: no certificates")
        return EXIT_FAIL
    ok = True
    for c in certs:
        cert = ProofCertificate.from_json(c, n)
        good = verify_certificate(problem, cert)
        print(f"part {cert.part}: {'valid' if good else 'INVALID'}")
        ok &= good
    return EXIT_OK if ok else EXIT_FAIL


def cmd_diagram(args, out: _Out) -> int:
    problem = load_problem(args.problem)
    t = apply_structural_rules(problem)
    if args.format == "tsv":
        print("atom\trvs\tevents\tstatus\tlabel")
        for a in range(t.size):
            rvs, evs = t.members(a)
            print(f"{a}\t{','.join(rvs) or '-'}\t{','.join(evs) or '-'}\t{t.status_name(a)}\t{t.label(a)}")
        return EXIT_OK
    print("graph ie_diagram {")
    print('  node [shape=box, fontname="Helvetica"];')
    rows: dict = {}
    for a in range(t.size):
        if t.status[a] in (LIVE, ZERO):
            rows.setdefault(t.split(a)[1], []).append(a)
    for Sp in sorted(rows):
        evs = [e for j, e in enumerate(t.event_names) if Sp >> j & 1]
        title = "G(" + ") & G(".join(evs) + ")" if evs else "outside all G(E)"
        print(f"  subgraph cluster_{Sp} {{")
        print(f'    label="{title}";')
        for a in rows[Sp]:
            rvs = t.members(a)[0]
            name = "&".join(rvs) if rvs else "outer"
            style = ', style=dashed, xlabel="0"' if t.status[a] == ZERO else ""
            print(f'    a{a} [label="{name}"{style}];')
        print("  }")
    print("}")
    return EXIT_OK


COMMANDS = {
    "measure": cmd_measure,
    "check": cmd_check,
    "estimate": cmd_estimate,
    "prove": cmd_prove,
    "verify": cmd_verify,
    "diagram": cmd_diagram,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    if args.tol <= 0:
        print("error: --tol must be positive", file=sys.stderr)
        return EXIT_USAGE
    if args.trials < 2:
        print("error: --trials must be at least 2", file=sys.stderr)
        return EXIT_USAGE
    out = _Out(args.base)
    try:
        return COMMANDS[args.command](args, out)
    except GuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_GUARD
    except DivergentMeasureError as exc:
        print(f"error: divergent measure: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except (InfoError, ValueError, KeyError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
