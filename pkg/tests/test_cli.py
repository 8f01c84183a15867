from __future__ import annotations

import json
import subprocess
import sys
from pathlib import Path

import pytest

from poisson_info.cli import fmt, main

PROBLEMS = Path(__file__).resolve().parent.parent / "problems"
BITS = str(PROBLEMS / "independent_bits.json")
CHANNEL = str(PROBLEMS / "binary_channel.json")
FANO = str(PROBLEMS / "fano.json")


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_fmt():
    assert fmt(-0.0) == "0"
    assert fmt(1 / 3) == "0.333333333"
    assert fmt(float("inf")) == "inf"


@pytest.mark.parametrize("expr", ["rv(X) & rv(Y)", "full"])
def test_measure_zero(capsys, expr):
    code, out, _ = run(capsys, "measure", BITS, expr)
    assert code == 0
    assert out.strip().endswith("= 0 nats")


def test_measure_event_in_bits(capsys):
    code, out, _ = run(capsys, "--base", "2", "measure", BITS, "ev(E)")
    assert code == 0
    assert "= -0.5 bits" in out


def test_global_flags_after_subcommand(capsys):
    code, out, _ = run(capsys, "measure", BITS, "ev(E)", "--base", "2")
    assert code == 0 and "-0.5 bits" in out


def test_measure_pointwise_and_mc(capsys):
    code, out, _ = run(capsys, "--trials", "5000", "measure", CHANNEL, "rv(X) \\ rv(Y)", "--pointwise", "--mc")
    assert code == 0
    lines = out.splitlines()
    assert sum(line.startswith("H_") for line in lines) == 4
    z = float(lines[-1].split("=")[-1])
    assert z < 4


def test_check_pass_and_fail(capsys):
    code, out, _ = run(capsys, "check", BITS, "m(rv(Y)\\rv(X)) = H(Y|X)")
    assert code == 0 and out.splitlines()[-1].startswith("PASS")
    code, out, _ = run(capsys, "check", BITS, "m(rv(X)) = 2*H(X)")
    assert code == 1
    assert "lhs - rhs = -0.693147181" in out
    assert out.splitlines()[-1].startswith("FAIL")


def test_check_information_split_by_blocks(capsys):
    code, out, _ = run(capsys, "check", CHANNEL,
                       "m(rv(Y) & rel(X0, Omega)) + m(rv(Y) & rel(X1, Omega)) = I(X;Y)")
    assert code == 0, out


def test_check_inequality(capsys):
    code, _, _ = run(capsys, "check", CHANNEL, "H(X|Y) <= H(W)")
    assert code == 0
    code, _, _ = run(capsys, "check", CHANNEL, "H(X|Y) < H(W)")
    assert code == 1


def test_prove_fano(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    code, out, _ = run(capsys, "prove", FANO, "--emit-certificate", str(cert), "--check", CHANNEL)
    assert code == 0
    assert "Proved" in out
    assert "I(Y;W) >= 0" in out
    assert "numeric check: holds" in out
    assert "P(E)" in out
    data = json.loads(cert.read_text())
    assert data["proved"] is True
    code, out, _ = run(capsys, "verify", FANO, str(cert))
    assert code == 0 and "valid" in out


def test_verify_rejects_tampered_certificate(capsys, tmp_path):
    cert = tmp_path / "cert.json"
    run(capsys, "prove", FANO, "--emit-certificate", str(cert))
    data = json.loads(cert.read_text())
    part = data["certificates"][0]
    k = next(iter(part["multipliers"]))
    part["multipliers"][k] = "2"
    cert.write_text(json.dumps(data))
    code, out, _ = run(capsys, "verify", FANO, str(cert))
    assert code == 1 and "INVALID" in out


def test_prove_product_split(capsys):
    code, out, _ = run(capsys, "prove", str(PROBLEMS / "product_split.txt"),
                       "--check", str(PROBLEMS / "product_split_binding.json"))
    assert code == 0
    assert "Proved" in out and "numeric check: holds" in out


def test_prove_false_goal(capsys):
    code, out, _ = run(capsys, "prove", str(PROBLEMS / "fano_false.txt"))
    assert code == 1
    assert "NotProvable" in out
    assert "mu[X\\Y] = 1" in out


def test_diagram_tsv(capsys):
    code, out, _ = run(capsys, "diagram", FANO)
    assert code == 0
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    assert len(rows) == 32
    status = [r[3] for r in rows]
    assert status.count("live") + status.count("zero") == 12
    assert status.count("zero") == 3


def test_diagram_single_rv(capsys, tmp_path):
    p = tmp_path / "one.txt"
    p.write_text("rvs X\n")
    code, out, _ = run(capsys, "diagram", str(p))
    assert code == 0
    assert len(out.splitlines()) == 3


def test_diagram_dot(capsys):
    code, out, _ = run(capsys, "diagram", FANO, "--format", "dot")
    assert code == 0
    assert out.startswith("graph ie_diagram {")
    assert 'label="G(EQ)";' in out and 'label="G(NEQ)";' in out
    assert out.count("style=dashed") == 3


def test_diagram_partition_outer_absent(capsys, tmp_path):
    p = tmp_path / "part.txt"
    p.write_text("rvs X\nevents E1 E2\npartition X : E1 E2\n")
    code, out, _ = run(capsys, "diagram", str(p))
    rows = [line.split("\t") for line in out.splitlines()[1:]]
    assert rows[0][4] == "outer @-" and rows[0][3] == "absent"


def test_estimate(capsys):
    code, out, _ = run(capsys, "--trials", "4000", "--seed", "3", "estimate", CHANNEL, "rv(X)", "--mode", "harmonic")
    assert code == 0
    assert out.startswith("estimate (harmonic, 4000 trials, seed 3)")


@pytest.mark.parametrize("argv", [
    ["measure", BITS, "rv(X) &"],
    ["measure", "missing.json", "full"],
    ["measure", BITS, "rv(Q)"],
    ["bogus"],
    ["--tol", "0", "measure", BITS, "full"],
    ["--trials", "1", "estimate", BITS, "full"],
])
def test_usage_and_parse_errors(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2
    assert err


def test_parse_error_reports_position(capsys):
    _, _, err = run(capsys, "measure", BITS, "rv(X) &")
    assert "line 1, column 8" in err


def test_guard_exit_code(capsys, tmp_path):
    n = 6
    space = {"outcomes": [str(i) for i in range(n)], "probs": [f"1/{n}"] * n,
             "rvs": {"X": {str(i): i for i in range(n)}}}
    p = tmp_path / "s.json"
    p.write_text(json.dumps(space))
    code, _, err = run(capsys, "--max-omega", "4", "measure", str(p), "rv(X)")
    assert code == 3 and "error" in err


def test_divergent_exit_code(capsys):
    # only the one-point tuples (u) with u in E: the alternating sum is 1, not 0
    code, _, err = run(capsys, "measure", BITS, "cross(E, ~Omega)")
    assert code == 4 and "diverge" in err
    code, _, _ = run(capsys, "estimate", BITS, "cross(E, ~Omega)")
    assert code == 4


def test_determinism_subprocess():
    cmd = [sys.executable, "-m", "poisson_info", "--trials", "3000", "--seed", "5",
           "measure", CHANNEL, "rv(X) & ev(NEQ)", "--mc"]
    a = subprocess.run(cmd, capture_output=True, check=True).stdout
    b = subprocess.run(cmd, capture_output=True, check=True).stdout
    assert a == b and a
