"""CLI behaviour: subcommands, exit codes, report formats, golden files."""

from __future__ import annotations

import json
import math
import os

from padicsums.cli import main

GOLDEN_DIR = os.path.join(os.path.dirname(__file__), "golden")


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def assert_json_equal(got, want, path="$"):
    """Structural equality; floats compare with a 1e-9 absolute tolerance."""
    if isinstance(want, float):
        assert isinstance(got, (int, float)), path
        assert math.isclose(got, want, rel_tol=0, abs_tol=1e-9), path
    elif isinstance(want, dict):
        assert isinstance(got, dict) and set(got) == set(want), path
        for key in want:
            assert_json_equal(got[key], want[key], f"{path}.{key}")
    elif isinstance(want, list):
        assert isinstance(got, list) and len(got) == len(want), path
        for i, (g, w) in enumerate(zip(got, want)):
            assert_json_equal(g, w, f"{path}[{i}]")
    else:
        assert got == want, f"{path}: {got!r} != {want!r}"


# -- analyze --------------------------------------------------------------------

def test_analyze_human_report(capsys):
    code, out = run(capsys, "analyze", "x*y+z*u")
    assert code == 0
    assert "sigma = 2/1" in out and "kappa = 3" in out


def test_analyze_json_matches_golden(capsys):
    code, out = run(capsys, "analyze", "x*y+z*u", "--json")
    assert code == 0
    got = json.loads(out)
    # F0 has dimension 1 for this polynomial
    f0 = got["faces"][got["f0_face_id"]]
    assert f0["dim"] == 1 and got["sigma"] == "2/1" and got["kappa"] == 3
    with open(os.path.join(GOLDEN_DIR, "analyze_xyzu.json")) as fh:
        want = json.load(fh)
    assert_json_equal(got, want)


def test_analyze_rationals_are_strings(capsys):
    _, out = run(capsys, "analyze", "x^2+y^3", "--json")
    got = json.loads(out)
    assert got["sigma"] == "5/6" and got["t_star"] == "6/5"
    assert all("/" in face["sigma_tau"] for face in got["faces"])


def test_json_output_is_deterministic(capsys):
    _, first = run(capsys, "analyze", "x*y+z*u+x*z+2*y*u", "--json")
    _, second = run(capsys, "analyze", "x*y+z*u+x*z+2*y*u", "--json")
    assert first == second


# -- sums -------------------------------------------------------------------------

def test_sum_linear_is_zero(capsys):
    code, out = run(capsys, "sum", "x", "--prime", "5", "--power", "2", "--json")
    assert code == 0
    got = json.loads(out)
    assert abs(got["value"]["re"]) < 1e-12 and abs(got["value"]["im"]) < 1e-12


def test_esum_face_restriction(capsys):
    code, out = run(capsys, "esum", "x*y+z*u", "--prime", "5", "--face", "6", "--json")
    assert code == 0
    got = json.loads(out)
    assert abs(got["value"]["re"] - 1 / 16) < 1e-12


# -- verify-formula -----------------------------------------------------------------

def test_verify_formula_pass_rows(capsys):
    code, out = run(capsys, "verify-formula", "x*y", "--prime", "3", "--powers", "1..3")
    assert code == 0
    assert out.count("pass") == 3


def test_verify_formula_json_matches_golden(capsys):
    code, out = run(
        capsys, "verify-formula", "x*y", "--prime", "3", "--powers", "1..2", "--json"
    )
    assert code == 0
    with open(os.path.join(GOLDEN_DIR, "verify_formula_xy_p3.json")) as fh:
        want = json.load(fh)
    assert_json_equal(json.loads(out), want)


def test_verify_formula_not_applicable(capsys):
    code, out = run(capsys, "verify-formula", "x^2+y^3", "--prime", "3", "--powers", "2")
    assert code == 0
    assert "not-applicable" in out


def test_verify_formula_budget_exit(capsys):
    code, _ = run(
        capsys, "verify-formula", "x*y+z*u", "--prime", "3", "--powers", "5",
        "--budget", "100000",
    )
    assert code == 2


# -- verify-nu -----------------------------------------------------------------------

def test_verify_nu_findings_do_not_fail(capsys):
    code, out = run(capsys, "verify-nu", "x*y+z*u", "--T", "8")
    assert code == 0
    assert "main inequality violations: 0" in out
    assert "half-dimension variant violations: 54" in out


def test_verify_nu_json_schema(capsys):
    code, out = run(capsys, "verify-nu", "x*y", "--T", "6", "--json")
    got = json.loads(out)
    assert code == 0 and got["points_checked"] == 28
    assert got["main_violations"] == []
    assert all("/" in rec["rhs_halfdim"] for rec in got["halfdim_violations"])


# -- tables ---------------------------------------------------------------------------

def test_ratios_csv(capsys):
    code, out = run(
        capsys, "ratios", "x*y", "--primes", "3,5", "--powers", "1..2", "--csv"
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "p,m,abs_S,ratio_main,ratio_coarse"
    assert len(lines) == 5


def test_edecay_report(capsys):
    code, out = run(
        capsys, "edecay", "x*y+z*u", "--face", "6", "--primes", "3,5,7,11,13", "--json"
    )
    assert code == 0
    got = json.loads(out)
    assert abs(got["fitted_exponent"] + 2) < 1e-9
    assert got["esig_exponent"] == "-2/1" and got["ds_exponent"] == "-1/1"


def test_sigma_bound_finding_keeps_exit_zero(capsys):
    code, out = run(capsys, "sigma-bound", "x*y", "--d", "1")
    assert code == 0
    assert "FINDING" in out
    code, _ = run(capsys, "sigma-bound", "x*y", "--d", "0")
    assert code == 0


# -- error handling ------------------------------------------------------------------

def test_parse_error_exits_2(capsys):
    code, _ = run(capsys, "analyze", "x^2 + 3")
    assert code == 2


def test_unknown_flag_exits_2(capsys):
    assert main(["analyze", "x*y", "--bogus"]) == 2


def test_missing_required_exits_2(capsys):
    assert main(["sum", "x*y", "--power", "1"]) == 2
    assert main(["edecay", "x*y", "--primes", "3,5,7"]) == 2


def test_sigma_bound_hypothesis_exits_2(capsys):
    assert main(["sigma-bound", "x^2+y^3", "--d", "0"]) == 2


def test_budget_error_exits_2(capsys):
    assert main(["sum", "x*y+z*u", "--prime", "13", "--power", "3"]) == 2


# -- output plumbing -----------------------------------------------------------------

def test_out_flag_writes_file(tmp_path, capsys):
    target = tmp_path / "report.json"
    code, out = run(capsys, "analyze", "x*y", "--json", "--out", str(target))
    assert code == 0 and out == ""
    got = json.loads(target.read_text())
    assert got["sigma"] == "1/1"
