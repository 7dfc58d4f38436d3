import csv
import json
import subprocess
import sys
from pathlib import Path

import pytest

from lureosc.cli import main

SPECS = Path(__file__).resolve().parents[1] / "specs"


def run(*argv, stdin=None):
    """Run the CLI in a subprocess so stdout bytes and exit codes are real."""
    proc = subprocess.run(
        [sys.executable, "-m", "lureosc", *argv], input=stdin, capture_output=True, text=True, timeout=120
    )
    return proc.returncode, proc.stdout, proc.stderr


def write_spec(tmp_path, doc, name="spec.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return str(path)


SECOND_ORDER = {"num": [-1.0, 1.0], "den": [0.5, -1.0, 1.0]}


def test_validate_valid_system(tmp_path):
    code, out, _ = run("validate", "--input", write_spec(tmp_path, SECOND_ORDER))
    assert code == 0
    assert json.loads(out)["valid"] is True


def test_validate_not_coprime(tmp_path):
    doc = {"num": [-1.0, 1.0], "den": [-1.0, 1.0]}
    code, out, _ = run("validate", "--input", write_spec(tmp_path, doc))
    assert code == 2
    assert "NotCoprime" in json.loads(out)["errors"]


def test_validate_from_stdin():
    code, out, _ = run("validate", "--input", "-", stdin=json.dumps(SECOND_ORDER))
    assert code == 0


@pytest.mark.parametrize(
    "doc, needle",
    [
        ({"num": [1.0], "den": [0.5, 1.0], "gain": 2}, "gain"),
        ({**SECOND_ORDER, "tolerances": {"conv": 1e-9}}, "conv"),
        ({"den": [0.5, -1.0, 1.0]}, "num"),
    ],
)
def test_spec_errors_name_the_problem(tmp_path, doc, needle):
    code, _, err = run("validate", "--input", write_spec(tmp_path, doc))
    assert code == 1
    assert needle in err


def test_unreadable_input(tmp_path):
    code, _, err = run("validate", "--input", str(tmp_path / "missing.json"))
    assert code == 1 and err


def test_usage_error_is_a_parse_error():
    code, _, _ = run("analyze")
    assert code == 1


def test_exact_mode_on_fourth_order_system():
    code, _, err = run("simulate", "--input", str(SPECS / "break_in.json"), "--mode", "exact")
    assert code == 3
    assert "ExactModeUnsupported" in err


def test_analyze_second_order(tmp_path):
    code, out, _ = run("analyze", "--input", str(SPECS / "second_order.json"), "--alpha-range=-2:1:301",
                       "--output", str(tmp_path))
    assert code == 0
    rep = json.loads(out)
    assert rep["crossings"]["alpha_n"] == pytest.approx(-1.25, abs=1e-9)
    assert rep["crossings"]["alpha_p"] == pytest.approx(0.5, abs=1e-9)
    assert rep["sweep"]["spr_equals_one_at"] == pytest.approx([-1.25, 0.5], abs=1e-8)
    with open(tmp_path / "sweep.csv") as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["alpha", "spr"] and len(rows) == 302
    with open(tmp_path / "rootlocus.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["alpha", "re_1", "im_1", "re_2", "im_2"]
    assert json.loads((tmp_path / "report.json").read_text()) == rep


def test_bad_alpha_range(tmp_path):
    code, _, err = run("analyze", "--input", str(SPECS / "second_order.json"), "--alpha-range", "1:0")
    assert code == 1 and "alpha-range" in err


def test_simulate_exact_writes_both_columns(tmp_path):
    code, out, _ = run("simulate", "--input", str(SPECS / "second_order_exact.json"), "--output", str(tmp_path))
    assert code == 0
    rep = json.loads(out)
    assert rep["field_d"] == 41
    assert rep["classification"]["verdict"] == "Convergent"
    with open(tmp_path / "trajectory.csv") as fh:
        rows = list(csv.DictReader(fh))
    assert rows[1]["y_exact"] == "23"
    assert rows[2]["y_exact"] == "1/4 + 13/4√41"
    assert rows[4]["proj_coord_exact"] == "0"
    assert [r["mode"] for r in rows[:5]] == ["S1", "S1", "S1", "S1", "S2"]


def test_simulate_float_columns(tmp_path):
    code, out, _ = run("simulate", "--input", str(SPECS / "second_order.json"), "--horizon", "300",
                       "--output", str(tmp_path))
    assert code == 0
    with open(tmp_path / "trajectory.csv") as fh:
        header = next(csv.reader(fh))
    assert header == ["k", "y", "nu", "mode", "proj_norm", "x_1", "x_2"]


def test_outputs_are_byte_identical(tmp_path):
    a = run("census", "--input", str(SPECS / "second_order.json"), "--trials", "10", "--seed", "4")
    b = run("census", "--input", str(SPECS / "second_order.json"), "--trials", "10", "--seed", "4")
    assert a[0] == 0 and a[1] == b[1]
    s1 = run("simulate", "--input", str(SPECS / "second_order_perturbed.json"), "--output", str(tmp_path / "1"))
    s2 = run("simulate", "--input", str(SPECS / "second_order_perturbed.json"), "--output", str(tmp_path / "2"))
    assert s1[1] == s2[1]
    assert (tmp_path / "1" / "trajectory.csv").read_bytes() == (tmp_path / "2" / "trajectory.csv").read_bytes()


def test_census_report():
    code, out, _ = run("census", "--input", str(SPECS / "second_order.json"), "--trials", "20")
    rep = json.loads(out)
    assert code == 0 and rep["fraction_self_excited"] == 1.0
    assert rep["simple_unstable_eigenvalue"] is True


def test_oracle_report():
    code, out, _ = run("oracle", "--input", str(SPECS / "second_order.json"))
    rep = json.loads(out)
    assert code == 0
    assert rep["limsup_probe"]["all_reached"] is True
    assert rep["cayley_limit_check"]["verdict"] == "NonConvergent"


@pytest.mark.parametrize("example", ["ex1", "ex2", "ex3-exact", "ex3-perturbed"])
def test_reproduce(example, capsys):
    assert main(["reproduce", example]) == 0
    out = capsys.readouterr().out
    assert "FAIL" not in out and out.rstrip().endswith("all assertions passed")


def test_stderr_is_quiet_on_success():
    code, _, err = run("analyze", "--input", str(SPECS / "stable_pocket.json"))
    assert code == 0 and err == ""
