import csv
import json
import subprocess
import sys

import pytest

from hardytower.cli import main

GOLDEN = [
    (["compare", "log(x)", "x"], 0, "≺"),
    (["compare", "2*x - 1/x*x^2", "x"], 0, "≍ ∼"),
    (["compare", "x^100", "exp(x)"], 0, "≺"),
    (["derive", "ell(1)"], 0, "x^-1"),
    (["derive", "x^3", "--order", "2"], 0, "6*x"),
    (["logderiv", "x"], 0, "x^-1"),
    (["omega", "lambda(0)"], 0, "x^-2"),
    (["omega", "1"], 0, "-1"),
    (["sigma", "gamma(0)"], 0, "2*x^-2"),
    (["val", "0"], 0, "inf"),
    (["val", "gamma(1)"], 0, "v[logs=(1, 1)]"),
    (["sign", "x - ell(1)"], 0, "+"),
    (["sign", "exp(-2*x)*(-1 + exp(-2*x) - x^-2)"], 0, "-"),
    (["sign", "0"], 0, "0"),
    (["mulconj", "Y", "x"], 0, "(x)*Y"),
    (["mulconj", "Y'' + x^-2*Y", "1"], 0, "Y'' + (x^-2)*Y"),
    (["compconj", "Y''", "1"], 0, "Y''    [derivation scale 1]"),
    (["pc-check", "x", "0", "x"], 0, "not-pc\n  v(a1 - a0) = v[logs=(-1)]\n  v(a2 - a1) = v[logs=(-1)]"),
]

USAGE = [
    [],
    ["nosuch"],
    ["tower"],
    ["compare", "log(x)"],
    ["compare", "2 +* x", "x"],
    ["derive", "exp(x^2/log(x))"],
    ["derive", "exp(1 + x)"],
    ["derive", "x", "--order", "-1"],
    ["--tol", "-1", "sign", "x"],
    ["--tol", "abc", "sign", "x"],
    ["logderiv", "0"],
    ["pc-check", "x", "x", "1"],
    ["pc-check"],
    ["witness", "--m", "1", "--n", "1"],
    ["witness", "--m", "3", "--n", "1"],
    ["val", "g(x)"],
    ["mulconj", "Y^(9)", "x"],
]


@pytest.mark.parametrize("argv, code, out", GOLDEN, ids=[" ".join(a) for a, _, _ in GOLDEN])
def test_golden(argv, code, out, capsys):
    assert main(argv) == code
    assert capsys.readouterr().out.rstrip("\n") == out


@pytest.mark.parametrize("argv", USAGE, ids=[" ".join(a) or "<empty>" for a in USAGE])
def test_usage_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    captured = capsys.readouterr()
    assert captured.out == ""
    assert captured.err


def test_tower_identities(capsys):
    assert main(["tower", "--identities", "4"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 9
    assert all(line.endswith("pass") for line in lines)


def test_tower_json(capsys):
    assert main(["tower", "--identities", "2", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["pass"] is True and len(data["results"]) == 24


def test_chvar(capsys):
    assert main(["chvar", "omega_seq(2)", "g(1)"]) == 0
    out = capsys.readouterr().out
    assert "closed form matches" in out


def test_pc_family(capsys):
    assert main(["pc-check", "--family", "omega_seq", "--n", "6", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["is_pc"] and len(data["increments"]) == 6


def test_global_flags_after_subcommand(capsys):
    assert main(["sign", "x", "--json"]) == 0
    assert json.loads(capsys.readouterr().out)["result"] == "+"


def test_witness_json(capsys):
    assert main(["witness", "--m", "2", "--n", "1", "--json"]) == 0
    data = json.loads(capsys.readouterr().out)
    assert data["pass"] is True and data["failed_step"] is None
    assert data["m"] == 2 and data["n"] == 1
    assert data["sandwich_threshold"] > 10


def test_witness_json_schema_is_stable(capsys):
    main(["witness", "--m", "2", "--n", "1", "--json"])
    first = capsys.readouterr().out
    main(["witness", "--m", "2", "--n", "1", "--json"])
    assert capsys.readouterr().out == first


def test_witness_later_start(capsys):
    assert main(["witness", "--m", "3", "--n", "2", "--t0", "20", "--tmax", "1e100"]) == 0
    assert "all checks pass" in capsys.readouterr().out


def test_witness_check_failure_exits_1(capsys):
    # the sandwich needs the tail beyond ~1.5e3; stopping at 200 leaves no valid tail
    assert main(["witness", "--m", "2", "--n", "1", "--tmax", "200"]) == 1
    assert "failed at: sandwich" in capsys.readouterr().out


def test_ode_csv(tmp_path, capsys):
    path = tmp_path / "traj.csv"
    assert main(["ode", "1/4*x^-2", "--c", "0.25", "--tmax", "1e5", "--csv", str(path)]) == 0
    assert "growth: pass" in capsys.readouterr().out
    with open(path) as fh:
        rows = list(csv.reader(fh))
    assert rows[0] == ["t", "y1", "y1p", "y2", "y2p", "re_z", "im_z", "w"]
    assert len(rows) == 513


def test_ode_precondition_is_not_a_failure(capsys):
    assert main(["ode", "2*x^-2", "--c", "1"]) == 0
    assert "growth: not_applicable" in capsys.readouterr().out


def test_tighter_tol_keeps_exact_checks_passing(capsys):
    for tol in ("1e-6", "1e-9", "1e-12"):
        assert main(["--tol", tol, "chvar", "omega_seq(3)", "g(2)"]) == 0
        assert main(["--tol", tol, "tower", "--identities", "3"]) == 0
    capsys.readouterr()


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "hardytower", "compare", "log(x)", "x"], capture_output=True, text=True
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "≺"
