import csv
import json
import subprocess
import sys

import numpy as np
import pytest

from anisosc.cli import CSV_HEADER, main

VERIFY_KEYS = {"check_name", "n_points", "seed", "omega", "max_residual", "tolerance", "pass"}


def run(argv, capsys):
    status = main(argv)
    out, err = capsys.readouterr()
    return status, out, err


def test_simulate_csv(tmp_path, capsys):
    path = tmp_path / "run.csv"
    status, _, _ = run(["simulate", "--omega", "2,3", "--init", "1,0,0,1", "--t-max", "100", "--n-samples", "4096", "--out", str(path)], capsys)
    assert status == 0
    rows = list(csv.reader(path.open()))
    assert rows[0] == CSV_HEADER
    assert len(rows) == 4097
    last = [float(x) for x in rows[-1][:-1]]
    assert last[0] == 100.0
    # 17 significant digits round-trip the doubles
    assert all(len(x.replace("-", "").replace(".", "").lstrip("0").split("e")[0]) <= 17 for x in rows[5])
    assert int(rows[-1][-1]) > 0
    # angle columns are unwrapped
    theta = np.array([[float(r[5]), float(r[6])] for r in rows[1:]])
    assert theta[-1, 0] == pytest.approx(200.0, abs=1e-9)


def test_simulate_is_deterministic(tmp_path, capsys):
    args = ["simulate", "--omega", "2,3", "--init", "1,0.3,0.2,1", "--t-max", "10", "--n-samples", "500"]
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    run(args + ["--out", str(a)], capsys)
    run(args + ["--out", str(b)], capsys)
    assert a.read_bytes() == b.read_bytes()


def test_simulate_principal_angles(capsys):
    status, out, _ = run(["simulate", "--omega", "2,3", "--init", "1,0,0,1", "--t-max", "10", "--n-samples", "400", "--unwrap", "false"], capsys)
    assert status == 0
    theta = np.array([[float(v) for v in line.split(",")[5:7]] for line in out.splitlines()[1:]])
    assert np.all(np.abs(theta) <= np.pi)


def test_verify_brackets(capsys):
    status, out, _ = run(["verify", "brackets", "--omega", "2,3", "--n-points", "1000", "--seed", "7"], capsys)
    rep = json.loads(out)
    assert status == 0 and VERIFY_KEYS <= set(rep)
    assert rep["pass"] and rep["max_residual"] < 1e-8
    assert rep["seed"] == 7 and rep["n_points"] == 1000 and rep["omega"] == [2.0, 3.0]


def test_default_seed(capsys):
    _, out, _ = run(["verify", "canonical", "--omega", "2,3", "--n-points", "50"], capsys)
    assert json.loads(out)["seed"] == 42


def test_verify_epsilon(capsys):
    status, out, _ = run(["verify", "epsilon", "--point", "1,0,0,1", "--eps", "1e-1,1e-2,1e-3,1e-4"], capsys)
    rep = json.loads(out)
    assert status == 0 and rep["pass"]
    assert rep["eps"] == [0.1, 0.01, 0.001, 0.0001]
    assert all(abs(s - 2.0) < 0.1 for s in rep["slopes"].values())


@pytest.mark.parametrize("check", ["canonical", "genfunc"])
def test_verify_other_checks(check, capsys):
    status, out, _ = run(["verify", check, "--omega", "2,3", "--n-points", "200"], capsys)
    rep = json.loads(out)
    assert status == 0 and rep["pass"] and rep["check_name"] == check


def test_genfunc_at_isotropic_axis_skips_pole_kinds(capsys):
    status, out, _ = run(["verify", "genfunc", "--omega", "1,3", "--n-points", "50"], capsys)
    rep = json.loads(out)
    assert status == 0 and rep["skipped"] == ["F1", "F4", "legendre"]


def test_tolerance_override_fails_check(capsys):
    status, out, _ = run(["verify", "brackets", "--omega", "2,3", "--n-points", "50", "--tol", "brackets=1e-30"], capsys)
    rep = json.loads(out)
    assert status == 1 and not rep["pass"] and rep["tolerance"] == 1e-30


def test_invariants_report(capsys):
    status, out, _ = run(["invariants", "--omega", "2,3", "--point", "1,0.3,0.2,1"], capsys)
    rep = json.loads(out)
    assert status == 0
    assert set(rep["closed"]) == {"I0", "I1", "I2", "I3"}
    assert max(abs(v) for v in rep["difference"].values()) < 1e-9


def test_config_file_and_flag_precedence(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "VerifyBrackets", "omega": [2, 3], "n_points": 30, "seed": 5, "tolerances": {"brackets": 1e-6}}))
    status, out, _ = run(["--config", str(cfg), "--seed", "9"], capsys)
    rep = json.loads(out)
    assert status == 0
    assert rep["seed"] == 9 and rep["n_points"] == 30 and rep["tolerance"] == 1e-6


@pytest.mark.parametrize(
    "argv",
    [
        ["verify", "bogus"],
        ["launch"],
        ["simulate", "--omega", "2,3"],
        ["verify", "brackets", "--omega", "2,3", "--tol", "nonsense=1"],
        ["verify", "brackets", "--omega", "2,x"],
        ["verify", "brackets", "--omega", "2,-3"],
        ["invariants", "--omega", "2,3", "--point", "1,2,3"],
    ],
)
def test_config_errors(argv, capsys):
    status, out, err = run(argv, capsys)
    assert status == 2 and out == ""
    assert json.loads(err)["exit_status"] == 2


def test_bad_config_file(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"command": "simulate", "colour": "blue"}))
    status, _, err = run(["--config", str(cfg)], capsys)
    assert status == 2 and "colour" in json.loads(err)["message"]


def test_runtime_error_exit_code(capsys):
    status, out, err = run(["simulate", "--omega", "2,3", "--init", "1,0,0,1", "--t-max", "100", "--n-samples", "50"], capsys)
    assert status == 3 and out == ""
    assert json.loads(err)["error"] == "SamplingTooCoarse"


def test_sweep_order_independent_of_workers(capsys):
    base = ["sweep", "--omega1", "1.5,2,3", "--omega2", "2.5,0.7", "--n-points", "40"]
    _, serial, _ = run(base, capsys)
    status, parallel, _ = run(base + ["--workers", "3"], capsys)
    assert status == 0 and serial == parallel
    omegas = [json.loads(line)["omega"] for line in parallel.splitlines()]
    assert omegas == [[1.5, 2.5], [1.5, 0.7], [2.0, 2.5], [2.0, 0.7], [3.0, 2.5], [3.0, 0.7]]


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "anisosc.cli", "verify", "brackets", "--omega", "1,1", "--n-points", "20"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0 and json.loads(proc.stdout)["pass"]
