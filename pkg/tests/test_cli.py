import json

import numpy as np
import pytest

from crwburgers.cli import main
from crwburgers.io import read_field_csv, read_pgm


def run_cli(*args):
    return main([str(a) for a in args])


def files(path):
    return {p.name: p.read_bytes() for p in sorted(path.iterdir())}


def test_simulate_preset_outputs(tmp_path):
    assert run_cli("simulate", "--preset", "fig1", "--out", tmp_path) == 0
    assert set(files(tmp_path)) == {"U.csv", "Vt.csv", "X.csv", "U.pgm", "Vt.pgm", "metadata.json"}
    U = read_field_csv(tmp_path / "U.csv")
    assert U.shape == (30, 30)
    assert read_pgm(tmp_path / "U.pgm").shape == (30, 30)
    meta = json.loads((tmp_path / "metadata.json").read_text())
    assert meta["N"] == 30 and meta["L"] == 1 and meta["steps"] == 29
    assert meta["I0"][21] == 0


def test_simulate_is_byte_deterministic(tmp_path):
    for name in ("a", "b"):
        assert run_cli("simulate", "--preset", "fig2", "--seed", 9, "--out", tmp_path / name) == 0
    assert files(tmp_path / "a") == files(tmp_path / "b")
    run_cli("simulate", "--preset", "fig2", "--seed", 10, "--out", tmp_path / "c")
    assert files(tmp_path / "a")["U.csv"] != files(tmp_path / "c")["U.csv"]


def test_simulate_zero_steps(tmp_path):
    assert run_cli("simulate", "--N", 4, "--L", 2, "--steps", 0, "--u0", "0,1,2,1",
                   "--out", tmp_path) == 0
    U = read_field_csv(tmp_path / "U.csv")
    np.testing.assert_array_equal(U, [[0, 1, 2, 1]])


def test_simulate_inline_fields_and_format_subset(tmp_path):
    code = run_cli("simulate", "--N", 3, "--L", 1, "--steps", 2, "--u0", "1,0,0", "--vt0", "1",
                   "--vt-prev", "1,1,1", "--set-vt0", "2=0", "--format", "csv", "--out", tmp_path)
    assert code == 0
    assert set(files(tmp_path)) == {"U.csv", "Vt.csv", "X.csv"}
    np.testing.assert_array_equal(read_field_csv(tmp_path / "U.csv")[1], [0, 1, 0])


def test_config_file_with_flag_override(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"N": 6, "L": 2, "steps": 3, "seed": 1}))
    assert run_cli("simulate", "--config", cfg, "--steps", 5, "--out", tmp_path / "o") == 0
    meta = json.loads((tmp_path / "o" / "metadata.json").read_text())
    assert (meta["N"], meta["L"], meta["steps"]) == (6, 2, 5)


def test_env_var_sets_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("CRWBURGERS_OUT", str(tmp_path / "env"))
    assert run_cli("simulate", "--N", 3, "--steps", 1) == 0
    assert (tmp_path / "env" / "U.csv").exists()


@pytest.mark.parametrize("args", [
    ("--N", 3, "--u0", "0,2,0"),
    ("--N", 3, "--u0", "0,1"),
    ("--N", 0),
    ("--N", 3, "--set-vt0", "7=1"),
    ("--N", 3, "--format", "png"),
])
def test_simulate_config_errors_write_nothing(tmp_path, args):
    out = tmp_path / "o"
    assert run_cli("simulate", *args, "--out", out) == 2
    assert not out.exists() or list(out.iterdir()) == []


def test_invariant_violation_exit_3(tmp_path, monkeypatch):
    import crwburgers.automata as automata

    real = automata.reduced_update

    def corrupt(U, Vt, VtPrev, L):
        U1, Vt1, X, X1 = real(U, Vt, VtPrev, L)
        return U1 + 5, Vt1, X, X1

    monkeypatch.setattr(automata, "reduced_update", corrupt)
    out = tmp_path / "o"
    assert run_cli("simulate", "--N", 4, "--steps", 3, "--out", out) == 3
    assert [p.name for p in out.iterdir()] == ["error.json"]
    err = json.loads((out / "error.json").read_text())
    assert err["error"] == "InvariantViolation" and err["context"]["step"] == 1


def test_diagram_outputs(tmp_path, capsys):
    assert run_cli("diagram", "--L", 2, "--samples", 4, "--out", tmp_path) == 0
    assert set(files(tmp_path)) == {"diagram.csv", "diagram.svg", "transitions.json"}
    est = json.loads((tmp_path / "transitions.json").read_text())
    assert est["conjectured_rho_low"] == 0.25
    assert abs(est["rho_star_low"] - 0.25) <= 0.04
    assert "rho*" in capsys.readouterr().out


def test_diagram_deterministic(tmp_path):
    for name in ("a", "b"):
        run_cli("diagram", "--L", 3, "--samples", 2, "--seed", 3, "--out", tmp_path / name)
    assert files(tmp_path / "a") == files(tmp_path / "b")


def test_diagram_coarse_bins_exit_4(tmp_path):
    assert run_cli("diagram", "--bin-width", 0.25, "--samples", 2, "--out", tmp_path) == 4
    assert set(files(tmp_path)) == {"error.json"}


def test_diagram_config_error(tmp_path):
    assert run_cli("diagram", "--warmup", 50, "--last-step", 10, "--out", tmp_path / "o") == 2
    assert not (tmp_path / "o").exists()


def test_verify_suites(tmp_path, capsys):
    assert run_cli("verify", "--suite", "table1", "--suite", "rule184", "--out", tmp_path) == 0
    report = json.loads((tmp_path / "verify.json").read_text())
    assert report["passed"]
    assert [s["suite"] for s in report["suites"]] == ["table1", "rule184"]
    assert report["suites"][0]["checked"] == 32
    assert report["suites"][1]["checked"] == 1024
    assert "PASS table1" in capsys.readouterr().out


def test_verify_failure_exit_1(monkeypatch, capsys):
    import crwburgers.cli as cli

    monkeypatch.setattr(cli, "run_suites", lambda names, seed=0: [
        {"suite": "table1", "passed": False, "checked": 3, "failure": {"row": 4}}])
    assert run_cli("verify", "--suite", "table1") == 1
    assert '"row": 4' in capsys.readouterr().out


@pytest.mark.parametrize("values,expected", [
    (("1", "0", "0", "1", "0"), {"case": "III", "X_j": 1, "X_j+1": 0, "U_next": 1, "row": 19}),
    (("0", "0", "0", "0", "0"), {"case": "I", "X_j": 0, "X_j+1": 0, "U_next": 0, "row": 1}),
    (("0", "1", "0", "0", "1"), {"case": "IV", "X_j": 0, "X_j+1": 1, "U_next": 0, "row": 10}),
])
def test_classify(values, expected, capsys):
    assert run_cli("classify", *values, "--json") == 0
    out = json.loads(capsys.readouterr().out)
    assert {k: out[k] for k in expected} == expected


def test_classify_non_binary(capsys):
    assert run_cli("classify", "0", "1", "2", "0", "0") == 2
    assert "expected 0 or 1" in capsys.readouterr().err


def test_module_entry_point():
    import subprocess
    import sys

    res = subprocess.run([sys.executable, "-m", "crwburgers", "classify", "1", "1", "0", "0", "1"],
                         capture_output=True, text=True)
    assert res.returncode == 0
    assert "case IV" in res.stdout
