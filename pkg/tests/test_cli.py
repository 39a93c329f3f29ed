"""End-to-end command-line checks: artifacts, determinism, exit codes."""

import json
import os
import subprocess

import numpy as np
import pytest

from cylspec.cli import main
from cylspec.greens import build_greens, solve_convolution
from cylspec.grid import GridFunction
from cylspec.symbol import CylinderParams


def _run(capsys, argv):
    code = main(argv)
    return code, capsys.readouterr().out


def test_symbol_value_at_zero(capsys):
    code, out = _run(
        capsys, ["symbol", "--n", "3", "--gamma", "0.5", "--mode", "0", "--xi", "0"]
    )
    assert code == 0
    doc = json.loads(out)
    assert doc["xi"] == [0.0]
    assert abs(doc["theta_re"][0] - 2.0 / np.pi) <= 1e-14
    config = doc["metadata"]["config"]
    assert config["command"] == "symbol"
    assert config["gamma"] == 0.5
    assert config["p"] == 2.0


def test_poles_csv_table(capsys):
    code, out = _run(
        capsys,
        [
            "poles",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--kappa",
            "0",
            "--count",
            "5",
            "--format",
            "csv",
        ],
    )
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0].startswith("# ")
    echo = json.loads(lines[0][2:])
    assert echo["config"]["count"] == 5
    assert lines[1] == "index,sigma,tau,residue_re,residue_im"
    rows = [line.split(",") for line in lines[2:]]
    sigmas = [float(r[1]) for r in rows]
    taus = [float(r[2]) for r in rows]
    assert np.allclose(sigmas, [1.0, 3.0, 5.0, 7.0, 9.0], rtol=0, atol=1e-8)
    assert taus == [0.0] * 5


def test_greens_artifact_round_trip(tmp_path, capsys):
    out_path = tmp_path / "g.json"
    code, _ = _run(
        capsys,
        [
            "greens",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--kappa",
            "0.3",
            "--t-max",
            "6",
            "--truncation",
            "30",
            "--output",
            str(out_path),
        ],
    )
    assert code == 0
    loaded, meta = GridFunction.from_json(out_path)
    assert meta["config"]["kappa"] == 0.3
    assert meta["regime"] == "stable"
    # Origin excluded: the kernel is log-singular there and even in t.
    assert loaded.t_min == loaded.step
    series = build_greens(CylinderParams(3, 0.5, kappa=0.3), 0, truncation=30)
    assert np.array_equal(loaded.samples.real, series(loaded.t))


def test_solve_linear_matches_library(tmp_path, capsys):
    source = GridFunction.from_callable(lambda t: np.exp(-2.0 * np.abs(t)))
    src_path = tmp_path / "h.csv"
    source.to_csv(src_path)
    out_path = tmp_path / "w.csv"
    code, _ = _run(
        capsys,
        [
            "solve-linear",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--kappa",
            "0.3",
            "--source",
            str(src_path),
            "--truncation",
            "40",
            "--output",
            str(out_path),
            "--format",
            "csv",
        ],
    )
    assert code == 0
    loaded = GridFunction.from_csv(out_path)
    series = build_greens(CylinderParams(3, 0.5, kappa=0.3), 0, truncation=40)
    direct = solve_convolution(series, source)
    # 17 significant digits round-trip binary64 exactly.
    assert np.array_equal(loaded.samples, direct.samples)


def test_solve_profile_artifact(tmp_path, capsys):
    out_path = tmp_path / "profile.json"
    code, _ = _run(
        capsys,
        [
            "solve-profile",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--tolerance",
            "1e-10",
            "--output",
            str(out_path),
        ],
    )
    assert code == 0
    solution, meta = GridFunction.from_json(out_path)
    assert meta["converged"] is True
    assert meta["residual_norm"] <= 1e-10
    assert meta["trivial"] is False
    exact = 1.0 / np.cosh(solution.t)
    assert float(np.max(np.abs(solution.samples.real - exact))) <= 1e-8


def test_verify_bubble_report_and_gate(capsys):
    code, out = _run(capsys, ["verify-bubble", "--n", "3", "--gamma", "0.5"])
    assert code == 0
    doc = json.loads(out)
    assert doc["metadata"]["passed"] is True
    assert doc["metadata"]["residual"] <= 1e-6

    code, out = _run(
        capsys,
        ["verify-bubble", "--n", "3", "--gamma", "0.5", "--tolerance", "1e-15"],
    )
    assert code == 3
    doc = json.loads(out)
    assert doc["error"] == "ThresholdError"
    assert "residual" in doc["message"]


def test_pohozaev_report(tmp_path, capsys):
    prof_path = tmp_path / "profile.csv"
    code, _ = _run(
        capsys,
        [
            "solve-profile",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--tolerance",
            "1e-10",
            "--output",
            str(prof_path),
            "--format",
            "csv",
        ],
    )
    assert code == 0
    code, out = _run(
        capsys,
        ["pohozaev", "--n", "3", "--gamma", "0.5", "--input", str(prof_path)],
    )
    assert code == 0
    meta = json.loads(out)["metadata"]
    assert meta["relative_spread"] <= 1e-3
    third = np.pi / 6.0
    for key in ("scaled_gradient", "scaled_mass", "scaled_nonlinear"):
        assert abs(meta[key] - third) <= 1e-3


def test_wronskian_defect_report(tmp_path, capsys):
    first = GridFunction.from_callable(lambda t: np.exp(-((t - 1.0) ** 2)))
    second = GridFunction.from_callable(lambda t: np.exp(-((t + 2.0) ** 2) / 2.0))
    p1 = tmp_path / "h.csv"
    p2 = tmp_path / "ht.csv"
    first.to_csv(p1)
    second.to_csv(p2)
    code, out = _run(
        capsys,
        [
            "wronskian",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--kappa",
            "0.3",
            "--source",
            str(p1),
            "--source-tilde",
            str(p2),
            "--truncation",
            "20",
        ],
    )
    assert code == 0
    doc = json.loads(out)
    values = np.array(doc["re"])
    assert doc["metadata"]["wronskian_sup"] == pytest.approx(np.max(np.abs(values)))
    # Centered-difference defect at the default step.
    assert doc["metadata"]["defect_sup"] <= 5e-3


def test_frobenius_on_solved_profile(tmp_path, capsys):
    prof_path = tmp_path / "profile.csv"
    code, _ = _run(
        capsys,
        [
            "solve-profile",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--kappa",
            "0.3",
            "--tolerance",
            "1e-10",
            "--output",
            str(prof_path),
            "--format",
            "csv",
        ],
    )
    assert code == 0
    code, out = _run(
        capsys,
        [
            "frobenius",
            "--n",
            "3",
            "--gamma",
            "0.5",
            "--kappa",
            "0.3",
            "--input",
            str(prof_path),
            "--use-roots",
        ],
    )
    assert code == 0
    meta = json.loads(out)["metadata"]
    assert abs(meta["sigma"] - 0.76091823639160877) <= 1e-6
    assert meta["tau"] == 0.0
    assert meta["residual"] <= 0.05


def test_validation_exit_codes(capsys):
    code, out = _run(
        capsys, ["solve-profile", "--n", "3", "--gamma", "0.5", "--kappa", "0.9"]
    )
    assert code == 2
    assert json.loads(out)["error"] == "ValidationError"

    code, out = _run(
        capsys, ["verify-bubble", "--n", "3", "--gamma", "0.5", "--format", "csv"]
    )
    assert code == 2

    code, out = _run(capsys, ["pohozaev", "--n", "3", "--gamma", "0.5", "--p", "1.9"])
    assert code == 2

    code, out = _run(
        capsys,
        ["frobenius", "--n", "3", "--gamma", "0.5", "--input", "/nope/missing.csv"],
    )
    assert code == 2
    assert "not found" in json.loads(out)["message"]

    with pytest.raises(SystemExit) as info:
        main(["symbol", "--n", "3"])
    assert info.value.code == 2


def test_thread_override(monkeypatch, capsys):
    monkeypatch.setenv("OMP_NUM_THREADS", "8")
    monkeypatch.setenv("CYLSPEC_THREADS", "2")
    code, _ = _run(capsys, ["symbol", "--n", "3", "--gamma", "0.5"])
    assert code == 0
    assert os.environ["OMP_NUM_THREADS"] == "2"

    monkeypatch.setenv("CYLSPEC_THREADS", "-3")
    code, out = _run(capsys, ["symbol", "--n", "3", "--gamma", "0.5"])
    assert code == 2
    assert json.loads(out)["error"] == "ValidationError"


def test_console_script_byte_identical():
    argv = ["cylspec", "symbol", "--n", "3", "--gamma", "0.5", "--xi", "0.7", "1.1"]
    first = subprocess.run(argv, capture_output=True, text=True)
    second = subprocess.run(argv, capture_output=True, text=True)
    assert first.returncode == 0
    assert first.stdout == second.stdout
    doc = json.loads(first.stdout)
    assert len(doc["theta_re"]) == 2
