import csv
import json
import os

import pytest

from app.cli import EXIT_FAILURE, EXIT_INVALID, EXIT_OK, run_cli


def _run(capsys, *argv):
    code = run_cli(["--log-level", "WARNING", *argv])
    captured = capsys.readouterr()
    return code, captured.out, captured.err


def test_validate_defaults(capsys):
    code, out, _ = _run(capsys, "validate")
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["valid"] is True
    assert report["derived"]["probability"] == -3.0


def test_validate_three_dimensional_example(capsys, config_file):
    path = config_file(params={"d": 3, "s": 0.5, "p": 2.0, "C_tilde": 1.0},
                       eps_sequence=[0.25])
    code, out, _ = _run(capsys, "validate", "--config", path)
    assert code == EXIT_OK
    derived = json.loads(out)["derived"]
    assert derived["probability"] == -4.0
    assert derived["fluctuation"] == 2.0


def test_validate_reports_violations(capsys, config_file):
    path = config_file(params={"d": 2, "s": 0.5, "p": 2.0, "ell": 4.0, "C_tilde": 0.5})
    code, out, err = _run(capsys, "validate", "--config", path)
    assert code == EXIT_INVALID
    assert json.loads(out)["valid"] is False
    assert "weight_exponent" in err


def test_invalid_parameters_stop_a_run(capsys, config_file):
    path = config_file(params={"d": 2, "s": 0.5, "p": 2.0, "alpha": -1.0, "C_tilde": 0.5})
    code, _, err = _run(capsys, "energy", "--config", path)
    assert code == EXIT_INVALID
    assert "sparsity_exponent" in err


@pytest.mark.parametrize("command", ["validate", "energy"])
def test_empty_sweep_is_reported(capsys, config_file, command):
    code, _, err = _run(capsys, command, "--config", config_file(eps_sequence=[]))
    assert code == EXIT_INVALID
    assert "eps_sequence" in err


@pytest.mark.parametrize("argv", [["frobnicate"], ["energy", "--eps", "fine"]])
def test_usage_errors(capsys, argv):
    code, _, _ = _run(capsys, *argv)
    assert code == EXIT_FAILURE


def test_unreadable_config(capsys, tmp_path):
    path = tmp_path / "broken.json"
    path.write_text("{not json")
    code, _, err = _run(capsys, "validate", "--config", str(path))
    assert code == EXIT_INVALID
    assert "Invalid config" in err


def test_config_with_unknown_field_type(capsys, config_file):
    path = config_file(seeds="many")
    code, _, _ = _run(capsys, "validate", "--config", path)
    assert code == EXIT_INVALID


def test_sample_fibers(capsys, config_file, tmp_path):
    out_dir = tmp_path / "run"
    code, out, _ = _run(capsys, "sample-fibers", "--config", config_file(), "--seed", "3",
                        "--out", str(out_dir))
    assert code == EXIT_OK
    summary = json.loads(out)
    assert summary["eps"] == 0.25
    assert summary["nodes"] == 9
    with open(out_dir / "fibers.csv", newline="") as handle:
        rows = list(csv.reader(handle))
    assert rows[0] == ["i", "j", "weight"]
    assert len(rows) - 1 == summary["edge_count"]


def test_energy_and_minimize(capsys, config_file, tmp_path):
    out_dir = tmp_path / "run"
    code, out, _ = _run(capsys, "energy", "--config", config_file(), "--eps", "0.125",
                        "--out", str(out_dir))
    assert code == EXIT_OK
    payload = json.loads(out)
    assert payload["nodes"] == 49
    energy = payload["energy"]
    assert energy["total"] == pytest.approx(energy["e_nonlocal"] + energy["e_local"]
                                            - energy["work"])
    assert json.loads((out_dir / "energy.json").read_text()) == payload

    code, out, _ = _run(capsys, "minimize", "--config", config_file(), "--out", str(out_dir))
    assert code == EXIT_OK
    report = json.loads(out)
    assert report["converged"] is True
    assert report["method"] == "quadratic"
    assert os.path.exists(out_dir / "minimizer.csv")
    assert os.path.exists(out_dir / "minimize.json")


def test_minimize_iteration_cap(capsys, config_file):
    code, _, err = _run(capsys, "minimize", "--config", config_file(), "--eps", "0.125",
                        "--tol", "1e-14", "--maxiter", "1")
    assert code == EXIT_FAILURE
    assert "MaxIterations" in err


def test_limit_energy_of_zero_displacement(capsys, config_file, tmp_path):
    code, out, _ = _run(capsys, "limit-energy", "--config", config_file(displacement="zero"),
                        "--resolution", "4", "--out", str(tmp_path))
    assert code == EXIT_OK
    assert json.loads(out) == {"e_nonlocal": 0.0, "e_local": 0.0, "work": 0.0, "total": 0.0}
    assert os.path.exists(tmp_path / "limit.json")


def test_converge_sigma_is_reproducible(capsys, config_file, tmp_path):
    first, second = tmp_path / "first", tmp_path / "second"
    code, out, _ = _run(capsys, "converge-sigma", "--config", config_file(), "--out", str(first))
    assert code == EXIT_OK
    assert json.loads(out)["study"] == "converge-sigma"
    code, _, _ = _run(capsys, "converge-sigma", "--config", config_file(), "--out", str(second),
                      "--workers", "2")
    assert code == EXIT_OK
    assert (first / "converge-sigma.csv").read_bytes() == (second / "converge-sigma.csv").read_bytes()
    assert (first / "converge-sigma.json").exists()


def test_study_seed_shift(capsys, config_file, tmp_path):
    code, _, _ = _run(capsys, "converge-sigma", "--config", config_file(), "--seed", "5",
                      "--out", str(tmp_path))
    assert code == EXIT_OK
    with open(tmp_path / "converge-sigma.csv") as handle:
        handle.readline()
        seeds = {row["seed"] for row in csv.DictReader(handle)}
    assert seeds == {"5", "6"}


def test_naive_sampler_size_limit(capsys, config_file, monkeypatch, tmp_path):
    monkeypatch.setenv("LATTICE_NAIVE_PAIR_CAP", "10")
    code, _, err = _run(capsys, "converge-sigma", "--config", config_file(), "--sampler", "naive",
                        "--out", str(tmp_path))
    assert code == EXIT_FAILURE
    assert "SizeLimit" in err


def test_recovery_and_minimizer_studies(capsys, config_file, tmp_path):
    path = config_file(displacement="zero", force="zero", seeds=[0])
    for study in ("converge-recovery", "converge-minimizers"):
        code, out, _ = _run(capsys, study, "--config", path, "--out", str(tmp_path))
        assert code == EXIT_OK
        assert json.loads(out)["study"] == study
        assert (tmp_path / f"{study}.csv").exists()
