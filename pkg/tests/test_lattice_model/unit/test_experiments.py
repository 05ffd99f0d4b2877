import math
import time
from dataclasses import replace

import numpy as np
import pytest

from lattice_model.core import (
    Box,
    InvalidParameters,
    UnknownPreset,
    build_grid,
    integrate,
    restrict,
)
from lattice_model.components import FiberSet, total_energy
from lattice_model.experiments import (
    ConvergenceRow,
    ExperimentConfig,
    default_averaging_sets,
    get_displacement,
    get_force,
    read_table,
    write_summary,
    write_table,
)
from lattice_model.experiments.config import DEFAULT_J, DEFAULT_U
from lattice_model.potentials import CauchyPotential
from lattice_model.experiments.studies import (
    STUDIES,
    chebyshev_bound,
    converge_minimizers,
    converge_recovery,
    converge_sigma,
    max_distance,
    run_jobs,
    sample_for,
    sigma_statistic,
    summarize,
    summarize_sigma,
)


@pytest.fixture
def small_config(tmp_path):
    return ExperimentConfig(eps_sequence=(1 / 8, 1 / 16), seeds=(0, 1, 2), workers=1,
                            output=str(tmp_path))


##########################################################################################
# CONFIG

def test_default_config_is_valid():
    cfg = ExperimentConfig()
    assert cfg.check() == []
    assert cfg.validate() is cfg
    assert cfg.params_at(1 / 16).eps == 1 / 16


@pytest.mark.parametrize("changes,name", [
    ({"eps_sequence": (1 / 16, 1 / 8)}, "eps_sequence"),
    ({"eps_sequence": ()}, "eps_sequence"),
    ({"seeds": ()}, "seeds"),
    ({"domain": Box.unit(3)}, "domain"),
    ({"U": Box((0.5, 0.5), (1.5, 0.9))}, "averaging_sets"),
    ({"potential": "harmonic"}, "potential"),
    ({"force": "gravity"}, "force"),
    ({"displacement": "twist"}, "displacement"),
    ({"sampler": "gibbs"}, "sampler"),
    ({"workers": 0}, "workers"),
    ({"probability_override": 1.5}, "probability_bound"),
])
def test_config_violations(changes, name):
    cfg = ExperimentConfig().with_changes(**changes)
    assert name in [v.name for v in cfg.check()]
    with pytest.raises(InvalidParameters):
        cfg.validate()


def test_parameter_violations_are_reported_once():
    cfg = ExperimentConfig()
    cfg = cfg.with_changes(params=replace(cfg.params, ell=4.0))
    names = [v.name for v in cfg.check()]
    assert names.count("weight_exponent") == 1


def test_default_averaging_sets():
    assert default_averaging_sets(2) == (DEFAULT_U, DEFAULT_J)
    U, J = default_averaging_sets(3)
    assert (U.dim, J.dim) == (3, 3)
    assert Box.unit(3).contains_box(U) and Box.unit(3).contains_box(J)


##########################################################################################
# PRESETS

def test_presets_lookup(unit_square):
    for name in ("zero", "sine"):
        assert get_force(name, unit_square)(np.full((3, 2), 0.5)).shape == (3, 2)
    for name in ("zero", "sine-bump", "bump", "rotation"):
        assert get_displacement(name, unit_square)(np.full((3, 2), 0.5)).shape == (3, 2)
    with pytest.raises(UnknownPreset):
        get_force("gravity", unit_square)
    with pytest.raises(UnknownPreset):
        get_displacement("twist", unit_square)


def test_sine_force_has_unit_norm():
    box = Box((0.0, 0.0), (2.0, 0.5))
    f = get_force("sine", box)
    norm2 = integrate(lambda x: np.sum(f(x) ** 2, axis=1), box, panels=8)[0]
    assert norm2 == pytest.approx(1.0, rel=1e-6)


@pytest.mark.parametrize("name", ["sine-bump", "bump", "rotation"])
def test_displacement_gradients_match_finite_differences(unit_square, rng, name):
    u = get_displacement(name, unit_square)
    points = rng.uniform(0.1, 0.9, size=(20, 2))
    h = 1e-6
    numeric = np.stack([(u(points + h * e) - u(points - h * e)) / (2 * h)
                        for e in np.eye(2)], axis=-1)
    np.testing.assert_allclose(u.gradient(points), numeric, atol=1e-6)


def test_sine_bump_vanishes_on_boundary(unit_square):
    u = get_displacement("sine-bump", unit_square)
    edge = np.array([[0.0, 0.3], [1.0, 0.7], [0.4, 0.0], [0.2, 1.0]])
    np.testing.assert_allclose(u(edge), 0.0, atol=1e-30)


##########################################################################################
# IO

def test_table_roundtrip(tmp_path):
    rows = [ConvergenceRow(0.125, 0, 0.1 + 0.2, {"deterministic": 0.5}),
            ConvergenceRow(0.0625, 1, 1e-17, {"deterministic": 0.5, "l2_to_previous": 0.25})]
    path = write_table(rows, tmp_path / "nested" / "study.csv")
    with open(path) as handle:
        assert handle.readline() == "# fiberlat-v1\n"
        assert handle.readline() == "eps,seed,value,deterministic,l2_to_previous\n"
    records = read_table(path)
    assert float(records[0]["value"]) == 0.1 + 0.2
    assert records[0]["l2_to_previous"] == ""
    assert float(records[1]["l2_to_previous"]) == 0.25


def test_table_without_schema_line(tmp_path):
    path = tmp_path / "plain.csv"
    path.write_text("eps,seed,value\n0.1,0,1.0\n")
    with pytest.raises(ValueError):
        read_table(path)


def test_write_summary(tmp_path):
    path = write_summary({"b": 1, "a": [1.5]}, tmp_path / "summary.json")
    assert open(path).read() == '{\n  "a": [\n    1.5\n  ],\n  "b": 1\n}\n'


##########################################################################################
# STUDIES

def test_run_jobs_keeps_task_order(small_config):
    def job(k, eps, seed):
        time.sleep(0.01 * (3 - seed))
        return (k, eps, seed)

    expected = [(k, eps, seed) for k, eps in enumerate(small_config.eps_sequence)
                for seed in small_config.seeds]
    assert run_jobs(small_config, job) == expected
    assert run_jobs(small_config.with_changes(workers=2), job) == expected


def test_averaging_geometry():
    assert max_distance(DEFAULT_U, DEFAULT_J) == pytest.approx(math.sqrt(0.875 ** 2 + 0.5 ** 2))
    params = ExperimentConfig().params_at(1 / 16)
    expected = 0.5 / (0.25 * 0.1875) * (0.875 ** 2 + 0.25) ** 1.5 / 16
    assert chebyshev_bound(params, DEFAULT_U, DEFAULT_J) == pytest.approx(expected)


def test_sigma_statistic_without_fibers(grid_7x7, default_params):
    assert sigma_statistic(FiberSet.empty(grid_7x7, default_params), DEFAULT_U, DEFAULT_J) == (0.0, 0)


def test_certain_connections_have_no_fluctuation(tmp_path):
    cfg = ExperimentConfig(eps_sequence=(1 / 8,), seeds=(0,), probability_override=1.0,
                           output=str(tmp_path))
    row = converge_sigma(cfg)[0]
    assert row.value == pytest.approx(row.columns["deterministic"], rel=1e-12)
    assert row.columns["exact_variance"] == 0.0


def test_converge_sigma_rows(small_config):
    rows = converge_sigma(small_config)
    assert [(r.eps, r.seed) for r in rows] == [(e, s) for e in (1 / 8, 1 / 16) for s in (0, 1, 2)]
    for row in rows:
        # U and J are cell aligned and disjoint
        assert row.columns["deterministic"] == pytest.approx(0.5, rel=1e-12)
        assert row.columns["fluctuation"] == pytest.approx(row.value - 0.5)
        assert row.columns["exact_variance"] <= row.columns["chebyshev_bound"]
    again = converge_sigma(small_config.with_changes(workers=2))
    assert [r.value for r in again] == [r.value for r in rows]

    summary = summarize_sigma(rows, small_config.params)
    assert summary["study"] == "converge-sigma"
    assert [e["eps"] for e in summary["per_eps"]] == [1 / 8, 1 / 16]
    assert summary["limit"] == 0.5
    assert summary["expected_rate"] == 0.5
    assert "slope" in summary["decay"]


def test_energies_are_identical_across_worker_counts(small_config):
    box = small_config.domain
    pot = CauchyPotential()

    def job(k, eps, seed):
        params = small_config.params_at(eps)
        grid = build_grid(box, eps)
        fibers = sample_for(small_config, params, grid, seed)
        u = restrict(get_displacement("sine-bump", box), grid)
        f = restrict(get_force("sine", box), grid)
        return total_energy(u, f, fibers, pot, params).total

    serial = run_jobs(small_config, job)
    assert run_jobs(small_config.with_changes(workers=4), job) == serial
    assert len(set(serial)) > 1


def test_symmetric_sampling_has_the_same_averaged_weight(tmp_path):
    cfg = ExperimentConfig(eps_sequence=(1 / 16,), seeds=tuple(range(12)), workers=2,
                           output=str(tmp_path))
    plain = converge_sigma(cfg)
    mirrored = converge_sigma(cfg.with_changes(symmetric=True))
    n = len(cfg.seeds)
    spread = math.sqrt(plain[0].columns["exact_variance"] / n)
    assert mirrored[0].columns["deterministic"] == plain[0].columns["deterministic"]
    for rows in (plain, mirrored):
        mean = np.mean([r.value for r in rows])
        assert abs(mean - 0.5) <= 5 * spread
    gap = abs(np.mean([r.value for r in plain]) - np.mean([r.value for r in mirrored]))
    assert gap <= 5 * math.sqrt(2) * spread


def test_recovery_of_zero_displacement(small_config):
    cfg = small_config.with_changes(displacement="zero", seeds=(0, 1))
    rows = converge_recovery(cfg)
    assert len(rows) == 4
    for row in rows:
        assert row.value == 0.0
        assert row.columns["gap_e_nonlocal"] == 0.0
        assert row.columns["limit_total"] == 0.0
    assert summarize("converge-recovery", rows, cfg)["study"] == "converge-recovery"


def test_minimizers_without_force(small_config):
    cfg = small_config.with_changes(force="zero", seeds=(0, 1))
    rows = converge_minimizers(cfg)
    assert all(row.value == 0.0 for row in rows)
    assert all("l2_to_previous" not in row.columns for row in rows if row.eps == 1 / 8)
    assert all(row.columns["l2_to_previous"] == 0.0 for row in rows if row.eps == 1 / 16)
    assert all(row.columns["energy_spread"] == 0.0 for row in rows)
    summary = summarize("converge-minimizers", rows, cfg)
    assert summary["per_eps"][1]["l2_to_previous_mean"] == 0.0
    assert set(STUDIES) == {"converge-sigma", "converge-recovery", "converge-minimizers"}
