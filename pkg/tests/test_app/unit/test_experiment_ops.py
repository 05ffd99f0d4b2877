import pytest
from fastapi import HTTPException

from app.ops.exceptions import raise_model_exception
from app.ops.experiment_ops import (
    check_config,
    energy_run,
    pick_eps,
    sample_run,
    single_run,
    study_run,
)
from app.schemas import ExperimentConfigSchema, FiberSampleSchema, ParamsSchema
from lattice_model.core import (
    Box,
    ConditionViolated,
    EmptyGrid,
    InvalidParameters,
)
from lattice_model.experiments import ExperimentConfig


@pytest.fixture
def tiny(tmp_path):
    return ExperimentConfig(eps_sequence=(0.25, 0.125), seeds=(0, 1), workers=1,
                            output=str(tmp_path))


##########################################################################################
# EXCEPTIONS

@pytest.mark.parametrize("exc,expected_status,expected_detail", [
    (InvalidParameters([ConditionViolated("weight_exponent", "ell < 4", "ell=4")]), 422,
     [{"name": "weight_exponent", "inequality": "ell < 4", "detail": "ell=4"}]),
    (EmptyGrid("no lattice point"), 400, "EmptyGrid: no lattice point"),
    (ValueError("Degenerate box"), 400, "ValueError: Degenerate box"),
])
def test_raise_model_exception(exc, expected_status, expected_detail):
    with pytest.raises(HTTPException) as info:
        raise_model_exception(exc)
    assert info.value.status_code == expected_status
    assert info.value.detail == expected_detail


def test_unexpected_errors_are_reraised():
    with pytest.raises(KeyError):
        raise_model_exception(KeyError("boom"))


##########################################################################################
# OPS

def test_pick_eps(tiny):
    assert pick_eps(tiny) == 0.25
    assert pick_eps(tiny, 0.0625) == 0.0625


def test_single_run_narrows_the_sweep(tiny):
    cfg = single_run(tiny, 0.125)
    assert cfg.eps_sequence == (0.125,)
    assert single_run(tiny).eps_sequence == (0.25,)
    with pytest.raises(InvalidParameters):
        single_run(tiny.with_changes(potential="harmonic"))


def test_check_config_does_not_raise(tiny):
    violations, params = check_config(tiny.with_changes(sampler="gibbs"))
    assert [v.name for v in violations] == ["sampler"]
    assert params.eps == 0.25


def test_empty_sweep_is_a_violation(tiny):
    empty = tiny.with_changes(eps_sequence=())
    violations, params = check_config(empty)
    assert "eps_sequence" in [v.name for v in violations]
    assert params.eps == tiny.params.eps
    with pytest.raises(InvalidParameters):
        pick_eps(empty)
    with pytest.raises(InvalidParameters):
        single_run(empty)
    assert pick_eps(empty, 0.125) == 0.125


def test_sample_run(tiny):
    fibers, expected = sample_run(tiny, seed=3)
    assert fibers.grid.size == 9
    assert fibers.seed == 3
    assert expected > 0.0


def test_energy_run_is_deterministic(tiny):
    first, fibers = energy_run(tiny, 0.125, seed=1)
    second, _ = energy_run(tiny, 0.125, seed=1)
    assert first == second
    assert fibers.grid.size == 49
    assert first.total == pytest.approx(first.e_nonlocal + first.e_local - first.work)


def test_study_run_writes_files(tiny):
    rows, summary, paths = study_run(tiny, "converge-sigma")
    assert len(rows) == 4
    assert summary["study"] == "converge-sigma"
    assert [p.rsplit(".", 1)[1] for p in paths] == ["csv", "json"]


def test_study_run_rejects_unknown_study(tiny):
    with pytest.raises(ValueError):
        study_run(tiny, "converge-stress")


##########################################################################################
# SCHEMAS

def test_config_schema_roundtrip(tiny):
    schema = ExperimentConfigSchema.from_model(tiny)
    assert schema.eps_sequence == [0.25, 0.125]
    assert schema.U.lower == list(tiny.U.lower)
    assert schema.to_model() == tiny.with_changes(params=tiny.params_at(0.25))


def test_config_schema_defaults():
    cfg = ExperimentConfigSchema(params={"d": 3, "s": 0.5, "p": 2.0, "C_tilde": 1.0}).to_model()
    assert cfg.domain == Box.unit(3)
    assert (cfg.U.dim, cfg.J.dim) == (3, 3)
    assert cfg.params.eps == cfg.eps_sequence[0]


def test_config_schema_rejects_degenerate_boxes():
    schema = ExperimentConfigSchema(domain={"lower": [0.0, 1.0], "upper": [1.0, 1.0]})
    with pytest.raises(ValueError):
        schema.to_model()


def test_params_schema_eps_fallback():
    schema = ParamsSchema(d=2, s=0.5, p=2.0, C_tilde=0.5)
    assert schema.to_model().eps == 0.125
    assert schema.to_model(0.125).eps == 0.125
    assert ParamsSchema(d=2, s=0.5, p=2.0, C_tilde=0.5, eps=0.25).to_model().eps == 0.25


@pytest.mark.parametrize("include_edges", [False, True])
def test_fiber_sample_schema(tiny, include_edges):
    fibers, expected = sample_run(tiny, 0.125, seed=2)
    schema = FiberSampleSchema.from_fibers(fibers, 0.125, expected, include_edges)
    assert schema.edge_count == len(fibers)
    assert schema.sampler == "shells"
    if include_edges:
        assert len(schema.edges) == len(fibers)
        assert all(i != j for i, j, _ in schema.edges)
    else:
        assert schema.edges is None
