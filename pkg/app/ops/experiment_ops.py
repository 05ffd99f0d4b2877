import os
from typing import Any, Dict, List, Optional, Tuple

from app.utils import logger
from lattice_model.core import (
    ConditionViolated,
    GridSpec,
    InvalidParameters,
    ModelParams,
    build_grid,
    restrict,
)
from lattice_model.components import (
    EnergyBreakdown,
    FiberSet,
    PairProbability,
    SolveReport,
    expected_edge_count,
    limit_total,
    minimize,
    total_energy,
)
from lattice_model.experiments import (
    STUDIES,
    ConvergenceRow,
    ExperimentConfig,
    get_displacement,
    get_force,
    summarize,
    write_summary,
    write_table,
)
from lattice_model.experiments.studies import sample_for
from lattice_model.potentials import get_potential


def pick_eps(cfg: ExperimentConfig, eps: Optional[float] = None) -> float:
    """The requested grid size, or the coarsest one of the config.

    Raises:
        InvalidParameters: if no grid size is requested and the sweep is empty.
    """
    if eps is not None:
        return float(eps)
    if not cfg.eps_sequence:
        raise InvalidParameters([ConditionViolated("eps_sequence", "at least one grid size")])
    return float(cfg.eps_sequence[0])


def single_run(cfg: ExperimentConfig, eps: Optional[float] = None) -> ExperimentConfig:
    """The config narrowed to one grid size and validated.

    Raises:
        InvalidParameters: if the config or the parameters at that grid size are invalid.
    """
    return cfg.with_changes(eps_sequence=(pick_eps(cfg, eps),)).validate()


def check_config(cfg: ExperimentConfig) -> Tuple[List[ConditionViolated], ModelParams]:
    violations = cfg.check()
    logger.info(f"Config check found {len(violations)} violated condition(s)")
    eps = pick_eps(cfg) if cfg.eps_sequence else cfg.params.eps
    return violations, cfg.params_at(eps)


def prepare_run(cfg: ExperimentConfig, eps: float, seed: int) -> Tuple[ModelParams, GridSpec, FiberSet]:
    params = cfg.params_at(eps)
    grid = build_grid(cfg.domain, eps)
    fibers = sample_for(cfg, params, grid, seed)
    logger.debug(f"Prepared run eps={eps:g} seed={seed}: {grid.size} nodes, {len(fibers)} fibers")
    return params, grid, fibers


def sample_run(cfg: ExperimentConfig, eps: Optional[float] = None,
               seed: int = 0) -> Tuple[FiberSet, float]:
    """Sample the fibers of one run; returns the fiber set and its expected size."""
    cfg = single_run(cfg, eps)
    eps = cfg.eps_sequence[0]
    params, grid, fibers = prepare_run(cfg, eps, seed)
    expected = expected_edge_count(params, grid, PairProbability(params, cfg.probability_override))
    return fibers, expected


def energy_run(cfg: ExperimentConfig, eps: Optional[float] = None,
               seed: int = 0) -> Tuple[EnergyBreakdown, FiberSet]:
    """Discrete energy of the restricted displacement preset against the restricted force
    preset."""
    cfg = single_run(cfg, eps)
    eps = cfg.eps_sequence[0]
    params, grid, fibers = prepare_run(cfg, eps, seed)
    u = restrict(get_displacement(cfg.displacement, cfg.domain), grid)
    f = restrict(get_force(cfg.force, cfg.domain), grid)
    breakdown = total_energy(u, f, fibers, get_potential(cfg.potential), params)
    logger.info(f"Energy at eps={eps:g} seed={seed}: {breakdown.to_dict()}")
    return breakdown, fibers


def minimize_run(cfg: ExperimentConfig, eps: Optional[float] = None, seed: int = 0,
                 tol: Optional[float] = None, maxiter: Optional[int] = None) -> SolveReport:
    cfg = single_run(cfg, eps)
    eps = cfg.eps_sequence[0]
    params, grid, fibers = prepare_run(cfg, eps, seed)
    f = restrict(get_force(cfg.force, cfg.domain), grid)
    options: Dict[str, Any] = {}
    if tol is not None:
        options["tol"] = tol
    if maxiter is not None:
        options["maxiter"] = maxiter
    return minimize(f, fibers, grid, params, get_potential(cfg.potential), **options)


def limit_run(cfg: ExperimentConfig, resolution: int = 32, nonlocal_resolution: int = 4,
              rtol: float = 1e-4) -> EnergyBreakdown:
    """Limit functional at the displacement preset."""
    cfg = single_run(cfg)
    u = get_displacement(cfg.displacement, cfg.domain)
    f = get_force(cfg.force, cfg.domain)
    breakdown = limit_total(u, f, cfg.params, get_potential(cfg.potential), resolution=resolution,
                            domain=cfg.domain, rtol=rtol, nonlocal_resolution=nonlocal_resolution)
    logger.info(f"Limit energy: {breakdown.to_dict()}")
    return breakdown


def study_run(cfg: ExperimentConfig, study: str,
              out: Optional[str] = None) -> Tuple[List[ConvergenceRow], Dict[str, Any], List[str]]:
    """Run a convergence study and write `<study>.csv` and `<study>.json` into `out`
    (default: the config's output directory)."""
    if study not in STUDIES:
        raise ValueError(f"Unknown study {study}. Available: {', '.join(STUDIES)}")
    out = out or cfg.output
    logger.info(f"Running {study} over {len(cfg.eps_sequence)} grid sizes "
                f"and {len(cfg.seeds)} seeds")
    rows = STUDIES[study](cfg)
    summary = summarize(study, rows, cfg)
    paths = [write_table(rows, os.path.join(out, f"{study}.csv")),
             write_summary(summary, os.path.join(out, f"{study}.json"))]
    return rows, summary, paths
