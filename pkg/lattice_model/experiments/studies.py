"""Convergence studies over an eps sweep and a set of seeds.

Every study runs one independent job per (eps, seed), on a thread pool when the config
asks for more than one worker, and returns rows ordered by (eps index, seed) whatever the
completion order.
"""
import math
import time
import logging
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import linregress

from lattice_model.core.grid import Box, GridSpec, SmoothField, build_grid
from lattice_model.core.operators import l2_distance, restrict
from lattice_model.core.params import ModelParams
from lattice_model.components.energy import total_energy
from lattice_model.components.fibers import FiberSet, PairProbability, sample_fibers, sigma_weight
from lattice_model.components.limit import limit_total
from lattice_model.components.solver import minimize
from lattice_model.potentials import get_potential
from lattice_model.experiments.config import ExperimentConfig
from lattice_model.experiments.io import ConvergenceRow
from lattice_model.experiments.presets import get_displacement, get_force

logger = logging.getLogger(__name__)


def run_jobs(cfg: ExperimentConfig, job: Callable[[int, float, int], Any]) -> List[Any]:
    """Run job(eps_index, eps, seed) for the whole sweep; results in (eps index, seed) order."""
    tasks = [(k, eps, seed) for k, eps in enumerate(cfg.eps_sequence) for seed in cfg.seeds]
    if cfg.workers <= 1:
        return [job(*task) for task in tasks]
    with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        futures = [pool.submit(job, *task) for task in tasks]
        return [future.result() for future in futures]


def sample_for(cfg: ExperimentConfig, params: ModelParams, grid: GridSpec, seed: int) -> FiberSet:
    probability = PairProbability(params, cfg.probability_override)
    return sample_fibers(params, grid, seed, symmetric=cfg.symmetric, sampler=cfg.sampler,
                         probability=probability)


def max_distance(U: Box, J: Box) -> float:
    """M_{U,J}: the largest distance between points of U and J."""
    gaps = [max(abs(uh - jl), abs(jh - ul))
            for ul, uh, jl, jh in zip(U.lower, U.upper, J.lower, J.upper)]
    return float(math.sqrt(sum(g * g for g in gaps)))


def chebyshev_bound(params: ModelParams, U: Box, J: Box) -> float:
    """Variance bound (c^2 C_tilde/(|U||J|)) M^(d+ps-ell) eps^(d-ps+ell-alpha)."""
    prm = params
    exponent = prm.d - prm.p * prm.s + prm.ell - prm.alpha
    return (prm.c ** 2 * prm.C_tilde / (U.volume * J.volume)
            * max_distance(U, J) ** (prm.kernel_exponent - prm.ell) * prm.eps ** exponent)


def averaging_moments(params: ModelParams, grid: GridSpec, U: Box, J: Box,
                      probability: PairProbability) -> Dict[str, float]:
    """Exact mean and variance of the sigma statistic and the number of pairs in U_eps x J_eps."""
    in_u = np.flatnonzero(U.contains(grid.nodes))
    in_j = np.flatnonzero(J.contains(grid.nodes))
    scale = grid.eps ** (2 * grid.dim) / (U.volume * J.volume)
    mean_parts, var_parts, pairs = [], [], 0
    for start in range(0, in_u.shape[0], 256):
        i, j = np.meshgrid(in_u[start:start + 256], in_j, indexing="ij")
        i, j = i.ravel(), j.ravel()
        keep = i != j
        i, j = i[keep], j[keep]
        pairs += i.shape[0]
        offsets = grid.lattice[i] - grid.lattice[j]
        p = probability(offsets)
        weight = sigma_weight(params, np.linalg.norm(offsets, axis=1))
        mean_parts.append(weight * p)
        var_parts.append(weight ** 2 * p * (1.0 - p))
    mean = scale * math.fsum(np.concatenate(mean_parts)) if mean_parts else 0.0
    variance = scale ** 2 * math.fsum(np.concatenate(var_parts)) if var_parts else 0.0
    return {"deterministic": mean, "exact_variance": variance, "pairs": pairs}


def sigma_statistic(fibers: FiberSet, U: Box, J: Box) -> Tuple[float, int]:
    """(1/|U|)(1/|J|) eps^(2d) sum over x in U_eps, y in J_eps of sigma_{x,y}, and the
    number of contributing edges."""
    grid = fibers.grid
    if len(fibers) == 0:
        return 0.0, 0
    x = grid.nodes[fibers.edges[:, 0]]
    y = grid.nodes[fibers.edges[:, 1]]
    hit = U.contains(x) & J.contains(y)
    scale = grid.eps ** (2 * grid.dim) / (U.volume * J.volume)
    return scale * math.fsum(fibers.weights[hit]), int(np.sum(hit))


def _per_eps(rows: Sequence[ConvergenceRow], key: str = "value") -> Dict[float, np.ndarray]:
    grouped: Dict[float, List[float]] = {}
    for row in rows:
        value = row.value if key == "value" else row.columns.get(key)
        if value is not None:
            grouped.setdefault(row.eps, []).append(value)
    return {eps: np.asarray(values, dtype=float) for eps, values in grouped.items()}


def _variance(values: np.ndarray) -> float:
    return float(np.var(values, ddof=1)) if values.size > 1 else 0.0


def converge_sigma(cfg: ExperimentConfig) -> List[ConvergenceRow]:
    """Coefficient averaging study. For every (eps, seed) the averaged weight over U x J,
    its deterministic part, the fluctuation, the Chebyshev variance bound and the exact
    variance; the across-seed variance is added per eps."""
    cfg.validate()
    moments = {}
    for eps in cfg.eps_sequence:
        params = cfg.params_at(eps)
        grid = build_grid(cfg.domain, eps)
        moments[eps] = (grid, averaging_moments(params, grid, cfg.U, cfg.J,
                                                PairProbability(params, cfg.probability_override)))

    def job(k, eps, seed):
        params = cfg.params_at(eps)
        grid, exact = moments[eps]
        started = time.perf_counter()
        fibers = sample_for(cfg, params, grid, seed)
        statistic, hits = sigma_statistic(fibers, cfg.U, cfg.J)
        logger.info(f"converge-sigma eps={eps:g} seed={seed}: statistic {statistic:.6g} "
                    f"({time.perf_counter() - started:.2f}s)")
        return ConvergenceRow(eps, seed, statistic, {
            "deterministic": exact["deterministic"],
            "fluctuation": statistic - exact["deterministic"],
            "chebyshev_bound": chebyshev_bound(params, cfg.U, cfg.J),
            "exact_variance": exact["exact_variance"],
            "edges_in_UJ": hits,
            "edges_total": len(fibers),
        })

    rows = run_jobs(cfg, job)
    for eps, values in _per_eps(rows).items():
        variance = _variance(values)
        for row in rows:
            if row.eps == eps:
                row.columns["empirical_variance"] = variance
    return rows


def summarize_sigma(rows: Sequence[ConvergenceRow], params: Optional[ModelParams] = None) -> Dict[str, Any]:
    """Per-eps mean, variance and bounds, an empirical Chebyshev tail check with threshold
    a = 2 sqrt(bound), and the log-log decay slope of the across-seed standard deviation."""
    per_eps = []
    for eps, values in sorted(_per_eps(rows).items(), reverse=True):
        sample = [row for row in rows if row.eps == eps]
        bound = sample[0].columns["chebyshev_bound"]
        fluctuations = np.array([row.columns["fluctuation"] for row in sample])
        threshold = 2.0 * math.sqrt(bound) if bound > 0 else 0.0
        tail = float(np.mean(np.abs(fluctuations) >= threshold)) if threshold > 0 else 0.0
        per_eps.append({
            "eps": eps,
            "seeds": int(values.size),
            "mean": float(np.mean(values)),
            "variance": _variance(values),
            "std": math.sqrt(_variance(values)),
            "deterministic": sample[0].columns["deterministic"],
            "chebyshev_bound": bound,
            "exact_variance": sample[0].columns["exact_variance"],
            "tail_threshold": threshold,
            "tail_fraction": tail,
            "tail_bound": 0.25 if threshold > 0 else 1.0,
        })
    summary: Dict[str, Any] = {"study": "converge-sigma", "per_eps": per_eps}
    usable = [entry for entry in per_eps if entry["std"] > 0]
    if len(usable) >= 2:
        fit = linregress(np.log([e["eps"] for e in usable]), np.log([e["std"] for e in usable]))
        summary["decay"] = {"slope": float(fit.slope), "intercept": float(fit.intercept),
                            "rvalue": float(fit.rvalue)}
    if params is not None:
        summary["limit"] = params.c_bar
        summary["expected_rate"] = (params.d - params.p * params.s + params.ell - params.alpha) / 2.0
    return summary


def converge_recovery(cfg: ExperimentConfig, u: Optional[SmoothField] = None) -> List[ConvergenceRow]:
    """Recovery sequence study: u_eps = R_eps u, discrete energy against the limit
    functional at u, componentwise gaps per (eps, seed)."""
    cfg.validate()
    u = u if u is not None else get_displacement(cfg.displacement, cfg.domain)
    f = get_force(cfg.force, cfg.domain)
    pot = get_potential(cfg.potential)
    limit = limit_total(u, f, cfg.params, pot, domain=cfg.domain)
    logger.info(f"Limit energy for the recovery study: {limit.to_dict()}")
    grids = {eps: build_grid(cfg.domain, eps) for eps in cfg.eps_sequence}
    restricted = {eps: (restrict(u, grid), restrict(f, grid)) for eps, grid in grids.items()}

    def job(k, eps, seed):
        params = cfg.params_at(eps)
        grid = grids[eps]
        u_eps, f_eps = restricted[eps]
        fibers = sample_for(cfg, params, grid, seed)
        discrete = total_energy(u_eps, f_eps, fibers, pot, params)
        gap = discrete.gap(limit)
        scale = abs(limit.total) if limit.total != 0 else 1.0
        logger.info(f"converge-recovery eps={eps:g} seed={seed}: gap {gap.total:.6g}")
        columns = {f"discrete_{k_}": v for k_, v in discrete.to_dict().items()}
        columns.update({f"limit_{k_}": v for k_, v in limit.to_dict().items()})
        columns.update({f"gap_{k_}": v for k_, v in gap.to_dict().items()})
        columns["relative_gap"] = gap.total / scale
        columns["edges_total"] = len(fibers)
        return ConvergenceRow(eps, seed, gap.total, columns)

    return run_jobs(cfg, job)


def converge_minimizers(cfg: ExperimentConfig) -> List[ConvergenceRow]:
    """Minimizer study: minimal energy per (eps, seed), the L2 distance of the extended
    minimizer to the one at the previous eps with the same seed, and the across-seed
    spread of minimal energies per eps."""
    cfg.validate()
    f = get_force(cfg.force, cfg.domain)
    pot = get_potential(cfg.potential)
    grids = {eps: build_grid(cfg.domain, eps) for eps in cfg.eps_sequence}

    def job(k, eps, seed):
        params = cfg.params_at(eps)
        grid = grids[eps]
        fibers = sample_for(cfg, params, grid, seed)
        report = minimize(restrict(f, grid), fibers, grid, params, pot)
        logger.info(f"converge-minimizers eps={eps:g} seed={seed}: energy "
                    f"{report.energy.total:.10g} in {report.iterations} iterations")
        row = ConvergenceRow(eps, seed, report.energy.total, {
            "e_nonlocal": report.energy.e_nonlocal,
            "e_local": report.energy.e_local,
            "work": report.energy.work,
            "iterations": report.iterations,
            "gradient_norm": report.gradient_norm,
            "edges_total": len(fibers),
        })
        return row, report.minimizer

    results = run_jobs(cfg, job)
    rows = [row for row, _ in results]
    minimizers = {(row.eps, row.seed): minimizer for row, minimizer in results}
    for k, eps in enumerate(cfg.eps_sequence[1:], start=1):
        previous = cfg.eps_sequence[k - 1]
        for row in rows:
            if row.eps == eps:
                row.columns["l2_to_previous"] = l2_distance(
                    minimizers[(eps, row.seed)], minimizers[(previous, row.seed)])
    for eps, values in _per_eps(rows).items():
        spread = math.sqrt(_variance(values))
        for row in rows:
            if row.eps == eps:
                row.columns["energy_spread"] = spread
    return rows


def summarize_rows(rows: Sequence[ConvergenceRow], study: str,
                   extra: Sequence[str] = ()) -> Dict[str, Any]:
    """Per-eps mean and standard deviation of the headline value and of `extra` columns."""
    per_eps = []
    for eps, values in sorted(_per_eps(rows).items(), reverse=True):
        entry = {"eps": eps, "seeds": int(values.size), "mean": float(np.mean(values)),
                 "std": math.sqrt(_variance(values))}
        for key in extra:
            column = _per_eps([row for row in rows if row.eps == eps], key).get(eps)
            if column is not None and column.size:
                entry[f"{key}_mean"] = float(np.mean(column))
        per_eps.append(entry)
    return {"study": study, "per_eps": per_eps}


STUDIES: Dict[str, Callable[[ExperimentConfig], List[ConvergenceRow]]] = {
    "converge-sigma": converge_sigma,
    "converge-recovery": converge_recovery,
    "converge-minimizers": converge_minimizers,
}


def summarize(study: str, rows: Sequence[ConvergenceRow], cfg: ExperimentConfig) -> Dict[str, Any]:
    if study == "converge-sigma":
        return summarize_sigma(rows, cfg.params)
    if study == "converge-recovery":
        return summarize_rows(rows, study, ("relative_gap", "gap_e_nonlocal", "gap_e_local"))
    return summarize_rows(rows, study, ("l2_to_previous", "energy_spread"))
