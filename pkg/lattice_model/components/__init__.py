from .fibers import (
    PairProbability,
    FiberSet,
    pair_probability,
    sigma_weight,
    sample_naive,
    sample_shells,
    sample_fibers,
    expected_edge_count,
)
from .energy import (
    EnergyBreakdown,
    EnergyModel,
    local_energy,
    nonlocal_energy,
    work_term,
    total_energy,
    gradient,
    korn_lhs,
    poincare_check,
)
from .solver import SolveReport, solve_quadratic, solve_general, minimize
from .limit import (
    nonlocal_limit,
    local_limit,
    work_limit,
    limit_total,
    local_density,
    expanded_local_density_2d,
    expected_discrete_nonlocal,
)


__all__ = [
    "PairProbability",
    "FiberSet",
    "pair_probability",
    "sigma_weight",
    "sample_naive",
    "sample_shells",
    "sample_fibers",
    "expected_edge_count",
    "EnergyBreakdown",
    "EnergyModel",
    "local_energy",
    "nonlocal_energy",
    "work_term",
    "total_energy",
    "gradient",
    "korn_lhs",
    "poincare_check",
    "SolveReport",
    "solve_quadratic",
    "solve_general",
    "minimize",
    "nonlocal_limit",
    "local_limit",
    "work_limit",
    "limit_total",
    "local_density",
    "expanded_local_density_2d",
    "expected_discrete_nonlocal",
]
