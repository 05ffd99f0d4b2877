from .config import (
    ExperimentConfig,
    default_params,
    default_averaging_sets,
    DEFAULT_U,
    DEFAULT_J,
    DEFAULT_EPS_SEQUENCE,
)
from .presets import get_force, get_displacement, FORCE_PRESETS, DISPLACEMENT_PRESETS
from .io import ConvergenceRow, write_table, read_table, write_summary, SCHEMA_LINE
from .studies import (
    STUDIES,
    converge_sigma,
    converge_recovery,
    converge_minimizers,
    summarize_sigma,
    summarize_rows,
    summarize,
    sigma_statistic,
    chebyshev_bound,
    averaging_moments,
    run_jobs,
)


__all__ = [
    "ExperimentConfig",
    "default_params",
    "default_averaging_sets",
    "DEFAULT_U",
    "DEFAULT_J",
    "DEFAULT_EPS_SEQUENCE",
    "get_force",
    "get_displacement",
    "FORCE_PRESETS",
    "DISPLACEMENT_PRESETS",
    "ConvergenceRow",
    "write_table",
    "read_table",
    "write_summary",
    "SCHEMA_LINE",
    "STUDIES",
    "converge_sigma",
    "converge_recovery",
    "converge_minimizers",
    "summarize_sigma",
    "summarize_rows",
    "summarize",
    "sigma_statistic",
    "chebyshev_bound",
    "averaging_moments",
    "run_jobs",
]
