from .exceptions import (
    LatticeModelError,
    ConditionViolated,
    InvalidParameters,
    EmptyGrid,
    GridMismatch,
    SizeLimit,
    GrowthViolated,
    NonIntegrable,
    NoConvergence,
    MaxIterations,
    LineSearchStalled,
    NonFiniteEnergy,
    UnknownPotential,
    UnknownPreset,
)
from .params import ModelParams, check_params, validate_params, max_pair_probability
from .grid import (
    Box,
    IndicatorDomain,
    GridSpec,
    NeighborStencil,
    DiscreteField,
    SmoothField,
    build_grid,
    zero_field,
)
from .operators import restrict, extend, roundtrip_defect, l2_distance, l2_norm, integrate


__all__ = [
    "LatticeModelError",
    "ConditionViolated",
    "InvalidParameters",
    "EmptyGrid",
    "GridMismatch",
    "SizeLimit",
    "GrowthViolated",
    "NonIntegrable",
    "NoConvergence",
    "MaxIterations",
    "LineSearchStalled",
    "NonFiniteEnergy",
    "UnknownPotential",
    "UnknownPreset",
    "ModelParams",
    "check_params",
    "validate_params",
    "max_pair_probability",
    "Box",
    "IndicatorDomain",
    "GridSpec",
    "NeighborStencil",
    "DiscreteField",
    "SmoothField",
    "build_grid",
    "zero_field",
    "restrict",
    "extend",
    "roundtrip_defect",
    "l2_distance",
    "l2_norm",
    "integrate",
]
