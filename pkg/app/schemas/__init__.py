# import all schemas
from .schemas import (
    BaseSchema,
    ParamsSchema,
    BoxSchema,
    ViolationSchema,
    ValidationSchema,
    ExperimentConfigSchema,
    RunRequestSchema,
    MinimizeRequestSchema,
    LimitRequestSchema,
    EnergyBreakdownSchema,
    EnergyResultSchema,
    FiberSampleSchema,
    SolveReportSchema,
    breakdown_schema,
)



__all__ = [
    "BaseSchema",
    "ParamsSchema",
    "BoxSchema",
    "ViolationSchema",
    "ValidationSchema",
    "ExperimentConfigSchema",
    "RunRequestSchema",
    "MinimizeRequestSchema",
    "LimitRequestSchema",
    "EnergyBreakdownSchema",
    "EnergyResultSchema",
    "FiberSampleSchema",
    "SolveReportSchema",
    "breakdown_schema",
]
