from typing import TypeVar, Type, Optional, List, Dict, Tuple
from dataclasses import fields, is_dataclass

from pydantic import BaseModel, Field

from lattice_model.core import Box, ConditionViolated, ModelParams
from lattice_model.components import EnergyBreakdown, FiberSet, SolveReport
from lattice_model.experiments import ExperimentConfig
from lattice_model.experiments.config import (
    DEFAULT_EPS_SEQUENCE,
    default_averaging_sets,
    default_params,
)


# Create a type variable for the model class
T = TypeVar('T')


class BaseSchema(BaseModel):
    """Base schema class that provides a method to create a schema from a model."""
    @classmethod
    def from_model(cls: Type[T], model) -> T:
        if is_dataclass(model):
            model_dict = {f.name: getattr(model, f.name) for f in fields(model)}
        else:
            model_dict = model.__dict__.copy()
        for key, value in model_dict.items():
            # Tuples of the domain types become lists on the wire
            if isinstance(value, tuple):
                model_dict[key] = list(value)
        return cls(**{k: v for k, v in model_dict.items() if k in cls.model_fields})


class ParamsSchema(BaseSchema):
    """Model parameters. `eps` is optional: experiment configs sweep over their own
    grid sizes. Without one, the coarsest default grid size is used."""
    d: int
    s: float
    p: float
    ell: float = 0.0
    alpha: float = 0.0
    c: float = 1.0
    C_tilde: float
    eps: Optional[float] = None

    def to_model(self, eps: Optional[float] = None) -> ModelParams:
        data = self.model_dump()
        if eps is None:
            eps = self.eps if self.eps is not None else DEFAULT_EPS_SEQUENCE[0]
        data["eps"] = eps
        return ModelParams(**data)


class BoxSchema(BaseSchema):
    """Open axis-aligned box given by its lower and upper corners."""
    lower: List[float]
    upper: List[float]

    def to_model(self) -> Box:
        return Box(tuple(self.lower), tuple(self.upper))


class ViolationSchema(BaseSchema):
    name: str
    inequality: str
    detail: str = ""


class ValidationSchema(BaseSchema):
    """Outcome of a parameter or config validation."""
    valid: bool
    violations: List[ViolationSchema] = []
    derived: Dict[str, float] = {}

    @classmethod
    def build(cls, violations: List[ConditionViolated], params: ModelParams) -> "ValidationSchema":
        return cls(valid=not violations,
                   violations=[ViolationSchema.from_model(v) for v in violations],
                   derived=params.derived_exponents())


def _default_params_schema() -> ParamsSchema:
    params = default_params()
    return ParamsSchema.from_model(params).model_copy(update={"eps": None})


class ExperimentConfigSchema(BaseSchema):
    """JSON form of an experiment config. Every field is optional; omitted fields take
    the library defaults (the two-dimensional default study)."""
    params: ParamsSchema = Field(default_factory=_default_params_schema)
    domain: Optional[BoxSchema] = None
    potential: str = "projection"
    force: str = "sine"
    displacement: str = "sine-bump"
    eps_sequence: Optional[List[float]] = None
    seeds: Optional[List[int]] = None
    U: Optional[BoxSchema] = None
    J: Optional[BoxSchema] = None
    symmetric: bool = False
    sampler: str = "shells"
    workers: Optional[int] = None
    output: Optional[str] = None
    probability_override: Optional[float] = None

    def to_model(self) -> ExperimentConfig:
        """Raises:
            ValueError: if a box is degenerate or its corners differ in dimension.
        """
        eps_sequence = self.eps_sequence or DEFAULT_EPS_SEQUENCE
        changes = dict(
            params=self.params.to_model(eps_sequence[0]),
            domain=self.domain.to_model() if self.domain else Box.unit(self.params.d),
            potential=self.potential,
            force=self.force,
            displacement=self.displacement,
            symmetric=self.symmetric,
            sampler=self.sampler,
            probability_override=self.probability_override,
        )
        if self.eps_sequence is not None:
            changes["eps_sequence"] = tuple(self.eps_sequence)
        if self.seeds is not None:
            changes["seeds"] = tuple(self.seeds)
        U, J = default_averaging_sets(self.params.d)
        changes["U"] = self.U.to_model() if self.U is not None else U
        changes["J"] = self.J.to_model() if self.J is not None else J
        if self.workers is not None:
            changes["workers"] = self.workers
        if self.output is not None:
            changes["output"] = self.output
        return ExperimentConfig(**changes)

    @classmethod
    def from_model(cls, model: ExperimentConfig) -> "ExperimentConfigSchema":
        return cls(
            params=ParamsSchema.from_model(model.params),
            domain=BoxSchema.from_model(model.domain),
            potential=model.potential,
            force=model.force,
            displacement=model.displacement,
            eps_sequence=list(model.eps_sequence),
            seeds=list(model.seeds),
            U=BoxSchema.from_model(model.U),
            J=BoxSchema.from_model(model.J),
            symmetric=model.symmetric,
            sampler=model.sampler,
            workers=model.workers,
            output=model.output,
            probability_override=model.probability_override,
        )


class RunRequestSchema(BaseSchema):
    """A single run of the model: a config, the grid size and the fiber seed. Without
    `eps` the coarsest grid size of the config is used."""
    config: ExperimentConfigSchema = Field(default_factory=ExperimentConfigSchema)
    eps: Optional[float] = None
    seed: int = 0


class MinimizeRequestSchema(RunRequestSchema):
    tol: float = 1e-9
    maxiter: Optional[int] = None


class LimitRequestSchema(BaseSchema):
    config: ExperimentConfigSchema = Field(default_factory=ExperimentConfigSchema)
    resolution: int = 32
    nonlocal_resolution: int = 4
    rtol: float = 1e-4


class EnergyBreakdownSchema(BaseSchema):
    """The three parts of an energy and their total e_nonlocal + e_local - work."""
    e_nonlocal: float
    e_local: float
    work: float
    total: float


class EnergyResultSchema(BaseSchema):
    eps: float
    seed: int
    nodes: int
    edges: int
    energy: EnergyBreakdownSchema


class FiberSampleSchema(BaseSchema):
    """Summary of a sampled fiber set. `edges` lists (i, j, weight) triples when
    requested."""
    eps: float
    seed: int
    nodes: int
    edge_count: int
    expected_edge_count: float
    sampler: str
    symmetric: bool
    edges: Optional[List[Tuple[int, int, float]]] = None

    @classmethod
    def from_fibers(cls, fibers: FiberSet, eps: float, expected: float,
                    include_edges: bool = False) -> "FiberSampleSchema":
        edges = None
        if include_edges:
            edges = [(int(i), int(j), float(w)) for (i, j), w in zip(fibers.edges, fibers.weights)]
        return cls(eps=eps, seed=fibers.seed if fibers.seed is not None else 0,
                   nodes=fibers.grid.size, edge_count=len(fibers), expected_edge_count=expected,
                   sampler=fibers.meta.get("sampler", ""), symmetric=fibers.symmetric,
                   edges=edges)


class SolveReportSchema(BaseSchema):
    """Outcome of a minimization, without the minimizer values."""
    eps: float
    seed: int
    energy: EnergyBreakdownSchema
    iterations: int
    gradient_norm: float
    converged: bool
    method: str
    tolerance: float

    @classmethod
    def from_report(cls, report: SolveReport, eps: float, seed: int) -> "SolveReportSchema":
        return cls(eps=eps, seed=seed, energy=EnergyBreakdownSchema.from_model(report.energy),
                   iterations=report.iterations, gradient_norm=report.gradient_norm,
                   converged=report.converged, method=report.method,
                   tolerance=report.tolerance)


def breakdown_schema(breakdown: EnergyBreakdown) -> EnergyBreakdownSchema:
    return EnergyBreakdownSchema.from_model(breakdown)
