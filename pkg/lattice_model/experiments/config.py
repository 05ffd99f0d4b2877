import os
import logging
from dataclasses import dataclass, field, replace
from typing import List, Optional, Tuple

from dotenv import load_dotenv

from lattice_model.core.exceptions import ConditionViolated, InvalidParameters
from lattice_model.core.grid import Box
from lattice_model.core.params import ModelParams, check_params
from lattice_model.components.fibers import SAMPLERS
from lattice_model.potentials import POTENTIAL_REPO
from lattice_model.experiments.presets import DISPLACEMENT_PRESETS, FORCE_PRESETS

load_dotenv(".env")
logger = logging.getLogger(__name__)

DEFAULT_EPS_SEQUENCE = (1 / 8, 1 / 16, 1 / 32, 1 / 64)
DEFAULT_SEEDS = tuple(range(32))
# cell-aligned for every eps = 2^-k with k <= 7: U_eps and J_eps cover U and J exactly
DEFAULT_U = Box((1 / 128, 1 / 128), (65 / 128, 65 / 128))
DEFAULT_J = Box((65 / 128, 1 / 128), (113 / 128, 65 / 128))


def default_averaging_sets(d: int) -> Tuple[Box, Box]:
    """U and J of the default study in d dimensions: the two-dimensional boxes extended
    by the range of their second axis."""
    extra = max(d - 2, 0)
    U = Box(DEFAULT_U.lower + DEFAULT_U.lower[1:] * extra,
            DEFAULT_U.upper + DEFAULT_U.upper[1:] * extra)
    J = Box(DEFAULT_J.lower + DEFAULT_J.lower[1:] * extra,
            DEFAULT_J.upper + DEFAULT_J.upper[1:] * extra)
    return U, J


def default_params() -> ModelParams:
    return ModelParams(d=2, s=0.5, p=2.0, ell=0.0, alpha=0.0, c=1.0, C_tilde=0.5,
                       eps=DEFAULT_EPS_SEQUENCE[0])


def default_workers() -> int:
    return int(os.getenv("LATTICE_WORKERS") or 1)


def default_output() -> str:
    return os.getenv("LATTICE_OUTPUT_DIR") or "./artifacts"


@dataclass(frozen=True)
class ExperimentConfig:
    """One experiment: model parameters, domain, presets, the eps sweep and seeds.

    `params.eps` is ignored; each run uses `params.with_eps(eps)` for eps in
    `eps_sequence`. U and J are the averaging sets of the coefficient study.
    """
    params: ModelParams = field(default_factory=default_params)
    domain: Box = field(default_factory=lambda: Box.unit(2))
    potential: str = "projection"
    force: str = "sine"
    displacement: str = "sine-bump"
    eps_sequence: Tuple[float, ...] = DEFAULT_EPS_SEQUENCE
    seeds: Tuple[int, ...] = DEFAULT_SEEDS
    U: Box = DEFAULT_U
    J: Box = DEFAULT_J
    symmetric: bool = False
    sampler: str = "shells"
    workers: int = field(default_factory=default_workers)
    output: str = field(default_factory=default_output)
    probability_override: Optional[float] = None

    def params_at(self, eps: float) -> ModelParams:
        return self.params.with_eps(eps)

    def with_changes(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def check(self) -> List[ConditionViolated]:
        """Every violated condition of the config, including those of the parameters at
        each eps of the sweep."""
        violations = []
        eps = list(self.eps_sequence)
        if not eps:
            violations.append(ConditionViolated("eps_sequence", "at least one grid size"))
        elif any(b >= a for a, b in zip(eps, eps[1:])):
            violations.append(ConditionViolated("eps_sequence", "strictly decreasing",
                                                f"eps_sequence={eps}"))
        if not self.seeds:
            violations.append(ConditionViolated("seeds", "at least one seed"))
        if self.domain.dim != self.params.d:
            violations.append(ConditionViolated(
                "domain", "domain dimension equals d", f"{self.domain.dim} != {self.params.d}"))
        for name, box in (("U", self.U), ("J", self.J)):
            if box.dim != self.domain.dim or not self.domain.contains_box(box):
                violations.append(ConditionViolated("averaging_sets", f"{name} is a subset of Q",
                                                    f"{name}={box.lower}x{box.upper}"))
        if self.potential not in POTENTIAL_REPO:
            violations.append(ConditionViolated("potential", f"one of {sorted(POTENTIAL_REPO)}",
                                                self.potential))
        if self.force not in FORCE_PRESETS:
            violations.append(ConditionViolated("force", f"one of {sorted(FORCE_PRESETS)}",
                                                self.force))
        if self.displacement not in DISPLACEMENT_PRESETS:
            violations.append(ConditionViolated(
                "displacement", f"one of {sorted(DISPLACEMENT_PRESETS)}", self.displacement))
        if self.sampler not in SAMPLERS:
            violations.append(ConditionViolated("sampler", f"one of {sorted(SAMPLERS)}",
                                                self.sampler))
        if self.workers < 1:
            violations.append(ConditionViolated("workers", "workers >= 1",
                                                f"workers={self.workers}"))
        if self.probability_override is not None and not 0 <= self.probability_override <= 1:
            violations.append(ConditionViolated("probability_bound", "override lies in [0, 1]",
                                                f"{self.probability_override}"))
        max_offset = self.domain.diameter / min(eps) if eps else None
        seen = set()
        for value in eps:
            for violation in check_params(self.params_at(value), max_offset=max_offset):
                if str(violation) not in seen:
                    violations.append(violation)
                    seen.add(str(violation))
        return violations

    def validate(self) -> "ExperimentConfig":
        """Raises:
            InvalidParameters: listing every violated condition.
        """
        violations = self.check()
        if violations:
            raise InvalidParameters(violations)
        logger.debug(f"Validated experiment config with {len(self.eps_sequence)} grid sizes "
                     f"and {len(self.seeds)} seeds")
        return self
