from dataclasses import dataclass
from typing import Any, List, Optional


class LatticeModelError(Exception):
    """Base class for all errors raised by the lattice model library."""


@dataclass(frozen=True)
class ConditionViolated:
    """A single violated parameter condition. `name` identifies the condition,
    `inequality` states what must hold and `detail` shows the offending values."""
    name: str
    inequality: str
    detail: str = ""

    def __str__(self):
        if self.detail:
            return f"{self.name}: {self.inequality} ({self.detail})"
        return f"{self.name}: {self.inequality}"


class InvalidParameters(LatticeModelError):
    """Raised when a parameter record fails validation. Carries every violated
    condition, not just the first one."""

    def __init__(self, violations: List[ConditionViolated]):
        self.violations = list(violations)
        lines = "; ".join(str(v) for v in self.violations)
        super().__init__(f"Invalid model parameters: {lines}")

    @property
    def names(self) -> List[str]:
        return [v.name for v in self.violations]


class EmptyGrid(LatticeModelError):
    """No lattice point falls inside the domain."""


class GridMismatch(LatticeModelError):
    """Two objects that must live on the same grid do not."""


class SizeLimit(LatticeModelError):
    """The requested operation exceeds a configured size cap."""


class GrowthViolated(LatticeModelError):
    """A potential violates its declared growth bound at `witness` = (x, y, zeta)."""

    def __init__(self, witness, ratio: float):
        self.witness = witness
        self.ratio = ratio
        super().__init__(f"Growth bound violated (ratio {ratio:.6g}) at witness {witness}")


class NonIntegrable(LatticeModelError):
    """The singular kernel is not integrable for the given exponents."""


class NoConvergence(LatticeModelError):
    """A refinement loop did not reach its tolerance. `best` holds the last value."""

    def __init__(self, message: str, best: Optional[float] = None):
        self.best = best
        super().__init__(message)


class IterativeSolveError(LatticeModelError):
    """Base class for solver failures. `best` is the best iterate found so far (a
    SolveReport)."""

    def __init__(self, message: str, best: Any = None):
        self.best = best
        super().__init__(message)


class MaxIterations(IterativeSolveError):
    """The iteration cap was reached before the stopping rule was met."""


class LineSearchStalled(IterativeSolveError):
    """Backtracking could not find a step that decreases the energy."""


class NonFiniteEnergy(IterativeSolveError):
    """The energy evaluated to NaN or infinity."""


class UnknownPotential(LatticeModelError, ValueError):
    """No potential is registered under the requested name."""


class UnknownPreset(LatticeModelError, ValueError):
    """No preset is registered under the requested name."""
