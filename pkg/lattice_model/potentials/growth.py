import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from lattice_model.core.exceptions import GrowthViolated
from lattice_model.potentials._abstractpotential import AbstractPotential

logger = logging.getLogger(__name__)


@dataclass
class GrowthReport:
    """Outcome of a randomized growth probe."""
    probes: int
    max_ratio: float
    min_value: float
    uniform_constant: float = 0.0


@dataclass
class ConvexityReport:
    """Outcome of a randomized midpoint-convexity probe. `witnesses` holds
    (x, y, zeta_1, zeta_2, gap) tuples where the midpoint inequality failed."""
    probes: int
    failures: int
    worst_gap: float
    witnesses: List[Tuple] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.failures == 0


def _probe_points(rng: np.random.Generator, budget: int, d: int, box_size: float,
                  zeta_radius: float):
    x = rng.uniform(0.0, box_size, size=(budget, d))
    y = rng.uniform(0.0, box_size, size=(budget, d))
    direction = rng.normal(size=(budget, d))
    direction /= np.linalg.norm(direction, axis=1, keepdims=True)
    radius = zeta_radius * rng.uniform(0.0, 1.0, size=(budget, 1)) ** (1.0 / d)
    return x, y, direction * radius


def check_growth(pot: AbstractPotential, budget: int = 10_000, d: int = 2,
                 seed: int = 0, box_size: float = 1.0, zeta_radius: float = 10.0,
                 rtol: float = 1e-12) -> GrowthReport:
    """Probe 0 <= V(x, y, zeta) <= c_xy |zeta|^p at random (x, y, zeta).

    Args:
        - pot (AbstractPotential): potential to probe.
        - budget (int): number of random probes.
        - d (int): spatial dimension of the probes.
        - seed (int): RNG seed.
        - box_size (float): x and y are drawn from [0, box_size]^d.
        - zeta_radius (float): zeta is drawn uniformly from the ball of this radius.

    Returns:
        GrowthReport: with the maximal observed ratio V / (c_xy |zeta|^p)
            and the uniform constant over the probe box.

    Raises:
        GrowthViolated: with the first witness (x, y, zeta) of a violation, or of a pair
            whose constant exceeds the uniform one.
    """
    rng = np.random.default_rng(seed)
    x, y, zeta = _probe_points(rng, budget, d, box_size, zeta_radius)
    values = pot.evaluate(x, y, zeta)
    pairwise = pot.growth_constant(x, y)
    uniform = pot.uniform_growth_constant(box_size * np.sqrt(d))
    above = pairwise > uniform * (1.0 + rtol)
    if np.any(above):
        k = int(np.argmax(above))
        raise GrowthViolated((x[k], y[k], zeta[k]), float(pairwise[k] / uniform))
    bound = pairwise * np.linalg.norm(zeta, axis=1) ** pot.growth_exponent
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(bound > 0, values / bound, np.where(values > 0, np.inf, 0.0))
    bad = (values < 0) | (ratio > 1.0 + rtol)
    if np.any(bad):
        k = int(np.argmax(bad))
        raise GrowthViolated((x[k], y[k], zeta[k]), float(ratio[k]))
    report = GrowthReport(probes=budget, max_ratio=float(np.max(ratio, initial=0.0)),
                          min_value=float(np.min(values, initial=0.0)),
                          uniform_constant=uniform)
    logger.debug(f"Growth probe of {pot}: max ratio {report.max_ratio:.6g}")
    return report


def probe_convexity(pot: AbstractPotential, budget: int = 10_000, d: int = 2,
                    seed: int = 0, box_size: float = 1.0, zeta_radius: float = 10.0,
                    max_witnesses: int = 5, atol: Optional[float] = None) -> ConvexityReport:
    """Probe V(x, y, (z1 + z2)/2) <= (V(x, y, z1) + V(x, y, z2))/2 along random segments.
    Failures are logged with witnesses and returned, never raised."""
    rng = np.random.default_rng(seed)
    x, y, z1 = _probe_points(rng, budget, d, box_size, zeta_radius)
    _, _, z2 = _probe_points(rng, budget, d, box_size, zeta_radius)
    mid = pot.evaluate(x, y, 0.5 * (z1 + z2))
    chord = 0.5 * (pot.evaluate(x, y, z1) + pot.evaluate(x, y, z2))
    gap = mid - chord
    tol = atol if atol is not None else 1e-12 * (1.0 + np.abs(chord))
    failed = np.flatnonzero(gap > tol)
    witnesses = [(x[k], y[k], z1[k], z2[k], float(gap[k])) for k in failed[:max_witnesses]]
    report = ConvexityReport(probes=budget, failures=int(failed.size),
                             worst_gap=float(np.max(gap, initial=0.0)), witnesses=witnesses)
    if not report.passed:
        logger.warning(
            f"{pot} failed the midpoint convexity probe {report.failures}/{budget} times; "
            f"worst gap {report.worst_gap:.6g}, first witness {witnesses[0]}")
    return report
