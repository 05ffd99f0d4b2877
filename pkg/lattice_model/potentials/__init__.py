"""Pair potentials for the long-range fibers. Currently, the following potentials are
available:

- ProjectionPotential (`"projection"`)
- CauchyPotential (`"cauchy"`)

Read more about each potential in their respective docstrings.
"""

from lattice_model.core.exceptions import UnknownPotential

from ._abstractpotential import AbstractPotential
from .projection import ProjectionPotential
from .cauchy import CauchyPotential
from .growth import check_growth, probe_convexity, GrowthReport, ConvexityReport


POTENTIAL_REPO = {
    ProjectionPotential.instance_id: ProjectionPotential,
    CauchyPotential.instance_id: CauchyPotential,
}


def get_potential(name: str) -> AbstractPotential:
    """Instantiate a potential by its config name."""
    if name not in POTENTIAL_REPO:
        raise UnknownPotential(
            f"Potential {name} not found. Available: {', '.join(POTENTIAL_REPO)}")
    return POTENTIAL_REPO[name]()


def projection_potential() -> ProjectionPotential:
    return ProjectionPotential()


def cauchy_potential() -> CauchyPotential:
    return CauchyPotential()


__all__ = [
    "AbstractPotential",
    "ProjectionPotential",
    "CauchyPotential",
    "POTENTIAL_REPO",
    "get_potential",
    "projection_potential",
    "cauchy_potential",
    "check_growth",
    "probe_convexity",
    "GrowthReport",
    "ConvexityReport",
]
