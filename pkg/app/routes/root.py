import logging

from fastapi import APIRouter
from fastapi.requests import Request

from lattice_model.components.fibers import SAMPLERS
from lattice_model.experiments import DISPLACEMENT_PRESETS, FORCE_PRESETS, STUDIES
from lattice_model.potentials import POTENTIAL_REPO


logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/v1",
    tags=["root"],
    responses={404: {"description": "Not found"}})


@router.get("/")
def root(
    request: Request
) -> dict:
    """Names accepted in experiment configs."""
    return {
        "message": "Fiber lattice lab",
        "potentials": sorted(POTENTIAL_REPO),
        "samplers": sorted(SAMPLERS),
        "forces": sorted(FORCE_PRESETS),
        "displacements": sorted(DISPLACEMENT_PRESETS),
        "studies": sorted(STUDIES),
    }
