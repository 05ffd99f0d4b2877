import logging

from fastapi import APIRouter

from app.ops.exceptions import raise_model_exception
from app.ops.experiment_ops import energy_run, limit_run, pick_eps
from app.schemas import (
    EnergyBreakdownSchema,
    EnergyResultSchema,
    LimitRequestSchema,
    RunRequestSchema,
    breakdown_schema,
)


logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/v1",
    tags=["energy"],
    responses={404: {"description": "Not found"}})


@router.post("/energy", response_model=EnergyResultSchema)
def energy(
    request: RunRequestSchema
) -> EnergyResultSchema:
    """Discrete energy of the restricted displacement preset for one (eps, seed)."""
    try:
        cfg = request.config.to_model()
        breakdown, fibers = energy_run(cfg, request.eps, request.seed)
        return EnergyResultSchema(eps=pick_eps(cfg, request.eps), seed=request.seed,
                                  nodes=fibers.grid.size, edges=len(fibers),
                                  energy=breakdown_schema(breakdown))
    except Exception as e:
        raise_model_exception(e)


@router.post("/limit-energy", response_model=EnergyBreakdownSchema)
def limit_energy(
    request: LimitRequestSchema
) -> EnergyBreakdownSchema:
    """Limit functional at the displacement preset."""
    try:
        breakdown = limit_run(request.config.to_model(), request.resolution,
                              request.nonlocal_resolution, request.rtol)
        return breakdown_schema(breakdown)
    except Exception as e:
        raise_model_exception(e)
