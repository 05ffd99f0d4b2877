import logging

from fastapi import APIRouter

from app.ops.exceptions import raise_model_exception
from app.ops.experiment_ops import pick_eps, sample_run
from app.schemas import FiberSampleSchema, RunRequestSchema


logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/v1/fibers",
    tags=["fibers"],
    responses={404: {"description": "Not found"}})


@router.post("/sample", response_model=FiberSampleSchema)
def sample(
    request: RunRequestSchema,
    include_edges: bool = False
) -> FiberSampleSchema:
    """Sample the fibers of one run. Set `include_edges` to list every (i, j, weight)."""
    try:
        cfg = request.config.to_model()
        fibers, expected = sample_run(cfg, request.eps, request.seed)
        return FiberSampleSchema.from_fibers(fibers, pick_eps(cfg, request.eps), expected,
                                             include_edges)
    except Exception as e:
        raise_model_exception(e)
