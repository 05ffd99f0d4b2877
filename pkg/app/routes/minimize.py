import logging

from fastapi import APIRouter

from app.ops.exceptions import raise_model_exception
from app.ops.experiment_ops import minimize_run, pick_eps
from app.schemas import MinimizeRequestSchema, SolveReportSchema


logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/v1",
    tags=["minimize"],
    responses={404: {"description": "Not found"}})


@router.post("/minimize", response_model=SolveReportSchema)
def minimize(
    request: MinimizeRequestSchema
) -> SolveReportSchema:
    """Minimize the discrete energy for one (eps, seed) under the force preset.

    Returns:
        SolveReportSchema: energy and convergence data of the minimizer. A solver that
            fails to converge answers 400.
    """
    try:
        cfg = request.config.to_model()
        report = minimize_run(cfg, request.eps, request.seed, request.tol, request.maxiter)
        return SolveReportSchema.from_report(report, pick_eps(cfg, request.eps), request.seed)
    except Exception as e:
        raise_model_exception(e)
