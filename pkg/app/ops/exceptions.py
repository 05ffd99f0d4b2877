from fastapi import HTTPException, status

from lattice_model.core import InvalidParameters, LatticeModelError


def raise_invalid_parameters_exception(exc: InvalidParameters):
    """Raises an HTTPException 422 listing every violated condition."""
    raise HTTPException(
        status_code=status.HTTP_422_UNPROCESSABLE_ENTITY,
        detail=[{"name": v.name, "inequality": v.inequality, "detail": v.detail}
                for v in exc.violations])


def raise_model_exception(exc: Exception):
    """Translate a library error into an HTTPException: 422 for invalid parameters, 400
    for every other model error (and for malformed boxes)."""
    if isinstance(exc, InvalidParameters):
        raise_invalid_parameters_exception(exc)
    if isinstance(exc, (LatticeModelError, ValueError)):
        raise HTTPException(
            status_code=status.HTTP_400_BAD_REQUEST,
            detail=f"{type(exc).__name__}: {exc}")
    raise exc
