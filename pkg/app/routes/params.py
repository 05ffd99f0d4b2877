import logging

from fastapi import APIRouter

from app.ops.exceptions import raise_invalid_parameters_exception
from app.schemas import ParamsSchema, ValidationSchema
from lattice_model.core import InvalidParameters, validate_params


logger = logging.getLogger(__name__)

router = APIRouter(
    prefix="/v1/params",
    tags=["params"],
    responses={404: {"description": "Not found"}})


@router.post("/validate", response_model=ValidationSchema)
def validate(
    params: ParamsSchema
) -> ValidationSchema:
    """Validate a parameter record.

    Returns:
        ValidationSchema: the derived exponents of valid parameters. Invalid parameters
            answer 422 with every violated condition.
    """
    try:
        model = validate_params(params.to_model())
    except InvalidParameters as e:
        logger.info(f"Rejected parameters: {e.names}")
        raise_invalid_parameters_exception(e)
    return ValidationSchema.build([], model)
