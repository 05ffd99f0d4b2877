import os
import json
import logging
from typing import Any, Dict, Optional

import numpy as np

from lattice_model.experiments import ExperimentConfig
from app.schemas import ExperimentConfigSchema


logger = logging.getLogger(__name__)


def load_config(path: Optional[str] = None) -> ExperimentConfig:
    """Read an experiment config from a JSON file; without a path the defaults are used.
    Fields missing from the file take their default values."""
    if not path:
        logger.debug("No config file given, using defaults")
        return ExperimentConfigSchema().to_model()
    with open(path, "r") as file:
        raw = json.load(file)
    logger.info(f"Loaded config from {path}")
    return ExperimentConfigSchema.model_validate(raw).to_model()


def _jsonable(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    if isinstance(value, np.ndarray):
        return value.tolist()
    raise TypeError(f"Object of type {type(value).__name__} is not JSON serializable")


def write_json(payload: Dict[str, Any], path: str) -> str:
    os.makedirs(os.path.dirname(os.path.abspath(path)), exist_ok=True)
    with open(path, "w") as file:
        json.dump(payload, file, indent=2, sort_keys=True, default=_jsonable)
        file.write("\n")
    return path
