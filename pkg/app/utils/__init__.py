from .logger_config import logger, setup_logging # noqa
from .helpers import load_config, write_json # noqa

__all__ = [
    "logger",
    "setup_logging",
    "load_config",
    "write_json",
]
