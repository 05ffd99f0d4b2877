import os
import logging
import logging.config

from dotenv import load_dotenv


load_dotenv(".env")

LOGGING_CONF = os.path.join(os.path.dirname(os.path.dirname(__file__)), "config", "logging.conf")
PACKAGE_LOGGERS = ("lattice_model", "app")


def setup_logging(level: str = None) -> str:
    """Load `app/config/logging.conf` and apply LOG_LEVEL (or `level`) to the package
    loggers. All handlers write to stderr. Returns the applied level name."""
    level = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    logging.config.fileConfig(LOGGING_CONF, disable_existing_loggers=False)
    for name in PACKAGE_LOGGERS:
        logging.getLogger(name).setLevel(level)
    return level


logger = logging.getLogger("app")
