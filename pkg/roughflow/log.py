"""Logger helpers for the ``roughflow`` namespace."""

import logging
import sys
from typing import Optional

from roughflow import settings

ROOT_LOGGER = "roughflow"


def get_logger(name: str) -> logging.Logger:
    """Return a logger below the package namespace."""
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")


def configure(level: Optional[str] = None) -> logging.Logger:
    """
    Attach a stderr handler to the package logger.

    Only entry points call this; library modules just emit records.

    Args:
        level: Level name; defaults to ``ROUGHFLOW_LOG_LEVEL``

    Returns:
        The configured package logger
    """
    logger = logging.getLogger(ROOT_LOGGER)
    logger.setLevel((level or settings.LOG_LEVEL).upper())
    if not any(getattr(h, "_roughflow", False) for h in logger.handlers):
        handler = logging.StreamHandler(sys.stderr)
        handler.setFormatter(logging.Formatter(settings.LOG_FORMAT, settings.LOG_DATE_FORMAT))
        handler._roughflow = True
        logger.addHandler(handler)
    return logger
