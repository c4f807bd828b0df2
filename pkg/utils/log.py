"""
Logging setup for the command line and experiments.
"""
import logging
from typing import Optional

from config.settings import settings

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def configure_logging(level: Optional[str] = None) -> logging.Logger:
    """
    Install one stream handler on the root logger.

    Args:
        level: Level name; defaults to settings.LOG_LEVEL

    Returns:
        The root logger
    """
    level_name = (level or settings.LOG_LEVEL).upper()
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)

    handler = logging.StreamHandler()
    handler.setFormatter(logging.Formatter(LOG_FORMAT, datefmt="%H:%M:%S"))
    root.addHandler(handler)
    root.setLevel(getattr(logging, level_name, logging.INFO))
    return root
