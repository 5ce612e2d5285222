"""
Logging configuration for the simulator entry points.
"""

import sys
from typing import Optional

from loguru import logger
from config.settings import settings

_CONSOLE_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss}</green> | <level>{level: <8}</level> | "
    "<cyan>{name}</cyan>:<cyan>{function}</cyan>:<cyan>{line}</cyan> | "
    "<level>{message}</level>"
)


def configure_logging(
    level: Optional[str] = None, log_file: Optional[str] = None, to_file: bool = True
) -> None:
    """Install console (stderr) and rotating file sinks."""
    level = (level or settings.logging.log_level).upper()
    log_file = log_file or settings.logging.log_file

    # Remove default handler
    logger.remove()

    # stdout carries CLI tables, so diagnostics go to stderr
    logger.add(sys.stderr, format=_CONSOLE_FORMAT, level=level, colorize=True)

    if to_file and log_file:
        settings.ensure_directories()
        logger.add(
            log_file,
            format=settings.logging.log_format,
            level=level,
            rotation=settings.logging.log_rotation,
            retention=settings.logging.log_retention,
            compression="zip",
        )

    logger.debug(f"Logging configured at level {level}")


__all__ = ["logger", "configure_logging"]
