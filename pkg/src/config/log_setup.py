"""Loguru sink setup."""

import sys

from loguru import logger

from .settings import settings


def configure_logging(level: str | None = None) -> None:
    """Replace the default loguru sink with one driven by the logging settings.

    Args:
        level: Overrides ``settings.log.level`` when given (used by the CLI ``--log-level`` flag)
    """
    logger.remove()
    logger.add(
        sys.stderr,
        level=(level or settings.log.level).upper(),
        serialize=settings.log.json_output,
        backtrace=settings.app.debug,
        diagnose=settings.app.debug,
    )
