"""
Component loggers for sfvem.

Thin layer over loguru: every module asks for a logger bound to its component
name and logs structured fields as keyword arguments, e.g.

    logger = get_component_logger("sfvem.assembly")
    logger.info("Assembled pair", ndof=1234, nnz=56789)

Sinks are configured once from the environment:

    LOG_LEVEL      minimum level (default INFO)
    LOG_FORMAT     "text" (default) or "json"
    LOG_CONSOLE    "true" (default) to log to stderr
    LOG_FILE_PATH  optional file sink
    LOG_ROTATION   file rotation (default "10 MB")
    LOG_RETENTION  file retention (default "7 days")
"""

import os
import sys
from typing import Any

from loguru import logger

TEXT_FORMAT = (
    "<green>{time:YYYY-MM-DD HH:mm:ss.SSS}</green> | <level>{level: <8}</level> | "
    "<cyan>{extra[component]}</cyan> | {message} | {extra}"
)

_configured = False


def configure_logger(
    level: str | None = None,
    fmt: str | None = None,
    console: bool | None = None,
    file_path: str | None = None,
) -> None:
    """
    (Re)configure loguru sinks.

    Args:
        level: Minimum log level, defaults to LOG_LEVEL
        fmt: "text" or "json", defaults to LOG_FORMAT
        console: Log to stderr, defaults to LOG_CONSOLE
        file_path: Optional log file, defaults to LOG_FILE_PATH
    """
    global _configured

    level = (level or os.getenv("LOG_LEVEL", "INFO")).upper()
    fmt = (fmt or os.getenv("LOG_FORMAT", "text")).lower()
    if console is None:
        console = os.getenv("LOG_CONSOLE", "true").lower() == "true"
    file_path = file_path or os.getenv("LOG_FILE_PATH") or None
    serialize = fmt == "json"

    logger.remove()
    logger.configure(extra={"component": "sfvem"})
    if console:
        logger.add(sys.stderr, level=level, format=TEXT_FORMAT, serialize=serialize)
    if file_path:
        logger.add(
            file_path,
            level=level,
            format=TEXT_FORMAT,
            serialize=serialize,
            rotation=os.getenv("LOG_ROTATION", "10 MB"),
            retention=os.getenv("LOG_RETENTION", "7 days"),
            enqueue=True,
        )
    _configured = True


def get_component_logger(component: str) -> Any:
    """
    Return a logger bound to a component name.

    Args:
        component: Dotted component name, e.g. "sfvem.mesh"

    Returns:
        loguru logger with ``component`` in its extra fields
    """
    if not _configured:
        configure_logger()
    return logger.bind(component=component)
