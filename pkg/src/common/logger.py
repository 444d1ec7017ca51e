"""Logging for dpne.

Library modules log through children of the ``dpne`` logger
(``dpne.histogram``, ``dpne.extraction``, ...), so configuring that one name
configures the whole package. Console output goes to stderr because stdout
carries command reports.
"""

import logging
import logging.handlers
import os
from typing import Any, Mapping, Optional

ROOT_LOGGER = "dpne"
LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")
DEFAULT_FORMAT = "%(asctime)s [%(levelname)s] [%(name)s] %(message)s"
ISO_DATE_FORMAT = "%Y-%m-%dT%H:%M:%S"


def setup_logger(
    name: str = ROOT_LOGGER,
    log_dir: str = "logs",
    level: str = "INFO",
    log_format: Optional[str] = None,
    date_format: Optional[str] = None,
    file_logging: bool = False,
    console_logging: bool = True,
    max_bytes: int = 10485760,  # 10MB
    backup_count: int = 5,
) -> logging.Logger:
    """Attach console and optional rotating file handlers to a logger.

    A logger that already has handlers only gets its level updated.

    Args:
        name: Logger name (normally the package root ``dpne``)
        log_dir: Directory for ``<name>.log``
        level: One of DEBUG, INFO, WARNING, ERROR, CRITICAL
        log_format: Record format
        date_format: Timestamp format (ISO 8601 by default)
        file_logging: Also write to ``<log_dir>/<name>.log``
        console_logging: Write to stderr
        max_bytes: Size at which the log file rotates
        backup_count: Rotated files kept

    Returns:
        Configured logger instance

    Raises:
        ValueError: If ``level`` is not a known level name
    """
    level_name = level.upper()
    if level_name not in LEVELS:
        raise ValueError(f"Invalid log level: {level}. Must be one of: {', '.join(LEVELS)}")

    logger = logging.getLogger(name)
    logger.setLevel(level_name)
    if logger.handlers:
        return logger

    formatter = logging.Formatter(
        log_format or DEFAULT_FORMAT, datefmt=date_format or ISO_DATE_FORMAT
    )
    handlers = []
    if file_logging:
        os.makedirs(log_dir, exist_ok=True)
        handlers.append(
            logging.handlers.RotatingFileHandler(
                os.path.join(log_dir, f"{name}.log"),
                maxBytes=max_bytes,
                backupCount=backup_count,
            )
        )
    if console_logging:
        handlers.append(logging.StreamHandler())

    for handler in handlers:
        handler.setFormatter(formatter)
        logger.addHandler(handler)
    return logger


def reset_handlers(name: str = ROOT_LOGGER) -> None:
    """Detach and close every handler of a logger."""
    logger = logging.getLogger(name)
    for handler in list(logger.handlers):
        logger.removeHandler(handler)
        handler.close()


def configure_run_logging(
    section: Mapping[str, Any], verbose: bool, output_dir: str
) -> logging.Logger:
    """Configure the ``dpne`` logger for one command from the ``logging`` section.

    Handlers from an earlier command in the same process are replaced, so
    the log file follows the current output directory.
    """
    reset_handlers(ROOT_LOGGER)
    level = "DEBUG" if verbose else str(section.get("level", "INFO"))
    return setup_logger(
        ROOT_LOGGER,
        log_dir=output_dir,
        level=level,
        file_logging=bool(section.get("file", False)),
    )


def get_logger(name: str) -> logging.Logger:
    """Get a logger in the package namespace.

    Args:
        name: Component name; ``"histogram"`` resolves to ``dpne.histogram``

    Returns:
        Logger instance
    """
    if name == ROOT_LOGGER or name.startswith(ROOT_LOGGER + "."):
        return logging.getLogger(name)
    return logging.getLogger(f"{ROOT_LOGGER}.{name}")
