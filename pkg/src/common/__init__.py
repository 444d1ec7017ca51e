"""Common utilities for dpne."""

from .config import dump_config, load_config, load_sections
from .errors import (
    ConfigError,
    CorpusFormatError,
    DpneError,
    InvariantViolation,
    SamplingBudgetExceeded,
    SearchSpaceTooLarge,
)
from .logger import configure_run_logging, get_logger, reset_handlers, setup_logger

__all__ = [
    "ConfigError",
    "CorpusFormatError",
    "DpneError",
    "InvariantViolation",
    "SamplingBudgetExceeded",
    "SearchSpaceTooLarge",
    "configure_run_logging",
    "dump_config",
    "get_logger",
    "load_config",
    "load_sections",
    "reset_handlers",
    "setup_logger",
]
