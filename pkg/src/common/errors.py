"""Exception types shared across dpne.

Each error carries the process exit code the CLI reports for it.
"""

from typing import Optional


class DpneError(Exception):
    """Base class for all dpne failures."""

    exit_code = 4


class ConfigError(DpneError, ValueError):
    """Invalid run configuration or configuration file."""

    exit_code = 2


class CorpusFormatError(DpneError, ValueError):
    """Malformed corpus input."""

    exit_code = 3

    def __init__(self, message: str, line_number: Optional[int] = None):
        self.line_number = line_number
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)


class SearchSpaceTooLarge(DpneError, ValueError):
    """Explicit enumeration of valid k-grams would exceed the memory guard."""

    exit_code = 2


class SamplingBudgetExceeded(DpneError, RuntimeError):
    """Rejection sampler exhausted its attempt budget."""

    exit_code = 4

    def __init__(self, accepted: int, requested: int, attempts: int):
        self.accepted = accepted
        self.requested = requested
        self.attempts = attempts
        rate = accepted / attempts if attempts else 0.0
        super().__init__(
            f"Spurious sampler gave up after {attempts} attempts "
            f"({accepted}/{requested} accepted, acceptance rate {rate:.2e}); "
            f"the valid k-gram estimate is likely too high"
        )


class InvariantViolation(DpneError, RuntimeError):
    """A mechanism invariant failed a runtime check."""

    exit_code = 4
