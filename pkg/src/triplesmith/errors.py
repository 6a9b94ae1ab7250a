"""Shared exception types."""


class MalformedInputError(ValueError):
    """Input bytes/string do not parse as the expected canonical form."""


class DomainError(ValueError):
    """Argument is outside the mathematical domain of the operation."""


class DegenerateInputError(ValueError):
    """Input is valid but too small/trivial for the operation; caller should resample."""


class NotApplicableError(Exception):
    """The attack cannot produce a usable mutation for this input; caller should resample."""


class RetryExhaustedError(RuntimeError):
    """Resampling retries ran out without finding an applicable input."""
