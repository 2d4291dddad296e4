"""Exception hierarchy shared across the package.

Every error raised on purpose derives from :class:`PrivQuantError`, so
callers (and the CLI exit-code mapping) can distinguish our failures from
genuine bugs.
"""

from __future__ import annotations


class PrivQuantError(Exception):
    """Base class for all errors raised by privquant."""


class ContractViolation(PrivQuantError, ValueError):
    """A documented precondition was broken by the caller."""


class ConfigurationError(PrivQuantError, ValueError):
    """A run was configured inconsistently (bad lambda, missing values, ...)."""


class SizeLimitError(PrivQuantError):
    """An input exceeds a hard size cap (exhaustive search guards)."""


class InfeasibleError(PrivQuantError):
    """No solution satisfies the requested constraint.

    ``max_achievable`` carries the best attainable value of the constrained
    quantity, so callers can report how far off the request was.
    """

    def __init__(self, message: str, max_achievable: float | None = None):
        super().__init__(message)
        self.max_achievable = max_achievable


class IngestError(PrivQuantError):
    """CSV loading failed. ``row`` is the 1-based offending row if known."""

    def __init__(self, message: str, row: int | None = None):
        super().__init__(message)
        self.row = row
