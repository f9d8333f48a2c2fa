"""Exception types shared across the package.

Two families matter to callers. ``UsageError`` covers bad parameters or
parameter combinations and maps to CLI exit code 1; ``DataError`` covers
defective input content and maps to exit code 2. Every instance carries a
stable machine-readable ``code`` so foreign callers can dispatch on it
without parsing prose.
"""

from __future__ import annotations

__all__ = ["TmfieldError", "UsageError", "DataError"]


class TmfieldError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 2

    def __init__(self, message: str, *, code: str):
        super().__init__(message)
        self.code = code


class UsageError(TmfieldError):
    """Invalid parameter or parameter combination."""

    exit_code = 1


class DataError(TmfieldError):
    """Input data is missing, malformed, or out of domain."""

    exit_code = 2
