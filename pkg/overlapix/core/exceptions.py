"""Error hierarchy shared by the library and the command line.

Every error carries the process exit code the CLI reports for it.
"""

from typing import Any, Dict, Optional


class OverlapixError(Exception):
    """Base class for all library errors."""

    exit_code: int = 1

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(message)


class ContractViolation(OverlapixError, ValueError):
    """An input broke the documented contract of an operation."""

    exit_code = 2


class PreconditionError(ContractViolation):
    """An operation was called outside its precondition."""


class ValidationError(ContractViolation):
    """A user-supplied object (descriptor, generators, weights) is invalid."""


class CapacityError(OverlapixError):
    """The request exceeds the desk-scale capacity of the exhaustive algorithms."""

    exit_code = 3


class QuadratureError(OverlapixError):
    """Quadrature failed to converge or the grid truncates too much mass."""

    exit_code = 5


class BudgetOverflowError(OverlapixError):
    """The sample budget exceeds the configured maximum."""

    exit_code = 4

    def __init__(self, n_samples: int, limit: int, epsilon: float):
        super().__init__(
            f"Sample budget {n_samples} exceeds limit {limit}; retry with epsilon larger than {epsilon:g}",
            {"n_samples": n_samples, "limit": limit, "epsilon": epsilon},
        )
        self.n_samples = n_samples
        self.limit = limit
