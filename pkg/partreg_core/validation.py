"""
Input validation and error types for partreg-core.

Provides the search limits that keep exhaustive searches bounded and the
exception hierarchy shared by every module. Contract and input problems derive
from ValidationError; finite-window starvation is reported separately through
Inconclusive so callers can tell "wrong input" from "window too small".
"""

from dataclasses import dataclass
from typing import Optional


@dataclass
class SearchLimits:
    """
    Limits for exhaustive searches to prevent runaway computations.

    Attributes:
        max_columns: Largest column count accepted by the columns-property search
        max_colouring_space: Largest r^N explored by bad-colouring search
        max_variables: Largest variable count accepted by monochromatic search
        max_search_nodes: Node budget of a single backtracking run
    """

    max_columns: int = 20
    max_colouring_space: int = 2**28
    max_variables: int = 64
    max_search_nodes: int = 5_000_000

    @classmethod
    def strict(cls) -> "SearchLimits":
        """Create strict limits for untrusted input."""
        return cls(
            max_columns=12,
            max_colouring_space=2**20,
            max_variables=32,
            max_search_nodes=500_000,
        )

    @classmethod
    def relaxed(cls) -> "SearchLimits":
        """Create relaxed limits for long offline runs."""
        return cls(
            max_columns=26,
            max_colouring_space=2**34,
            max_variables=256,
            max_search_nodes=200_000_000,
        )

    def to_dict(self) -> dict:
        """Serialize to dictionary."""
        return {
            "max_columns": self.max_columns,
            "max_colouring_space": self.max_colouring_space,
            "max_variables": self.max_variables,
            "max_search_nodes": self.max_search_nodes,
        }


class ValidationError(Exception):
    """Base exception for input and contract errors."""

    pass


class DimensionMismatchError(ValidationError):
    """Raised when vectors or matrices have incompatible shapes."""

    pass


class ContractViolation(ValidationError):
    """Raised when an operation's precondition does not hold."""

    pass


class InvariantViolation(ValidationError):
    """Raised when a value would break a type invariant (e.g. a zero in an Assignment)."""

    pass


class SystemSyntaxError(ValidationError):
    """Raised when equation text does not follow the system grammar."""

    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class LimitExceeded(ValidationError):
    """Raised when a search would exceed a configured cap."""

    pass


class Inconclusive(Exception):
    """
    Raised when a finite window is too small to settle a question.

    Attributes:
        stage: The pipeline step that starved (e.g. "stabilize_symmetric")
    """

    def __init__(self, message: str, stage: str = "window"):
        super().__init__(message)
        self.stage = stage


class WindowTooSmall(Inconclusive):
    """Raised when a certified region becomes empty."""

    def __init__(self, message: str, stage: str = "sumset"):
        super().__init__(f"{message}; enlarge the window", stage=stage)


class InternalError(Exception):
    """Raised on states the underlying arguments rule out (indicates window artifacts)."""

    pass


def check_positive(value: int, name: str) -> None:
    """
    Check that an integer parameter is at least 1.

    Raises:
        ContractViolation: If value < 1
    """
    if value < 1:
        raise ContractViolation(f"{name} must be >= 1, got {value}")


def check_variable_count(count: int, limits: Optional[SearchLimits] = None) -> None:
    """
    Check a system's variable count against the search cap.

    Raises:
        LimitExceeded: If count exceeds limits.max_variables
    """
    limits = limits or SearchLimits()
    if count > limits.max_variables:
        raise LimitExceeded(
            f"System has {count} variables; the search cap is {limits.max_variables}"
        )


def check_colouring_space(r: int, n: int, limits: Optional[SearchLimits] = None) -> None:
    """
    Check r^N against the bad-colouring search cap.

    Raises:
        LimitExceeded: If r**n exceeds limits.max_colouring_space
    """
    limits = limits or SearchLimits()
    if r**n > limits.max_colouring_space:
        raise LimitExceeded(
            f"Colouring space {r}^{n} exceeds the cap of {limits.max_colouring_space} "
            f"(2^{limits.max_colouring_space.bit_length() - 1})"
        )
