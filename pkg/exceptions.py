"""
Custom exception classes for the LQ Stackelberg Solver.
Provides structured error handling with detailed error information.
"""

from typing import Optional, Dict, Any, Tuple

# Process exit codes shared by the CLI and the error handlers
EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_NOT_SOLVABLE = 2
EXIT_INPUT_ERROR = 3

# Names of the stage matrices whose invertibility decides solvability
MATRIX_M = "M"
MATRIX_F = "F"
MATRIX_GAP = "I-(C~'-B~F^-1D')T"


class StackelbergError(Exception):
    """Base exception class for all solver errors."""

    def __init__(
        self,
        message: str,
        error_code: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None,
        exit_code: int = EXIT_INPUT_ERROR
    ):
        """
        Initialize the base exception.

        Args:
            message: Human-readable error message
            error_code: Machine-readable error code
            details: Additional error details
            exit_code: Process exit code for the CLI
        """
        super().__init__(message)
        self.message = message
        self.error_code = error_code or self.__class__.__name__
        self.details = details or {}
        self.exit_code = exit_code

    def to_dict(self) -> Dict[str, Any]:
        """Convert exception to dictionary for a JSON report."""
        return {
            "error": self.error_code,
            "message": self.message,
            "details": self.details
        }


class InputError(StackelbergError):
    """Exception raised for unreadable, malformed or out-of-range input."""

    def __init__(
        self,
        message: str,
        field: Optional[str] = None,
        value: Optional[Any] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        input_details = details or {}
        if field:
            input_details["field"] = field
        if value is not None:
            input_details["invalid_value"] = str(value)

        super().__init__(
            message=message,
            error_code="INPUT_ERROR",
            details=input_details,
            exit_code=EXIT_INPUT_ERROR
        )


class DimensionError(StackelbergError):
    """Exception raised when matrix or sequence shapes do not conform."""

    def __init__(
        self,
        message: str,
        operation: Optional[str] = None,
        expected: Optional[Tuple[int, ...]] = None,
        actual: Optional[Tuple[int, ...]] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        shape_details = details or {}
        if operation:
            shape_details["operation"] = operation
        if expected is not None:
            shape_details["expected"] = list(expected)
        if actual is not None:
            shape_details["actual"] = list(actual)

        super().__init__(
            message=message,
            error_code="DIMENSION_MISMATCH",
            details=shape_details,
            exit_code=EXIT_INPUT_ERROR
        )


class SingularMatrixError(StackelbergError):
    """Exception raised when a pivoted factorization meets a negligible pivot."""

    def __init__(
        self,
        message: str,
        matrix: Optional[str] = None,
        pivot: Optional[float] = None,
        threshold: Optional[float] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        singular_details = details or {}
        if matrix:
            singular_details["matrix"] = matrix
        if pivot is not None:
            singular_details["pivot"] = pivot
        if threshold is not None:
            singular_details["threshold"] = threshold

        super().__init__(
            message=message,
            error_code="SINGULAR_MATRIX",
            details=singular_details,
            exit_code=EXIT_NOT_SOLVABLE
        )


class NotSolvableError(StackelbergError):
    """Exception raised when a stage matrix fails its solvability condition."""

    def __init__(
        self,
        stage: int,
        matrix: str,
        reason: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        message = f"Not solvable at stage {stage}: matrix {matrix} {reason or 'is not invertible'}"
        solvable_details = {"stage": stage, "matrix": matrix}
        if details:
            solvable_details.update(details)

        super().__init__(
            message=message,
            error_code="NOT_SOLVABLE",
            details=solvable_details,
            exit_code=EXIT_NOT_SOLVABLE
        )
        self.stage = stage
        self.matrix = matrix


class NotUniqueError(StackelbergError):
    """Exception raised when an optimization problem has no unique minimizer."""

    def __init__(
        self,
        message: str,
        min_pivot: Optional[float] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        unique_details = details or {}
        if min_pivot is not None:
            unique_details["min_pivot"] = min_pivot

        super().__init__(
            message=message,
            error_code="NOT_UNIQUE",
            details=unique_details,
            exit_code=EXIT_NOT_SOLVABLE
        )


class ConfigurationError(StackelbergError):
    """Exception raised for configuration-related errors."""

    def __init__(
        self,
        message: str,
        config_key: Optional[str] = None,
        details: Optional[Dict[str, Any]] = None
    ):
        config_details = details or {}
        if config_key:
            config_details["config_key"] = config_key

        super().__init__(
            message=message,
            error_code="CONFIGURATION_ERROR",
            details=config_details,
            exit_code=EXIT_INPUT_ERROR
        )


# Convenience functions for common error scenarios
def missing_field(field: str, source: Optional[str] = None) -> InputError:
    """Create an InputError for a required spec field that is absent."""
    where = f" in {source}" if source else ""
    return InputError(f"Missing field '{field}'{where}", field=field)


def non_finite_entry(field: str) -> InputError:
    """Create an InputError for a NaN or infinite matrix entry."""
    return InputError(f"Field '{field}' contains NaN or infinite entries", field=field)


def singular_stage_matrix(stage: int, matrix: str, pivot: float, threshold: float) -> NotSolvableError:
    """Create a NotSolvableError carrying the offending pivot."""
    return NotSolvableError(
        stage=stage,
        matrix=matrix,
        details={"pivot": pivot, "threshold": threshold}
    )
