"""
Exception handlers for the LQ Stackelberg Solver CLI.
Turns every expected failure into a RunReport with a consistent status and exit code.
"""

import logging
from typing import Any, Dict, Optional

from pydantic import ValidationError as PydanticValidationError

import config
from exceptions import (
    InputError,
    NotSolvableError,
    NotUniqueError,
    SingularMatrixError,
    StackelbergError
)
from models.report import NotSolvableInfo, RunReport, RunStatus

logger = logging.getLogger(__name__)


def not_solvable_report(command: str, exc: NotSolvableError, spec_digest: Optional[str]) -> RunReport:
    """
    Handle NotSolvableError.

    Args:
        command: CLI command name
        exc: NotSolvableError carrying the stage and matrix name
        spec_digest: Digest of the spec file, if it was read

    Returns:
        RunReport with status NotSolvable and the exact stage and matrix
    """
    logger.warning(
        f"Not solvable: stage {exc.stage}, matrix {exc.matrix}",
        extra={"error_code": exc.error_code, "details": exc.details, "command": command}
    )
    return RunReport(
        command=command,
        spec_digest=spec_digest,
        status=RunStatus.NOT_SOLVABLE,
        not_solvable=NotSolvableInfo(stage=exc.stage, matrix=exc.matrix),
        error=exc.to_dict(),
        tool_version=config.APP_VERSION
    )


def stackelberg_error_report(command: str, exc: StackelbergError, spec_digest: Optional[str]) -> RunReport:
    """
    Handle the remaining StackelbergError subclasses.

    Args:
        command: CLI command name
        exc: StackelbergError
        spec_digest: Digest of the spec file, if it was read

    Returns:
        RunReport whose status follows the exception type
    """
    if isinstance(exc, NotUniqueError):
        status = RunStatus.NOT_UNIQUE
    elif isinstance(exc, SingularMatrixError):
        status = RunStatus.NOT_SOLVABLE
    else:
        status = RunStatus.INPUT_ERROR

    logger.error(
        f"{exc.error_code}: {exc.message}",
        extra={"error_code": exc.error_code, "details": exc.details, "command": command}
    )
    return RunReport(
        command=command,
        spec_digest=spec_digest,
        status=status,
        error=exc.to_dict(),
        tool_version=config.APP_VERSION
    )


def validation_error_report(command: str, exc: PydanticValidationError, spec_digest: Optional[str]) -> RunReport:
    """
    Handle pydantic ValidationError raised outside the spec repository.

    Returns:
        RunReport with status InputError and the formatted validation errors
    """
    details = format_validation_errors(exc.errors())
    logger.warning(f"Validation error: {details['error_count']} problem(s)", extra={"command": command})
    return RunReport(
        command=command,
        spec_digest=spec_digest,
        status=RunStatus.INPUT_ERROR,
        error={"error": "VALIDATION_ERROR", "message": "Data validation failed", "details": details},
        tool_version=config.APP_VERSION
    )


def os_error_report(command: str, exc: OSError, spec_digest: Optional[str]) -> RunReport:
    """Handle file-system errors as input errors."""
    wrapped = InputError(f"I/O error: {exc.strerror or exc}", field="path", value=exc.filename)
    return stackelberg_error_report(command, wrapped, spec_digest)


def error_report(command: str, exc: Exception, spec_digest: Optional[str] = None) -> RunReport:
    """
    Map an exception raised by a command to its RunReport.

    Args:
        command: CLI command name
        exc: Raised exception
        spec_digest: Digest of the spec file, if it was read

    Returns:
        RunReport with the matching status

    Raises:
        Exception: ``exc`` itself when it is not an expected failure
    """
    if isinstance(exc, NotSolvableError):
        return not_solvable_report(command, exc, spec_digest)
    if isinstance(exc, StackelbergError):
        return stackelberg_error_report(command, exc, spec_digest)
    if isinstance(exc, PydanticValidationError):
        return validation_error_report(command, exc, spec_digest)
    if isinstance(exc, OSError):
        return os_error_report(command, exc, spec_digest)

    logger.error(
        f"Unhandled exception occurred: {type(exc).__name__} - {str(exc)}",
        extra={"exception_type": type(exc).__name__, "command": command},
        exc_info=True
    )
    raise exc


def format_validation_errors(errors: list) -> Dict[str, Any]:
    """
    Format validation errors for consistent report structure.

    Args:
        errors: List of validation errors

    Returns:
        Formatted error details dictionary
    """
    formatted_errors = []

    for error in errors:
        if isinstance(error, dict):
            field_path = " -> ".join(str(loc) for loc in error.get("loc", []))
            formatted_errors.append({
                "field": field_path,
                "message": error.get("msg", "Validation error"),
                "type": error.get("type", "unknown")
            })
        else:
            formatted_errors.append({
                "field": "unknown",
                "message": str(error),
                "type": "unknown"
            })

    return {
        "validation_errors": formatted_errors,
        "error_count": len(formatted_errors)
    }
