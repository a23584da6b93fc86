from enum import Enum
from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from exceptions import EXIT_CHECK_FAILED, EXIT_INPUT_ERROR, EXIT_NOT_SOLVABLE, EXIT_OK


class RunStatus(str, Enum):
    """Outcome of one CLI command."""

    VALID = "Valid"
    SOLVED = "Solved"
    PASSED = "Passed"
    FAILED = "Failed"
    NOT_SOLVABLE = "NotSolvable"
    NOT_UNIQUE = "NotUnique"
    VIOLATIONS = "Violations"
    INPUT_ERROR = "InputError"


_EXIT_CODES = {
    RunStatus.VALID: EXIT_OK,
    RunStatus.SOLVED: EXIT_OK,
    RunStatus.PASSED: EXIT_OK,
    RunStatus.FAILED: EXIT_CHECK_FAILED,
    RunStatus.NOT_SOLVABLE: EXIT_NOT_SOLVABLE,
    RunStatus.NOT_UNIQUE: EXIT_NOT_SOLVABLE,
    RunStatus.VIOLATIONS: EXIT_INPUT_ERROR,
    RunStatus.INPUT_ERROR: EXIT_INPUT_ERROR,
}


class NotSolvableInfo(BaseModel):
    stage: int
    matrix: str


class RunReport(BaseModel):
    """Machine-readable result of a CLI command."""

    command: str = Field(..., description="Command name: validate, solve or check")
    spec_digest: Optional[str] = Field(None, description="SHA-256 of the spec file bytes")
    status: RunStatus
    not_solvable: Optional[NotSolvableInfo] = None
    violations: List[str] = Field(default_factory=list)
    error: Optional[Dict[str, Any]] = None
    payload: Dict[str, Any] = Field(default_factory=dict)
    tool_version: str

    @property
    def exit_code(self) -> int:
        return _EXIT_CODES[self.status]
