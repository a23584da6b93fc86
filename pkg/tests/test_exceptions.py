import pytest
from pydantic import BaseModel, ValidationError

from error_handlers import error_report, format_validation_errors
from exceptions import (
    ConfigurationError,
    DimensionError,
    NotSolvableError,
    NotUniqueError,
    SingularMatrixError,
    missing_field,
    non_finite_entry,
    singular_stage_matrix
)
from models.report import RunStatus


def test_not_solvable_carries_stage_and_matrix():
    exc = NotSolvableError(stage=2, matrix="M", reason="is not positive definite")
    assert exc.stage == 2 and exc.matrix == "M"
    assert exc.to_dict() == {
        "error": "NOT_SOLVABLE",
        "message": "Not solvable at stage 2: matrix M is not positive definite",
        "details": {"stage": 2, "matrix": "M"}
    }
    assert exc.exit_code == 2


def test_factories():
    assert missing_field("G2", "spec.json").details == {"field": "G2"}
    assert non_finite_entry("Q1").error_code == "INPUT_ERROR"
    exc = singular_stage_matrix(1, "F", 0.0, 1e-12)
    assert exc.details == {"stage": 1, "matrix": "F", "pivot": 0.0, "threshold": 1e-12}


def test_dimension_error_details():
    exc = DimensionError("bad", operation="simulate", expected=(3, 2), actual=(2, 2))
    assert exc.details == {"operation": "simulate", "expected": [3, 2], "actual": [2, 2]}
    assert exc.exit_code == 3


@pytest.mark.parametrize("exc, status, code", [
    (NotSolvableError(stage=0, matrix="F"), RunStatus.NOT_SOLVABLE, 2),
    (NotUniqueError("singular", min_pivot=0.0), RunStatus.NOT_UNIQUE, 2),
    (SingularMatrixError("singular", matrix="gap"), RunStatus.NOT_SOLVABLE, 2),
    (missing_field("x"), RunStatus.INPUT_ERROR, 3),
    (ConfigurationError("bad", config_key="LQS_FD_STEP"), RunStatus.INPUT_ERROR, 3),
    (FileNotFoundError(2, "No such file", "spec.json"), RunStatus.INPUT_ERROR, 3),
])
def test_error_report_status(exc, status, code):
    report = error_report("solve", exc, "digest")
    assert report.status == status
    assert report.exit_code == code
    assert report.spec_digest == "digest"


def test_error_report_not_solvable_info():
    report = error_report("solve", NotSolvableError(stage=4, matrix="I-(C~'-B~F^-1D')T"))
    assert report.not_solvable.stage == 4
    assert report.not_solvable.matrix == "I-(C~'-B~F^-1D')T"


def test_error_report_validation_error():
    class Point(BaseModel):
        x: int

    with pytest.raises(ValidationError) as info:
        Point(x="not a number")
    report = error_report("validate", info.value)
    assert report.status == RunStatus.INPUT_ERROR
    assert report.error["details"]["validation_errors"][0]["field"] == "x"


def test_error_report_reraises_unexpected():
    with pytest.raises(ZeroDivisionError):
        error_report("solve", ZeroDivisionError("boom"))


def test_format_validation_errors_handles_plain_values():
    formatted = format_validation_errors(["oops", {"loc": ("a", 0), "msg": "bad", "type": "value_error"}])
    assert formatted["error_count"] == 2
    assert formatted["validation_errors"][0]["field"] == "unknown"
    assert formatted["validation_errors"][1]["field"] == "a -> 0"
