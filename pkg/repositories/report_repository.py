from pathlib import Path
from typing import Union
import logging

from pydantic import ValidationError

from exceptions import InputError
from models.report import RunReport

logger = logging.getLogger(__name__)


class ReportRepository:
    """Repository class for machine-readable run reports."""

    def save(self, report: RunReport, path: Union[str, Path]) -> None:
        """
        Write a report as JSON.

        Floats are written with full repr precision, so ``load`` returns
        exactly the values that were saved.

        Raises:
            InputError: If the file cannot be written
        """
        path = Path(path)
        try:
            path.write_text(report.model_dump_json(indent=2), encoding="utf-8")
        except OSError as e:
            logger.error(f"Cannot write report to {path}: {e}")
            raise InputError(f"Cannot write report to {path}: {e.strerror or e}", field="out", value=str(path))
        logger.info(f"Report written to {path}")

    def load(self, path: Union[str, Path]) -> RunReport:
        """
        Read a report written by ``save``.

        Raises:
            InputError: If the file is unreadable or not a report
        """
        path = Path(path)
        try:
            return RunReport.model_validate_json(path.read_text(encoding="utf-8"))
        except OSError as e:
            raise InputError(f"Cannot read report {path}: {e.strerror or e}", field="path", value=str(path))
        except ValidationError as e:
            raise InputError(f"File {path} is not a run report: {e.errors()[0]['msg']}", field="path", value=str(path))
