"""
Human-readable rendering of run reports.

Values are shown with ``config.DISPLAY_DECIMALS`` decimals; the JSON report
keeps full precision.
"""

from typing import Any, Dict, List, Optional, Sequence

import config
from models.report import RunReport, RunStatus


def format_number(value: Optional[float], decimals: int = config.DISPLAY_DECIMALS) -> str:
    if value is None:
        return "-"
    return f"{value:.{decimals}f}"


def format_vector(values: Optional[Sequence[float]], decimals: int = config.DISPLAY_DECIMALS) -> str:
    """A vector as ``(a, b, ...)`` with fixed decimals; ``-`` when absent."""
    if values is None:
        return "-"
    return "(" + ", ".join(format_number(x, decimals) for x in values) + ")"


def format_table(header: Sequence[str], rows: List[Sequence[str]]) -> str:
    """Left-aligned columns separated by two spaces."""
    widths = [len(h) for h in header]
    for row in rows:
        widths = [max(w, len(cell)) for w, cell in zip(widths, row)]
    lines = ["  ".join(cell.ljust(w) for cell, w in zip(header, widths)).rstrip()]
    for row in rows:
        lines.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(lines)


def _stage_table(stages: List[Dict[str, Any]]) -> str:
    rows = [
        [str(s["k"]), format_vector(s.get("u")), format_vector(s.get("v")),
         format_vector(s["X"]), "-" if s.get("residual") is None else f"{s['residual']:.1e}"]
        for s in stages
    ]
    return format_table(["k", "u", "v", "X", "residual"], rows)


def _consistency_table(rows: List[Dict[str, Any]]) -> str:
    body = [
        [str(r["tau"]), format_number(r.get("max_dv")), format_number(r.get("max_du")),
         r["verdict"] if not r.get("error") else f"{r['verdict']} ({r['error']})"]
        for r in rows
    ]
    return format_table(["tau", "max_dv", "max_du", "verdict"], body)


def _summary_lines(summary: Dict[str, Any]) -> List[str]:
    lines = []
    for key, value in summary.items():
        if isinstance(value, float):
            value = f"{value:.3e}"
        lines.append(f"{key}: {value}")
    return lines


def render_report(report: RunReport) -> str:
    """
    Render a RunReport as text for the terminal.

    Args:
        report: Report of any command

    Returns:
        Multi-line text ending without a newline
    """
    lines = [f"{report.command}: {report.status.value}"]
    if report.status == RunStatus.NOT_SOLVABLE and report.not_solvable:
        lines.append(f"not solvable at stage {report.not_solvable.stage}: matrix {report.not_solvable.matrix}")
    elif report.error:
        lines.append(report.error.get("message", ""))
    for violation in report.violations:
        lines.append(f"  - {violation}")

    payload = report.payload
    if "stages" in payload:
        lines.append(_stage_table(payload["stages"]))
    if "rows" in payload:
        lines.append(_consistency_table(payload["rows"]))
    if "summary" in payload:
        lines.extend(_summary_lines(payload["summary"]))
    return "\n".join(lines)
