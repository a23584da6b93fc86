# Command-line front end: spec loading, solver and verifier commands, report rendering

from .commands import cmd_validate, cmd_solve, cmd_check, CHECKS, MODES
from .render import render_report

__all__ = [
    'cmd_validate',
    'cmd_solve',
    'cmd_check',
    'CHECKS',
    'MODES',
    'render_report'
]
