"""
LQ Stackelberg Solver
Command-line entry point
"""

from typing import List, Optional
import argparse
import sys

import config
from cli import CHECKS, MODES, cmd_check, cmd_solve, cmd_validate, render_report
from exceptions import EXIT_INPUT_ERROR, InputError
from logging_config import get_logger, setup_logging
from models.coefficients import ResponseAnchor
from repositories.report_repository import ReportRepository

logger = get_logger("main")

ANCHORS = tuple(a.value for a in ResponseAnchor)


class SolverArgumentParser(argparse.ArgumentParser):
    """Argument parser whose usage errors exit with the input-error code."""

    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INPUT_ERROR, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    """
    Build the command-line parser.

    Global options are accepted after the subcommand name.
    """
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", help="Write the machine-readable JSON report to this file")
    common.add_argument("--log-level", default=None, help="Logging level (default: $LOG_LEVEL or WARNING)")
    common.add_argument("--json-logs", action="store_true", help="Emit log records as JSON on stderr")

    parser = SolverArgumentParser(
        prog="lq-stackelberg",
        description=f"{config.APP_NAME} {config.APP_VERSION}: precommitted and equilibrium "
                    "open-loop solutions of finite-horizon LQ leader-follower games"
    )
    subparsers = parser.add_subparsers(dest="command", required=True, parser_class=SolverArgumentParser)

    validate = subparsers.add_parser("validate", parents=[common], help="Check shapes and weights of a spec")
    validate.add_argument("file")

    solve = subparsers.add_parser("solve", parents=[common], help="Solve the game")
    solve.add_argument("file")
    solve.add_argument("--mode", choices=MODES, default="equilibrium")
    solve.add_argument("--anchor", choices=ANCHORS, default=ResponseAnchor.BASE.value,
                       help="Response anchoring of the equilibrium (not used by --mode precommit)")
    solve.add_argument("--at", nargs="+", type=float, metavar="K0 X0",
                       help="Start time followed by the start state")

    check = subparsers.add_parser("check", parents=[common], help="Run a numerical verifier")
    check.add_argument("file")
    check.add_argument("--which", choices=CHECKS, required=True)
    check.add_argument("--mode", choices=MODES, default="equilibrium")
    check.add_argument("--anchor", choices=ANCHORS, default=ResponseAnchor.BASE.value)
    check.add_argument("--seed", type=int, default=config.DEFAULT_SEED)
    check.add_argument("--probes", type=int, default=config.DEFAULT_PROBES)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    """
    Run one command.

    Args:
        argv: Arguments without the program name (defaults to sys.argv)

    Returns:
        Exit code: 0 pass, 1 check failure, 2 not solvable, 3 input error
    """
    args = build_parser().parse_args(argv)
    setup_logging(log_level=args.log_level, enable_json_logging=True if args.json_logs else None)

    if args.command == "validate":
        report = cmd_validate(args.file)
    elif args.command == "solve":
        report = cmd_solve(args.file, mode=args.mode, at=args.at, anchor=args.anchor)
    else:
        report = cmd_check(
            args.file,
            which=args.which,
            seed=args.seed,
            probes=args.probes,
            mode=args.mode,
            anchor=args.anchor
        )

    print(render_report(report))
    if args.out:
        try:
            ReportRepository().save(report, args.out)
        except InputError as e:
            logger.error(e.message)
            print(e.message, file=sys.stderr)
            return EXIT_INPUT_ERROR
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
