"""
Solver and verifier commands.
Each command loads a spec file, runs one service and returns a RunReport.
"""

from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union
import logging

import numpy as np

import config
from error_handlers import error_report
from exceptions import InputError
from logging_config import CommandLoggingContext
from models.coefficients import ResponseAnchor
from models.game import GameSpec
from models.report import RunReport, RunStatus
from repositories.spec_repository import GameSpecRepository
from services.equilibrium import EquilibriumService
from services.follower import FollowerService
from services.game_model import GameModelService
from services.precommit import PrecommitService
from services.verify import VerificationService

logger = logging.getLogger(__name__)

MODES = ("precommit", "equilibrium")
CHECKS = ("consistency", "deviations", "variation", "fixed-point")

# Initialize repositories and services
spec_repository = GameSpecRepository()
game_model = GameModelService()
follower_service = FollowerService(game_model)
precommit_service = PrecommitService(follower_service, game_model)
equilibrium_service = EquilibriumService(follower_service)
verification_service = VerificationService(equilibrium_service, game_model)


def _report(command: str, digest: str, status: RunStatus, payload: Dict[str, Any]) -> RunReport:
    return RunReport(
        command=command,
        spec_digest=digest,
        status=status,
        payload=payload,
        tool_version=config.APP_VERSION
    )


def run_command(
    command: str,
    path: Union[str, Path],
    body: Callable[[GameSpec, str], RunReport]
) -> RunReport:
    """
    Load and validate the spec, run ``body`` inside a logging context and map failures to reports.

    Args:
        command: Command name recorded in the report
        path: Spec file
        body: Command body receiving the spec and its digest

    Returns:
        RunReport of the body, or of the failure
    """
    digest = None
    try:
        spec, digest = spec_repository.load(path)
        with CommandLoggingContext(digest[:12], command, str(path)) as context:
            violations = game_model.validate(spec)
            if violations:
                context.log_warning(f"{len(violations)} violation(s) in spec", violations=violations)
                return RunReport(
                    command=command,
                    spec_digest=digest,
                    status=RunStatus.VIOLATIONS,
                    violations=violations,
                    tool_version=config.APP_VERSION
                )
            report = body(spec, digest)
            context.log_info(f"Status {report.status.value}", exit_code=report.exit_code)
            return report
    except Exception as exc:
        return error_report(command, exc, digest)


def parse_start(spec: GameSpec, at: Optional[Sequence[float]]) -> Tuple[int, np.ndarray]:
    """
    Start pair from ``--at k0 x0...``; the spec's (t, x) when absent.

    Raises:
        InputError: If k0 is not an integer in [t, N) or x0 has the wrong length
    """
    if not at:
        return spec.t, np.array(spec.x)
    k0_raw, x0 = at[0], np.asarray(at[1:], dtype=np.float64)
    if float(k0_raw) != int(k0_raw):
        raise InputError(f"Start time must be an integer, got {k0_raw}", field="at", value=k0_raw)
    k0 = int(k0_raw)
    if not spec.t <= k0 < spec.N:
        raise InputError(f"Start time {k0} outside [{spec.t}, {spec.N})", field="at", value=k0)
    if x0.shape != (spec.n,):
        raise InputError(f"Start state needs {spec.n} entries, got {x0.size}", field="at", value=list(at[1:]))
    return k0, x0


def _stages(start: int, X: np.ndarray, u: np.ndarray, v: np.ndarray, residuals: List[Optional[float]]) -> List[Dict[str, Any]]:
    stages = []
    for j in range(u.shape[0]):
        stages.append({
            "k": start + j,
            "u": u[j].tolist(),
            "v": v[j].tolist(),
            "X": X[j].tolist(),
            "residual": residuals[j]
        })
    stages.append({"k": start + u.shape[0], "u": None, "v": None, "X": X[-1].tolist(), "residual": None})
    return stages


def cmd_validate(path: Union[str, Path]) -> RunReport:
    """
    Validate a spec file.

    - **path**: JSON spec file

    Exit code 0 iff there are no violations.
    """
    def body(spec: GameSpec, digest: str) -> RunReport:
        return _report("validate", digest, RunStatus.VALID, {"n": spec.n, "m1": spec.m1, "m2": spec.m2, "N": spec.N, "t": spec.t})

    return run_command("validate", path, body)


def cmd_solve(
    path: Union[str, Path],
    mode: str = "equilibrium",
    at: Optional[Sequence[float]] = None,
    anchor: str = ResponseAnchor.BASE.value
) -> RunReport:
    """
    Solve the game in one of the two modes.

    - **mode**: precommit or equilibrium
    - **at**: optional start override ``(k0, x0...)``
    - **anchor**: base or stage response anchoring (equilibrium only)
    """
    def body(spec: GameSpec, digest: str) -> RunReport:
        k0, x0 = parse_start(spec, at)
        if mode == "precommit":
            sol = precommit_service.solve_precommit(spec, k0, x0)
            payload = {
                "mode": mode,
                "anchor": None,
                "start": k0,
                "x0": x0.tolist(),
                "stages": _stages(k0, sol.X_hat, sol.u_hat, sol.v_hat, sol.stage_residuals),
                "summary": {"J1": sol.J1, "J2": sol.J2, "gradient_residual": sol.gradient_residual}
            }
            return _report("solve", digest, RunStatus.SOLVED, payload)

        response_anchor = ResponseAnchor(anchor)
        sol = equilibrium_service.solve_equilibrium(spec, k0, x0, anchor=response_anchor)
        fc, lc, _ = equilibrium_service.coefficients(spec, k0, response_anchor)
        stationarity = equilibrium_service.stationary_residual(spec, fc, lc, sol)
        residuals = [stationarity.stage_residuals[k0 + j] for j in range(sol.v_star.shape[0])]
        payload = {
            "mode": mode,
            "anchor": response_anchor.value,
            "start": k0,
            "x0": x0.tolist(),
            "stages": _stages(k0, sol.X_star, sol.u_star, sol.v_star, residuals),
            "conditioning": [d.model_dump() for d in sol.diagnostics],
            "summary": {
                "J1": game_model.cost(spec, 1, k0, x0, sol.u_star, sol.v_star),
                "J2": game_model.cost(spec, 2, k0, x0, sol.u_star, sol.v_star),
                "max_stationary_residual": stationarity.max_residual,
                "adjoint_gap": stationarity.adjoint_gap
            }
        }
        return _report("solve", digest, RunStatus.SOLVED, payload)

    return run_command("solve", path, body)


def _consistency(spec: GameSpec, digest: str, mode: str, anchor: ResponseAnchor) -> RunReport:
    if mode == "precommit":
        result = precommit_service.inconsistency_report(spec)
    else:
        sol = equilibrium_service.solve_equilibrium(spec, anchor=anchor)
        result = verification_service.time_consistency_check(spec, sol)
    payload = {
        "mode": mode,
        "anchor": anchor.value if mode == "equilibrium" else None,
        "rows": [row.model_dump() for row in result.rows],
        "summary": {"verdict": result.verdict, "tolerance": result.tolerance}
    }
    status = RunStatus.PASSED if result.consistent else RunStatus.FAILED
    return _report("check", digest, status, payload)


def _deviations(spec: GameSpec, digest: str, mode: str, anchor: ResponseAnchor, seed: int, probes: int) -> RunReport:
    if mode == "precommit":
        sol = precommit_service.solve_precommit(spec)
        fc = follower_service.riccati(spec)
        follower = follower_service.check_response_equilibrium(
            spec, fc, sol.start, sol.x0, sol.v_hat, sol.u_hat, probes=probes, seed=seed
        )
        passed = follower.max_gain <= config.DEVIATION_TOL
        summary = {
            "follower_max_gain": follower.max_gain,
            "follower_worst_stage": follower.worst_stage,
            "gradient_residual": sol.gradient_residual
        }
    else:
        sol = equilibrium_service.solve_equilibrium(spec, anchor=anchor)
        fc, lc, _ = equilibrium_service.coefficients(spec, sol.start, anchor)
        leader = verification_service.leader_deviation_test(spec, fc, sol, probes=probes, seed=seed)
        follower = follower_service.check_response_equilibrium(
            spec, fc, sol.start, sol.x0, sol.v_star, sol.u_star, probes=probes, seed=seed
        )
        stationarity = equilibrium_service.stationary_residual(spec, fc, lc, sol)
        scale = 1.0 + float(np.max(np.abs(sol.bZ_star)))
        passed = (
            leader.max_gain <= config.DEVIATION_TOL
            and follower.max_gain <= config.DEVIATION_TOL
            and stationarity.max_residual <= config.STATIONARITY_TOL * scale
            and stationarity.adjoint_gap <= config.ADJOINT_TOL * scale
        )
        summary = {
            "leader_max_gain": leader.max_gain,
            "leader_worst_stage": leader.worst_stage,
            "follower_max_gain": follower.max_gain,
            "follower_worst_stage": follower.worst_stage,
            "max_stationary_residual": stationarity.max_residual,
            "adjoint_gap": stationarity.adjoint_gap
        }
    payload = {"mode": mode, "seed": seed, "probes": probes, "summary": summary}
    return _report("check", digest, RunStatus.PASSED if passed else RunStatus.FAILED, payload)


def _variation(spec: GameSpec, digest: str, seed: int, probes: int) -> RunReport:
    rng = np.random.default_rng(seed)
    fc = follower_service.riccati(spec)
    stages = spec.N - spec.t
    worst_error = worst_costate = 0.0
    min_quadratic = float("inf")
    passed = True
    draws = []
    for _ in range(probes):
        k = int(rng.integers(spec.t, spec.N))
        eps = float(np.exp(rng.uniform(np.log(config.EPS_MIN), np.log(config.EPS_MAX))))
        eps = eps if rng.random() < 0.5 else -eps
        vtil = rng.standard_normal(spec.m2)
        v = rng.standard_normal((stages, spec.m2))
        result = verification_service.variation_formula(spec, fc, k, eps, vtil, v, spec.x)
        relative = result.abs_error / (1.0 + abs(result.lhs))
        costate_scale = 1.0 + float(np.max(np.abs(result.linear_coefficient)))
        passed = passed and (
            relative <= config.VARIATION_TOL
            and result.costate_gap <= config.COSTATE_TOL * costate_scale
            and result.quadratic_form >= -config.PSD_TOL
        )
        worst_error = max(worst_error, relative)
        worst_costate = max(worst_costate, result.costate_gap)
        min_quadratic = min(min_quadratic, result.quadratic_form)
        draws.append({"k": k, "eps": eps, "lhs": result.lhs, "abs_error": result.abs_error, "costate_gap": result.costate_gap})

    payload = {
        "seed": seed,
        "probes": probes,
        "draws": draws,
        "summary": {
            "max_relative_error": worst_error,
            "max_costate_gap": worst_costate,
            "min_quadratic_form": min_quadratic if draws else 0.0
        }
    }
    return _report("check", digest, RunStatus.PASSED if passed else RunStatus.FAILED, payload)


def _fixed_point(spec: GameSpec, digest: str, anchor: ResponseAnchor) -> RunReport:
    sol = equilibrium_service.solve_equilibrium(spec, anchor=anchor)
    fc = follower_service.riccati(spec)
    result = verification_service.stagewise_fixed_point(spec, fc, anchor=anchor)
    distance = float(np.max(np.abs(result.v - sol.v_star)))
    passed = result.converged and distance <= config.CONSISTENCY_TOL
    payload = {
        "anchor": anchor.value,
        "v": result.v.tolist(),
        "summary": {
            "converged": result.converged,
            "iterations": result.iterations,
            "last_update": result.last_update,
            "max_distance_to_equilibrium": distance
        }
    }
    return _report("check", digest, RunStatus.PASSED if passed else RunStatus.FAILED, payload)


def cmd_check(
    path: Union[str, Path],
    which: str,
    seed: int = config.DEFAULT_SEED,
    probes: int = config.DEFAULT_PROBES,
    mode: str = "equilibrium",
    anchor: str = ResponseAnchor.BASE.value
) -> RunReport:
    """
    Run one verifier.

    - **which**: consistency, deviations, variation or fixed-point
    - **seed**: seed of every random probe
    - **probes**: random probes per stage (draws for variation)
    - **mode**: solver checked by consistency and deviations
    - **anchor**: base or stage response anchoring

    Exit code 0 iff every check is within its threshold.
    """
    if which not in CHECKS:
        return error_report("check", InputError(f"Unknown check '{which}'", field="which", value=which))

    def body(spec: GameSpec, digest: str) -> RunReport:
        response_anchor = ResponseAnchor(anchor)
        if which == "consistency":
            return _consistency(spec, digest, mode, response_anchor)
        if which == "deviations":
            return _deviations(spec, digest, mode, response_anchor, seed, probes)
        if which == "variation":
            return _variation(spec, digest, seed, probes)
        return _fixed_point(spec, digest, response_anchor)

    report = run_command("check", path, body)
    if report.payload:
        report.payload["which"] = which
    return report
