"""
Numerical oracles for the solver identities.

Each check recomputes a quantity along an independent route (direct
simulation, probing, re-solving) and reports the discrepancy instead of
asserting it, so the CLI can surface worst-case values.
"""

from typing import Optional
import logging

import numpy as np
import scipy.linalg

import config
from exceptions import NotSolvableError, SingularMatrixError
from matkit import solve_linear
from models.coefficients import FollowerCoeffs, ResponseAnchor
from models.game import GameSpec, initial_state
from models.solutions import (
    ConsistencyReport,
    ConsistencyRow,
    DeviationReport,
    EquilibriumSolution,
    FixedPointResult,
    VariationReport
)
from services.equilibrium import EquilibriumService
from services.follower import FollowerService
from services.game_model import GameModelService, as_controls
from services.quadratic import probe_quadratic

logger = logging.getLogger(__name__)


class VerificationService:
    """Service class for the variation, deviation, consistency and fixed-point checks."""

    def __init__(
        self,
        equilibrium_service: Optional[EquilibriumService] = None,
        game_model: Optional[GameModelService] = None
    ):
        """
        Initialize the verification service.

        Args:
            equilibrium_service: EquilibriumService instance (creates default if None)
            game_model: GameModelService instance (creates default if None)
        """
        self.game_model = game_model or GameModelService()
        self.equilibrium_service = equilibrium_service or EquilibriumService(FollowerService(self.game_model))
        self.follower_service = self.equilibrium_service.follower_service

    def follower_normal_equations(self, spec: GameSpec, k0: int, x0: np.ndarray, v: np.ndarray) -> np.ndarray:
        """
        Minimize J1(k0, x0; u, v) over the stacked u through its normal equations.

        Returns:
            Minimizing follower controls, one row per stage
        """
        x0 = initial_state(spec, x0)
        v = as_controls(v, spec.m2)
        stages = spec.N - k0
        dyn = self.game_model.stacked_dynamics(spec, k0)
        Qbar = scipy.linalg.block_diag(*([spec.Q1] * (stages - 1) + [spec.G1]))
        Rbar = scipy.linalg.block_diag(*([spec.R1] * stages))
        free = dyn.Phi @ x0 + dyn.Gv @ v.reshape(-1)
        hessian = dyn.Gu.T @ Qbar @ dyn.Gu + Rbar
        u = solve_linear(hessian, -dyn.Gu.T @ Qbar @ free, name="follower normal equations")
        return u.reshape(stages, spec.m1)

    def variation_direct(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        k: int,
        eps: float,
        vtil: np.ndarray,
        v: np.ndarray,
        x: np.ndarray,
        t0: Optional[int] = None
    ) -> float:
        """
        Change of the leader's stage-k cost when v_k moves to v_k + eps * vtil.

        The follower's full response from (t0, x) is recomputed under the
        perturbed sequence, while the stage-k cost starts from the unperturbed X_k.

        Returns:
            J2(k, X_k; alpha(x, v_eps), v_eps) - J2(k, X_k; alpha(x, v), v)
        """
        t0 = spec.t if t0 is None else t0
        v = as_controls(v, spec.m2)
        j = k - t0
        base = self.follower_service.response(spec, fc, t0, x, v)
        v_eps = v.copy()
        v_eps[j] = v_eps[j] + eps * np.asarray(vtil, dtype=np.float64)
        perturbed = self.follower_service.response(spec, fc, t0, x, v_eps)

        X_k = base.X[j]
        after = self.game_model.cost(spec, 2, k, X_k, perturbed.u[j:], v_eps[j:])
        before = self.game_model.cost(spec, 2, k, X_k, base.u[j:], v[j:])
        return after - before

    def variation_formula(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        k: int,
        eps: float,
        vtil: np.ndarray,
        v: np.ndarray,
        x: np.ndarray,
        t0: Optional[int] = None
    ) -> VariationReport:
        """
        Adjoint expansion of the same cost change: 2 eps g'vtil + eps^2 Jhat(vtil).

        g is computed twice: from the adjoints Z, Zbar^(k) and the cross-stage
        terms C_k A~...C~_i' Zbar_{i+1}, and in the rearranged form
        O_k X_k + F_k v_k + D_k' [Z; Zbar; pi]_{k+1}. Jhat is the cost of the
        perturbation systems eta (response state) and xi (internal state).

        Returns:
            VariationReport comparing the expansion with ``variation_direct``
        """
        t0 = spec.t if t0 is None else t0
        v = as_controls(v, spec.m2)
        vtil = np.asarray(vtil, dtype=np.float64).reshape(-1)
        eq = self.equilibrium_service
        j = k - t0
        s = fc.stage(k)

        base = self.follower_service.response(spec, fc, t0, x, v)
        X, pi = base.X, base.pi
        Z = eq.leader_adjoint(spec, X)
        Zbar = eq.zbar_adjoint(spec, fc, t0, X, v, pi, Z, k)
        w_k = s.H1 @ X[j] + s.H2 @ v[j] + s.H3 @ pi[j + 1]

        cross = np.zeros(spec.m2)
        chain = np.eye(spec.n)
        for i in range(k - 1, t0 - 1, -1):
            if i < k - 1:
                chain = chain @ fc.stage(i + 1).Atil
            cross += s.C @ chain @ fc.stage(i).Ctil.T @ Zbar[i + 1 - t0]
        linear = (
            s.Btil.T @ Z[j + 1]
            + s.Btil.T @ Zbar[j + 1]
            + spec.W2 @ v[j]
            + s.H2.T @ spec.R2 @ w_k
            + cross
        )

        ls = eq.leader_coeffs(spec, fc, t0).stage(k)
        bZ_next = np.concatenate([Z[j + 1], Zbar[j + 1], pi[j + 1]])
        costate = ls.O @ X[j] + ls.F @ v[j] + ls.bD.T @ bZ_next

        quadratic = self._second_order(spec, fc, k, vtil, t0)
        lhs = self.variation_direct(spec, fc, k, eps, vtil, v, x, t0)
        first_order = 2.0 * eps * float(linear @ vtil)
        second_order = eps * eps * quadratic
        return VariationReport(
            k=k,
            eps=eps,
            vtil=vtil,
            lhs=lhs,
            first_order=first_order,
            second_order=second_order,
            abs_error=abs(lhs - first_order - second_order),
            linear_coefficient=linear,
            costate_coefficient=costate,
            costate_gap=float(np.max(np.abs(linear - costate))),
            quadratic_form=quadratic
        )

    def _second_order(self, spec: GameSpec, fc: FollowerCoeffs, k: int, vtil: np.ndarray, t0: int) -> float:
        """Cost of the perturbation systems for direction vtil at stage k."""
        n = spec.n
        # backward variable of the perturbation, nonzero up to stage k only
        dpi = {k: fc.stage(k).C.T @ vtil}
        for i in range(k - 1, t0 - 1, -1):
            dpi[i] = fc.stage(i).Atil.T @ dpi[i + 1]

        eta = np.zeros(n)
        for i in range(t0, k):
            s = fc.stage(i)
            eta = s.Atil @ eta + s.Ctil @ dpi[i + 1]

        xi = np.zeros(n)
        total = float(vtil @ spec.W2 @ vtil)
        for ell in range(k, spec.N):
            s = fc.stage(ell)
            du = -s.H1 @ eta
            dv = np.zeros(spec.m2)
            if ell == k:
                du = du - s.H2 @ vtil
                dv = vtil
            total += float(xi @ spec.Q2 @ xi + du @ spec.R2 @ du)
            eta_next = s.Atil @ eta + (s.Btil @ vtil if ell == k else 0.0)
            xi = spec.A @ xi + spec.B1 @ du + spec.B2 @ dv
            eta = eta_next
        return total + float(xi @ spec.G2 @ xi)

    def _leader_stage_cost(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        start: int,
        x0: np.ndarray,
        anchor: ResponseAnchor,
        v: np.ndarray,
        k: int
    ):
        """The stage-k cost of the leader as a function of a deviation of v_k."""
        j = k - start
        X_k = self.follower_service.response(spec, fc, start, x0, v).X[j]
        if anchor == ResponseAnchor.STAGE:
            origin, origin_state = k, X_k
        else:
            origin, origin_state = start, x0
        offset = k - origin

        def stage_cost(delta: np.ndarray) -> float:
            trial = v.copy()
            trial[j] = trial[j] + delta
            traj = self.follower_service.response(spec, fc, origin, origin_state, trial[origin - start:])
            return self.game_model.cost(spec, 2, k, X_k, traj.u[offset:], trial[j:])

        return stage_cost

    def leader_deviation_test(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        sol: EquilibriumSolution,
        probes: int = config.DEFAULT_PROBES,
        seed: int = config.DEFAULT_SEED,
        scale: float = config.PROBE_SCALE
    ) -> DeviationReport:
        """
        One-stage deviation test of the leader at an equilibrium.

        For each stage k the leader's cost from (k, X*_k) is evaluated with v_k
        replaced by probe values while the follower responds through its map
        (from the base pair, or from (k, X*_k) under stage anchoring). Probes
        are the exact stage minimizer, the coordinate directions and random
        perturbations of size ``scale``.

        Returns:
            DeviationReport; a gain above 1e-8 contradicts the equilibrium
        """
        rng = np.random.default_rng(seed)
        v = np.array(sol.v_star)
        gains = {}
        for k in range(sol.start, spec.N):
            stage_cost = self._leader_stage_cost(spec, fc, sol.start, sol.x0, sol.anchor, v, k)
            played = stage_cost(np.zeros(spec.m2))
            candidates = [np.zeros(spec.m2)]
            quad = probe_quadratic(stage_cost, spec.m2)
            try:
                candidates.append(solve_linear(quad.Q, -quad.l))
            except SingularMatrixError:
                pass
            candidates.extend(scale * np.eye(spec.m2))
            candidates.extend(-scale * np.eye(spec.m2))
            candidates.extend(scale * rng.standard_normal((probes, spec.m2)))
            gains[k] = max(played - stage_cost(delta) for delta in candidates)

        worst = max(gains, key=gains.get)
        if gains[worst] > config.DEVIATION_TOL:
            logger.warning(f"Leader gains {gains[worst]:.3e} by deviating at stage {worst}")
        return DeviationReport(stage_gains=gains, max_gain=gains[worst], worst_stage=worst)

    def time_consistency_check(
        self,
        spec: GameSpec,
        sol: EquilibriumSolution,
        tol: float = config.CONSISTENCY_TOL
    ) -> ConsistencyReport:
        """
        Re-solve the equilibrium at (tau, X*_tau) for tau = t+1..N-1 and compare with the truncation.

        A re-solve that is not solvable is recorded as a counterexample row.

        Returns:
            ConsistencyReport; consistent iff every control difference is within ``tol``
        """
        rows = []
        for tau in range(sol.start + 1, spec.N):
            try:
                again = self.equilibrium_service.solve_equilibrium(spec, tau, sol.state(tau), anchor=sol.anchor)
            except NotSolvableError as e:
                logger.warning(f"Re-solve at tau={tau} is not solvable: {e.message}")
                rows.append(ConsistencyRow(tau=tau, verdict="counterexample", error=e.message))
                continue
            j = tau - sol.start
            max_dv = float(np.max(np.linalg.norm(again.v_star - sol.v_star[j:], axis=1)))
            max_du = float(np.max(np.linalg.norm(again.u_star - sol.u_star[j:], axis=1)))
            verdict = "consistent" if max(max_dv, max_du) <= tol else "inconsistent"
            rows.append(ConsistencyRow(tau=tau, max_dv=max_dv, max_du=max_du, verdict=verdict))

        consistent = all(row.verdict == "consistent" for row in rows)
        if not consistent:
            logger.info(f"Equilibrium with {sol.anchor.value} anchoring is not time-consistent on this instance")
        return ConsistencyReport(mode="equilibrium", tolerance=tol, rows=rows, consistent=consistent)

    def stagewise_fixed_point(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        k0: Optional[int] = None,
        x0: Optional[np.ndarray] = None,
        anchor: ResponseAnchor = ResponseAnchor.BASE,
        max_iter: int = config.FIXED_POINT_MAX_ITER,
        tol: float = config.FIXED_POINT_TOL
    ) -> FixedPointResult:
        """
        Find the equilibrium by sweeping stage-wise best responses of the leader.

        Each sweep replaces v_k, stage by stage, with the exact minimizer of the
        leader's stage-k cost given the other stages; the sweep repeats until
        the largest update is at most ``tol``.

        Returns:
            FixedPointResult; ``converged`` is False when max_iter sweeps were not enough
        """
        k0 = spec.t if k0 is None else k0
        x0 = initial_state(spec, x0)
        v = np.zeros((spec.N - k0, spec.m2))
        update = float("inf")
        iterations = 0
        while iterations < max_iter and update > tol:
            iterations += 1
            update = 0.0
            for k in range(k0, spec.N):
                j = k - k0
                stage_cost = self._leader_stage_cost(spec, fc, k0, x0, anchor, v, k)
                quad = probe_quadratic(stage_cost, spec.m2)
                step = solve_linear(quad.Q, -quad.l, name="stage Hessian")
                v[j] = v[j] + step
                update = max(update, float(np.max(np.abs(step))))

        converged = update <= tol
        logger.info(f"Stage-wise fixed point {'converged' if converged else 'stopped'} after {iterations} sweeps")
        return FixedPointResult(start=k0, v=v, iterations=iterations, converged=converged, last_update=update)
