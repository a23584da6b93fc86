from typing import Optional
import logging

import numpy as np

import config
from exceptions import NotUniqueError, SingularMatrixError
from matkit import inf_norm, solve_linear, symmetric_pivots
from models.coefficients import FollowerCoeffs
from models.game import GameSpec, initial_state
from models.solutions import ConsistencyReport, ConsistencyRow, PrecommitSolution
from services.follower import FollowerService
from services.game_model import GameModelService
from services.quadratic import QuadraticForm, probe_quadratic

logger = logging.getLogger(__name__)


class PrecommitService:
    """Service class for the classic (precommitted) open-loop leader-follower solution."""

    def __init__(
        self,
        follower_service: Optional[FollowerService] = None,
        game_model: Optional[GameModelService] = None
    ):
        """
        Initialize the precommit service.

        Args:
            follower_service: FollowerService instance (creates default if None)
            game_model: GameModelService instance (creates default if None)
        """
        self.game_model = game_model or GameModelService()
        self.follower_service = follower_service or FollowerService(self.game_model)

    def reduced_quadratic(self, spec: GameSpec, fc: FollowerCoeffs, k0: int, x0: np.ndarray) -> QuadraticForm:
        """
        The leader's cost under the follower's response, as a quadratic in stacked v.

        Returns:
            QuadraticForm with J2(k0, x0; alpha(x0, v), v) = v'Qv + 2l'v + c
        """
        stages = spec.N - k0

        def leader_cost(z: np.ndarray) -> float:
            v = z.reshape(stages, spec.m2)
            traj = self.follower_service.response(spec, fc, k0, x0, v)
            return self.game_model.cost(spec, 2, k0, x0, traj.u, v)

        return probe_quadratic(leader_cost, stages * spec.m2)

    def solve_precommit(self, spec: GameSpec, k0: Optional[int] = None, x0: Optional[np.ndarray] = None) -> PrecommitSolution:
        """
        Solve the leader's problem once over the whole horizon from (k0, x0).

        Args:
            spec: Game data
            k0: Start time (defaults to spec.t)
            x0: State at k0 (defaults to spec.x)

        Returns:
            PrecommitSolution with the minimizing leader controls and the follower's response

        Raises:
            NotSolvableError: Propagated from the follower's recursion
            NotUniqueError: If the reduced quadratic is not positive definite
        """
        k0 = spec.t if k0 is None else k0
        x0 = initial_state(spec, x0)
        stages = spec.N - k0

        fc = self.follower_service.riccati(spec, base_time=k0)
        quad = self.reduced_quadratic(spec, fc, k0, x0)
        pivots = symmetric_pivots(quad.Q)
        min_pivot = float(pivots.min())
        if min_pivot <= config.UNIQUENESS_RTOL * (1.0 + inf_norm(quad.Q)):
            logger.error(f"Reduced leader quadratic is singular at ({k0}, {x0.tolist()})")
            raise NotUniqueError("No unique precommitted solution: reduced leader Hessian is singular", min_pivot=min_pivot)
        try:
            z = solve_linear(quad.Q, -quad.l, name="reduced Hessian")
        except SingularMatrixError as e:
            raise NotUniqueError(f"No unique precommitted solution: {e.message}", min_pivot=min_pivot)

        v_hat = z.reshape(stages, spec.m2)
        traj = self.follower_service.response(spec, fc, k0, x0, v_hat)
        gradient = quad.Q @ z + quad.l
        residual = float(np.linalg.norm(gradient))

        logger.info(f"Precommitted solution at ({k0}, {x0.tolist()}) solved, gradient residual {residual:.2e}")
        return PrecommitSolution(
            start=k0,
            x0=x0,
            u_hat=traj.u,
            v_hat=v_hat,
            X_hat=traj.X,
            J1=self.game_model.cost(spec, 1, k0, x0, traj.u, v_hat),
            J2=self.game_model.cost(spec, 2, k0, x0, traj.u, v_hat),
            gradient_residual=residual,
            stage_residuals=np.linalg.norm(gradient.reshape(stages, spec.m2), axis=1).tolist(),
            min_pivot=min_pivot
        )

    def inconsistency_report(self, spec: GameSpec, tol: float = config.CONSISTENCY_TOL) -> ConsistencyReport:
        """
        Re-solve the precommitted problem along its own trajectory.

        For each tau in t+1..N-1 the problem is re-posed at (tau, X_hat_tau) and
        the re-solved controls are compared with the truncation of the original.

        Returns:
            ConsistencyReport; inconsistent when any control differs by more than ``tol``
        """
        base = self.solve_precommit(spec)
        rows = []
        for tau in range(spec.t + 1, spec.N):
            again = self.solve_precommit(spec, tau, base.state(tau))
            dv = np.linalg.norm(again.v_hat - base.v_hat[tau - base.start:], axis=1)
            du = np.linalg.norm(again.u_hat - base.u_hat[tau - base.start:], axis=1)
            max_dv, max_du = float(dv.max()), float(du.max())
            verdict = "consistent" if max_dv <= tol else "inconsistent"
            rows.append(ConsistencyRow(tau=tau, max_dv=max_dv, max_du=max_du, verdict=verdict))
            logger.debug(f"Precommit re-solve at tau={tau}: max |dv| {max_dv:.3e}")

        consistent = all(row.verdict == "consistent" for row in rows)
        if not consistent:
            logger.info("Precommitted solution is time-inconsistent")
        return ConsistencyReport(mode="precommit", tolerance=tol, rows=rows, consistent=consistent)
