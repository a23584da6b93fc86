"""
Open-loop equilibrium of the leader-follower game.

The follower's response turns the leader's problem into a forward-backward
system in the state X and the stacked adjoint bZ = [Z; Zbar; pi] of height 3n.
The backward T-recursion decouples it as bZ_k = T_k X_k, after which the
equilibrium is a forward pass.
"""

from typing import Dict, Optional, Tuple
import logging

import numpy as np

import config
from exceptions import (
    InputError,
    MATRIX_F,
    MATRIX_GAP,
    SingularMatrixError,
    singular_stage_matrix
)
from matkit import condition_number, is_singular, min_lu_pivot, solve_linear, inf_norm
from models.coefficients import FollowerCoeffs, LeaderCoeffs, ResponseAnchor, TTable
from models.game import GameSpec, initial_state
from models.solutions import EquilibriumSolution, StageDiagnostics, StationarityReport
from services.follower import FollowerService
from services.game_model import as_controls

logger = logging.getLogger(__name__)


class EquilibriumService:
    """Service class for the leader's lifted system, the T-recursion and the equilibrium solve."""

    def __init__(self, follower_service: Optional[FollowerService] = None):
        """
        Initialize the equilibrium service.

        Args:
            follower_service: FollowerService instance (creates default if None)
        """
        self.follower_service = follower_service or FollowerService()

    def d_matrices(self, fc: FollowerCoeffs, t0: int) -> Dict[Tuple[int, int], np.ndarray]:
        """
        Cross-stage coupling matrices D_i^(k) for t0 <= i < k <= N-1.

        D_i^(k) = C_k A~_{k-1}...A~_{i+1} C~_i' A~_{i+1}'...A~_{k-1}', where an
        empty product is the identity.

        Returns:
            Mapping (i, k) -> m2 x n matrix
        """
        table = {}
        for k in range(t0 + 1, fc.horizon):
            C_k = fc.stage(k).C
            chain = np.eye(C_k.shape[1])  # A~_{k-1}...A~_{i+1}
            for i in range(k - 1, t0 - 1, -1):
                if i < k - 1:
                    chain = chain @ fc.stage(i + 1).Atil
                table[(i, k)] = C_k @ chain @ fc.stage(i).Ctil.T @ chain.T
        return table

    def leader_coeffs(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        t0: int,
        anchor: ResponseAnchor = ResponseAnchor.BASE
    ) -> LeaderCoeffs:
        """
        Build the lifted per-stage coefficients of the leader's problem.

        Args:
            spec: Game data
            fc: Follower coefficients covering stages t0..N-1
            t0: Base time, the lower limit of the sums over D_i^(k)
            anchor: BASE sums over i = t0..k-1; STAGE leaves every sum empty

        Returns:
            LeaderCoeffs without the T table
        """
        if t0 < fc.base_time:
            raise InputError(f"Base time {t0} precedes follower coefficients ({fc.base_time})", field="t0", value=t0)

        n, m1, m2 = spec.n, spec.m1, spec.m2
        A, B1, R2 = spec.A, spec.B1, spec.R2
        stages = spec.N - t0
        Dik = self.d_matrices(fc, t0) if anchor == ResponseAnchor.BASE else {}

        SD = np.zeros((stages, m2, n))
        F = np.empty((stages, m2, m2))
        O = np.empty((stages, m2, n))
        bH = np.empty((stages, 3 * n, n))
        bK = np.empty((stages, 3 * n, m2))
        bL = np.empty((stages, 3 * n, 3 * n))
        bCt = np.empty((stages, 3 * n, n))
        bS = np.empty((stages, 3 * n, m1))
        bD = np.empty((stages, 3 * n, m2))
        zn = np.zeros((n, n))

        for k in range(t0, spec.N):
            j = k - t0
            s = fc.stage(k)
            for i in range(t0, k):
                if (i, k) in Dik:
                    SD[j] += Dik[(i, k)]
            SDt = SD[j].T
            H1tR2 = s.H1.T @ R2

            F[j] = spec.W2 + s.H2.T @ R2 @ s.H2 + SD[j] @ H1tR2 @ s.H2
            O[j] = s.H2.T @ R2 @ s.H1 + SD[j] @ H1tR2 @ s.H1
            bH[j] = np.vstack([spec.Q2, H1tR2 @ s.H1, zn])
            bK[j] = np.vstack([np.zeros((n, m2)), H1tR2 @ s.H2, s.C.T])
            bL[j] = np.block([
                [A.T, zn, zn],
                [-s.H1.T @ B1.T, s.Atil.T, H1tR2 @ s.H3],
                [zn, zn, s.Atil.T],
            ])
            bCt[j] = np.vstack([zn, zn, s.Ctil.T])
            bS[j] = np.vstack([np.zeros((n, m1)), np.zeros((n, m1)), s.H3.T])
            bD[j] = np.vstack([
                s.Btil - B1 @ s.H1 @ SDt,
                s.Btil + s.Atil @ SDt,
                s.H3.T @ R2 @ s.H2 + s.H3.T @ R2 @ s.H1 @ SDt,
            ])

        bG = np.vstack([spec.G2, zn, zn])
        return LeaderCoeffs(
            base_time=t0,
            horizon=spec.N,
            anchor=anchor,
            Dik=Dik,
            SD=SD,
            F=F,
            O=O,
            bH=bH,
            bK=bK,
            bL=bL,
            bCt=bCt,
            bS=bS,
            bD=bD,
            bG=bG
        )

    def t_recursion(self, spec: GameSpec, fc: FollowerCoeffs, lc: LeaderCoeffs) -> TTable:
        """
        Backward decoupling T_N = G,
        T_k = (L - K F^-1 D') T_{k+1} [I - (C~' - B~F^-1 D')T_{k+1}]^-1 (A~ - B~F^-1 O) + H - K F^-1 O.

        Returns:
            TTable with T, the gap matrices, the closed loop and both feedback gains

        Raises:
            NotSolvableError: If some F_k (checked first, at every stage) or some
                gap matrix is singular
        """
        n, m2 = spec.n, spec.m2
        t0 = lc.base_time
        stages = spec.N - t0

        for k in range(t0, spec.N):
            F = lc.stage(k).F
            if is_singular(F):
                logger.error(f"Leader weight F is singular at stage {k}")
                raise singular_stage_matrix(k, MATRIX_F, min_lu_pivot(F), config.SINGULAR_RTOL * inf_norm(F))

        T = np.empty((stages + 1, 3 * n, n))
        gap = np.empty((stages, n, n))
        closed_loop = np.empty((stages, n, n))
        leader_gain = np.empty((stages, m2, n))
        follower_gain = np.empty((stages, spec.m1, n))
        cond_F = np.empty(stages)
        cond_gap = np.empty(stages)

        T[stages] = lc.bG
        eye = np.eye(n)
        for k in range(spec.N - 1, t0 - 1, -1):
            j = k - t0
            s = fc.stage(k)
            ls = lc.stage(k)
            T_next = T[j + 1]

            Fi_D = solve_linear(ls.F, ls.bD.T, name=MATRIX_F)
            Fi_O = solve_linear(ls.F, ls.O, name=MATRIX_F)
            gap[j] = eye - (ls.bCt.T - s.Btil @ Fi_D) @ T_next
            try:
                closed_loop[j] = solve_linear(gap[j], s.Atil - s.Btil @ Fi_O, name=MATRIX_GAP)
            except SingularMatrixError as e:
                logger.error(f"Gap matrix is singular at stage {k}")
                raise singular_stage_matrix(k, MATRIX_GAP, e.details.get("pivot"), e.details.get("threshold"))

            T[j] = (ls.bL - ls.bK @ Fi_D) @ T_next @ closed_loop[j] + ls.bH - ls.bK @ Fi_O
            leader_gain[j] = -(Fi_O + Fi_D @ T_next @ closed_loop[j])
            follower_gain[j] = -(s.H1 + s.H2 @ leader_gain[j] + ls.bS.T @ T_next @ closed_loop[j])
            cond_F[j] = condition_number(ls.F)
            cond_gap[j] = condition_number(gap[j])
            logger.debug(f"T-recursion stage {k}: cond(F) {cond_F[j]:.3e}, cond(gap) {cond_gap[j]:.3e}")

        return TTable(
            base_time=t0,
            horizon=spec.N,
            T=T,
            gap=gap,
            closed_loop=closed_loop,
            leader_gain=leader_gain,
            follower_gain=follower_gain,
            cond_F=cond_F,
            cond_gap=cond_gap
        )

    def coefficients(
        self,
        spec: GameSpec,
        k0: int,
        anchor: ResponseAnchor = ResponseAnchor.BASE
    ) -> Tuple[FollowerCoeffs, LeaderCoeffs, TTable]:
        """Follower coefficients, leader coefficients with T filled in, and the T table, all based at k0."""
        fc = self.follower_service.riccati(spec, base_time=k0)
        lc = self.leader_coeffs(spec, fc, k0, anchor)
        tt = self.t_recursion(spec, fc, lc)
        return fc, lc.model_copy(update={"T": tt.T}), tt

    def solve_equilibrium(
        self,
        spec: GameSpec,
        k0: Optional[int] = None,
        x0: Optional[np.ndarray] = None,
        anchor: ResponseAnchor = ResponseAnchor.BASE
    ) -> EquilibriumSolution:
        """
        Solve for the open-loop equilibrium from (k0, x0).

        Leader coefficients are always rebuilt with base time k0.

        Args:
            spec: Game data
            k0: Start time (defaults to spec.t)
            x0: State at k0 (defaults to spec.x)
            anchor: Response anchoring of the leader's stage problems

        Returns:
            EquilibriumSolution

        Raises:
            NotSolvableError: With the stage and the name of the failing matrix
        """
        k0 = spec.t if k0 is None else k0
        x0 = initial_state(spec, x0)
        fc, lc, tt = self.coefficients(spec, k0, anchor)

        stages = spec.N - k0
        X = np.empty((stages + 1, spec.n))
        u = np.empty((stages, spec.m1))
        v = np.empty((stages, spec.m2))
        bZ = np.empty((stages + 1, 3 * spec.n))
        X[0] = x0
        for j in range(stages):
            X[j + 1] = tt.closed_loop[j] @ X[j]
            v[j] = tt.leader_gain[j] @ X[j]
            u[j] = tt.follower_gain[j] @ X[j]
        for j in range(stages + 1):
            bZ[j] = tt.T[j] @ X[j]

        check = self.follower_service.response(spec, fc, k0, x0, v)
        mismatch = float(np.max(np.abs(check.u - u), initial=0.0))
        if mismatch > config.RESPONSE_TOL * (1.0 + float(np.max(np.abs(u), initial=0.0))):
            logger.warning(f"Equilibrium follower controls differ from the response map by {mismatch:.3e}")

        diagnostics = [
            StageDiagnostics(k=k0 + j, cond_F=float(tt.cond_F[j]), cond_gap=float(tt.cond_gap[j]))
            for j in range(stages)
        ]
        logger.info(f"Equilibrium solved at ({k0}, {x0.tolist()}) with {anchor.value} anchoring")
        return EquilibriumSolution(
            start=k0,
            x0=x0,
            anchor=anchor,
            u_star=u,
            v_star=v,
            X_star=X,
            bZ_star=bZ,
            diagnostics=diagnostics,
            response_mismatch=mismatch
        )

    def leader_adjoint(self, spec: GameSpec, X: np.ndarray) -> np.ndarray:
        """Z_N = G2 X_N, Z_k = Q2 X_k + A'Z_{k+1}, for the rows of X."""
        Z = np.empty_like(X)
        Z[-1] = spec.G2 @ X[-1]
        for j in range(X.shape[0] - 2, -1, -1):
            Z[j] = spec.Q2 @ X[j] + spec.A.T @ Z[j + 1]
        return Z

    def zbar_adjoint(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        start: int,
        X: np.ndarray,
        v: np.ndarray,
        pi: np.ndarray,
        Z: np.ndarray,
        k: int
    ) -> np.ndarray:
        """
        Second adjoint of the stage-k problem on start..N.

        Zbar_N = 0; for l >= k, Zbar_l = H1'R2 w_l - H1'B1'Z_{l+1} + A~'Zbar_{l+1}
        with w_l = H1X_l + H2v_l + H3pi_{l+1}; for l < k, Zbar_l = A~'Zbar_{l+1}.

        Returns:
            Array with one row per time start..N
        """
        v = as_controls(v, spec.m2)
        Zbar = np.zeros_like(X)
        for ell in range(spec.N - 1, start - 1, -1):
            j = ell - start
            s = fc.stage(ell)
            Zbar[j] = s.Atil.T @ Zbar[j + 1]
            if ell >= k:
                w = s.H1 @ X[j] + s.H2 @ v[j] + s.H3 @ pi[j + 1]
                Zbar[j] += s.H1.T @ spec.R2 @ w - s.H1.T @ spec.B1.T @ Z[j + 1]
        return Zbar

    def raw_adjoints(self, spec: GameSpec, fc: FollowerCoeffs, start: int, X: np.ndarray, v: np.ndarray) -> np.ndarray:
        """Stacked adjoint [Z; Zbar; pi] from its own backward recursions rather than from T."""
        traj = self.follower_service.response(spec, fc, start, X[0], v)
        Z = self.leader_adjoint(spec, X)
        Zbar = self.zbar_adjoint(spec, fc, start, X, v, traj.pi, Z, start)
        return np.hstack([Z, Zbar, traj.pi])

    def stationary_residual(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        lc: LeaderCoeffs,
        sol: EquilibriumSolution
    ) -> StationarityReport:
        """
        Evaluate F_k v_k + O_k X_k + D_k' bZ_{k+1} at every stage.

        The stacked adjoint is taken once from the solution (T_k X_k) and once
        from the raw backward recursions started at the terminal data.

        Returns:
            StationarityReport with per-stage residual norms for both routes
        """
        raw = self.raw_adjoints(spec, fc, sol.start, sol.X_star, sol.v_star)
        residuals: Dict[int, float] = {}
        residuals_raw: Dict[int, float] = {}
        for k in range(sol.start, spec.N):
            j = k - sol.start
            ls = lc.stage(k)
            base = ls.F @ sol.v_star[j] + ls.O @ sol.X_star[j]
            residuals[k] = float(np.linalg.norm(base + ls.bD.T @ sol.bZ_star[j + 1]))
            residuals_raw[k] = float(np.linalg.norm(base + ls.bD.T @ raw[j + 1]))

        adjoint_gap = float(np.max(np.abs(raw - sol.bZ_star), initial=0.0))
        return StationarityReport(
            stage_residuals=residuals,
            stage_residuals_raw=residuals_raw,
            max_residual=max(residuals.values(), default=0.0),
            max_residual_raw=max(residuals_raw.values(), default=0.0),
            adjoint_gap=adjoint_gap
        )
