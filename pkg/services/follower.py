from typing import Optional
import logging

import numpy as np

import config
from exceptions import InputError, MATRIX_M, NotSolvableError, SingularMatrixError
from matkit import as_vector, is_positive_definite, min_lu_pivot, solve_linear, symmetrize
from models.coefficients import FollowerCoeffs
from models.game import GameSpec, Trajectory
from models.solutions import DeviationReport
from services.game_model import GameModelService, as_controls
from services.quadratic import probe_quadratic

logger = logging.getLogger(__name__)


class FollowerService:
    """Service class for the follower's Riccati recursion and response map."""

    def __init__(self, game_model: Optional[GameModelService] = None):
        """
        Initialize the follower service.

        Args:
            game_model: GameModelService instance (creates default if None)
        """
        self.game_model = game_model or GameModelService()

    def riccati(self, spec: GameSpec, base_time: Optional[int] = None) -> FollowerCoeffs:
        """
        Backward Riccati recursion of the follower from P_N = G1.

        At each stage M_k = B1'P_{k+1}B1 + R1 must be positive definite; then
        H1 = M^-1 B1'PA, H2 = M^-1 B1'PB2, H3 = M^-1 B1' and the induced
        matrices A~ = A - B1H1, B~ = B2 - B1H2, C~ = -B1H3 and
        C = (B2' - B2'PB1 M^-1 B1')PA are recorded.

        Args:
            spec: Game data
            base_time: Earliest stage to compute (defaults to spec.t)

        Returns:
            FollowerCoeffs for stages base_time..N-1

        Raises:
            NotSolvableError: If some M_k is not positive definite
        """
        base = spec.t if base_time is None else base_time
        if not 0 <= base < spec.N:
            raise InputError(f"Base time {base} outside [0, {spec.N})", field="base_time", value=base)

        A, B1, B2 = spec.A, spec.B1, spec.B2
        stages = spec.N - base
        n, m1, m2 = spec.n, spec.m1, spec.m2

        P = np.empty((stages + 1, n, n))
        M = np.empty((stages, m1, m1))
        H1 = np.empty((stages, m1, n))
        H2 = np.empty((stages, m1, m2))
        H3 = np.empty((stages, m1, n))
        Atil = np.empty((stages, n, n))
        Btil = np.empty((stages, n, m2))
        Ctil = np.empty((stages, n, n))
        Cmat = np.empty((stages, m2, n))

        P[stages] = spec.G1
        for k in range(spec.N - 1, base - 1, -1):
            j = k - base
            P_next = P[j + 1]
            Mk = B1.T @ P_next @ B1 + spec.R1
            if not is_positive_definite(Mk):
                logger.error(f"Follower weight M is not positive definite at stage {k}")
                raise NotSolvableError(stage=k, matrix=MATRIX_M, reason="is not positive definite")

            B1tP = B1.T @ P_next
            try:
                H1[j] = solve_linear(Mk, B1tP @ A, name=MATRIX_M)
                H2[j] = solve_linear(Mk, B1tP @ B2, name=MATRIX_M)
                H3[j] = solve_linear(Mk, B1.T, name=MATRIX_M)
            except SingularMatrixError:
                raise NotSolvableError(stage=k, matrix=MATRIX_M)

            M[j] = Mk
            Atil[j] = A - B1 @ H1[j]
            Btil[j] = B2 - B1 @ H2[j]
            Ctil[j] = -B1 @ H3[j]
            Cmat[j] = (B2.T - B2.T @ P_next @ B1 @ H3[j]) @ P_next @ A
            P[j] = symmetrize(spec.Q1 + A.T @ P_next @ A - A.T @ P_next @ B1 @ H1[j])

            logger.debug(f"Riccati stage {k}: min pivot of M {min_lu_pivot(Mk):.3e}")

        return FollowerCoeffs(
            base_time=base,
            horizon=spec.N,
            P=P,
            M=M,
            H1=H1,
            H2=H2,
            H3=H3,
            Atil=Atil,
            Btil=Btil,
            Ctil=Ctil,
            Cmat=Cmat
        )

    def response(self, spec: GameSpec, fc: FollowerCoeffs, k0: int, x0: np.ndarray, v: np.ndarray) -> Trajectory:
        """
        Follower's response to a leader control sequence.

        The backward variable depends on v only: pi_N = 0 and
        pi_k = C_k'v_k + A~_k'pi_{k+1}. The state then runs forward as
        X_{k+1} = A~X_k + B~v_k + C~pi_{k+1} with
        u_k = -(H1X_k + H2v_k + H3pi_{k+1}).

        Args:
            spec: Game data
            fc: Follower coefficients with base time at most k0
            k0: Start time
            x0: State at k0
            v: Leader controls on k0..N-1

        Returns:
            Trajectory with X, u, v and pi from k0

        Raises:
            InputError: If k0 precedes the coefficients' base time
        """
        if not fc.base_time <= k0 < spec.N:
            raise InputError(
                f"Start time {k0} outside the coefficient range [{fc.base_time}, {spec.N})",
                field="k0",
                value=k0
            )
        x0 = as_vector(x0)
        v = as_controls(v, spec.m2)
        stages = spec.N - k0
        if v.shape != (stages, spec.m2) or x0.shape != (spec.n,):
            # reuse the shape checks of the state equation
            self.game_model.simulate(spec, k0, x0, np.zeros((stages, spec.m1)), v)

        pi = np.zeros((stages + 1, spec.n))
        for k in range(spec.N - 1, k0 - 1, -1):
            s = fc.stage(k)
            j = k - k0
            pi[j] = s.C.T @ v[j] + s.Atil.T @ pi[j + 1]

        X = np.empty((stages + 1, spec.n))
        u = np.empty((stages, spec.m1))
        X[0] = x0
        for k in range(k0, spec.N):
            s = fc.stage(k)
            j = k - k0
            u[j] = -(s.H1 @ X[j] + s.H2 @ v[j] + s.H3 @ pi[j + 1])
            X[j + 1] = s.Atil @ X[j] + s.Btil @ v[j] + s.Ctil @ pi[j + 1]

        return Trajectory(start=k0, X=X, u=u, v=v.copy(), pi=pi)

    def check_response_equilibrium(
        self,
        spec: GameSpec,
        fc: FollowerCoeffs,
        k0: int,
        x0: np.ndarray,
        v: np.ndarray,
        u: Optional[np.ndarray] = None,
        probes: int = config.DEFAULT_PROBES,
        seed: int = config.DEFAULT_SEED
    ) -> DeviationReport:
        """
        One-stage deviation test of the follower.

        For every stage k the follower's cost J1(k, X_k; (u_k', u_{k+1..}), v)
        is compared at the played u_k and at probe controls: the exact
        minimizer over u_k (from a probed quadratic), the coordinate
        directions and random perturbations of scale 0.1.

        Args:
            spec: Game data
            fc: Follower coefficients
            k0: Start time
            x0: State at k0
            v: Leader controls on k0..N-1
            u: Follower controls to test (defaults to the response to v)
            probes: Random probes per stage
            seed: Seed of the probe generator

        Returns:
            DeviationReport; a gain above 1e-8 means u is not per-stage optimal
        """
        v = as_controls(v, spec.m2)
        if u is None:
            u = self.response(spec, fc, k0, x0, v).u
        u = as_controls(u, spec.m1)
        X = self.game_model.simulate(spec, k0, x0, u, v)
        rng = np.random.default_rng(seed)

        gains = {}
        for k in range(k0, spec.N):
            j = k - k0
            tail_v = v[j:]

            def stage_cost(delta: np.ndarray) -> float:
                tail_u = u[j:].copy()
                tail_u[0] = tail_u[0] + delta
                return self.game_model.cost(spec, 1, k, X[j], tail_u, tail_v)

            played = stage_cost(np.zeros(spec.m1))
            candidates = [np.zeros(spec.m1)]
            quad = probe_quadratic(stage_cost, spec.m1)
            try:
                candidates.append(solve_linear(quad.Q, -quad.l))
            except SingularMatrixError:
                pass
            candidates.extend(config.PROBE_SCALE * np.eye(spec.m1))
            candidates.extend(-config.PROBE_SCALE * np.eye(spec.m1))
            candidates.extend(config.PROBE_SCALE * rng.standard_normal((probes, spec.m1)))
            gains[k] = max(played - stage_cost(delta) for delta in candidates)

        worst = max(gains, key=gains.get)
        return DeviationReport(stage_gains=gains, max_gain=gains[worst], worst_stage=worst)
