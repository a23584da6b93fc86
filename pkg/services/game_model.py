from typing import List, NamedTuple
import logging

import numpy as np

from exceptions import DimensionError, InputError
from matkit import is_positive_semidefinite, is_symmetric
from models.game import GameSpec, WEIGHT_FIELDS

logger = logging.getLogger(__name__)


class StackedDynamics(NamedTuple):
    """Stacked states X_{k0+1..N} = Phi x0 + Gu u + Gv v, each block row n tall."""

    Phi: np.ndarray
    Gu: np.ndarray
    Gv: np.ndarray


class GameModelService:
    """Service class for spec validation, simulation and cost evaluation."""

    def validate(self, spec: GameSpec) -> List[str]:
        """
        Check every shape and weight condition of a spec.

        Args:
            spec: GameSpec to check

        Returns:
            List of violations, each naming the field and the failed check;
            empty when the spec is usable
        """
        n, m1, m2 = spec.n, spec.m1, spec.m2
        expected = {
            "A": (n, n, "n", "n"),
            "B1": (n, m1, "n", "m1"),
            "B2": (n, m2, "n", "m2"),
            "Q1": (n, n, "n", "n"),
            "Q2": (n, n, "n", "n"),
            "R1": (m1, m1, "m1", "m1"),
            "R2": (m1, m1, "m1", "m1"),
            "W1": (m2, m2, "m2", "m2"),
            "W2": (m2, m2, "m2", "m2"),
            "G1": (n, n, "n", "n"),
            "G2": (n, n, "n", "n"),
        }

        violations: List[str] = []
        well_shaped = set()
        for name, (rows, cols, row_label, col_label) in expected.items():
            matrix = getattr(spec, name)
            ok = True
            if matrix.shape[0] != rows:
                violations.append(f"{name} rows ≠ {row_label}")
                ok = False
            if matrix.shape[1] != cols:
                violations.append(f"{name} cols ≠ {col_label}")
                ok = False
            if ok:
                well_shaped.add(name)

        if spec.x.shape[0] != n:
            violations.append("x length ≠ n")
        if spec.N <= 2:
            violations.append("N must be > 2")
        if not 0 <= spec.t < spec.N:
            violations.append("t outside [0, N)")

        for name in WEIGHT_FIELDS:
            if name not in well_shaped:
                continue
            weight = getattr(spec, name)
            if not is_symmetric(weight):
                violations.append(f"{name} not symmetric")
            elif not is_positive_semidefinite(weight):
                violations.append(f"{name} not positive semidefinite")

        if violations:
            logger.info(f"Spec has {len(violations)} violation(s): {violations}")
        return violations

    def _check_sequences(self, spec: GameSpec, k0: int, x0: np.ndarray, u: np.ndarray, v: np.ndarray) -> None:
        if not 0 <= k0 <= spec.N:
            raise InputError(f"Start time {k0} outside [0, {spec.N}]", field="k0", value=k0)
        stages = spec.N - k0
        if x0.shape != (spec.n,):
            raise DimensionError("Initial state has wrong length", operation="simulate",
                                 expected=(spec.n,), actual=x0.shape)
        if u.shape != (stages, spec.m1):
            raise DimensionError("Follower controls have wrong shape", operation="simulate",
                                 expected=(stages, spec.m1), actual=u.shape)
        if v.shape != (stages, spec.m2):
            raise DimensionError("Leader controls have wrong shape", operation="simulate",
                                 expected=(stages, spec.m2), actual=v.shape)

    def simulate(self, spec: GameSpec, k0: int, x0: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
        """
        Run the state equation X_{k+1} = A X_k + B1 u_k + B2 v_k.

        Args:
            spec: Game data
            k0: Start time
            x0: State at k0
            u: Follower controls, one row per stage k0..N-1
            v: Leader controls, one row per stage k0..N-1

        Returns:
            States X_{k0..N}, one row per time

        Raises:
            DimensionError: If the sequences do not match the spec
        """
        x0 = np.asarray(x0, dtype=np.float64).reshape(-1)
        u = as_controls(u, spec.m1)
        v = as_controls(v, spec.m2)
        self._check_sequences(spec, k0, x0, u, v)

        X = np.empty((spec.N - k0 + 1, spec.n))
        X[0] = x0
        for j in range(spec.N - k0):
            X[j + 1] = spec.A @ X[j] + spec.B1 @ u[j] + spec.B2 @ v[j]
        return X

    def cost(self, spec: GameSpec, which: int, k0: int, x0: np.ndarray, u: np.ndarray, v: np.ndarray) -> float:
        """
        Quadratic cost of one player from time k0.

        Args:
            spec: Game data
            which: 1 for the follower, 2 for the leader
            k0: Start time
            x0: State at k0
            u: Follower controls on k0..N-1
            v: Leader controls on k0..N-1

        Returns:
            sum_k (X'QX + u'Ru + v'Wv) + X_N' G X_N
        """
        Q, R, W, G = spec.weights(which)
        X = self.simulate(spec, k0, x0, u, v)
        u = as_controls(u, spec.m1)
        v = as_controls(v, spec.m2)
        running = (
            np.einsum("ki,ij,kj->", X[:-1], Q, X[:-1])
            + np.einsum("ki,ij,kj->", u, R, u)
            + np.einsum("ki,ij,kj->", v, W, v)
        )
        return float(running + X[-1] @ G @ X[-1])

    def stacked_dynamics(self, spec: GameSpec, k0: int) -> StackedDynamics:
        """
        Stacked linear map from (x0, u, v) to the states X_{k0+1}, ..., X_N.

        Returns:
            StackedDynamics whose block row j is time k0 + 1 + j
        """
        n, m1, m2 = spec.n, spec.m1, spec.m2
        stages = spec.N - k0
        Phi = np.zeros((stages * n, n))
        Gu = np.zeros((stages * n, stages * m1))
        Gv = np.zeros((stages * n, stages * m2))

        power = np.eye(n)
        powers = [power]
        for _ in range(stages):
            power = spec.A @ power
            powers.append(power)

        for row in range(stages):
            rows = slice(row * n, (row + 1) * n)
            Phi[rows] = powers[row + 1]
            for col in range(row + 1):
                lag = powers[row - col]
                Gu[rows, col * m1:(col + 1) * m1] = lag @ spec.B1
                Gv[rows, col * m2:(col + 1) * m2] = lag @ spec.B2
        return StackedDynamics(Phi=Phi, Gu=Gu, Gv=Gv)


def as_controls(seq, dim: int) -> np.ndarray:
    """Control sequence as a float array with one row per stage; 1-D input is read as scalar controls."""
    arr = np.asarray(seq, dtype=np.float64)
    if arr.ndim == 1 and dim == 1:
        return arr.reshape(-1, 1)
    if arr.ndim == 1 and arr.size == 0:
        return arr.reshape(0, dim)
    return arr
