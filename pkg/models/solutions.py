"""
Result models of the precommitted and equilibrium solvers and of the verification oracles.
"""

from typing import Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .coefficients import ResponseAnchor


class PrecommitSolution(BaseModel):
    """Classic open-loop solution: the leader minimizes once, at (start, x0), over the whole horizon."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    start: int
    x0: np.ndarray
    u_hat: np.ndarray
    v_hat: np.ndarray
    X_hat: np.ndarray
    J1: float
    J2: float
    gradient_residual: float = Field(..., description="||Q v_hat + l|| of the reduced quadratic")
    stage_residuals: List[float] = Field(default_factory=list, description="Per-stage norm of the reduced gradient")
    min_pivot: float = Field(..., description="Smallest pivot of the reduced Hessian")

    def leader(self, k: int) -> np.ndarray:
        return self.v_hat[k - self.start]

    def follower(self, k: int) -> np.ndarray:
        return self.u_hat[k - self.start]

    def state(self, k: int) -> np.ndarray:
        return self.X_hat[k - self.start]


class StageDiagnostics(BaseModel):
    k: int
    cond_F: float
    cond_gap: float


class EquilibriumSolution(BaseModel):
    """Open-loop equilibrium controls, states and the stacked adjoint bZ = [Z; Zbar; pi]."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    start: int
    x0: np.ndarray
    anchor: ResponseAnchor = ResponseAnchor.BASE
    u_star: np.ndarray
    v_star: np.ndarray
    X_star: np.ndarray
    bZ_star: np.ndarray
    diagnostics: List[StageDiagnostics] = Field(default_factory=list)
    response_mismatch: float = 0.0

    @property
    def n(self) -> int:
        return self.X_star.shape[1]

    @property
    def horizon(self) -> int:
        return self.start + self.v_star.shape[0]

    @property
    def Z_star(self) -> np.ndarray:
        return self.bZ_star[:, :self.n]

    @property
    def Zbar_star(self) -> np.ndarray:
        return self.bZ_star[:, self.n:2 * self.n]

    @property
    def pi_star(self) -> np.ndarray:
        return self.bZ_star[:, 2 * self.n:]

    def leader(self, k: int) -> np.ndarray:
        return self.v_star[k - self.start]

    def follower(self, k: int) -> np.ndarray:
        return self.u_star[k - self.start]

    def state(self, k: int) -> np.ndarray:
        return self.X_star[k - self.start]


class StationarityReport(BaseModel):
    """Residuals of F_k v_k + O_k X_k + D_k' Z_{k+1} along both adjoint routes."""

    stage_residuals: Dict[int, float]
    stage_residuals_raw: Dict[int, float]
    max_residual: float
    max_residual_raw: float
    adjoint_gap: float


class VariationReport(BaseModel):
    """Second-order expansion of the leader's cost under a one-stage perturbation eps * vtil."""

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    k: int
    eps: float
    vtil: np.ndarray
    lhs: float
    first_order: float
    second_order: float
    abs_error: float
    linear_coefficient: np.ndarray
    costate_coefficient: np.ndarray
    costate_gap: float
    quadratic_form: float


class DeviationReport(BaseModel):
    """Largest cost decrease a single-stage deviation achieves, per stage."""

    stage_gains: Dict[int, float]
    max_gain: float
    worst_stage: Optional[int] = None


class ConsistencyRow(BaseModel):
    tau: int
    max_dv: Optional[float] = None
    max_du: Optional[float] = None
    verdict: str
    error: Optional[str] = None


class ConsistencyReport(BaseModel):
    mode: str
    tolerance: float
    rows: List[ConsistencyRow]
    consistent: bool

    @property
    def verdict(self) -> str:
        return "time-consistent" if self.consistent else "time-inconsistent"


class FixedPointResult(BaseModel):
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    start: int
    v: np.ndarray
    iterations: int
    converged: bool
    last_update: float
