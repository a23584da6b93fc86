"""
Per-stage coefficient tables of the follower response and of the leader's lifted system.
"""

from enum import Enum
from typing import Dict, NamedTuple, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field


class ResponseAnchor(str, Enum):
    """Where the leader anchors the follower response it anticipates at stage k.

    BASE re-uses the response map started at the base pair (t0, x), so the lifted
    coefficients carry sums over the stages t0..k-1. STAGE re-anchors the
    response at (k, X_k), which empties those sums.
    """

    BASE = "base"
    STAGE = "stage"


class FollowerStage(NamedTuple):
    M: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    Atil: np.ndarray
    Btil: np.ndarray
    Ctil: np.ndarray
    C: np.ndarray
    P_next: np.ndarray


class FollowerCoeffs(BaseModel):
    """Riccati outputs of the follower problem for stages base_time..N-1.

    Stage arrays are stacked along axis 0 with row ``k - base_time``;
    ``P`` has one more row, the last one being ``P_N = G1``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base_time: int = Field(..., ge=0)
    horizon: int = Field(..., ge=1)
    P: np.ndarray
    M: np.ndarray
    H1: np.ndarray
    H2: np.ndarray
    H3: np.ndarray
    Atil: np.ndarray
    Btil: np.ndarray
    Ctil: np.ndarray
    Cmat: np.ndarray

    def _row(self, k: int) -> int:
        if not self.base_time <= k < self.horizon:
            raise IndexError(f"stage {k} outside [{self.base_time}, {self.horizon})")
        return k - self.base_time

    def stage(self, k: int) -> FollowerStage:
        """All coefficients of stage ``k``."""
        j = self._row(k)
        return FollowerStage(
            M=self.M[j],
            H1=self.H1[j],
            H2=self.H2[j],
            H3=self.H3[j],
            Atil=self.Atil[j],
            Btil=self.Btil[j],
            Ctil=self.Ctil[j],
            C=self.Cmat[j],
            P_next=self.P[j + 1],
        )

    def P_at(self, k: int) -> np.ndarray:
        if not self.base_time <= k <= self.horizon:
            raise IndexError(f"time {k} outside [{self.base_time}, {self.horizon}]")
        return self.P[k - self.base_time]

    def truncate(self, k0: int) -> "FollowerCoeffs":
        """Coefficients restricted to stages k0..N-1 (the recursion does not depend on the base)."""
        j = self._row(k0)
        return self.model_copy(update={
            "base_time": k0,
            "P": self.P[j:],
            "M": self.M[j:],
            "H1": self.H1[j:],
            "H2": self.H2[j:],
            "H3": self.H3[j:],
            "Atil": self.Atil[j:],
            "Btil": self.Btil[j:],
            "Ctil": self.Ctil[j:],
            "Cmat": self.Cmat[j:],
        })


class LeaderStage(NamedTuple):
    F: np.ndarray
    O: np.ndarray
    bH: np.ndarray
    bK: np.ndarray
    bL: np.ndarray
    bCt: np.ndarray
    bS: np.ndarray
    bD: np.ndarray
    SD: np.ndarray


class LeaderCoeffs(BaseModel):
    """Lifted 3n-dimensional system of the leader for stages base_time..N-1.

    ``Dik`` maps ``(i, k)`` to D_i^(k); ``SD`` holds the row sums over i.
    ``bCt`` stores the 3n x n block whose transpose enters the recursion.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base_time: int = Field(..., ge=0)
    horizon: int = Field(..., ge=1)
    anchor: ResponseAnchor = ResponseAnchor.BASE
    Dik: Dict[Tuple[int, int], np.ndarray]
    SD: np.ndarray
    F: np.ndarray
    O: np.ndarray
    bH: np.ndarray
    bK: np.ndarray
    bL: np.ndarray
    bCt: np.ndarray
    bS: np.ndarray
    bD: np.ndarray
    bG: np.ndarray
    T: Optional[np.ndarray] = None

    def stage(self, k: int) -> LeaderStage:
        if not self.base_time <= k < self.horizon:
            raise IndexError(f"stage {k} outside [{self.base_time}, {self.horizon})")
        j = k - self.base_time
        return LeaderStage(
            F=self.F[j],
            O=self.O[j],
            bH=self.bH[j],
            bK=self.bK[j],
            bL=self.bL[j],
            bCt=self.bCt[j],
            bS=self.bS[j],
            bD=self.bD[j],
            SD=self.SD[j],
        )


class TTable(BaseModel):
    """Backward decoupling of the lifted forward-backward system, Z_k = T_k X_k.

    ``gap[k]`` is the matrix I - (C~' - B~ F^-1 D') T_{k+1} that must be
    invertible, ``closed_loop[k]`` maps X_k to X_{k+1}, and the two gains give
    v_k and u_k as linear functions of X_k.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    base_time: int
    horizon: int
    T: np.ndarray
    gap: np.ndarray
    closed_loop: np.ndarray
    leader_gain: np.ndarray
    follower_gain: np.ndarray
    cond_F: np.ndarray
    cond_gap: np.ndarray

    def T_at(self, k: int) -> np.ndarray:
        return self.T[k - self.base_time]

    def gap_at(self, k: int) -> np.ndarray:
        return self.gap[k - self.base_time]
