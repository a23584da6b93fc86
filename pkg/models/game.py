from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationInfo, field_validator

from matkit import as_vector

MATRIX_FIELDS = ("A", "B1", "B2", "Q1", "Q2", "R1", "R2", "W1", "W2", "G1", "G2")
WEIGHT_FIELDS = ("Q1", "Q2", "R1", "R2", "W1", "W2", "G1", "G2")
SPEC_FIELDS = ("n", "m1", "m2", "N", "t", "x") + MATRIX_FIELDS


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.float64)
    arr.setflags(write=False)
    return arr


def _coerce_matrix(value: Any, field: str) -> np.ndarray:
    try:
        arr = np.asarray(value, dtype=np.float64)
    except (TypeError, ValueError):
        raise ValueError(f"{field} must be an array of equal-length numeric row arrays")
    if arr.ndim != 2:
        raise ValueError(f"{field} must be a matrix (array of row arrays)")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{field} contains NaN or infinite entries")
    return _frozen(arr)


class GameSpec(BaseModel):
    """Problem data of a finite-horizon linear-quadratic leader-follower game.

    Player 1 is the follower (control ``u``), player 2 the leader (control ``v``).
    Shapes are not enforced here; ``GameModelService.validate`` reports them.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    n: int = Field(..., ge=1, description="State dimension")
    m1: int = Field(..., ge=1, description="Follower control dimension")
    m2: int = Field(..., ge=1, description="Leader control dimension")
    N: int = Field(..., ge=1, description="Horizon length")
    t: int = Field(0, ge=0, description="Base time")
    x: np.ndarray = Field(..., description="Initial state at the base time")
    A: np.ndarray
    B1: np.ndarray
    B2: np.ndarray
    Q1: np.ndarray
    Q2: np.ndarray
    R1: np.ndarray
    R2: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    G1: np.ndarray
    G2: np.ndarray

    @field_validator(*MATRIX_FIELDS, mode="before")
    @classmethod
    def validate_matrix(cls, v: Any, info: ValidationInfo) -> np.ndarray:
        """Coerce nested lists to finite float matrices."""
        return _coerce_matrix(v, info.field_name)

    @field_validator("x", mode="before")
    @classmethod
    def validate_state(cls, v: Any) -> np.ndarray:
        """Coerce the initial state to a finite float vector."""
        try:
            arr = np.asarray(v, dtype=np.float64).reshape(-1)
        except (TypeError, ValueError):
            raise ValueError("x must be an array of numbers")
        if not np.all(np.isfinite(arr)):
            raise ValueError("x contains NaN or infinite entries")
        return _frozen(arr)

    @classmethod
    def build(cls, **data: Any) -> "GameSpec":
        """Construct a spec, inferring ``n``, ``m1`` and ``m2`` from A, B1 and B2 when absent."""
        if "n" not in data:
            data["n"] = np.asarray(data["A"]).shape[0]
        if "m1" not in data:
            data["m1"] = np.asarray(data["B1"]).shape[1]
        if "m2" not in data:
            data["m2"] = np.asarray(data["B2"]).shape[1]
        return cls(**data)

    def replace(self, **matrices: Any) -> "GameSpec":
        """Same game with some matrices swapped out (validated again)."""
        return GameSpec(**{**self.to_document(), **matrices})

    def weights(self, player: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
        """
        Cost weights of one player.

        Args:
            player: 1 for the follower, 2 for the leader

        Returns:
            Tuple ``(Q, R, W, G)``
        """
        if player == 1:
            return self.Q1, self.R1, self.W1, self.G1
        if player == 2:
            return self.Q2, self.R2, self.W2, self.G2
        raise ValueError(f"player must be 1 or 2, got {player}")

    def to_document(self) -> Dict[str, Any]:
        """Plain JSON-compatible representation, the spec file format."""
        doc: Dict[str, Any] = {"n": self.n, "m1": self.m1, "m2": self.m2, "N": self.N, "t": self.t}
        doc["x"] = self.x.tolist()
        for name in MATRIX_FIELDS:
            doc[name] = getattr(self, name).tolist()
        return doc


class Trajectory(BaseModel):
    """States, controls and the follower's backward variable from a start time to N.

    Rows are stages: ``X[j]`` is the state at absolute time ``start + j``.
    """

    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    start: int
    X: np.ndarray
    u: np.ndarray
    v: np.ndarray
    pi: np.ndarray

    @property
    def horizon(self) -> int:
        return self.start + self.u.shape[0]

    def state(self, k: int) -> np.ndarray:
        return self.X[k - self.start]

    def follower(self, k: int) -> np.ndarray:
        return self.u[k - self.start]

    def leader(self, k: int) -> np.ndarray:
        return self.v[k - self.start]

    def adjoint(self, k: int) -> np.ndarray:
        return self.pi[k - self.start]


def initial_state(spec: GameSpec, x0: Optional[Any] = None) -> np.ndarray:
    """``x0`` as a float vector, defaulting to the spec's initial state."""
    if x0 is None:
        return np.array(spec.x, dtype=np.float64)
    return as_vector(x0)
