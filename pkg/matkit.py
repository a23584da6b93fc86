"""
Dense real-matrix kernel shared by the solver services.

Every inverse in the solvers goes through ``solve_linear``: a row-pivoted LU
factorization whose pivots are checked against a threshold relative to the
infinity norm of the matrix. Definiteness checks read the inertia of a
symmetric LDL^T factorization.
"""

import warnings
from typing import Union

import numpy as np
import numpy.typing as npt
import scipy.linalg

import config
from exceptions import DimensionError, SingularMatrixError

Mat = npt.NDArray[np.float64]
Vec = npt.NDArray[np.float64]

__all__ = [
    "Mat",
    "Vec",
    "as_matrix",
    "as_vector",
    "mat_mul",
    "inf_norm",
    "symmetrize",
    "is_symmetric",
    "symmetric_pivots",
    "is_positive_definite",
    "is_positive_semidefinite",
    "min_lu_pivot",
    "is_singular",
    "solve_linear",
    "condition_number",
]


def as_matrix(a, name: str = "matrix") -> Mat:
    """Coerce ``a`` to a 2-D float64 array."""
    arr = np.asarray(a, dtype=np.float64)
    if arr.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got {arr.ndim}-D", operation="as_matrix", actual=arr.shape)
    return arr


def as_vector(x) -> Vec:
    """Flatten ``x`` to a 1-D float64 array."""
    arr = np.asarray(x, dtype=np.float64)
    return arr.reshape(-1)


def mat_mul(a: Mat, b: Mat) -> Mat:
    """
    Matrix product with a conformability check.

    Raises:
        DimensionError: If ``a.cols != b.rows``
    """
    a = as_matrix(a, "left factor")
    b = as_matrix(b, "right factor")
    if a.shape[1] != b.shape[0]:
        raise DimensionError(
            f"Cannot multiply {a.shape} by {b.shape}",
            operation="mat_mul",
            expected=(a.shape[1],),
            actual=(b.shape[0],)
        )
    return a @ b


def inf_norm(a: np.ndarray) -> float:
    """Infinity norm (max absolute row sum); zero for empty input."""
    if a.size == 0:
        return 0.0
    if a.ndim == 1:
        return float(np.max(np.abs(a)))
    return float(np.linalg.norm(a, np.inf))


def symmetrize(a: Mat) -> Mat:
    return 0.5 * (a + a.T)


def is_symmetric(a: Mat, tol: float = config.SYMMETRY_TOL) -> bool:
    """True when ``a`` is square and equals its transpose within ``tol * (1 + ||a||)``."""
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.T), initial=0.0) <= tol * (1.0 + inf_norm(a)))


def symmetric_pivots(a: Mat) -> Vec:
    """
    Pivots of the symmetric part of ``a``.

    Uses the Bunch-Kaufman LDL^T factorization of ``(a + a^T)/2``; the returned
    values are the eigenvalues of the block-diagonal factor D, which share
    their signs with the eigenvalues of the symmetric part.
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"Pivots need a square matrix, got {a.shape}", operation="symmetric_pivots", actual=a.shape)
    if a.shape[0] == 0:
        return np.zeros(0)
    _, d, _ = scipy.linalg.ldl(symmetrize(a))
    return np.linalg.eigvalsh(d)


def is_positive_definite(a: Mat, rtol: float = config.PD_RTOL) -> bool:
    """True iff every pivot of the symmetric part exceeds ``rtol * (1 + ||a||_inf)``."""
    pivots = symmetric_pivots(a)
    return bool(pivots.size == 0 or pivots.min() > rtol * (1.0 + inf_norm(a)))


def is_positive_semidefinite(a: Mat, tol: float = config.PSD_TOL) -> bool:
    """True iff every pivot of the symmetric part is at least ``-tol``."""
    pivots = symmetric_pivots(a)
    return bool(pivots.size == 0 or pivots.min() >= -tol)


def _lu(a: Mat):
    with warnings.catch_warnings():
        # exact zero pivots are reported through the threshold check instead
        warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
        return scipy.linalg.lu_factor(a, check_finite=True)


def min_lu_pivot(a: Mat) -> float:
    """Smallest pivot magnitude of the row-pivoted LU factorization of ``a``."""
    lu, _ = _lu(a)
    return float(np.min(np.abs(np.diag(lu))))


def _singular_threshold(a: Mat) -> float:
    return config.SINGULAR_RTOL * inf_norm(a)


def is_singular(a: Mat) -> bool:
    """True when some LU pivot of ``a`` is at or below ``1e-12 * ||a||_inf``."""
    return min_lu_pivot(a) <= _singular_threshold(a)


def solve_linear(a: Mat, b: Union[Mat, Vec], name: str = "matrix") -> np.ndarray:
    """
    Solve ``a @ y = b`` by row-pivoted LU.

    Args:
        a: Square coefficient matrix
        b: Right-hand side, a vector or a matrix with ``a.rows`` rows
        name: Matrix name carried by the error

    Returns:
        The solution, shaped like ``b``

    Raises:
        DimensionError: If ``a`` is not square or ``b`` does not conform
        SingularMatrixError: If a pivot falls at or below ``1e-12 * ||a||_inf``
    """
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"{name} must be square, got {a.shape}", operation="solve_linear", actual=a.shape)
    if b.shape[0] != a.shape[0]:
        raise DimensionError(
            f"Right-hand side has {b.shape[0]} rows, {name} has {a.shape[0]}",
            operation="solve_linear",
            expected=(a.shape[0],),
            actual=(b.shape[0],)
        )
    lu, piv = _lu(a)
    pivot = float(np.min(np.abs(np.diag(lu))))
    threshold = _singular_threshold(a)
    if pivot <= threshold:
        raise SingularMatrixError(
            f"{name} is singular to working precision",
            matrix=name,
            pivot=pivot,
            threshold=threshold
        )
    return scipy.linalg.lu_solve((lu, piv), b)


def condition_number(a: Mat) -> float:
    """1-norm condition number; ``inf`` for singular input."""
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            return float(np.linalg.cond(a, 1))
    except np.linalg.LinAlgError:
        return float("inf")
