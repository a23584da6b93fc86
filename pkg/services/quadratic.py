"""
Exact probing of quadratic functions and finite-difference gradients.

The solvers only ever probe functions that are quadratic in the probed
variable (costs of a linear system under linear responses), so central
second differences with a unit step recover the quadratic up to rounding.
"""

from typing import Callable, NamedTuple

import numpy as np

import config


class QuadraticForm(NamedTuple):
    """f(z) = z'Qz + 2l'z + c"""

    Q: np.ndarray
    l: np.ndarray
    c: float

    def __call__(self, z: np.ndarray) -> float:
        return float(z @ self.Q @ z + 2.0 * self.l @ z + self.c)

    def gradient(self, z: np.ndarray) -> np.ndarray:
        return 2.0 * (self.Q @ z + self.l)


def probe_quadratic(f: Callable[[np.ndarray], float], dim: int, step: float = 1.0) -> QuadraticForm:
    """
    Recover the coefficients of a quadratic ``f`` on R^dim.

    Args:
        f: Function known to be quadratic
        dim: Dimension of its argument
        step: Probe step; any nonzero value is exact for a quadratic

    Returns:
        QuadraticForm with symmetric ``Q``
    """
    h = float(step)
    zero = np.zeros(dim)
    c = f(zero)
    plus = np.empty(dim)
    minus = np.empty(dim)
    for i in range(dim):
        e = np.zeros(dim)
        e[i] = h
        plus[i] = f(e)
        minus[i] = f(-e)

    l = (plus - minus) / (4.0 * h)
    Q = np.diag((plus + minus - 2.0 * c) / (2.0 * h * h))
    for i in range(dim):
        for j in range(i + 1, dim):
            e = np.zeros(dim)
            e[i] = h
            e[j] = h
            Q[i, j] = Q[j, i] = (f(e) - plus[i] - plus[j] + c) / (2.0 * h * h)
    return QuadraticForm(Q=Q, l=l, c=float(c))


def fd_gradient(f: Callable[[np.ndarray], float], z: np.ndarray, step: float = config.FD_STEP) -> np.ndarray:
    """Central-difference gradient of ``f`` at ``z``."""
    z = np.asarray(z, dtype=np.float64)
    grad = np.empty(z.shape[0])
    for i in range(z.shape[0]):
        e = np.zeros_like(z)
        e[i] = step
        grad[i] = (f(z + e) - f(z - e)) / (2.0 * step)
    return grad
