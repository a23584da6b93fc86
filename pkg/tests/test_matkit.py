import numpy as np
import pytest

from exceptions import DimensionError, SingularMatrixError
from matkit import (
    condition_number,
    inf_norm,
    is_positive_definite,
    is_positive_semidefinite,
    is_singular,
    is_symmetric,
    mat_mul,
    min_lu_pivot,
    solve_linear,
    symmetric_pivots
)


def test_mat_mul_identity_and_scalar():
    X = np.array([[1.0, 2.0], [3.0, 4.0]])
    np.testing.assert_array_equal(mat_mul(np.eye(2), X), X)
    np.testing.assert_array_equal(mat_mul(np.array([[2.0]]), np.array([[3.0]])), np.array([[6.0]]))


def test_mat_mul_transpose_identity_against_loops():
    rng = np.random.default_rng(7)
    A, B = rng.standard_normal((3, 3)), rng.standard_normal((3, 3))
    loops = np.zeros((3, 3))
    for i in range(3):
        for j in range(3):
            loops[i, j] = sum(B[k, i] * A[j, k] for k in range(3))
    np.testing.assert_allclose(mat_mul(A, B).T, loops, atol=1e-12)


def test_mat_mul_dimension_mismatch():
    with pytest.raises(DimensionError) as info:
        mat_mul(np.ones((2, 3)), np.ones((2, 2)))
    assert info.value.details["operation"] == "mat_mul"


def test_solve_linear_identity_and_diagonal():
    b = np.array([[1.5, -2.0], [0.25, 3.0]])
    np.testing.assert_allclose(solve_linear(np.eye(2), b), b)
    np.testing.assert_allclose(solve_linear(np.diag([2.0, 4.0]), np.array([[2.0], [4.0]])), [[1.0], [1.0]])


@pytest.mark.parametrize("seed", range(5))
def test_solve_linear_residual(seed):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((4, 4)) + 4.0 * np.eye(4)
    b = rng.standard_normal((4, 2))
    y = solve_linear(a, b)
    assert np.linalg.norm(mat_mul(a, y) - b) <= 1e-10 * (1.0 + np.linalg.norm(b))


def test_solve_linear_singular_reports_pivot():
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    with pytest.raises(SingularMatrixError) as info:
        solve_linear(a, np.ones(2), name="F")
    assert info.value.details["matrix"] == "F"
    assert info.value.details["pivot"] <= info.value.details["threshold"]
    assert is_singular(a)
    assert min_lu_pivot(a) == pytest.approx(0.0, abs=1e-15)


def test_solve_linear_shape_checks():
    with pytest.raises(DimensionError):
        solve_linear(np.ones((2, 3)), np.ones(2))
    with pytest.raises(DimensionError):
        solve_linear(np.eye(2), np.ones(3))


def test_positive_definite_cases():
    assert is_positive_definite(np.eye(2))
    assert not is_positive_definite(np.array([[0.0]]))
    assert not is_positive_definite(np.diag([1.0, -1e-3]))
    # follower weight M_0 of the second worked example
    M0 = np.array([[2.184126, 2.617469], [2.617469, 9.196457]])
    assert is_positive_definite(M0)


@pytest.mark.parametrize("seed", range(20))
def test_positive_definite_agrees_with_eigenvalues(seed):
    rng = np.random.default_rng(100 + seed)
    S = rng.standard_normal((4, 4))
    S = S + S.T
    expected = np.linalg.eigvalsh(S).min() > 1e-12 * (1.0 + inf_norm(S))
    assert is_positive_definite(S) == expected
    assert np.sign(symmetric_pivots(S)).sum() == np.sign(np.linalg.eigvalsh(S)).sum()


def test_positive_semidefinite_accepts_zero():
    assert is_positive_semidefinite(np.zeros((2, 2)))
    assert not is_positive_semidefinite(np.diag([1.0, -1e-6]))


def test_is_symmetric():
    assert is_symmetric(np.array([[1.0, 0.5], [0.5, 2.0]]))
    assert not is_symmetric(np.array([[1.0, 0.5], [0.4, 2.0]]))
    assert not is_symmetric(np.ones((2, 3)))


def test_condition_number():
    assert condition_number(np.eye(3)) == pytest.approx(1.0)
    assert condition_number(np.diag([1.0, 0.01])) == pytest.approx(100.0)
