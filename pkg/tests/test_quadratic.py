import numpy as np
import pytest

from services.quadratic import QuadraticForm, fd_gradient, probe_quadratic


@pytest.mark.parametrize("step", [1.0, 0.3])
def test_probe_recovers_quadratic(step):
    rng = np.random.default_rng(1)
    L = rng.standard_normal((3, 3))
    Q, l, c = L @ L.T, rng.standard_normal(3), 0.7
    quad = probe_quadratic(lambda z: float(z @ Q @ z + 2 * l @ z + c), 3, step=step)
    np.testing.assert_allclose(quad.Q, Q, atol=1e-10)
    np.testing.assert_allclose(quad.l, l, atol=1e-10)
    assert quad.c == pytest.approx(c)


def test_quadratic_form_evaluation_and_gradient():
    quad = QuadraticForm(Q=np.diag([1.0, 2.0]), l=np.array([0.5, -1.0]), c=3.0)
    z = np.array([1.0, 1.0])
    assert quad(z) == pytest.approx(1.0 + 2.0 + 2 * (0.5 - 1.0) + 3.0)
    np.testing.assert_allclose(quad.gradient(z), fd_gradient(quad, z), atol=1e-8)
