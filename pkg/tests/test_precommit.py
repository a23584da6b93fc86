import numpy as np
import pytest

from exceptions import NotUniqueError


def test_example1_precommitted_solution(precommit_service, example1):
    sol = precommit_service.solve_precommit(example1)
    np.testing.assert_allclose(sol.u_hat[:, 0], [-0.4240, -0.1843, -0.0823], atol=1e-3)
    np.testing.assert_allclose(sol.v_hat[:, 0], [-0.3363, 0.0465, 0.0626], atol=1e-3)
    assert sol.state(1)[0] == pytest.approx(0.2397, abs=1e-3)
    np.testing.assert_allclose(sol.X_hat[:, 0], [1.0, 0.239714, 0.101968, 0.082290], atol=1e-6)
    assert sol.gradient_residual <= 1e-8
    assert len(sol.stage_residuals) == 3


def test_example1_resolve_from_realized_state(precommit_service, example1):
    first = precommit_service.solve_precommit(example1)
    again = precommit_service.solve_precommit(example1, 1, [0.2397])
    np.testing.assert_allclose(again.u_hat[:, 0], [-0.0942, -0.0342], atol=1e-3)
    np.testing.assert_allclose(again.v_hat[:, 0], [-0.0856, 0.0086], atol=1e-3)
    assert abs(first.leader(1)[0] - again.leader(1)[0]) >= 0.1


def test_example1_is_time_inconsistent(precommit_service, example1):
    report = precommit_service.inconsistency_report(example1)
    assert not report.consistent
    assert report.verdict == "time-inconsistent"
    assert report.rows[0].tau == 1
    assert report.rows[0].max_dv == pytest.approx(0.046512 + 0.085612, abs=1e-4)


def test_powerless_leader_plays_zero(precommit_service, example2):
    spec = example2.replace(B2=np.zeros((2, 2)))
    sol = precommit_service.solve_precommit(spec)
    np.testing.assert_allclose(sol.v_hat, 0.0, atol=1e-12)
    assert precommit_service.inconsistency_report(spec).consistent


def test_singular_reduced_quadratic_is_not_unique(precommit_service, example2):
    spec = example2.replace(B2=np.zeros((2, 2)), W2=np.zeros((2, 2)))
    with pytest.raises(NotUniqueError):
        precommit_service.solve_precommit(spec)


@pytest.mark.parametrize("seed", range(8))
def test_reduced_quadratic_properties(precommit_service, follower_service, game_model, make_instance, seed):
    spec = make_instance(seed)
    fc = follower_service.riccati(spec)
    quad = precommit_service.reduced_quadratic(spec, fc, 0, spec.x)
    np.testing.assert_allclose(quad.Q, quad.Q.T, atol=1e-8)
    assert np.linalg.eigvalsh(quad.Q).min() >= -1e-8

    sol = precommit_service.solve_precommit(spec)
    np.testing.assert_allclose(sol.u_hat, follower_service.response(spec, fc, 0, spec.x, sol.v_hat).u, atol=1e-10)

    rng = np.random.default_rng(seed)
    for _ in range(100):
        probe = sol.v_hat + 0.3 * rng.standard_normal(sol.v_hat.shape)
        u = follower_service.response(spec, fc, 0, spec.x, probe).u
        assert sol.J2 <= game_model.cost(spec, 2, 0, spec.x, u, probe) + 1e-10


def test_random_instance_is_generically_inconsistent(precommit_service, make_instance):
    report = precommit_service.inconsistency_report(make_instance(5, n=2, m1=2, m2=2, N=4))
    assert len(report.rows) == 3
    assert not report.consistent
