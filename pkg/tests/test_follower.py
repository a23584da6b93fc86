import numpy as np
import pytest

from exceptions import InputError, NotSolvableError
from matkit import is_positive_semidefinite, is_symmetric
from services.quadratic import fd_gradient

# follower controls and first states under the published leader controls of the second example
PUBLISHED_V = np.array([[0.0053, -0.0057], [0.0230, 0.0462], [0.0254, 0.0094]])


def test_riccati_example2_matches_published_weights(follower_service, example2):
    fc = follower_service.riccati(example2)
    expected = [
        [[2.1841, 2.6175], [2.6175, 9.1965]],
        [[2.1360, 2.6922], [2.6922, 8.5144]],
        [[1.8000, 2.0800], [2.0800, 5.0000]],
    ]
    for k in range(3):
        np.testing.assert_allclose(fc.stage(k).M, expected[k], atol=1e-3)


def test_riccati_scalar_example_against_hand_loop(follower_service, example1):
    fc = follower_service.riccati(example1)
    P, M = [1.0], []
    for _ in range(3):
        m = P[0] + 1.0
        M.insert(0, m)
        P.insert(0, 1.0 + P[0] - P[0] ** 2 / m)
    np.testing.assert_allclose(fc.M[:, 0, 0], M, atol=1e-12)
    np.testing.assert_allclose(fc.P[:, 0, 0], P, atol=1e-12)
    np.testing.assert_allclose(fc.P[:, 0, 0], [1.615385, 1.6, 1.5, 1.0], atol=1e-6)


@pytest.mark.parametrize("seed", range(10))
def test_riccati_invariants(follower_service, make_instance, seed):
    spec = make_instance(seed)
    fc = follower_service.riccati(spec)
    np.testing.assert_array_equal(fc.P_at(spec.N), spec.G1)
    for k in range(spec.N):
        s = fc.stage(k)
        assert is_symmetric(fc.P_at(k))
        assert is_positive_semidefinite(fc.P_at(k))
        np.testing.assert_allclose(s.M, spec.B1.T @ s.P_next @ spec.B1 + spec.R1, atol=1e-12)
        np.testing.assert_allclose(s.Atil, spec.A - spec.B1 @ s.H1, atol=1e-12)
        np.testing.assert_allclose(s.Btil, spec.B2 - spec.B1 @ s.H2, atol=1e-12)
        np.testing.assert_allclose(s.Ctil, -spec.B1 @ s.H3, atol=1e-12)


def test_riccati_decoupled_follower(follower_service, example2):
    spec = example2.replace(B1=np.zeros((2, 2)))
    fc = follower_service.riccati(spec)
    P = spec.G1
    for k in range(spec.N - 1, -1, -1):
        s = fc.stage(k)
        np.testing.assert_allclose(s.M, spec.R1)
        assert not s.H1.any() and not s.H2.any() and not s.H3.any()
        P = spec.Q1 + spec.A.T @ P @ spec.A
        np.testing.assert_allclose(fc.P_at(k), P, atol=1e-12)


def test_riccati_not_solvable_names_stage_and_matrix(follower_service, example1):
    spec = example1.replace(B1=[[0.0]], R1=[[0.0]])
    with pytest.raises(NotSolvableError) as info:
        follower_service.riccati(spec)
    assert info.value.stage == 2
    assert info.value.matrix == "M"


def test_riccati_later_base_is_a_truncation(follower_service, make_instance):
    spec = make_instance(21, N=6)
    full = follower_service.riccati(spec)
    later = follower_service.riccati(spec, base_time=2)
    truncated = full.truncate(2)
    assert truncated.base_time == later.base_time == 2
    np.testing.assert_allclose(truncated.P, later.P, atol=1e-14)
    np.testing.assert_allclose(truncated.Cmat, later.Cmat, atol=1e-14)


def test_response_zero_input(follower_service, example2):
    fc = follower_service.riccati(example2)
    traj = follower_service.response(example2, fc, 0, np.zeros(2), np.zeros((3, 2)))
    assert not traj.u.any() and not traj.X.any() and not traj.pi.any()


def test_response_to_published_leader_controls(follower_service, example2):
    fc = follower_service.riccati(example2)
    traj = follower_service.response(example2, fc, 0, example2.x, PUBLISHED_V)
    np.testing.assert_allclose(traj.u, [[-0.37110, -0.32039], [-0.15830, -0.06316], [-0.04564, -0.01388]], atol=1e-4)
    np.testing.assert_allclose(traj.state(1), [0.3003, -0.0883], atol=1e-3)
    np.testing.assert_allclose(traj.state(2), [0.14088, -0.06537], atol=1e-4)
    assert not traj.adjoint(3).any()


def test_response_example1_reproduces_precommitted_follower(follower_service, example1):
    fc = follower_service.riccati(example1)
    traj = follower_service.response(example1, fc, 0, [1.0], [-0.336315, 0.046512, 0.062612])
    np.testing.assert_allclose(traj.u[:, 0], [-0.4240, -0.1843, -0.0823], atol=1e-3)


def test_response_before_base_time(follower_service, example2):
    fc = follower_service.riccati(example2, base_time=1)
    with pytest.raises(InputError):
        follower_service.response(example2, fc, 0, example2.x, PUBLISHED_V)


@pytest.mark.parametrize("seed", range(20))
def test_response_minimizes_follower_cost(follower_service, verification_service, game_model, make_instance, seed):
    spec = make_instance(seed)
    rng = np.random.default_rng(seed)
    fc = follower_service.riccati(spec)
    v = rng.standard_normal((spec.N, spec.m2))
    traj = follower_service.response(spec, fc, 0, spec.x, v)

    oracle = verification_service.follower_normal_equations(spec, 0, spec.x, v)
    np.testing.assert_allclose(traj.u, oracle, atol=1e-7)
    np.testing.assert_allclose(traj.X, game_model.simulate(spec, 0, spec.x, traj.u, v), atol=1e-10)

    # one-stage deviations: the gradient in u_k of the cost-to-go vanishes
    for k in range(spec.N):
        def stage_cost(uk, k=k):
            tail = traj.u[k:].copy()
            tail[0] = uk
            return game_model.cost(spec, 1, k, traj.state(k), tail, v[k:])
        assert np.linalg.norm(fd_gradient(stage_cost, traj.follower(k))) <= 1e-8 * (1.0 + abs(stage_cost(traj.follower(k))))

    report = follower_service.check_response_equilibrium(spec, fc, 0, spec.x, v, probes=5, seed=seed)
    assert report.max_gain <= 1e-8


@pytest.mark.parametrize("seed", range(200))
def test_response_matches_normal_equations(follower_service, verification_service, make_instance, seed):
    spec = make_instance(seed)
    rng = np.random.default_rng(1000 + seed)
    fc = follower_service.riccati(spec)
    v = rng.standard_normal((spec.N, spec.m2))
    traj = follower_service.response(spec, fc, 0, spec.x, v)
    oracle = verification_service.follower_normal_equations(spec, 0, spec.x, v)
    np.testing.assert_allclose(traj.u, oracle, atol=1e-7 * (1.0 + float(np.max(np.abs(oracle)))))


def test_backward_variable_does_not_depend_on_initial_state(follower_service, make_instance):
    spec = make_instance(8)
    rng = np.random.default_rng(8)
    fc = follower_service.riccati(spec)
    v = rng.standard_normal((spec.N, spec.m2))
    first = follower_service.response(spec, fc, 0, spec.x, v)
    second = follower_service.response(spec, fc, 0, 3.0 * spec.x + 1.0, v)
    np.testing.assert_array_equal(first.pi, second.pi)


@pytest.mark.parametrize("seed", range(5))
def test_response_superposition(follower_service, make_instance, seed):
    spec = make_instance(seed + 30)
    rng = np.random.default_rng(seed)
    fc = follower_service.riccati(spec)
    x_a, x_b = rng.standard_normal(spec.n), rng.standard_normal(spec.n)
    v_a, v_b = rng.standard_normal((spec.N, spec.m2)), rng.standard_normal((spec.N, spec.m2))
    total = follower_service.response(spec, fc, 0, x_a + x_b, v_a + v_b).u
    parts = follower_service.response(spec, fc, 0, x_a, v_a).u + follower_service.response(spec, fc, 0, x_b, v_b).u
    np.testing.assert_allclose(total, parts, atol=1e-9)


def test_deviation_check_flags_perturbed_control(follower_service, example2):
    fc = follower_service.riccati(example2)
    u = follower_service.response(example2, fc, 0, example2.x, PUBLISHED_V).u.copy()
    u[1] += 0.1
    report = follower_service.check_response_equilibrium(example2, fc, 0, example2.x, PUBLISHED_V, u=u)
    assert report.stage_gains[1] > 1e-4


def test_deviation_check_decoupled_follower(follower_service, example2):
    spec = example2.replace(B1=np.zeros((2, 2)))
    fc = follower_service.riccati(spec)
    report = follower_service.check_response_equilibrium(spec, fc, 0, spec.x, PUBLISHED_V, u=np.zeros((3, 2)))
    assert report.max_gain <= 1e-12
