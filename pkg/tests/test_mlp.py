import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from heatcast.mlp import (
    MlpParams,
    SolveError,
    StopReason,
    TrainConfig,
    _damped_solve,
    cost,
    forward,
    jacobian,
    lm_step,
    n_params,
    train,
)


def forward_oracle(params, x):
    # scalar loops, no vectorization
    w_in = params.w_in.tolist()
    w_out = params.w_out.tolist()
    y = w_out[0]
    for k, row in enumerate(w_in):
        s = row[0]
        for i, xi in enumerate(x):
            s += row[i + 1] * xi
        y += w_out[k + 1] * math.tanh(s)
    return y


def random_net(rng, l_x, l_w, scale=1.0):
    theta = rng.normal(0, scale, n_params(l_x, l_w))
    return MlpParams.from_theta(theta, l_x, l_w)


def fd_jacobian(params, X, y, h=1e-6):
    theta = params.theta
    cols = []
    for j in range(len(theta)):
        tp, tm = theta.copy(), theta.copy()
        tp[j] += h
        tm[j] -= h
        ep = forward(MlpParams.from_theta(tp, params.l_x, params.l_w), X) - y
        em = forward(MlpParams.from_theta(tm, params.l_x, params.l_w), X) - y
        cols.append((ep - em) / (2 * h))
    return np.column_stack(cols)


def test_param_count():
    assert n_params(5, 10) == 71
    assert n_params(10, 9) == 109
    assert n_params(5, 0) == 1


def test_theta_layout_round_trip(rng):
    p = random_net(rng, 4, 3)
    q = MlpParams.from_theta(p.theta, 4, 3)
    np.testing.assert_array_equal(q.w_in, p.w_in)
    np.testing.assert_array_equal(q.w_out, p.w_out)
    assert p.theta[0] == p.w_in[0, 0]
    assert p.theta[5] == p.w_in[1, 0]
    assert p.theta[-4] == p.w_out[0]


def test_zero_network_outputs_zero(rng):
    p = MlpParams(np.zeros((4, 6)), np.zeros(5))
    assert forward(p, rng.normal(size=5)) == 0.0


def test_constant_network_outputs_bias(rng):
    p = MlpParams(np.zeros((4, 6)), np.array([2.5, 1, 1, 1, 1]))
    np.testing.assert_array_equal(forward(p, rng.normal(size=(7, 5))), 2.5)


def test_forward_matches_oracle(rng):
    for _ in range(20):
        l_x, l_w = int(rng.integers(1, 11)), int(rng.integers(1, 14))
        p = random_net(rng, l_x, l_w, 0.5)
        X = rng.normal(size=(15, l_x))
        got = forward(p, X)
        want = [forward_oracle(p, x) for x in X]
        np.testing.assert_allclose(got, want, rtol=0, atol=1e-12)
        assert isinstance(forward(p, X[0]), float)


def test_forward_dimension_mismatch(rng):
    with pytest.raises(ValueError):
        forward(random_net(rng, 3, 2), np.zeros(4))


def test_hidden_permutation_invariance(rng):
    p = random_net(rng, 5, 7)
    perm = rng.permutation(7)
    q = MlpParams(p.w_in[perm], np.concatenate([[p.w_out[0]], p.w_out[1:][perm]]))
    X = rng.normal(size=(30, 5))
    np.testing.assert_allclose(forward(q, X), forward(p, X), rtol=0, atol=1e-12)


def test_cost_examples():
    p = MlpParams(np.zeros((1, 2)), np.array([1.0, 0.0]))
    assert cost(p, [[0.0]], [1.0]) == 0
    assert cost(p, [[0.0]], [0.0]) == 0.5
    p2 = MlpParams(np.zeros((1, 2)), np.array([0.0, 0.0]))
    assert cost(p2, [[0.0], [0.0]], [-1.0, 1.0]) == 0.5
    with pytest.raises(ValueError):
        cost(p, np.zeros((0, 1)), [])


def test_jacobian_small_net(rng):
    p = random_net(rng, 3, 4)
    X = rng.normal(size=(25, 3))
    y = rng.normal(size=25)
    J = jacobian(p, X)
    F = fd_jacobian(p, X, y)
    assert J.shape == (25, n_params(3, 4))
    assert np.max(np.abs(J - F) / np.maximum(np.abs(F), 1.0)) < 1e-6
    np.testing.assert_array_equal(J[:, 4 * 4], 1.0)


def test_dead_unit_has_zero_input_derivatives(rng):
    p = random_net(rng, 3, 4)
    w_out = p.w_out.copy()
    w_out[2] = 0.0  # hidden unit 1
    p = MlpParams(p.w_in, w_out)
    J = jacobian(p, rng.normal(size=(10, 3)))
    np.testing.assert_array_equal(J[:, 4:8], 0.0)


def test_lm_step_huge_mu_barely_moves(rng):
    p = random_net(rng, 5, 4)
    X = rng.normal(size=(50, 5))
    y = rng.normal(size=50)
    new, _ = lm_step(p, X, y, 1e12)
    assert np.linalg.norm(new.theta - p.theta) < 1e-9


def test_lm_step_zero_residual_is_zero_step(rng):
    p = random_net(rng, 5, 4)
    X = rng.normal(size=(50, 5))
    new, c = lm_step(p, X, forward(p, X), 0.01)
    np.testing.assert_array_equal(new.theta, p.theta)
    assert c == 0


def test_lm_step_matches_dense_solve(rng):
    p = random_net(rng, 4, 3, 0.5)
    X = rng.normal(size=(30, 4))
    y = rng.normal(size=30)
    mu = 0.3
    L = fd_jacobian(p, X, y)
    e = forward(p, X) - y
    want = p.theta - np.linalg.solve(L.T @ L + mu * np.eye(L.shape[1]), L.T @ e)
    new, c = lm_step(p, X, y, mu)
    np.testing.assert_allclose(new.theta, want, rtol=0, atol=1e-7)
    assert c == pytest.approx(cost(new, X, y), abs=0)


def test_lm_step_exact_linear_fit():
    # single-parameter model y = theta * x, damped solve vs least squares
    x = np.linspace(-1, 1, 21)
    y = 2.5 * x
    L = x[:, None]
    theta0 = 0.3
    e = theta0 * x - y
    d = _damped_solve(L.T @ L, L.T @ e, 1e-14)
    assert abs((theta0 - d[0]) - 2.5) < 1e-9


def test_lm_step_does_not_mutate(rng):
    p = random_net(rng, 3, 3)
    before = p.theta.copy()
    lm_step(p, rng.normal(size=(10, 3)), rng.normal(size=10), 0.1)
    np.testing.assert_array_equal(p.theta, before)


def test_lm_step_bad_inputs(rng):
    p = random_net(rng, 3, 3)
    with pytest.raises(ValueError):
        lm_step(p, np.zeros((4, 3)), np.zeros(4), 0.0)
    with pytest.raises(SolveError) as exc:
        _damped_solve(np.full((2, 2), np.nan), np.zeros(2), 0.5)
    assert exc.value.mu == 0.5


def linear_problem(seed, m=200, l_x=5):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(m, l_x))
    w = rng.normal(size=l_x)
    return X, X @ w


def test_max_epochs_zero_returns_initial():
    X, y = linear_problem(0)
    res = train(X, y, X, y, TrainConfig(max_epochs=0, seed=4), 3)
    assert res.stop_reason is StopReason.EPOCH_LIMIT
    assert res.epochs_run == 0
    np.testing.assert_array_equal(res.params.theta, MlpParams.initial(5, 3, 4).theta)


def test_noiseless_linear_reaches_goal():
    X, y = linear_problem(1)
    # goal on the raw sum of squared errors, 0.01 * dof * sum|y| / l_e
    pg = 0.01 * np.sum(np.abs(y)) * (200 - n_params(5, 5)) / 200
    res = train(X[:150], y[:150], X[150:], y[150:], TrainConfig(seed=0, performance_goal=pg), 5)
    assert res.stop_reason is StopReason.PERFORMANCE_GOAL
    assert 2 * 150 * res.learn_cost[-1] <= pg


def test_adversarial_validation_stops_on_failures():
    X, y = linear_problem(2)
    rng = np.random.default_rng(9)
    Xv = rng.normal(size=(50, 5))
    yv = np.sin(3 * Xv[:, 0]) * 5 + rng.normal(size=50)
    res = train(X, y, Xv, yv, TrainConfig(seed=1, max_validation_failures=6), 6)
    assert res.stop_reason is StopReason.VALIDATION_FAILURES
    assert res.epochs_run - res.best_epoch == 6


def test_history_lengths_and_monotone_learning_cost():
    X, y = linear_problem(3)
    y = np.tanh(y)
    res = train(X[:150], y[:150], X[150:], y[150:], TrainConfig(seed=2, max_epochs=40), 4)
    assert len(res.cost_history) == res.epochs_run
    assert np.all(np.diff(res.learn_cost) <= 0)


def test_training_is_reproducible():
    X, y = linear_problem(4)
    y = np.sin(y)
    a = train(X[:150], y[:150], X[150:], y[150:], TrainConfig(seed=5, max_epochs=30), 6)
    b = train(X[:150], y[:150], X[150:], y[150:], TrainConfig(seed=5, max_epochs=30), 6)
    np.testing.assert_array_equal(a.params.theta, b.params.theta)
    assert a.learn_cost == b.learn_cost and a.stop_reason == b.stop_reason


def test_config_validation():
    with pytest.raises(ValueError):
        TrainConfig(mu0=0)
    with pytest.raises(ValueError):
        TrainConfig(mu_decrease=2)


@settings(max_examples=25, deadline=None)
@given(st.integers(5, 10), st.integers(3, 13), st.integers(0, 2**31))
def test_jacobian_fd_property(l_x, l_w, seed):
    rng = np.random.default_rng(seed)
    p = random_net(rng, l_x, l_w, 0.5)
    X = rng.normal(size=(8, l_x))
    y = rng.normal(size=8)
    F = fd_jacobian(p, X, y)
    J = jacobian(p, X)
    assert np.max(np.abs(J - F) / np.maximum(np.abs(F), 1.0)) < 1e-6
