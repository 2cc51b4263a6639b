import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from scenedbm.softmax import (LabeledSet, SoftmaxParams, cost, decay_term, gradient, hypothesis, log_hypothesis,
                              predict, train_softmax)


def random_problem(seed, k=3, d=4, m=20, lam=0.1):
    rng = np.random.default_rng(seed)
    data = LabeledSet(rng.normal(size=(m, d)), rng.integers(1, k + 1, m), k)
    params = SoftmaxParams(rng.normal(size=(k, d + 1)), lam)
    return data, params


def numeric_gradient(data, params, h=1e-5):
    g = np.zeros_like(params.theta)
    for idx in np.ndindex(*params.theta.shape):
        plus, minus = params.theta.copy(), params.theta.copy()
        plus[idx] += h
        minus[idx] -= h
        g[idx] = (cost(data, SoftmaxParams(plus, params.lam)) - cost(data, SoftmaxParams(minus, params.lam))) / (2 * h)
    return g


# ---- hypothesis

def test_uniform_when_theta_zero():
    np.testing.assert_allclose(hypothesis([1.0, -2.0], SoftmaxParams.zeros(4, 2)), 0.25)


def test_two_class_example():
    theta = np.array([[math.log(3)], [0.0]])
    np.testing.assert_allclose(hypothesis(np.zeros((1, 0)), SoftmaxParams(theta)), [[0.75, 0.25]])


@given(st.integers(0, 2**32 - 1), st.floats(-50, 50))
def test_shift_invariance(seed, shift):
    rng = np.random.default_rng(seed)
    p = SoftmaxParams(rng.normal(size=(3, 5)))
    x = rng.normal(size=(6, 4))
    shifted = SoftmaxParams(p.theta + rng.normal(size=5) * shift)
    np.testing.assert_allclose(hypothesis(x, shifted), hypothesis(x, p), atol=1e-9)
    np.testing.assert_array_equal(predict(x, shifted), predict(x, p))


@given(st.integers(0, 2**32 - 1))
def test_sums_to_one(seed):
    rng = np.random.default_rng(seed)
    p = SoftmaxParams(rng.normal(0, 30, size=(5, 4)))
    h = hypothesis(rng.normal(0, 30, size=(10, 3)), p)
    np.testing.assert_allclose(h.sum(axis=1), 1, atol=1e-12)
    # positivity holds while logit gaps stay inside float64's exp range
    p = SoftmaxParams(rng.normal(0, 3, size=(5, 4)))
    h = hypothesis(rng.normal(0, 3, size=(10, 3)), p)
    assert np.all(h > 0)
    np.testing.assert_allclose(h.sum(axis=1), 1, atol=1e-12)


def test_overflow_safe():
    p = SoftmaxParams(np.array([[0.0, 1000.0], [0.0, -1000.0]]))
    np.testing.assert_allclose(hypothesis([5.0], p), [1.0, 0.0])


def test_nonfinite_input():
    with pytest.raises(ValueError):
        hypothesis([np.nan], SoftmaxParams.zeros(2, 1))
    with pytest.raises(ValueError):
        predict([np.inf], SoftmaxParams.zeros(2, 1))


# ---- cost

def test_cost_uniform_is_log_k():
    data, _ = random_problem(0, k=5)
    assert cost(data, SoftmaxParams.zeros(5, 4, lam=0)) == pytest.approx(math.log(5))


def test_cost_separable_limit():
    x = np.array([[1.0], [-1.0]])
    data = LabeledSet(x, [1, 2], 2)
    p = SoftmaxParams(np.array([[0.0, 5.0], [0.0, -5.0]]), lam=0)
    assert 0 < cost(data, p) < 0.01


def test_decay_term_difference():
    data, p = random_problem(1, lam=0.3)
    free = SoftmaxParams(p.theta, 0)
    diff = cost(data, p) - cost(data, free)
    assert diff == pytest.approx(0.15 * np.sum(p.theta[:, 1:] ** 2))
    assert decay_term(p) == pytest.approx(diff)


def test_indicator_form_equals_indexing():
    data, p = random_problem(2)
    logp = log_hypothesis(data.features, p)
    indicator = (data.labels[:, None] == np.arange(1, p.n_classes + 1)[None, :]).astype(float)
    per_example = (indicator * logp).sum(axis=1)
    by_indicator = float(-np.mean(per_example)) + decay_term(p)
    assert by_indicator == cost(data, p)
    # and a loop oracle agrees to rounding
    probs = hypothesis(data.features, p)
    loop = -sum(math.log(probs[i, y - 1]) for i, y in enumerate(data.labels)) / len(data.labels)
    assert loop + decay_term(p) == pytest.approx(cost(data, p), rel=1e-12)


def test_label_range_checked():
    with pytest.raises(ValueError, match="label"):
        LabeledSet(np.zeros((2, 1)), [0, 1], 2)
    with pytest.raises(ValueError, match="label"):
        LabeledSet(np.zeros((2, 1)), [1, 3], 2)
    data = LabeledSet(np.zeros((2, 1)), [1, 2], 2)
    with pytest.raises(ValueError):
        cost(data, SoftmaxParams.zeros(3, 1))


# ---- gradient

@pytest.mark.parametrize("seed", range(10))
def test_gradient_finite_differences(seed):
    data, p = random_problem(seed)
    g = gradient(data, p)
    num = numeric_gradient(data, p)
    assert np.linalg.norm(g - num) / np.linalg.norm(num) < 1e-6


def test_gradient_symmetric_classes():
    x = np.array([[1.0, 0.0], [0.0, 1.0]])
    data = LabeledSet(x, [1, 2], 2)
    g = gradient(data, SoftmaxParams.zeros(2, 2, lam=0))
    # swapping classes swaps the feature columns
    np.testing.assert_allclose(g[0, [0, 2, 1]], g[1])


def test_gradient_vanishes_at_optimum():
    data, _ = random_problem(3, lam=0.1)
    p, _ = train_softmax(data, lam=0.1, step=0.5, iters=5000)
    assert np.abs(gradient(data, p)).max() < 1e-5


# ---- training

def test_separable_toy():
    rng = np.random.default_rng(0)
    a = rng.normal(size=(20, 2)) + [3, 3]
    b = rng.normal(size=(20, 2)) - [3, 3]
    data = LabeledSet(np.vstack([a, b]), [1] * 20 + [2] * 20, 2)
    p, costs = train_softmax(data, lam=1e-4, iters=500)
    assert np.all(predict(data.features, p) == data.labels)
    assert costs[-1] <= costs[0] == pytest.approx(math.log(2))


def test_large_decay_flattens():
    data, _ = random_problem(4)
    p, _ = train_softmax(data, lam=1e3, iters=500)
    assert np.linalg.norm(p.theta[:, 1:]) < 1e-2
    h = hypothesis(data.features, p)
    assert np.abs(h - h.mean(axis=0)).max() < 1e-2


def test_cost_trace_never_increases():
    data, _ = random_problem(5, lam=0.01)
    _, costs = train_softmax(data, lam=0.01, step=50.0, iters=200)
    assert all(b <= a for a, b in zip(costs, costs[1:]))


def test_two_starts_converge():
    data, _ = random_problem(6, lam=0.1)
    rng = np.random.default_rng(1)
    _, c1 = train_softmax(data, lam=0.1, iters=4000)
    _, c2 = train_softmax(data, lam=0.1, iters=4000, theta0=rng.normal(0, 3, (3, 5)))
    assert abs(c1[-1] - c2[-1]) < 1e-6


def test_train_validation():
    data, _ = random_problem(0)
    with pytest.raises(ValueError):
        train_softmax(data, step=0)
    with pytest.raises(ValueError):
        train_softmax(data, iters=0)


# ---- predict

def test_predict_ties_and_preference():
    assert predict([0.3, 0.1], SoftmaxParams.zeros(3, 2)) == 1
    p = SoftmaxParams(np.array([[0.0, 0.0], [0.0, 2.0]]))
    assert predict([1.0], p) == 2 and predict([-1.0], p) == 1
