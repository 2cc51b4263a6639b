"""Multinomial softmax regression with L2 weight decay.

``theta`` is k x (d + 1); column 0 multiplies the constant intercept feature
and is excluded from the decay term. Class labels run from 1 to k.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp


@dataclass
class SoftmaxParams:
    theta: np.ndarray
    lam: float = 1e-4

    def __post_init__(self):
        self.theta = np.asarray(self.theta, dtype=np.float64)
        if self.theta.ndim != 2 or self.theta.shape[0] < 2 or self.theta.shape[1] < 1:
            raise ValueError(f"theta must be k x (d+1) with k >= 2, got {self.theta.shape}")
        if not np.all(np.isfinite(self.theta)):
            raise ValueError("theta must be finite")
        if self.lam < 0:
            raise ValueError("decay weight must be >= 0")

    @property
    def n_classes(self) -> int:
        return self.theta.shape[0]

    @property
    def n_features(self) -> int:
        return self.theta.shape[1] - 1

    @classmethod
    def zeros(cls, k: int, d: int, lam: float = 1e-4) -> SoftmaxParams:
        return cls(np.zeros((k, d + 1)), lam)


@dataclass
class LabeledSet:
    features: np.ndarray
    labels: np.ndarray
    n_classes: int

    def __post_init__(self):
        self.features = np.atleast_2d(np.asarray(self.features, dtype=np.float64))
        self.labels = np.asarray(self.labels, dtype=np.int64)
        if self.labels.shape != (len(self.features),):
            raise ValueError("features and labels are not aligned")
        if len(self.labels) == 0:
            raise ValueError("empty labeled set")
        if self.n_classes < 2:
            raise ValueError("need at least two classes")
        if self.labels.min() < 1 or self.labels.max() > self.n_classes:
            raise ValueError(f"label out of range [1, {self.n_classes}]")
        if not np.all(np.isfinite(self.features)):
            raise ValueError("features must be finite")


def _augment(x):
    x = np.asarray(x, dtype=np.float64)
    if not np.all(np.isfinite(x)):
        raise ValueError("non-finite input")
    ones = np.ones(x.shape[:-1] + (1,))
    return np.concatenate([ones, x], axis=-1)


def _logits(x, params: SoftmaxParams):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (params.n_features,):
        raise ValueError(f"dimension mismatch: expected {params.n_features} features, got {x.shape[-1:]}")
    return _augment(x) @ params.theta.T


def log_hypothesis(x, params: SoftmaxParams):
    z = _logits(x, params)
    return z - logsumexp(z, axis=-1, keepdims=True)


def hypothesis(x, params: SoftmaxParams):
    """Class probabilities p(y = j | x), j = 1..k (as array positions 0..k-1)."""
    z = _logits(x, params)
    z = z - z.max(axis=-1, keepdims=True)
    e = np.exp(z)
    return e / e.sum(axis=-1, keepdims=True)


def _check_compatible(data: LabeledSet, params: SoftmaxParams):
    if data.n_classes != params.n_classes:
        raise ValueError(f"label set has {data.n_classes} classes, model has {params.n_classes}")
    if data.labels.max() > params.n_classes:
        raise ValueError("label out of range")


def decay_term(params: SoftmaxParams) -> float:
    return 0.5 * params.lam * float((params.theta[:, 1:] ** 2).sum())


def cost(data: LabeledSet, params: SoftmaxParams) -> float:
    """Mean negative log-likelihood plus (lam / 2) * ||theta without intercept||^2."""
    _check_compatible(data, params)
    logp = log_hypothesis(data.features, params)
    nll = -np.mean(logp[np.arange(len(data.labels)), data.labels - 1])
    return float(nll) + decay_term(params)


def gradient(data: LabeledSet, params: SoftmaxParams) -> np.ndarray:
    _check_compatible(data, params)
    m = len(data.labels)
    p = hypothesis(data.features, params)
    indicator = np.zeros_like(p)
    indicator[np.arange(m), data.labels - 1] = 1.0
    grad = -(indicator - p).T @ _augment(data.features) / m
    grad[:, 1:] += params.lam * params.theta[:, 1:]
    return grad


def train_softmax(data: LabeledSet, lam: float = 1e-4, step: float = 0.5, iters: int = 500,
                  theta0=None, max_halvings: int = 50):
    """Gradient descent with step halving whenever a step would raise the cost.

    Starts from theta = 0 unless ``theta0`` is given. Returns ``(params, costs)``
    where ``costs[0]`` is the starting cost and the trace never increases.
    """
    if not step > 0:
        raise ValueError("step size must be > 0")
    if iters < 1:
        raise ValueError("iters must be >= 1")
    k, d = data.n_classes, data.features.shape[1]
    theta = np.zeros((k, d + 1)) if theta0 is None else np.array(theta0, dtype=np.float64)
    params = SoftmaxParams(theta, lam)
    current = cost(data, params)
    costs = [current]
    alpha = step
    for _ in range(iters):
        g = gradient(data, params)
        for _ in range(max_halvings):
            trial = SoftmaxParams(params.theta - alpha * g, lam)
            trial_cost = cost(data, trial)
            if trial_cost <= current:
                break
            alpha /= 2
        else:
            break
        params, current = trial, trial_cost
        costs.append(current)
    return params, costs


def predict(x, params: SoftmaxParams):
    """Most probable class in 1..k; ties go to the lowest class."""
    return np.argmax(hypothesis(x, params), axis=-1) + 1
