"""Binary restricted Boltzmann machine trained with contrastive divergence.

Vectors may be single (1-D) or batches (rows are examples). The weight
matrix is (n_visible, n_hidden), so ``v @ w`` is the bottom-up input.

``up_scale`` / ``down_scale`` multiply the weights in the bottom-up /
top-down conditionals; the DBM uses 2 to emulate tied doubled layers.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import expit, logsumexp

ENUMERATION_LIMIT = 20


@dataclass
class RbmParams:
    w: np.ndarray
    b: np.ndarray
    c: np.ndarray

    def __post_init__(self):
        self.w = np.asarray(self.w, dtype=np.float64)
        self.b = np.asarray(self.b, dtype=np.float64)
        self.c = np.asarray(self.c, dtype=np.float64)
        if self.w.ndim != 2 or self.b.shape != (self.w.shape[0],) or self.c.shape != (self.w.shape[1],):
            raise ValueError(
                f"inconsistent RBM shapes: w {self.w.shape}, b {self.b.shape}, c {self.c.shape}"
            )
        if not (np.all(np.isfinite(self.w)) and np.all(np.isfinite(self.b)) and np.all(np.isfinite(self.c))):
            raise ValueError("RBM parameters must be finite")

    @property
    def n_visible(self) -> int:
        return self.w.shape[0]

    @property
    def n_hidden(self) -> int:
        return self.w.shape[1]

    @classmethod
    def zeros(cls, n_visible: int, n_hidden: int) -> RbmParams:
        return cls(np.zeros((n_visible, n_hidden)), np.zeros(n_visible), np.zeros(n_hidden))

    def copy(self) -> RbmParams:
        return RbmParams(self.w.copy(), self.b.copy(), self.c.copy())


@dataclass
class CdConfig:
    n: int = 1
    eta_w: float = 0.1
    eta_b: float = 0.1
    eta_c: float = 0.1
    batch_size: int = 10
    epochs: int = 100
    seed: int = 0
    weight_decay: float = 0.0
    init_scale: float = 0.01

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("CD steps n must be >= 1")
        if min(self.eta_w, self.eta_b, self.eta_c) <= 0:
            raise ValueError("learning rates must be > 0")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")
        if self.epochs < 1:
            raise ValueError("epochs must be >= 1")
        if self.weight_decay < 0:
            raise ValueError("weight_decay must be >= 0")


@dataclass
class GibbsState:
    v: np.ndarray
    h: np.ndarray
    step: int


def _check(x, n, what):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (n,):
        raise ValueError(f"dimension mismatch: {what} has length {x.shape[-1:]}, expected {n}")
    return x


def energy(v, h, params: RbmParams):
    """-v'Wh - b'v - c'h; returns an array for batched inputs."""
    v = _check(v, params.n_visible, "v")
    h = _check(h, params.n_hidden, "h")
    return -((v @ params.w) * h).sum(axis=-1) - v @ params.b - h @ params.c


def prop_up(v, params: RbmParams, scale: float = 1.0):
    """p(h_j = 1 | v)."""
    v = _check(v, params.n_visible, "v")
    return expit(scale * (v @ params.w) + params.c)


def prop_down(h, params: RbmParams, scale: float = 1.0):
    """p(v_i = 1 | h)."""
    h = _check(h, params.n_hidden, "h")
    return expit(scale * (h @ params.w.T) + params.b)


def sample_bernoulli(probs, rng: np.random.Generator):
    probs = np.asarray(probs, dtype=np.float64)
    return (rng.random(probs.shape) < probs).astype(np.float64)


def gibbs_chain(v0, params: RbmParams, n: int, rng: np.random.Generator,
                up_scale: float = 1.0, down_scale: float = 1.0) -> GibbsState:
    """n rounds of up/sample/down; intermediate visibles are sampled, the chain ends are probabilities."""
    if n < 1:
        raise ValueError("n must be >= 1")
    v = _check(v0, params.n_visible, "v0")
    for step in range(n):
        h = sample_bernoulli(prop_up(v, params, up_scale), rng)
        v = prop_down(h, params, down_scale)
        if step < n - 1:
            v = sample_bernoulli(v, rng)
    return GibbsState(v, prop_up(v, params, up_scale), n)


def apply_cd(params: RbmParams, v0, h0, vn, hn, cfg: CdConfig, train_visible_bias: bool = True) -> RbmParams:
    """Parameter step from positive (v0, h0) and negative (vn, hn) statistics, batch-averaged."""
    v0, vn = np.atleast_2d(v0), np.atleast_2d(vn)
    h0, hn = np.atleast_2d(h0), np.atleast_2d(hn)
    m = len(v0)
    grad_w = (v0.T @ h0 - vn.T @ hn) / m
    w = params.w + cfg.eta_w * (grad_w - cfg.weight_decay * params.w)
    b = params.b + cfg.eta_b * (v0 - vn).mean(axis=0) if train_visible_bias else params.b.copy()
    c = params.c + cfg.eta_c * (h0 - hn).mean(axis=0)
    return RbmParams(w, b, c)


def cd_update(batch, params: RbmParams, cfg: CdConfig, rng: np.random.Generator,
              up_scale: float = 1.0, down_scale: float = 1.0,
              train_visible_bias: bool = True) -> RbmParams:
    v0 = np.atleast_2d(_check(batch, params.n_visible, "batch"))
    if len(v0) == 0:
        raise ValueError("empty batch")
    h0 = prop_up(v0, params, up_scale)
    chain = gibbs_chain(v0, params, cfg.n, rng, up_scale, down_scale)
    return apply_cd(params, v0, h0, chain.v, chain.h, cfg, train_visible_bias)


def reconstruction_error(data, params: RbmParams, up_scale: float = 1.0, down_scale: float = 1.0) -> float:
    """Mean over examples of ||v - p(v | p(h | v))||^2."""
    data = np.atleast_2d(_check(data, params.n_visible, "data"))
    v1 = prop_down(prop_up(data, params, up_scale), params, down_scale)
    return float(((data - v1) ** 2).sum(axis=1).mean())


def init_params(n_visible: int, n_hidden: int, cfg: CdConfig, rng: np.random.Generator) -> RbmParams:
    w = rng.uniform(-cfg.init_scale, cfg.init_scale, size=(n_visible, n_hidden))
    return RbmParams(w, np.zeros(n_visible), np.zeros(n_hidden))


def train_rbm(data, cfg: CdConfig, n_hidden: int, *, up_scale: float = 1.0, down_scale: float = 1.0,
              visible_bias=None):
    """Train an RBM with CD-n from small random weights and zero biases.

    ``visible_bias`` pins the visible bias to a fixed vector (not trained).
    Returns ``(params, errors)`` with the reconstruction error after each epoch.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or len(data) == 0:
        raise ValueError("training data must be a non-empty 2-D array")
    if n_hidden < 1:
        raise ValueError("n_hidden must be >= 1")
    rng = np.random.default_rng(cfg.seed)
    params = init_params(data.shape[1], n_hidden, cfg, rng)
    if visible_bias is not None:
        params = RbmParams(params.w, np.array(visible_bias, dtype=np.float64), params.c)
    errors = []
    for _ in range(cfg.epochs):
        order = rng.permutation(len(data))
        for start in range(0, len(data), cfg.batch_size):
            batch = data[order[start:start + cfg.batch_size]]
            params = cd_update(batch, params, cfg, rng, up_scale, down_scale,
                               train_visible_bias=visible_bias is None)
        errors.append(reconstruction_error(data, params, up_scale, down_scale))
    return params, errors


# exact quantities by enumeration, for small models

def enumerate_states(n: int) -> np.ndarray:
    """All 2^n binary vectors, rows in counting order (first unit most significant)."""
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limit exceeded ({n} units)")
    idx = np.arange(2 ** n)[:, None]
    return ((idx >> np.arange(n - 1, -1, -1)) & 1).astype(np.float64)


def joint_energies(params: RbmParams) -> np.ndarray:
    """Energy of every (v, h) state, shape (2^p_v, 2^p_h)."""
    if params.n_visible + params.n_hidden > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limit: p_v + p_h must be <= {ENUMERATION_LIMIT}")
    vs = enumerate_states(params.n_visible)
    hs = enumerate_states(params.n_hidden)
    return -(vs @ params.w @ hs.T) - (vs @ params.b)[:, None] - (hs @ params.c)[None, :]


def log_partition(params: RbmParams) -> float:
    return float(logsumexp(-joint_energies(params)))


def brute_force_partition(params: RbmParams) -> float:
    return float(np.exp(log_partition(params)))


def joint_probabilities(params: RbmParams) -> np.ndarray:
    neg = -joint_energies(params)
    return np.exp(neg - logsumexp(neg))


def exact_log_likelihood(data, params: RbmParams) -> float:
    """Mean log p(v) over binary data vectors, by enumerating the hidden layer."""
    data = np.atleast_2d(_check(data, params.n_visible, "data"))
    hs = enumerate_states(params.n_hidden)
    neg = (data @ params.w @ hs.T) + (data @ params.b)[:, None] + (hs @ params.c)[None, :]
    return float((logsumexp(neg, axis=1) - log_partition(params)).mean())
