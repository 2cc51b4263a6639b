"""Two-layer deep Boltzmann machine with greedy layer-wise pretraining.

Stage 1 trains (v, h1) with a doubled bottom-up input; stage 2 trains
(h1, h2) on the stage-1 hidden probabilities with a doubled top-down input.
Inference recombines both directions for h1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit, logsumexp

from scenedbm import rbm
from scenedbm.rbm import CdConfig, RbmParams

MEAN_FIELD_ITERS = 5


@dataclass
class DbmParams:
    w1: np.ndarray
    w2: np.ndarray
    b: np.ndarray
    c1: np.ndarray
    c2: np.ndarray

    def __post_init__(self):
        for name in ("w1", "w2", "b", "c1", "c2"):
            setattr(self, name, np.asarray(getattr(self, name), dtype=np.float64))
        pv, ph1 = self.w1.shape
        if self.w2.ndim != 2 or self.w2.shape[0] != ph1:
            raise ValueError(f"w2 shape {self.w2.shape} does not match w1 {self.w1.shape}")
        ph2 = self.w2.shape[1]
        if self.b.shape != (pv,) or self.c1.shape != (ph1,) or self.c2.shape != (ph2,):
            raise ValueError("bias lengths inconsistent with weight shapes")
        if not all(np.all(np.isfinite(getattr(self, n))) for n in ("w1", "w2", "b", "c1", "c2")):
            raise ValueError("DBM parameters must be finite")

    @property
    def sizes(self) -> tuple[int, int, int]:
        return self.w1.shape[0], self.w1.shape[1], self.w2.shape[1]

    @classmethod
    def zeros(cls, pv: int, ph1: int, ph2: int) -> DbmParams:
        return cls(np.zeros((pv, ph1)), np.zeros((ph1, ph2)), np.zeros(pv), np.zeros(ph1), np.zeros(ph2))

    def first_rbm(self) -> RbmParams:
        return RbmParams(self.w1, self.b, self.c1)

    def second_rbm(self) -> RbmParams:
        return RbmParams(self.w2, self.c1, self.c2)


@dataclass
class DbmConfig:
    sizes: tuple[int, int, int]
    layer1: CdConfig = field(default_factory=CdConfig)
    layer2: CdConfig = field(default_factory=CdConfig)

    def __post_init__(self):
        self.sizes = tuple(int(s) for s in self.sizes)
        if len(self.sizes) != 3 or min(self.sizes) < 1:
            raise ValueError("sizes must be three positive integers (p_v, p_h1, p_h2)")


@dataclass
class PretrainLog:
    layer1_errors: list
    layer2_errors: list
    stage2_inputs: np.ndarray
    h1_features: np.ndarray


def _check(x, n, what):
    x = np.asarray(x, dtype=np.float64)
    if x.shape[-1:] != (n,):
        raise ValueError(f"dimension mismatch: {what} has length {x.shape[-1:]}, expected {n}")
    return x


def dbm_energy(v, h1, h2, params: DbmParams):
    pv, ph1, ph2 = params.sizes
    v, h1, h2 = _check(v, pv, "v"), _check(h1, ph1, "h1"), _check(h2, ph2, "h2")
    return (-((v @ params.w1) * h1).sum(axis=-1) - ((h1 @ params.w2) * h2).sum(axis=-1)
            - v @ params.b - h1 @ params.c1 - h2 @ params.c2)


def doubled_prop_up_first(v, params: DbmParams):
    """p(h1 | v) with the bottom-up input counted twice."""
    return rbm.prop_up(v, params.first_rbm(), scale=2.0)


def prop_down_first(h1, params: DbmParams):
    return rbm.prop_down(h1, params.first_rbm())


def doubled_prop_down_second(h2, params: DbmParams):
    """p(h1 | h2) with the top-down input counted twice."""
    return rbm.prop_down(h2, params.second_rbm(), scale=2.0)


def prop_up_second(h1, params: DbmParams):
    return rbm.prop_up(h1, params.second_rbm())


def mean_field_h1(v, h2, params: DbmParams):
    """p(h1 | v, h2): bottom-up and top-down input with single weights."""
    pv, ph1, ph2 = params.sizes
    v, h2 = _check(v, pv, "v"), _check(h2, ph2, "h2")
    return expit(v @ params.w1 + h2 @ params.w2.T + params.c1)


def infer_hidden(v, params: DbmParams, iters: int = MEAN_FIELD_ITERS):
    """Bottom-up pass followed by ``iters`` alternating h1/h2 updates; returns (h1, h2)."""
    h1 = doubled_prop_up_first(v, params)
    h2 = prop_up_second(h1, params)
    for _ in range(iters):
        h1 = mean_field_h1(v, h2, params)
        h2 = prop_up_second(h1, params)
    return h1, h2


def extract_features(v, params: DbmParams, iters: int = MEAN_FIELD_ITERS):
    return infer_hidden(v, params, iters)[1]


def reconstruct(v, params: DbmParams, iters: int = MEAN_FIELD_ITERS):
    """Up to h2, then one top-down pass back to the visible layer."""
    _, h2 = infer_hidden(v, params, iters)
    h1 = doubled_prop_down_second(h2, params)
    return prop_down_first(h1, params)


def pretrain_dbm(data, cfg: DbmConfig):
    """Greedy layer-wise pretraining; returns ``(params, PretrainLog)``.

    The h1 bias learned in stage 1 is held fixed while stage 2 trains w2 and c2.
    """
    data = np.asarray(data, dtype=np.float64)
    if data.ndim != 2 or len(data) == 0:
        raise ValueError("training data must be a non-empty 2-D array")
    pv, ph1, ph2 = cfg.sizes
    if data.shape[1] != pv:
        raise ValueError(f"dimension mismatch: data has {data.shape[1]} columns, expected {pv}")

    first, err1 = rbm.train_rbm(data, cfg.layer1, ph1, up_scale=2.0, down_scale=1.0)
    stage2 = rbm.prop_up(data, first, scale=2.0)
    second, err2 = rbm.train_rbm(stage2, cfg.layer2, ph2, up_scale=1.0, down_scale=2.0,
                                 visible_bias=first.c)
    params = DbmParams(first.w, second.w, first.b, first.c, second.c)
    h1, _ = infer_hidden(data, params)
    return params, PretrainLog(err1, err2, stage2, h1)


def reconstruction_error(data, params: DbmParams) -> float:
    data = np.atleast_2d(np.asarray(data, dtype=np.float64))
    return float(((data - reconstruct(data, params)) ** 2).sum(axis=1).mean())


# exact quantities by enumeration, for small models

def joint_log_weights(params: DbmParams) -> np.ndarray:
    """-E for every (v, h1, h2) state, shape (2^p_v, 2^p_h1, 2^p_h2)."""
    pv, ph1, ph2 = params.sizes
    if pv + ph1 + ph2 > rbm.ENUMERATION_LIMIT:
        raise ValueError(f"enumeration limit: p_v + p_h1 + p_h2 must be <= {rbm.ENUMERATION_LIMIT}")
    vs, h1s, h2s = (rbm.enumerate_states(n) for n in (pv, ph1, ph2))
    vh1 = vs @ params.w1 @ h1s.T
    h1h2 = h1s @ params.w2 @ h2s.T
    return (vh1[:, :, None] + h1h2[None, :, :] + (vs @ params.b)[:, None, None]
            + (h1s @ params.c1)[None, :, None] + (h2s @ params.c2)[None, None, :])


def joint_probabilities(params: DbmParams) -> np.ndarray:
    lw = joint_log_weights(params)
    return np.exp(lw - logsumexp(lw))
