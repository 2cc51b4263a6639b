"""End-to-end orchestration: images -> superpixel grid -> DBM features -> softmax."""

from __future__ import annotations

import logging
import os
import time
from dataclasses import dataclass, field

import numpy as np

from scenedbm import dbm as dbm_mod
from scenedbm import softmax as sm
from scenedbm.config import PipelineConfig
from scenedbm.dbm import DbmParams
from scenedbm.netpbm import Image, is_netpbm_path, read_netpbm, resize
from scenedbm.slic import rgb_to_lab, run_slic_lab, superpixels_to_grid
from scenedbm.softmax import LabeledSet, SoftmaxParams

log = logging.getLogger(__name__)


class PipelineError(RuntimeError):
    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage}: {cause}")
        self.stage = stage


@dataclass
class Dataset:
    root: str
    classes: list[str]
    items: list[tuple[str, int]]
    split: list[str]
    seed: int

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    def subset(self, which: str) -> list[tuple[str, int]]:
        return [item for item, s in zip(self.items, self.split) if s == which]


@dataclass
class TrainingLog:
    stage_seconds: dict = field(default_factory=dict)
    layer1_errors: list = field(default_factory=list)
    layer2_errors: list = field(default_factory=list)
    dbm_reconstruction_error: float = float("nan")
    softmax_costs: list = field(default_factory=list)
    train_accuracy: float = float("nan")


@dataclass
class EvalReport:
    classes: list[str]
    recognition_rate: float
    confusion: np.ndarray
    per_class_rate: np.ndarray
    wall_time_seconds: float

    def to_text(self) -> str:
        width = max([len(c) for c in self.classes] + [5])
        lines = [f"{'class':<{width}}  tested  correct    rate"]
        for i, name in enumerate(self.classes):
            tested = int(self.confusion[i].sum())
            lines.append(f"{name:<{width}}  {tested:6d}  {int(self.confusion[i, i]):7d}  {self.per_class_rate[i]:6.4f}")
        total = int(self.confusion.sum())
        lines.append(f"{'total':<{width}}  {total:6d}  {int(np.trace(self.confusion)):7d}  {self.recognition_rate:6.4f}")
        lines.append("")
        lines.append("[results]")
        lines.append(f"classes={','.join(self.classes)}")
        lines.append(f"recognition_rate={self.recognition_rate!r}")
        lines.append(f"confusion_shape={len(self.classes)}x{len(self.classes)}")
        lines.append("confusion=" + " ".join(str(int(c)) for c in self.confusion.ravel()))
        lines.append(f"wall_time_seconds={self.wall_time_seconds:.3f}")
        return "\n".join(lines) + "\n"


def parse_report(text: str) -> dict:
    """Read back the machine-readable ``[results]`` section of a report."""
    _, _, tail = text.partition("[results]\n")
    fields = dict(line.split("=", 1) for line in tail.splitlines() if "=" in line)
    k = int(fields["confusion_shape"].split("x")[0])
    return {
        "classes": fields["classes"].split(","),
        "recognition_rate": float(fields["recognition_rate"]),
        "confusion": np.array(fields["confusion"].split(), dtype=np.int64).reshape(k, k),
        "wall_time_seconds": float(fields["wall_time_seconds"]),
    }


def load_dataset(root, train_per_class: int, test_per_class: int, seed: int = 0,
                 validate: bool = True) -> Dataset:
    """One subdirectory per class (sorted by name) holding PGM/PPM files.

    Each class is shuffled with its own seeded generator; the first
    ``train_per_class`` items go to training, the next ``test_per_class`` to test.
    """
    root = str(root)
    classes = sorted(d for d in os.listdir(root) if os.path.isdir(os.path.join(root, d)))
    if not classes:
        raise ValueError(f"{root}: no class subdirectories")
    items, split = [], []
    for k, name in enumerate(classes):
        folder = os.path.join(root, name)
        files = sorted(f for f in os.listdir(folder) if is_netpbm_path(f))
        if not files:
            raise ValueError(f"{folder}: empty class directory")
        need = train_per_class + test_per_class
        if len(files) < need:
            raise ValueError(f"insufficient images for class {name!r}: {len(files)} < {need}")
        order = np.random.default_rng([seed, k]).permutation(len(files))
        for rank, i in enumerate(order):
            path = os.path.join(folder, files[i])
            if rank < train_per_class:
                which = "train"
            elif rank < need:
                which = "test"
            else:
                which = "unused"
            if validate and which != "unused":
                read_netpbm(path)
            items.append((path, k))
            split.append(which)
    return Dataset(root, classes, items, split, seed)


def preprocess(image: Image, cfg: PipelineConfig) -> np.ndarray:
    """Resize, SLIC with K = grid cells, then the grid luminance vector."""
    image = resize(image, cfg.working_size, cfg.working_size)
    lab = rgb_to_lab(image)
    smap = run_slic_lab(lab, cfg.slic)
    return superpixels_to_grid(smap, lab, *cfg.grid)


def mean_pool_baseline(image: Image, cfg: PipelineConfig) -> np.ndarray:
    """Block-mean luminance in [0, 1] per grid cell, row-major."""
    gw, gh = cfg.grid
    size = cfg.working_size
    if size % gw or size % gh:
        raise ValueError(f"working size {size} not divisible by grid {gw}x{gh}")
    image = resize(image, size, size)
    lum = rgb_to_lab(image).data[..., 0] / 100.0
    blocks = lum.reshape(gh, size // gh, gw, size // gw)
    return np.clip(blocks.mean(axis=(1, 3)).ravel(), 0.0, 1.0)


def featurize(image: Image, cfg: PipelineConfig) -> np.ndarray:
    if cfg.preprocessing == "pool":
        return mean_pool_baseline(image, cfg)
    return preprocess(image, cfg)


def featurize_items(items, cfg: PipelineConfig) -> np.ndarray:
    return np.array([featurize(read_netpbm(path), cfg) for path, _ in items]).reshape(len(items), cfg.n_visible)


def _stage(name, timings, fn, *args):
    start = time.perf_counter()
    try:
        result = fn(*args)
    except Exception as e:
        raise PipelineError(name, e) from e
    timings[name] = time.perf_counter() - start
    log.info("%s done in %.2fs", name, timings[name])
    return result


def pretrain(dataset: Dataset, cfg: PipelineConfig, timings: dict | None = None):
    """Preprocess the training split and pretrain the DBM; returns (params, PretrainLog, inputs)."""
    timings = {} if timings is None else timings
    train = dataset.subset("train")
    if not train:
        raise PipelineError("preprocess", ValueError("empty training split"))
    inputs = _stage("preprocess", timings, featurize_items, train, cfg)
    params, plog = _stage("pretrain", timings, dbm_mod.pretrain_dbm, inputs, cfg.dbm)
    return params, plog, inputs


def run_training(dataset: Dataset, cfg: PipelineConfig):
    """Returns ``(dbm_params, softmax_params, TrainingLog)``."""
    tlog = TrainingLog()
    params, plog, inputs = pretrain(dataset, cfg, tlog.stage_seconds)
    tlog.layer1_errors, tlog.layer2_errors = plog.layer1_errors, plog.layer2_errors
    tlog.dbm_reconstruction_error = dbm_mod.reconstruction_error(inputs, params)

    feats = _stage("extract", tlog.stage_seconds, dbm_mod.extract_features, inputs, params)
    labels = np.array([k for _, k in dataset.subset("train")]) + 1
    data = LabeledSet(feats, labels, dataset.n_classes)
    classifier, costs = _stage("softmax", tlog.stage_seconds, sm.train_softmax, data,
                               cfg.softmax_lambda, cfg.softmax_alpha, cfg.softmax_iters)
    tlog.softmax_costs = costs
    tlog.train_accuracy = float(np.mean(sm.predict(feats, classifier) == labels))
    return params, classifier, tlog


def evaluate(dataset: Dataset, models: tuple[DbmParams, SoftmaxParams], cfg: PipelineConfig,
             which: str = "test") -> EvalReport:
    params, classifier = models
    if params.sizes != (cfg.n_visible, *cfg.hidden):
        raise ValueError(f"DBM sizes {params.sizes} do not match config {(cfg.n_visible, *cfg.hidden)}")
    if classifier.n_features != params.sizes[2] or classifier.n_classes != dataset.n_classes:
        raise ValueError("softmax dimensions do not match the DBM output / dataset classes")
    start = time.perf_counter()
    items = dataset.subset(which)
    k = dataset.n_classes
    confusion = np.zeros((k, k), dtype=np.int64)
    if items:
        feats = dbm_mod.extract_features(featurize_items(items, cfg), params)
        predicted = sm.predict(feats, classifier) - 1
        for (_, truth), guess in zip(items, predicted):
            confusion[truth, guess] += 1
    return report_from_confusion(dataset.classes, confusion, time.perf_counter() - start)


def report_from_confusion(classes, confusion, seconds: float) -> EvalReport:
    confusion = np.asarray(confusion, dtype=np.int64)
    total = confusion.sum()
    rows = confusion.sum(axis=1)
    rate = float(np.trace(confusion) / total) if total else 0.0
    per_class = np.divide(np.diag(confusion), rows, out=np.zeros(len(rows)), where=rows > 0)
    return EvalReport(list(classes), rate, confusion, per_class, seconds)


def compare_preprocessing(dataset: Dataset, cfg: PipelineConfig) -> dict[str, EvalReport]:
    """Train and evaluate with SLIC and with block pooling on the same split."""
    reports = {}
    for method in ("slic", "pool"):
        run_cfg = cfg.replace(preprocessing=method)
        params, classifier, _ = run_training(dataset, run_cfg)
        reports[method] = evaluate(dataset, (params, classifier), run_cfg)
    return reports
