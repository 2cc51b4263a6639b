"""Pipeline configuration and its ``key = value`` text format."""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field

from scenedbm.dbm import DbmConfig
from scenedbm.rbm import CdConfig
from scenedbm.slic import SlicConfig

PREPROCESSORS = ("slic", "pool")


class ConfigError(ValueError):
    pass


@dataclass
class PipelineConfig:
    working_size: int = 200
    grid: tuple[int, int] = (40, 40)
    hidden: tuple[int, int] = (1000, 500)
    compactness: float = 10.0
    residual_threshold: float = 1.0
    slic_max_iters: int = 10
    slic_jitter: bool = False
    slic_seed: int = 0
    layer1: CdConfig = field(default_factory=CdConfig)
    layer2: CdConfig = field(default_factory=lambda: CdConfig(seed=1))
    softmax_lambda: float = 1e-4
    softmax_alpha: float = 0.5
    softmax_iters: int = 500
    train_per_class: int = 200
    test_per_class: int = 20
    preprocessing: str = "slic"
    seed: int = 0

    def __post_init__(self):
        self.grid = tuple(int(g) for g in self.grid)
        self.hidden = tuple(int(h) for h in self.hidden)
        if len(self.grid) != 2 or min(self.grid) < 1:
            raise ConfigError("grid must be two positive integers")
        if len(self.hidden) != 2 or min(self.hidden) < 1:
            raise ConfigError("hidden must be two positive integers")
        if self.working_size < 1:
            raise ConfigError("working_size must be >= 1")
        if self.preprocessing not in PREPROCESSORS:
            raise ConfigError(f"preprocessing must be one of {PREPROCESSORS}")
        if self.train_per_class < 1 or self.test_per_class < 0:
            raise ConfigError("train_per_class must be >= 1 and test_per_class >= 0")
        # surface slic/dbm validation errors at construction time
        self.slic
        self.dbm

    @property
    def n_visible(self) -> int:
        return self.grid[0] * self.grid[1]

    @property
    def slic(self) -> SlicConfig:
        return SlicConfig(k=self.n_visible, compactness=self.compactness,
                          residual_threshold=self.residual_threshold, max_iters=self.slic_max_iters,
                          jitter=self.slic_jitter, seed=self.slic_seed)

    @property
    def dbm(self) -> DbmConfig:
        return DbmConfig((self.n_visible, *self.hidden), self.layer1, self.layer2)

    def replace(self, **changes) -> PipelineConfig:
        return dataclasses.replace(self, **changes)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_pair(text: str) -> tuple[int, int]:
    parts = text.lower().replace(",", "x").split("x")
    if len(parts) != 2:
        raise ValueError(f"expected WxH, got {text!r}")
    return int(parts[0]), int(parts[1])


_PARSERS = {int: int, float: float, bool: _parse_bool, str: str}


def to_dict(cfg: PipelineConfig) -> dict[str, str]:
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, CdConfig):
            for sub in dataclasses.fields(value):
                out[f"{f.name}.{sub.name}"] = repr(getattr(value, sub.name))
        elif isinstance(value, tuple):
            out[f.name] = f"{value[0]}x{value[1]}"
        elif isinstance(value, str):
            out[f.name] = value
        else:
            out[f.name] = repr(value)
    return out


def dumps(cfg: PipelineConfig) -> str:
    return "".join(f"{k} = {v}\n" for k, v in to_dict(cfg).items())


def loads(text: str, source: str = "<config>") -> PipelineConfig:
    top = {f.name: f.type for f in dataclasses.fields(PipelineConfig)}
    cd_types = {f.name: f.type for f in dataclasses.fields(CdConfig)}
    values: dict = {}
    layers: dict = {"layer1": {}, "layer2": {}}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value'")
        key, value = (p.strip() for p in line.split("=", 1))
        try:
            if "." in key:
                layer, sub = key.split(".", 1)
                if layer not in layers or sub not in cd_types:
                    raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
                layers[layer][sub] = _PARSERS[_resolve(cd_types[sub])](value)
            elif key in ("grid", "hidden"):
                values[key] = _parse_pair(value)
            elif key in top and key not in layers:
                values[key] = _PARSERS[_resolve(top[key])](value)
            else:
                raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        except ConfigError:
            raise
        except ValueError as e:
            raise ConfigError(f"{source}:{lineno}: bad value for {key!r}: {e}") from None
    try:
        defaults = PipelineConfig.__dataclass_fields__
        for layer, subs in layers.items():
            base = defaults[layer].default_factory()
            values[layer] = dataclasses.replace(base, **subs)
        return PipelineConfig(**values)
    except (ValueError, TypeError) as e:
        raise ConfigError(f"{source}: {e}") from None


def _resolve(annotation):
    # annotations are strings under ``from __future__ import annotations``
    return {"int": int, "float": float, "bool": bool, "str": str}.get(annotation, annotation)


def load_config(path) -> PipelineConfig:
    with open(path, encoding="utf-8") as f:
        return loads(f.read(), str(path))
