"""Experiment configuration: INI parsing, validation, hashing."""
from __future__ import annotations

import configparser
import dataclasses
import hashlib
import json
from dataclasses import dataclass, field

from .bbob import MAX_DIM, MIN_DIM
from .classifiers import CLASSIFIERS
from .features import FeatureSettings
from .validation import PROTOCOL_ALIASES

FULL_DIMENSIONS = (5, 10, 15, 20, 25, 30)
FULL_SAMPLES_PER_DIM = (30, 50, 100, 250, 650, 800, 1000)


class ConfigError(ValueError):
    """The configuration violates the schema."""


@dataclass(frozen=True)
class ExperimentConfig:
    dimensions: tuple = FULL_DIMENSIONS
    samples_per_dim: tuple = FULL_SAMPLES_PER_DIM
    repetitions: int = 100
    instances: tuple = (1,)
    functions: tuple = tuple(range(1, 25))
    classifiers: tuple = ("mj",)
    protocol: str = "subsample"
    runs: int = 20
    master_seed: int = 0
    theta: float = 0.1
    knn_k: int = 5
    train_only_norm: bool = False
    features: FeatureSettings = field(default_factory=FeatureSettings)
    out_dir: str = "results"
    workers: int = 1

    def __post_init__(self):
        self.validate()

    def validate(self) -> None:
        def fail(msg):
            raise ConfigError(msg)

        if not self.dimensions:
            fail("dimensions: at least one dimension required")
        for d in self.dimensions:
            if not MIN_DIM <= d <= MAX_DIM:
                fail(f"dimensions: {d} outside [{MIN_DIM}, {MAX_DIM}]")
        if not self.samples_per_dim or any(m < 1 for m in self.samples_per_dim):
            fail("samples_per_dim: positive integers required")
        for d in self.dimensions:
            for m in self.samples_per_dim:
                if m * d < 2 * d + 2:
                    fail(f"samples_per_dim: {m}*{d} points cannot fit the quadratic model")
        if self.repetitions < 5:
            fail("repetitions: at least 5 needed for an 80/20 split")
        if not self.instances or any(i < 1 for i in self.instances):
            fail("instances: positive integers required")
        if not self.functions or any(not 1 <= f <= 24 for f in self.functions):
            fail("functions: values must lie in 1..24")
        for c in self.classifiers:
            if c not in CLASSIFIERS:
                fail(f"classifiers: unknown {c!r} (choose from {', '.join(CLASSIFIERS)})")
        if self.protocol not in PROTOCOL_ALIASES:
            fail(f"protocol: unknown {self.protocol!r} (choose from subsample, multi, loio)")
        if self.runs < 1:
            fail("runs: must be >= 1")
        if self.master_seed < 0:
            fail("master_seed: must be non-negative")
        if not self.theta > 0:
            fail("theta: must be positive")
        if self.knn_k < 1:
            fail("knn_k: must be >= 1")
        if self.workers < 1:
            fail("workers: must be >= 1")
        if self.features.ic_count < 2 or not self.features.ic_lo_exp < self.features.ic_hi_exp:
            fail("features: invalid information-content grid")

    def sample_sizes(self, d: int) -> list[int]:
        return [m * d for m in self.samples_per_dim]

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)

    def hash(self) -> str:
        """Digest of every field that can change results."""
        data = self.to_dict()
        data.pop("out_dir")
        data.pop("workers")
        blob = json.dumps(data, sort_keys=True, default=list).encode()
        return hashlib.sha256(blob).hexdigest()[:16]

    def replace(self, **kw) -> "ExperimentConfig":
        return dataclasses.replace(self, **kw)


_INT_LISTS = ("dimensions", "samples_per_dim", "instances", "functions")
_INTS = ("repetitions", "runs", "master_seed", "knn_k", "workers")


def _int_list(text: str, key: str) -> tuple:
    out = []
    for part in text.replace(",", " ").split():
        if "-" in part[1:]:
            a, b = part.split("-", 1)
            out.extend(range(int(a), int(b) + 1))
        else:
            out.append(int(part))
    if not out:
        raise ConfigError(f"{key}: empty list")
    return tuple(out)


def parse_int_list(text: str, key: str = "value") -> tuple:
    try:
        return _int_list(text, key)
    except ValueError as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"{key}: expected integers, got {text!r}") from None


def from_ini(text: str, source: str = "<config>") -> ExperimentConfig:
    cp = configparser.ConfigParser()
    try:
        cp.read_string(text, source)
    except configparser.Error as exc:
        raise ConfigError(f"{source}: {exc}") from None
    known = {"experiment", "features"}
    extra = set(cp.sections()) - known
    if extra:
        raise ConfigError(f"{source}: unknown section(s) {sorted(extra)}")
    kw: dict = {}
    if cp.has_section("experiment"):
        sec = cp["experiment"]
        allowed = set(_INT_LISTS) | set(_INTS) | {
            "classifiers", "protocol", "theta", "train_only_norm", "out_dir"}
        for key, raw in sec.items():
            if key not in allowed:
                raise ConfigError(f"{source}: [experiment] unknown key {key!r}")
            try:
                if key in _INT_LISTS:
                    kw[key] = parse_int_list(raw, key)
                elif key in _INTS:
                    kw[key] = int(raw)
                elif key == "classifiers":
                    kw[key] = tuple(p for p in raw.replace(",", " ").split())
                elif key == "theta":
                    kw[key] = float(raw)
                elif key == "train_only_norm":
                    kw[key] = sec.getboolean(key)
                else:
                    kw[key] = raw.strip()
            except ValueError as exc:
                if isinstance(exc, ConfigError):
                    raise
                raise ConfigError(f"{source}: [experiment] {key}: bad value {raw!r}") from None
    if cp.has_section("features"):
        sec = cp["features"]
        fkw = {}
        types = {f.name: f.type for f in dataclasses.fields(FeatureSettings)}
        for key, raw in sec.items():
            if key not in types:
                raise ConfigError(f"{source}: [features] unknown key {key!r}")
            try:
                t = types[key]
                if t in (bool, "bool"):
                    fkw[key] = sec.getboolean(key)
                elif t in (int, "int"):
                    fkw[key] = int(raw)
                else:
                    fkw[key] = float(raw)
            except ValueError:
                raise ConfigError(f"{source}: [features] {key}: bad value {raw!r}") from None
        kw["features"] = FeatureSettings(**fkw)
    return ExperimentConfig(**kw)


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return from_ini(fh.read(), str(path))


def to_ini(cfg: ExperimentConfig) -> str:
    lines = ["[experiment]"]
    for key in _INT_LISTS:
        lines.append(f"{key} = {', '.join(map(str, getattr(cfg, key)))}")
    for key in _INTS:
        lines.append(f"{key} = {getattr(cfg, key)}")
    lines.append(f"classifiers = {', '.join(cfg.classifiers)}")
    lines.append(f"protocol = {cfg.protocol}")
    lines.append(f"theta = {cfg.theta!r}")
    lines.append(f"train_only_norm = {str(cfg.train_only_norm).lower()}")
    lines.append(f"out_dir = {cfg.out_dir}")
    lines.append("")
    lines.append("[features]")
    for f in dataclasses.fields(FeatureSettings):
        v = getattr(cfg.features, f.name)
        lines.append(f"{f.name} = {str(v).lower() if isinstance(v, bool) else repr(v)}")
    return "\n".join(lines) + "\n"
