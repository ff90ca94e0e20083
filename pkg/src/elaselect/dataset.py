"""Labeled feature datasets: normalization, validation splits, persistence."""
from __future__ import annotations

import csv
import io
import math
import os
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .features import FEATURE_NAMES, FeatureMeta, FeatureVector

META_COLUMNS = ("function_id", "instance_id", "dimension", "sample_size", "repetition", "seed")
HEADER = META_COLUMNS + FEATURE_NAMES

PROTOCOLS = ("subsample", "subsample_multi_instance", "loio")


class DatasetFormatError(ValueError):
    """A feature file could not be parsed."""


@dataclass(frozen=True, eq=False)
class FeatureDataset:
    """Feature vectors for one (dimension, sample_size) group.

    ``meta`` is an ``(N, 6)`` int array in :data:`META_COLUMNS` order and
    ``values`` an ``(N, 10)`` float array in :data:`FEATURE_NAMES` order.
    ``scaling`` holds ``(min, max)`` per feature once normalized.
    """

    meta: np.ndarray
    values: np.ndarray
    scaling: dict | None = None

    def __post_init__(self):
        meta = np.asarray(self.meta, dtype=np.int64).reshape(-1, len(META_COLUMNS))
        values = np.asarray(self.values, dtype=float).reshape(-1, len(FEATURE_NAMES))
        if meta.shape[0] != values.shape[0]:
            raise ValueError("meta and values disagree on the number of rows")
        if meta.shape[0]:
            for col in ("dimension", "sample_size"):
                if np.unique(meta[:, META_COLUMNS.index(col)]).size > 1:
                    raise ValueError(f"all rows of a dataset must share {col}")
            keys = meta[:, [0, 1, 4]]
            if np.unique(keys, axis=0).shape[0] != keys.shape[0]:
                raise ValueError("duplicate (function_id, instance_id, repetition) rows")
        meta.setflags(write=False)
        values.setflags(write=False)
        object.__setattr__(self, "meta", meta)
        object.__setattr__(self, "values", values)

    @classmethod
    def from_vectors(cls, vectors: Iterable[FeatureVector]) -> "FeatureDataset":
        vectors = list(vectors)
        meta = [[getattr(v.meta, c) for c in META_COLUMNS] for v in vectors]
        values = [v.as_array() for v in vectors]
        return cls(np.array(meta, dtype=np.int64).reshape(-1, 6),
                   np.array(values, dtype=float).reshape(-1, 10))

    def __len__(self) -> int:
        return self.meta.shape[0]

    def __eq__(self, other) -> bool:
        if not isinstance(other, FeatureDataset):
            return NotImplemented
        return (np.array_equal(self.meta, other.meta)
                and np.array_equal(self.values.view(np.int64), other.values.view(np.int64)))

    def column(self, name: str) -> np.ndarray:
        if name in META_COLUMNS:
            return self.meta[:, META_COLUMNS.index(name)]
        return self.values[:, FEATURE_NAMES.index(name)]

    @property
    def labels(self) -> np.ndarray:
        return self.column("function_id")

    @property
    def instances(self) -> np.ndarray:
        return self.column("instance_id")

    @property
    def dimension(self) -> int:
        return int(self.meta[0, 2])

    @property
    def sample_size(self) -> int:
        return int(self.meta[0, 3])

    def matrix(self, names: Sequence[str] = FEATURE_NAMES) -> np.ndarray:
        return self.values[:, [FEATURE_NAMES.index(n) for n in names]]

    def keys(self) -> list[tuple]:
        """Row identity ``(function_id, instance_id, dimension, sample_size, repetition)``."""
        return [tuple(int(v) for v in row[:5]) for row in self.meta]

    def subset(self, rows) -> "FeatureDataset":
        rows = np.asarray(rows)
        return FeatureDataset(self.meta[rows], self.values[rows], self.scaling)

    def vectors(self) -> list[FeatureVector]:
        return [FeatureVector(dict(zip(FEATURE_NAMES, map(float, v))),
                              FeatureMeta(*(int(m) for m in row)))
                for row, v in zip(self.meta, self.values)]


def concat(datasets: Sequence[FeatureDataset]) -> FeatureDataset:
    return FeatureDataset(np.vstack([d.meta for d in datasets]),
                          np.vstack([d.values for d in datasets]))


# ---------------------------------------------------------------------------
# normalization


def normalize(ds: FeatureDataset, fit_rows=None) -> FeatureDataset:
    """Min-max scale every feature column to [0, 1].

    Constants come from all rows by default (pooled train and test). Passing
    ``fit_rows`` derives them from those rows only; other rows may then fall
    outside [0, 1]. Constant columns map to 0.
    """
    if len(ds) == 0:
        raise ValueError("cannot normalize an empty dataset")
    ref = ds.values if fit_rows is None else ds.values[np.asarray(fit_rows)]
    lo = ref.min(axis=0)
    hi = ref.max(axis=0)
    span = hi - lo
    safe = np.where(span > 0, span, 1.0)
    out = np.where(span > 0, (ds.values - lo) / safe, 0.0)
    if fit_rows is None:
        # guard against 1 - ulp at the maximum
        out = np.clip(out, 0.0, 1.0)
    scaling = {n: (float(lo[i]), float(hi[i])) for i, n in enumerate(FEATURE_NAMES)}
    return FeatureDataset(ds.meta, out, scaling)


# ---------------------------------------------------------------------------
# splits


@dataclass(frozen=True, eq=False)
class SplitPlan:
    train: np.ndarray
    test: np.ndarray
    protocol: str
    run_index: int
    rng_seed: int

    def __post_init__(self):
        if np.intersect1d(self.train, self.test).size:
            raise ValueError("train and test rows overlap")

    def __eq__(self, other) -> bool:
        if not isinstance(other, SplitPlan):
            return NotImplemented
        return (np.array_equal(self.train, other.train) and np.array_equal(self.test, other.test)
                and self.protocol == other.protocol)

    def keys(self, ds: FeatureDataset):
        k = ds.keys()
        return {k[i] for i in self.train}, {k[i] for i in self.test}


def n_train(reps: int) -> int:
    return math.ceil(round(0.8 * reps, 9))


def subsample_split(ds: FeatureDataset, run_index: int, rng_seed: int,
                    multi_instance: bool = False) -> SplitPlan:
    """Random 80/20 split of repetitions within each function.

    With ``multi_instance`` the split is made within each (function, instance)
    group. Deterministic in ``(run_index, rng_seed)``.
    """
    if multi_instance:
        groups = ds.meta[:, 0] * 100_000 + ds.meta[:, 1]
        protocol = "subsample_multi_instance"
    else:
        if np.unique(ds.instances).size > 1:
            raise ValueError("single-instance subsampling on multi-instance data; "
                             "use the multi-instance protocol")
        groups = ds.meta[:, 0]
        protocol = "subsample"
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence([rng_seed, run_index])))
    train, test = [], []
    for g in np.unique(groups):
        rows = np.flatnonzero(groups == g)
        rows = rows[np.argsort(ds.meta[rows, 4], kind="stable")]
        if rows.size < 5:
            raise ValueError(f"group {g} has {rows.size} repetitions; need at least 5")
        perm = rng.permutation(rows)
        k = n_train(rows.size)
        train.append(perm[:k])
        test.append(perm[k:])
    return SplitPlan(np.sort(np.concatenate(train)), np.sort(np.concatenate(test)),
                     protocol, run_index, rng_seed)


def loio_split(ds: FeatureDataset, held_out_instance: int) -> SplitPlan:
    """Train on every instance except ``held_out_instance``, test on it."""
    inst = ds.instances
    present = np.unique(inst)
    if present.size < 2:
        raise ValueError("leave-one-instance-out needs at least two instances")
    if held_out_instance not in present:
        raise ValueError(f"instance {held_out_instance} not in dataset (have {present.tolist()})")
    test = np.flatnonzero(inst == held_out_instance)
    train = np.flatnonzero(inst != held_out_instance)
    return SplitPlan(train, test, "loio", int(held_out_instance), 0)


# ---------------------------------------------------------------------------
# persistence


def _fmt(v: float) -> str:
    return repr(float(v))


def dumps(ds: FeatureDataset, comments: Sequence[str] = ()) -> str:
    buf = io.StringIO()
    for c in comments:
        buf.write(f"# {c}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(HEADER)
    for m, v in zip(ds.meta, ds.values):
        w.writerow([str(int(x)) for x in m] + [_fmt(x) for x in v])
    return buf.getvalue()


def save(ds: FeatureDataset, path, comments: Sequence[str] = ()) -> None:
    os.makedirs(os.path.dirname(os.fspath(path)) or ".", exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(dumps(ds, comments))


def loads(text: str, source: str = "<string>") -> FeatureDataset:
    lines = text.splitlines()
    body = [(i + 1, ln) for i, ln in enumerate(lines) if ln.strip() and not ln.startswith("#")]
    if not body:
        raise DatasetFormatError(f"{source}: no header line")
    head_line, head = body[0]
    header = next(csv.reader([head]))
    missing = [c for c in HEADER if c not in header]
    if missing:
        raise DatasetFormatError(f"{source}:{head_line}: missing column(s) {', '.join(missing)}")
    pos = [header.index(c) for c in HEADER]
    meta, values = [], []
    for lineno, line in body[1:]:
        row = next(csv.reader([line]))
        if len(row) != len(header):
            raise DatasetFormatError(
                f"{source}:{lineno}: expected {len(header)} fields, found {len(row)}")
        m, v = [], []
        for k, (name, p) in enumerate(zip(HEADER, pos)):
            cell = row[p].strip()
            try:
                if k < len(META_COLUMNS):
                    m.append(int(cell))
                else:
                    x = float.fromhex(cell) if cell.lower().startswith(("0x", "-0x")) else float(cell)
                    if not math.isfinite(x):
                        raise ValueError("non-finite")
                    v.append(x)
            except ValueError:
                raise DatasetFormatError(
                    f"{source}:{lineno}:{p + 1}: bad value {cell!r} for column {name}") from None
        meta.append(m)
        values.append(v)
    try:
        return FeatureDataset(np.array(meta, dtype=np.int64).reshape(-1, 6),
                              np.array(values, dtype=float).reshape(-1, 10))
    except ValueError as exc:
        raise DatasetFormatError(f"{source}: {exc}") from None


def load(path) -> FeatureDataset:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read(), str(path))


def read_comments(path) -> dict:
    """``key=value`` pairs from the leading ``#`` lines of a feature file."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            k, sep, v = line[1:].strip().partition("=")
            if sep:
                out[k.strip()] = v.strip()
    return out
