"""Sample generation and feature computation jobs for a configured grid."""
from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bbob import ProblemId, evaluate, make_instance
from .config import ExperimentConfig
from .dataset import FeatureDataset
from .features import FeatureMeta, compute_feature_vector
from .sobol import scale_to_domain, sobol_points

SEED_RANGE = 2 ** 20


def repetition_seeds(master_seed: int, d: int, n: int, fid: int, iid: int, reps: int) -> np.ndarray:
    """Sobol' skip offsets for the repetitions of one (d, n, function, instance)."""
    rng = np.random.default_rng([master_seed, d, n, fid, iid])
    return rng.integers(0, SEED_RANGE, size=reps)


def draw_sample(inst, n: int, seed: int) -> tuple[np.ndarray, np.ndarray]:
    X = scale_to_domain(sobol_points(inst.dimension, n, seed), -5.0, 5.0)
    return X, evaluate(inst, X)


@dataclass(frozen=True)
class FeatureJob:
    function_id: int
    instance_id: int
    dimension: int
    sample_size: int
    repetition: int
    seed: int

    @property
    def meta(self) -> FeatureMeta:
        return FeatureMeta(self.function_id, self.instance_id, self.dimension,
                           self.sample_size, self.repetition, self.seed)


def jobs_for(cfg: ExperimentConfig, d: int, n: int) -> list[FeatureJob]:
    out = []
    for fid in cfg.functions:
        for iid in cfg.instances:
            seeds = repetition_seeds(cfg.master_seed, d, n, fid, iid, cfg.repetitions)
            out.extend(FeatureJob(fid, iid, d, n, r + 1, int(s)) for r, s in enumerate(seeds))
    return out


def _run_group(args):
    """Features for all repetitions of one (function, instance); a worker task."""
    jobs, settings, samples = args
    inst = make_instance(ProblemId(jobs[0].function_id, jobs[0].instance_id, jobs[0].dimension))
    rows = []
    for k, job in enumerate(jobs):
        if samples is None:
            X, y = draw_sample(inst, job.sample_size, job.seed)
        else:
            X, y = samples[0][k], samples[1][k]
        fv = compute_feature_vector(X, y, job.meta, settings)
        rows.append(([getattr(job, c) for c in ("function_id", "instance_id", "dimension",
                                                 "sample_size", "repetition", "seed")],
                     fv.as_array()))
    return rows


def _groups(jobs):
    out: dict = {}
    for j in jobs:
        out.setdefault((j.function_id, j.instance_id), []).append(j)
    return [out[k] for k in sorted(out)]


def compute_dataset(cfg: ExperimentConfig, d: int, n: int, samples: "SampleSet | None" = None,
                    progress=None) -> FeatureDataset:
    """Feature dataset for one (d, n) group, rows ordered by (function, instance, repetition)."""
    if samples is not None:
        jobs = samples.jobs()
        groups = _groups(jobs)
        tasks = [(g, cfg.features, samples.arrays(g)) for g in groups]
    else:
        groups = _groups(jobs_for(cfg, d, n))
        tasks = [(g, cfg.features, None) for g in groups]
    results = []
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            for k, r in enumerate(ex.map(_run_group, tasks)):
                results.extend(r)
                if progress:
                    progress(k + 1, len(tasks))
    else:
        for k, t in enumerate(tasks):
            results.extend(_run_group(t))
            if progress:
                progress(k + 1, len(tasks))
    meta = np.array([m for m, _ in results], dtype=np.int64).reshape(-1, 6)
    values = np.array([v for _, v in results], dtype=float).reshape(-1, 10)
    order = np.lexsort((meta[:, 4], meta[:, 1], meta[:, 0]))
    return FeatureDataset(meta[order], values[order])


# ---------------------------------------------------------------------------
# sample files: one directory per (d, n) holding meta.npy, X.npy, y.npy


@dataclass(frozen=True, eq=False)
class SampleSet:
    meta: np.ndarray  # (N, 6) in FeatureMeta order
    X: np.ndarray     # (N, n, d)
    y: np.ndarray     # (N, n)

    def __post_init__(self):
        N = self.meta.shape[0]
        if self.X.ndim != 3 or self.X.shape[0] != N or self.y.shape != self.X.shape[:2]:
            raise ValueError("sample arrays have inconsistent shapes")
        if not (np.all(np.isfinite(self.X)) and np.all(np.isfinite(self.y))):
            raise ValueError("samples must be finite")
        n, d = self.X.shape[1:]
        if np.any(self.meta[:, 2] != d) or np.any(self.meta[:, 3] != n):
            raise ValueError("meta dimension/sample_size disagree with the arrays")

    def jobs(self) -> list[FeatureJob]:
        return [FeatureJob(*(int(v) for v in row)) for row in self.meta]

    def arrays(self, group: list[FeatureJob]):
        keys = {tuple(int(v) for v in row[[0, 1, 4]]): i for i, row in enumerate(self.meta)}
        idx = [keys[(j.function_id, j.instance_id, j.repetition)] for j in group]
        return self.X[idx], self.y[idx]


def generate_samples(cfg: ExperimentConfig, d: int, n: int) -> SampleSet:
    jobs = jobs_for(cfg, d, n)
    X = np.empty((len(jobs), n, d))
    y = np.empty((len(jobs), n))
    cache: dict = {}
    for k, j in enumerate(jobs):
        key = (j.function_id, j.instance_id)
        if key not in cache:
            cache.clear()
            cache[key] = make_instance(ProblemId(j.function_id, j.instance_id, d))
        X[k], y[k] = draw_sample(cache[key], n, j.seed)
    meta = np.array([[j.function_id, j.instance_id, d, n, j.repetition, j.seed] for j in jobs],
                    dtype=np.int64)
    return SampleSet(meta, X, y)


def save_samples(s: SampleSet, path: str) -> None:
    os.makedirs(path, exist_ok=True)
    for name in ("meta", "X", "y"):
        np.save(os.path.join(path, f"{name}.npy"), getattr(s, name), allow_pickle=False)


def load_samples(path: str) -> SampleSet:
    try:
        arrs = {n: np.load(os.path.join(path, f"{n}.npy"), allow_pickle=False)
                for n in ("meta", "X", "y")}
    except FileNotFoundError as exc:
        raise FileNotFoundError(f"incomplete sample directory {path}: {exc.filename} missing") from None
    return SampleSet(arrs["meta"].astype(np.int64), arrs["X"].astype(float), arrs["y"].astype(float))
