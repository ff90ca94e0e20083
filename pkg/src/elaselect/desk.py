"""Desk-scale feature datasets shared by the acceptance suite and scripts."""
from __future__ import annotations

import os
import time

from . import dataset as dsmod
from .config import ExperimentConfig
from .pipeline import compute_dataset

REPETITIONS = 30
RUNS = 20
MASTER_SEED = 0

# (dimension, samples per dimension, instances)
GROUPS = ((5, 250, (1, 2, 3, 4, 5)), (10, 650, (1,)))


def default_dir() -> str:
    here = os.path.dirname(os.path.abspath(__file__))
    root = os.path.dirname(os.path.dirname(here))
    return os.environ.get("ELASELECT_DESK_DIR", os.path.join(root, "results", "desk"))


def desk_config(d: int, m: int, instances, out_dir: str) -> ExperimentConfig:
    return ExperimentConfig(dimensions=(d,), samples_per_dim=(m,), repetitions=REPETITIONS,
                            instances=tuple(instances), runs=RUNS, master_seed=MASTER_SEED,
                            out_dir=out_dir)


def feature_file(out_dir: str, d: int, n: int) -> str:
    return os.path.join(out_dir, "features", f"features_d{d}_n{n}.csv")


def ensure(d: int, m: int, instances, out_dir: str | None = None, verbose: bool = False,
           workers: int = 1) -> dsmod.FeatureDataset:
    """Load the cached dataset, computing it first if absent or stale."""
    out_dir = out_dir or default_dir()
    cfg = desk_config(d, m, instances, out_dir)
    n = m * d
    path = feature_file(out_dir, d, n)
    if os.path.exists(path) and dsmod.read_comments(path).get("config_hash") == cfg.hash():
        return dsmod.load(path)
    t0 = time.time()

    def progress(k, total):
        if verbose:
            print(f"  d={d} n={n}: {k}/{total} groups ({time.time() - t0:.0f}s)", flush=True)

    ds = compute_dataset(cfg.replace(workers=workers), d, n, progress=progress)
    dsmod.save(ds, path, comments=[f"config_hash={cfg.hash()}", f"dimension={d}",
                                   f"sample_size={n}"])
    return ds
