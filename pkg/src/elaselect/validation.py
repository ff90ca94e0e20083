"""Validation protocols, the 98% gate, and exhaustive portfolio search."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import classifiers
from .dataset import FeatureDataset, SplitPlan, loio_split, normalize, subsample_split
from .features import FEATURE_NAMES

PROTOCOL_ALIASES = {
    "subsample": "subsample",
    "multi": "subsample_multi_instance",
    "subsample_multi_instance": "subsample_multi_instance",
    "loio": "loio",
}

# gate: accuracy >= 49/50
GATE_NUM, GATE_DEN = 49, 50


def passes_gate(correct: int, total: int) -> bool:
    """Integer form of ``correct / total >= 0.98``."""
    return total > 0 and correct * GATE_DEN >= GATE_NUM * total


def allowed_errors(total: int) -> int:
    """Largest error count that still passes the gate."""
    return total - -(-GATE_NUM * total // GATE_DEN)


def accuracy(predictions, truth=None) -> float:
    """Fraction correct from a confusion matrix or from (predictions, truth)."""
    if truth is None:
        C = np.asarray(predictions)
        total = C.sum()
        if total == 0:
            raise ValueError("empty confusion matrix")
        return float(np.trace(C) / total)
    p = np.asarray(predictions)
    t = np.asarray(truth)
    if p.shape != t.shape or p.size == 0:
        raise ValueError("predictions and truth must be nonempty and equally shaped")
    return float(np.mean(p == t))


@dataclass
class ValidationReport:
    protocol: str
    classifier: str
    subset: tuple
    classes: np.ndarray
    accuracies: list = field(default_factory=list)
    correct: list = field(default_factory=list)
    totals: list = field(default_factory=list)
    confusion: np.ndarray | None = None
    runs_planned: int = 0

    @property
    def passed(self) -> bool:
        return (len(self.totals) == self.runs_planned and self.runs_planned > 0
                and all(passes_gate(c, t) for c, t in zip(self.correct, self.totals)))

    @property
    def complete(self) -> bool:
        return len(self.totals) == self.runs_planned

    @property
    def min_accuracy(self) -> float:
        return min(self.accuracies)

    @property
    def median_accuracy(self) -> float:
        return float(np.median(self.accuracies))

    @property
    def mean_accuracy(self) -> float:
        return float(np.mean(self.accuracies))


def make_splits(ds: FeatureDataset, protocol: str, runs: int, master_seed: int) -> list[SplitPlan]:
    proto = PROTOCOL_ALIASES.get(protocol)
    if proto is None:
        raise ValueError(f"unknown protocol {protocol!r}")
    if proto == "loio":
        return [loio_split(ds, int(i)) for i in np.unique(ds.instances)]
    if runs < 1:
        raise ValueError("runs must be >= 1")
    multi = proto == "subsample_multi_instance"
    if multi and np.unique(ds.instances).size < 2:
        raise ValueError("multi-instance protocol needs at least two instances")
    return [subsample_split(ds, r, master_seed, multi_instance=multi) for r in range(runs)]


def run_validation(ds: FeatureDataset, subset: Sequence[str], classifier: str,
                   protocol: str = "subsample", runs: int = 20, master_seed: int = 0,
                   splits: Sequence[SplitPlan] | None = None, short_circuit: bool = False,
                   train_only_norm: bool = False, K: int = 5) -> ValidationReport:
    """Train and test ``classifier`` on ``subset`` over every split.

    ``ds`` is expected to be normalized already unless ``train_only_norm``
    is set, in which case constants are fitted on each training split.
    With ``short_circuit`` the loop stops at the first run below the gate.
    """
    subset = tuple(subset)
    bad = [s for s in subset if s not in FEATURE_NAMES]
    if bad or not subset:
        raise ValueError(f"invalid feature subset {subset!r}")
    if splits is None:
        splits = make_splits(ds, protocol, runs, master_seed)
    classes = np.unique(ds.labels)
    index = {int(c): i for i, c in enumerate(classes)}
    C = np.zeros((classes.size, classes.size), dtype=np.int64)
    rep = ValidationReport(PROTOCOL_ALIASES.get(protocol, protocol), classifier, subset,
                           classes, runs_planned=len(splits))
    y = ds.labels
    base = ds.matrix(subset) if not train_only_norm else None
    for plan in splits:
        X = base if base is not None else normalize(ds, plan.train).matrix(subset)
        model = classifiers.train(classifier, X[plan.train], y[plan.train], subset, K=K)
        pred = np.asarray(model.predict(X[plan.test]))
        truth = y[plan.test]
        np.add.at(C, ([index[int(t)] for t in truth], [index[int(p)] for p in pred]), 1)
        ok = int(np.sum(pred == truth))
        rep.correct.append(ok)
        rep.totals.append(int(truth.size))
        rep.accuracies.append(ok / truth.size)
        if short_circuit and not passes_gate(ok, truth.size):
            break
    rep.confusion = C
    return rep


@dataclass
class PortfolioResult:
    dimension: int
    sample_size: int
    classifier: str
    size: int | None
    subsets: list
    reports: dict
    evaluated: int
    best: tuple | None = None

    @property
    def found(self) -> bool:
        return self.size is not None


def _progress_key(rep: ValidationReport):
    passed_runs = 0
    for c, t in zip(rep.correct, rep.totals):
        if not passes_gate(c, t):
            break
        passed_runs += 1
    return (passed_runs, rep.min_accuracy)


def enumerate_minimal_portfolios(ds: FeatureDataset, classifier: str = "mj", master_seed: int = 0,
                                 runs: int = 20, protocol: str = "subsample",
                                 max_size: int = len(FEATURE_NAMES),
                                 on_subset: Callable | None = None) -> PortfolioResult:
    """Smallest feature subsets that pass the gate in every run.

    Subsets of size c = 1, 2, ... are tried in canonical lexicographic order
    against one shared list of splits; a subset is dropped at its first
    failing run. The search stops after the first size with any pass.
    """
    splits = make_splits(ds, protocol, runs, master_seed)
    evaluated = 0
    best_rep = None
    for c in range(1, max_size + 1):
        winners, reports = [], {}
        for subset in itertools.combinations(FEATURE_NAMES, c):
            rep = run_validation(ds, subset, classifier, protocol, splits=splits,
                                 short_circuit=True)
            evaluated += 1
            reports[subset] = rep
            if on_subset is not None:
                on_subset(subset, rep)
            if rep.passed:
                winners.append(subset)
            if best_rep is None or _progress_key(rep) > _progress_key(best_rep):
                best_rep = rep
        if winners:
            return PortfolioResult(ds.dimension, ds.sample_size, classifier, c, winners,
                                   {s: reports[s] for s in winners}, evaluated, winners[0])
    return PortfolioResult(ds.dimension, ds.sample_size, classifier, None, [], {}, evaluated,
                           best_rep.subset if best_rep else None)


# ---------------------------------------------------------------------------
# invariance


@dataclass
class InvarianceReport:
    theta: float
    functions: np.ndarray
    spreads: np.ndarray  # (features, functions): max - min of per-instance medians

    @property
    def max_spread(self) -> dict:
        return {n: float(self.spreads[i].max()) for i, n in enumerate(FEATURE_NAMES)}

    @property
    def invariant(self) -> dict:
        return {n: bool(self.spreads[i].max() <= self.theta) for i, n in enumerate(FEATURE_NAMES)}


def invariance_report(ds: FeatureDataset, theta: float = 0.1,
                      already_normalized: bool = False) -> InvarianceReport:
    """Flag features whose per-instance medians spread more than ``theta``.

    Values are min-max normalized over the whole multi-instance dataset first.
    """
    inst = np.unique(ds.instances)
    if inst.size < 2:
        raise ValueError("invariance report needs at least two instances per function")
    nd = ds if already_normalized else normalize(ds)
    funcs = np.unique(nd.labels)
    spreads = np.zeros((len(FEATURE_NAMES), funcs.size))
    for j, f in enumerate(funcs):
        med = []
        for i in inst:
            rows = (nd.labels == f) & (nd.instances == i)
            if not rows.any():
                raise ValueError(f"function {f} has no rows for instance {i}")
            med.append(np.median(nd.values[rows], axis=0))
        med = np.array(med)
        spreads[:, j] = med.max(axis=0) - med.min(axis=0)
    return InvarianceReport(theta, funcs, spreads)
