import itertools
from math import comb

import numpy as np
import pytest
from hypothesis import given, strategies as st

from elaselect.dataset import FeatureDataset, normalize
from elaselect.features import FEATURE_NAMES
from elaselect.validation import (accuracy, allowed_errors, enumerate_minimal_portfolios,
                                  invariance_report, make_splits, passes_gate, run_validation)


def synthetic(n_func=6, reps=10, informative=("lr2",), n_inst=1, seed=0, noise=0.01):
    """Informative features separate the classes; the rest are pure noise."""
    rng = np.random.default_rng(seed)
    meta, vals = [], []
    for f in range(1, n_func + 1):
        for i in range(1, n_inst + 1):
            for r in range(1, reps + 1):
                meta.append([f, i, 5, 1250, r, r])
                v = rng.random(10)
                for name in informative:
                    v[FEATURE_NAMES.index(name)] = f + noise * rng.standard_normal()
                vals.append(v)
    return normalize(FeatureDataset(np.array(meta), np.array(vals)))


def test_gate_arithmetic():
    assert allowed_errors(480) == 9
    assert allowed_errors(144) == 2
    assert passes_gate(471, 480) and not passes_gate(470, 480)
    assert passes_gate(142, 144) and not passes_gate(141, 144)
    assert passes_gate(49, 50) and not passes_gate(0, 0)


def test_accuracy_examples():
    assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0
    assert accuracy([2, 3, 1], [1, 2, 3]) == 0.0
    C = np.zeros((24, 24), dtype=int)
    C[0, 0], C[0, 1] = 470, 10
    assert accuracy(C) == pytest.approx(0.97917, abs=1e-5)
    assert not passes_gate(470, 480)
    with pytest.raises(ValueError):
        accuracy(np.zeros((2, 2)))


def test_degenerate_one_function():
    ds = synthetic(n_func=1)
    for clf in ("mj", "dt", "knn"):
        r = run_validation(ds, ["disp"], clf, runs=3)
        assert r.accuracies == [1.0, 1.0, 1.0] and r.passed


def test_report_consistency_and_determinism():
    ds = synthetic(noise=0.3)
    a = run_validation(ds, ["lr2", "skew"], "knn", runs=5, master_seed=4)
    b = run_validation(ds, ["lr2", "skew"], "knn", runs=5, master_seed=4)
    assert a.accuracies == b.accuracies and np.array_equal(a.confusion, b.confusion)
    assert np.trace(a.confusion) == sum(a.correct)
    assert np.trace(a.confusion) / a.confusion.sum() == pytest.approx(np.mean(a.accuracies))
    per_class_test = 2  # ceil(0.8*10) = 8 train, 2 test per function
    assert np.all(a.confusion.sum(axis=1) == per_class_test * 5)
    assert a.passed == all(passes_gate(c, t) for c, t in zip(a.correct, a.totals))


def test_gate_fails_on_one_bad_run():
    ds = synthetic()
    splits = make_splits(ds, "subsample", 3, 0)
    r = run_validation(ds, ["lr2"], "mj", splits=splits)
    assert r.passed
    r.correct[1] -= 3  # 9 of 12 in one run
    assert not r.passed


def test_short_circuit_stops():
    ds = synthetic(informative=())
    r = run_validation(ds, ["disp"], "mj", runs=20, short_circuit=True)
    assert len(r.accuracies) == 1 and not r.passed and not r.complete


def test_protocol_mismatch_rejected():
    with pytest.raises(ValueError):
        run_validation(synthetic(), ["lr2"], "mj", protocol="loio")
    with pytest.raises(ValueError):
        run_validation(synthetic(), ["lr2"], "mj", protocol="multi")
    with pytest.raises(ValueError):
        run_validation(synthetic(), ["nope"], "mj")
    with pytest.raises(ValueError):
        run_validation(synthetic(), ["lr2"], "mj", protocol="bogus")


def test_loio_and_multi():
    ds = synthetic(n_inst=5, reps=5)
    r = run_validation(ds, ["lr2"], "knn", protocol="loio")
    assert len(r.accuracies) == 5 and r.protocol == "loio"
    m = run_validation(ds, ["lr2"], "dt", protocol="multi", runs=4)
    assert len(m.accuracies) == 4 and m.protocol == "subsample_multi_instance"


def test_train_only_normalization_runs():
    ds = synthetic()
    r = run_validation(ds, ["lr2"], "mj", runs=2, train_only_norm=True)
    assert r.accuracies == [1.0, 1.0]


def test_known_single_feature_portfolio():
    ds = synthetic(informative=("nbc",))
    res = enumerate_minimal_portfolios(ds, "mj", runs=5)
    assert res.size == 1 and res.subsets == [("nbc",)]
    assert res.evaluated == 10


def test_known_pair_portfolio():
    # two features each separating half of the classes
    rng = np.random.default_rng(1)
    meta, vals = [], []
    for f in range(1, 5):
        for r in range(1, 11):
            meta.append([f, 1, 5, 1250, r, r])
            v = rng.random(10)
            v[0] = (f - 1) // 2 + 0.01 * rng.standard_normal()
            v[3] = (f - 1) % 2 + 0.01 * rng.standard_normal()
            vals.append(v)
    ds = normalize(FeatureDataset(np.array(meta), np.array(vals)))
    res = enumerate_minimal_portfolios(ds, "knn", runs=4)
    assert res.size == 2 and ("disp", "int") in res.subsets
    assert res.evaluated == 10 + comb(10, 2)
    # the predecessor level was exhausted without a pass
    for s in itertools.combinations(FEATURE_NAMES, 1):
        assert not run_validation(ds, s, "knn", runs=4).passed


def test_no_portfolio_found():
    ds = synthetic(informative=(), seed=3)
    res = enumerate_minimal_portfolios(ds, "mj", runs=2)
    assert res.size is None and not res.found and res.best is not None
    assert res.evaluated == sum(comb(10, c) for c in range(1, 11)) == 1023


def test_invariance_report():
    ds = synthetic(n_inst=3, reps=6, noise=0.0)
    # shift `int` per instance; everything else identical across instances
    vals = ds.values.copy()
    vals[:, FEATURE_NAMES.index("int")] += 0.5 * ds.instances
    base = vals[ds.instances == 1]
    for i in (2, 3):
        rows = ds.instances == i
        keep = [j for j in range(10) if FEATURE_NAMES[j] != "int"]
        vals[np.ix_(rows, keep)] = base[:, keep]
    rep = invariance_report(FeatureDataset(ds.meta, vals), theta=0.1)
    assert rep.invariant["int"] is False
    assert all(v for k, v in rep.invariant.items() if k != "int")
    with pytest.raises(ValueError):
        invariance_report(synthetic())
