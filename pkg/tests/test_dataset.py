import numpy as np
import pytest
from hypothesis import given, strategies as st

from elaselect.dataset import (HEADER, DatasetFormatError, FeatureDataset, concat, dumps,
                               load, loads, loio_split, n_train, normalize, read_comments,
                               save, subsample_split)
from elaselect.features import FEATURE_NAMES, FeatureMeta, FeatureVector


def make_ds(n_func=4, n_inst=1, reps=10, seed=0, d=5, n=1250):
    rng = np.random.default_rng(seed)
    meta = [[f, i, d, n, r, int(rng.integers(0, 1000))]
            for f in range(1, n_func + 1) for i in range(1, n_inst + 1)
            for r in range(1, reps + 1)]
    values = rng.standard_normal((len(meta), 10)) * rng.uniform(0.1, 100, 10)
    return FeatureDataset(np.array(meta), values)


def test_header_is_canonical():
    assert ",".join(HEADER) == ("function_id,instance_id,dimension,sample_size,repetition,seed,"
                                "disp,skew,lr2,int,max,eps_s,eps_ratio,nbc,pca,qr2")


def test_invariants_enforced():
    ds = make_ds()
    meta = ds.meta.copy()
    meta[1] = meta[0]
    with pytest.raises(ValueError, match="duplicate"):
        FeatureDataset(meta, ds.values)
    meta = ds.meta.copy()
    meta[0, 2] = 10
    with pytest.raises(ValueError, match="dimension"):
        FeatureDataset(meta, ds.values)


def test_from_vectors_roundtrip():
    ds = make_ds(n_func=2, reps=5)
    back = FeatureDataset.from_vectors(ds.vectors())
    assert back == ds
    v = ds.vectors()[0]
    assert isinstance(v, FeatureVector) and isinstance(v.meta, FeatureMeta)


def test_normalize_examples():
    vals = np.zeros((3, 10))
    vals[:, 0] = [2, 4, 6]
    vals[:, 1] = 5
    meta = [[1, 1, 2, 10, r, 0] for r in (1, 2, 3)]
    out = normalize(FeatureDataset(meta, vals))
    assert out.values[:, 0].tolist() == [0.0, 0.5, 1.0]
    assert out.values[:, 1].tolist() == [0.0, 0.0, 0.0]
    assert out.scaling["disp"] == (2.0, 6.0)


@given(st.integers(0, 10_000))
def test_normalize_bounds_and_idempotence(seed):
    ds = make_ds(seed=seed, reps=6)
    a = normalize(ds)
    assert np.all((a.values >= 0) & (a.values <= 1))
    assert np.all(a.values.min(axis=0) == 0) and np.all(a.values.max(axis=0) == 1)
    for j in range(10):
        assert a.values[np.argmin(ds.values[:, j]), j] == 0.0
        assert a.values[np.argmax(ds.values[:, j]), j] == 1.0
    assert normalize(a) == a


def test_normalize_train_only():
    ds = make_ds()
    rows = np.arange(0, len(ds), 2)
    out = normalize(ds, fit_rows=rows)
    assert out.values[rows].min() == 0.0 and out.values[rows].max() == 1.0
    with pytest.raises(ValueError):
        normalize(FeatureDataset(np.zeros((0, 6)), np.zeros((0, 10))))


def test_n_train():
    assert n_train(100) == 80 and n_train(30) == 24 and n_train(5) == 4 and n_train(7) == 6


def test_subsample_counts_full_scale():
    ds = make_ds(n_func=24, reps=100)
    plan = subsample_split(ds, 0, 0)
    assert plan.test.size == 24 * 20 == 480
    for f in range(1, 25):
        assert np.count_nonzero(ds.labels[plan.train] == f) == 80
        assert np.count_nonzero(ds.labels[plan.test] == f) == 20


@given(st.integers(0, 2 ** 32 - 1), st.integers(0, 50))
def test_split_disjoint_deterministic(seed, run):
    ds = make_ds(n_func=3, reps=12)
    a = subsample_split(ds, run, seed)
    b = subsample_split(ds, run, seed)
    assert a == b
    assert np.intersect1d(a.train, a.test).size == 0
    assert np.union1d(a.train, a.test).size == len(ds)
    tr, te = a.keys(ds)
    assert not tr & te


def test_split_determinism_100_seeds():
    ds = make_ds(n_func=5, reps=30)
    for seed in range(100):
        a = subsample_split(ds, seed % 20, seed)
        assert a == subsample_split(ds, seed % 20, seed)
        assert np.intersect1d(a.train, a.test).size == 0


def test_twenty_distinct_runs():
    ds = make_ds(n_func=24, reps=30)
    plans = [subsample_split(ds, r, 0) for r in range(20)]
    tests = {p.test.tobytes() for p in plans}
    assert len(tests) == 20


def test_split_independent_of_row_order():
    ds = make_ds(n_func=3, reps=10)
    perm = np.random.default_rng(0).permutation(len(ds))
    shuffled = ds.subset(perm)
    a, b = subsample_split(ds, 3, 7), subsample_split(shuffled, 3, 7)
    assert a.keys(ds) == b.keys(shuffled)


def test_split_rejects_few_reps():
    with pytest.raises(ValueError, match="at least 5"):
        subsample_split(make_ds(reps=4), 0, 0)


def test_multi_instance_split():
    ds = make_ds(n_func=3, n_inst=5, reps=10)
    with pytest.raises(ValueError):
        subsample_split(ds, 0, 0)
    plan = subsample_split(ds, 0, 0, multi_instance=True)
    for f in range(1, 4):
        for i in range(1, 6):
            m = (ds.labels[plan.test] == f) & (ds.instances[plan.test] == i)
            assert np.count_nonzero(m) == 2


def test_loio():
    ds = make_ds(n_func=4, n_inst=5, reps=6)
    plans = [loio_split(ds, i) for i in range(1, 6)]
    assert plans[2].train.size == len(ds) * 4 // 5
    assert np.all(ds.instances[plans[2].test] == 3)
    union = np.concatenate([p.test for p in plans])
    assert np.array_equal(np.sort(union), np.arange(len(ds)))
    for a in range(5):
        for b in range(a + 1, 5):
            assert np.intersect1d(plans[a].test, plans[b].test).size == 0
    with pytest.raises(ValueError):
        loio_split(ds, 6)
    with pytest.raises(ValueError):
        loio_split(make_ds(), 1)


@given(st.integers(0, 10_000))
def test_roundtrip_bit_exact(seed):
    ds = make_ds(seed=seed, reps=5)
    vals = ds.values.copy()
    vals[0, 0] = 5e-324
    vals[1, 1] = -0.0
    vals[2, 2] = 1 / 3
    ds = FeatureDataset(ds.meta, vals)
    assert loads(dumps(ds)) == ds


def test_save_load_file(tmp_path):
    ds = make_ds()
    p = tmp_path / "sub" / "f.csv"
    save(ds, p, comments=["config_hash=abc", "dimension=5"])
    assert load(p) == ds
    assert read_comments(p) == {"config_hash": "abc", "dimension": "5"}


def test_external_file_accepted():
    text = ("function_id,instance_id,dimension,sample_size,repetition,seed,disp,skew,lr2,int,max,"
            "eps_s,eps_ratio,nbc,pca,qr2\n"
            "3,1,5,1250,1,17,0.5,1e-3,0.9,12,3.5,-1,0.25,-0.4,0.2,0x1.8p-1\n")
    ds = loads(text)
    assert len(ds) == 1 and ds.values[0, -1] == 0.75


def test_column_order_independent():
    cols = list(HEADER)[::-1]
    row = {c: "1" for c in HEADER}
    text = ",".join(cols) + "\n" + ",".join(row[c] for c in cols) + "\n"
    assert loads(text).values.tolist() == [[1.0] * 10]


def test_missing_column_rejected():
    text = ",".join(h for h in HEADER if h != "nbc") + "\n"
    with pytest.raises(DatasetFormatError, match="nbc"):
        loads(text, "x.csv")


def test_bad_cell_has_position():
    ds = make_ds(n_func=1, reps=3)
    lines = dumps(ds).splitlines()
    cells = lines[2].split(",")
    cells[8] = "abc"
    lines[2] = ",".join(cells)
    with pytest.raises(DatasetFormatError, match=r"x.csv:3:9: bad value 'abc' for column lr2"):
        loads("\n".join(lines), "x.csv")


def test_short_row_rejected():
    with pytest.raises(DatasetFormatError, match=":2: expected 16 fields"):
        loads(",".join(HEADER) + "\n1,2,3\n")


def test_nonfinite_rejected():
    line = ",".join(["1"] * 6 + ["nan"] + ["0"] * 9)
    with pytest.raises(DatasetFormatError):
        loads(",".join(HEADER) + "\n" + line + "\n")


def test_concat():
    a = make_ds(n_func=2, reps=5)
    b = FeatureDataset(a.meta + [[2, 0, 0, 0, 0, 0]], a.values)
    assert len(concat([a, b])) == 20
