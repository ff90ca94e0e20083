import numpy as np
import pytest
from hypothesis import given, strategies as st

from elaselect.bbob import (FUNCTION_NAMES, ProblemId, evaluate, f_pen, lambda_alpha,
                            make_instance, t_asy, t_osz)

ALL_F = list(range(1, 25))


def test_function_table_complete():
    assert sorted(FUNCTION_NAMES) == ALL_F


@pytest.mark.parametrize("pid", [(0, 1, 5), (25, 1, 5), (1, 0, 5), (1, 1, 1), (1, 1, 41)])
def test_invalid_ids_rejected(pid):
    with pytest.raises(ValueError):
        make_instance(pid)


def test_determinism_bit_identical():
    a = make_instance((1, 1, 5))
    b = make_instance((1, 1, 5))
    assert np.array_equal(a.x_opt, b.x_opt) and a.f_opt == b.f_opt
    assert np.array_equal(a.R, b.R) and np.array_equal(a.Q, b.Q)


@pytest.mark.parametrize("fid", ALL_F)
def test_determinism_all_functions(fid):
    a, b = make_instance((fid, 2, 7)), make_instance((fid, 2, 7))
    X = np.random.default_rng(0).uniform(-5, 5, (20, 7))
    assert np.array_equal(evaluate(a, X), evaluate(b, X))


def test_instances_differ():
    a, b = make_instance((1, 1, 5)), make_instance((1, 2, 5))
    assert not np.array_equal(a.x_opt, b.x_opt)


def _gram_schmidt_oracle(M):
    # independent check: column space of an orthogonal matrix via QR
    q, r = np.linalg.qr(M.T)
    return np.abs(np.abs(np.diag(r)) - 1.0).max()


def test_f8_i3_d10_orthogonality():
    inst = make_instance((8, 3, 10))
    for M in (inst.R, inst.Q):
        assert np.abs(M.T @ M - np.eye(10)).max() <= 1e-10
        assert np.abs(M @ M.T - np.eye(10)).max() <= 1e-10
        assert _gram_schmidt_oracle(M) <= 1e-10


@given(st.integers(1, 24), st.integers(1, 15), st.integers(2, 40))
def test_orthogonality_property(fid, iid, d):
    inst = make_instance((fid, iid, d))
    assert np.abs(inst.R.T @ inst.R - np.eye(d)).max() <= 1e-10
    assert np.abs(inst.Q.T @ inst.Q - np.eye(d)).max() <= 1e-10


@given(st.integers(1, 24), st.integers(1, 50), st.integers(2, 40))
def test_generated_parameters_in_range(fid, iid, d):
    inst = make_instance((fid, iid, d))
    assert -1000 <= inst.f_opt <= 1000
    assert inst.f_opt == round(inst.f_opt, 2)
    assert np.all(np.abs(inst.x_opt) <= 5.0)


@pytest.mark.parametrize("fid", ALL_F)
@pytest.mark.parametrize("d", [2, 5, 10, 20])
def test_optimum_value_and_local_minimality(fid, d):
    inst = make_instance((fid, 1, d))
    assert abs(evaluate(inst, inst.x_opt) - inst.f_opt) <= 1e-9
    rng = np.random.default_rng(fid * 100 + d)
    delta = rng.standard_normal((100, d))
    delta *= (rng.uniform(0, 1e-3, 100) / np.linalg.norm(delta, axis=1))[:, None]
    vals = evaluate(inst, inst.x_opt + delta)
    assert np.all(vals >= inst.f_opt - 1e-9)


def test_f2_at_optimum():
    inst = make_instance((2, 1, 5))
    assert abs(evaluate(inst, inst.x_opt) - inst.f_opt) <= 1e-9


def test_sphere_unit_step():
    inst = make_instance((1, 1, 5))
    x = inst.x_opt + np.eye(5)[0]
    assert evaluate(inst, x) == pytest.approx(inst.f_opt + 1.0, abs=1e-12)


@given(st.integers(1, 30), st.integers(2, 12), st.integers(0, 2 ** 31))
def test_sphere_identity_all_instances(iid, d, seed):
    inst = make_instance((1, iid, d))
    X = np.random.default_rng(seed).uniform(-5, 5, (10, d))
    expect = ((X - inst.x_opt) ** 2).sum(axis=1)
    got = evaluate(inst, X) - inst.f_opt
    np.testing.assert_allclose(got, expect, rtol=1e-13, atol=1e-10)


def test_dimension_mismatch_rejected():
    inst = make_instance((3, 1, 5))
    with pytest.raises(ValueError):
        evaluate(inst, np.zeros(4))
    with pytest.raises(ValueError):
        evaluate(inst, np.zeros((3, 6)))


def test_vectorized_matches_pointwise():
    for fid in ALL_F:
        inst = make_instance((fid, 1, 4))
        X = np.random.default_rng(fid).uniform(-6, 6, (15, 4))
        batch = evaluate(inst, X)
        single = np.array([evaluate(inst, x) for x in X])
        # batched matmul may differ from the 1-D path in the last bits
        np.testing.assert_allclose(batch, single, rtol=1e-10, atol=1e-10)
        assert np.all(np.isfinite(batch))


def test_evaluation_outside_domain_is_total():
    for fid in ALL_F:
        inst = make_instance((fid, 1, 3))
        assert np.isfinite(evaluate(inst, np.full(3, 9.0)))


def test_linear_slope_is_linear_inside_domain():
    inst = make_instance((5, 1, 5))
    X = np.random.default_rng(1).uniform(-4.9, 4.9, (50, 5))
    A = np.column_stack([np.ones(50), X])
    coef, res, *_ = np.linalg.lstsq(A, evaluate(inst, X), rcond=None)
    assert np.allclose(A @ coef, evaluate(inst, X), atol=1e-8)


# helpers


def test_t_osz_fixed_point():
    assert t_osz(0.0) == 0.0
    assert np.all(t_osz(np.zeros(5)) == 0.0)


@given(st.floats(-1e3, 1e3, allow_nan=False))
def test_t_osz_sign_preserving(x):
    assert np.sign(t_osz(x)) == np.sign(x)


@given(st.lists(st.floats(-10, 10, allow_nan=False), min_size=2, max_size=10),
       st.floats(0.0, 1.0))
def test_t_asy_leaves_nonpositive(xs, beta):
    x = np.array(xs)
    out = t_asy(x, beta)
    assert np.array_equal(out[x <= 0], x[x <= 0])


def test_lambda_alpha_closed_form():
    assert np.allclose(np.diag(lambda_alpha(100, 2)), [1.0, 10.0])
    d = 6
    expect = [100 ** ((i - 1) / (2 * (d - 1))) for i in range(1, d + 1)]
    assert np.allclose(np.diag(lambda_alpha(100, d)), expect)
    L = lambda_alpha(10, 4)
    assert np.count_nonzero(L - np.diag(np.diag(L))) == 0


@given(st.lists(st.floats(-5, 5), min_size=1, max_size=40))
def test_f_pen_zero_in_domain(xs):
    assert f_pen(np.array(xs)) == 0.0


def test_f_pen_outside():
    assert f_pen(np.array([6.0, -7.0, 0.0])) == pytest.approx(1.0 + 4.0)


def test_problem_id_validate():
    assert ProblemId(3, 1, 5).validate() == (3, 1, 5)
    with pytest.raises(ValueError):
        ProblemId(3, 1, 50).validate()


def test_instance_arrays_read_only():
    inst = make_instance((7, 1, 5))
    with pytest.raises(ValueError):
        inst.x_opt[0] = 1.0
