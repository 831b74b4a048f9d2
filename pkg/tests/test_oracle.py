import numpy as np
import pytest

from rankbucket import (
    DetectionSet,
    InstanceTooLarge,
    SIZE_GUARD,
    ap_loss_grad,
    build_state,
    oracle_grad,
    rs_loss_grad,
)

from conftest import make_random_set


def test_worked_example_ap(e1):
    r = oracle_grad(e1, "ap")
    assert r.loss == pytest.approx(19 / 30, abs=1e-12)
    assert np.allclose(r.grads, [4 / 15, 4 / 15, -1 / 3, 0.1, -0.3, 0.0], atol=1e-12)


def test_worked_example_rs(e2):
    r = oracle_grad(e2, "rs")
    assert r.loss == pytest.approx(0.075, abs=1e-12)
    assert np.allclose(r.grads, [0.075, -0.075], atol=1e-12)


def test_all_positives_on_top_gives_empty_primary():
    ds = DetectionSet.from_arrays(
        [5.0, 4.0, 1.0, 0.0], [1, 1, 0, 0], [0.5, 0.5, 0.0, 0.0], delta=0.0
    )
    state = build_state(ds, "ap")
    assert np.all(state.primary == 0.0)


def test_state_difference_matrix_is_antisymmetric():
    rng = np.random.default_rng(4)
    ds = make_random_set(rng, max_pos=10, max_neg=40)
    state = build_state(ds, "ap")
    assert np.allclose(state.x, -state.x.T)
    assert np.allclose(np.diag(state.x), 0.0)


def test_primary_support_ap():
    # nonzero entries only in positive rows over negative columns
    rng = np.random.default_rng(5)
    ds = make_random_set(rng, max_pos=8, max_neg=30, delta=0.4)
    state = build_state(ds, "ap")
    neg_rows = state.primary[ds.neg_idx, :]
    pos_pos = state.primary[np.ix_(ds.pos_idx, ds.pos_idx)]
    assert np.all(neg_rows == 0.0)
    assert np.all(pos_pos == 0.0)


def test_primary_support_rs_adds_positive_block_only():
    rng = np.random.default_rng(6)
    ds = make_random_set(rng, max_pos=8, max_neg=30, delta=0.4)
    state = build_state(ds, "rs")
    assert np.all(state.primary[ds.neg_idx, :] == 0.0)


def test_size_guard():
    n = SIZE_GUARD + 1
    ds = DetectionSet.from_arrays(
        np.arange(n, dtype=float), np.r_[np.ones(1, bool), np.zeros(n - 1, bool)],
        np.full(n, 0.5),
    )
    with pytest.raises(InstanceTooLarge):
        oracle_grad(ds, "ap")


def test_rejects_unknown_kind(e1):
    with pytest.raises(ValueError, match="kind"):
        oracle_grad(e1, "nope")


def test_zero_positive_set():
    ds = DetectionSet.from_arrays([1.0, 2.0, 3.0], [0, 0, 0])
    r = oracle_grad(ds, "ap")
    assert r.loss == 0.0 and np.all(r.grads == 0.0)


def test_agrees_with_reference_across_deltas():
    rng = np.random.default_rng(7)
    for _ in range(40):
        ds0 = make_random_set(rng, max_pos=20, max_neg=120)
        for d in (0.0, 0.25, 0.5):
            ds = ds0.with_delta(d)
            ra, oa = ap_loss_grad(ds), oracle_grad(ds, "ap")
            assert oa.loss == pytest.approx(ra.loss, rel=1e-9, abs=1e-12)
            assert np.allclose(oa.grads, ra.grads, rtol=1e-9, atol=1e-12)
            rr, osr = rs_loss_grad(ds), oracle_grad(ds, "rs")
            assert osr.loss == pytest.approx(rr.loss, rel=1e-9, abs=1e-12)
            assert np.allclose(osr.grads, rr.grads, rtol=1e-9, atol=1e-12)


def test_gradients_are_column_minus_row_sums(e1):
    state = build_state(e1, "ap")
    r = oracle_grad(e1, "ap")
    p = e1.labels.sum()
    manual = (state.primary.sum(axis=0) - state.primary.sum(axis=1)) / p
    assert np.array_equal(r.grads, manual)
