import numpy as np
import pytest

from rankbucket import (
    DetectionSet,
    OpCounters,
    ReferenceConfig,
    ap_loss_grad,
    rs_loss_grad,
)

from conftest import make_random_set


def loop_ap(scores, labels, ious, delta):
    """Deliberately naive per-pair loops, the in-test cross check."""
    from rankbucket import smooth_step as H

    P = [i for i, l in enumerate(labels) if l]
    N = [i for i, l in enumerate(labels) if not l]
    g = [0.0] * len(scores)
    if not P:
        return 0.0, g
    loss = 0.0
    for i in P:
        nfp = sum(H(scores[k] - scores[i], delta) for k in N)
        rplus = 1 + sum(H(scores[j] - scores[i], delta) for j in P if j != i)
        ell = nfp / (rplus + nfp) if nfp > 0 else 0.0
        loss += ell
        g[i] -= ell / len(P)
        if nfp > 0:
            for k in N:
                g[k] += ell * H(scores[k] - scores[i], delta) / nfp / len(P)
    return loss / len(P), g


def loop_rs(scores, labels, ious, delta):
    from rankbucket import smooth_step as H

    P = [i for i, l in enumerate(labels) if l]
    N = [i for i, l in enumerate(labels) if not l]
    g = [0.0] * len(scores)
    if not P:
        return 0.0, 0.0, g
    rank_loss = sort_loss = 0.0
    for i in P:
        nfp = sum(H(scores[k] - scores[i], delta) for k in N)
        rplus = 1 + sum(H(scores[j] - scores[i], delta) for j in P if j != i)
        ell = nfp / (rplus + nfp) if nfp > 0 else 0.0
        rank_loss += ell
        cur = ((1 - ious[i]) + sum(
            H(scores[j] - scores[i], delta) * (1 - ious[j])
            for j in P if j != i)) / rplus
        tgt = ((1 - ious[i]) + sum(
            H(scores[j] - scores[i], delta) * (1 - ious[j])
            for j in P if j != i and ious[j] >= ious[i])) / (
            1 + sum(H(scores[j] - scores[i], delta)
                    for j in P if j != i and ious[j] >= ious[i]))
        err = cur - tgt
        sort_loss += err
        g[i] += (-ell - err) / len(P)
        if nfp > 0:
            for k in N:
                g[k] += ell * H(scores[k] - scores[i], delta) / nfp / len(P)
        mass = sum(H(scores[t] - scores[i], delta)
                   for t in P if ious[t] < ious[i])
        if mass > 0:
            for t in P:
                if ious[t] < ious[i]:
                    g[t] += err * H(scores[t] - scores[i], delta) / mass / len(P)
    return rank_loss / len(P), sort_loss / len(P), g


class TestApReference:
    def test_worked_example_loss(self, e1):
        r = ap_loss_grad(e1)
        assert r.loss == pytest.approx(19 / 30, abs=1e-12)
        assert r.ranking_component == r.loss
        assert r.sorting_component == 0.0

    def test_worked_example_grads(self, e1):
        r = ap_loss_grad(e1)
        expected = [4 / 15, 4 / 15, -1 / 3, 0.1, -0.3, 0.0]
        assert np.allclose(r.grads, expected, atol=1e-12)

    def test_inverted_pair(self, e3):
        r = ap_loss_grad(e3)
        assert r.loss == pytest.approx(0.5, abs=1e-12)
        assert np.allclose(r.grads, [-0.5, 0.5], atol=1e-12)

    def test_perfect_ordering_gives_zero(self):
        ds = DetectionSet.from_arrays([3.0, 2.0, 1.0], [1, 1, 0], [0.5, 0.5, 0.0], delta=0.0)
        r = ap_loss_grad(ds)
        assert r.loss == 0.0
        assert np.all(r.grads == 0.0)

    def test_no_positives_is_all_zero(self):
        ds = DetectionSet.from_arrays([1.0, 2.0], [0, 0])
        r = ap_loss_grad(ds)
        assert r.loss == 0.0 and np.all(r.grads == 0.0)

    def test_no_negatives_is_all_zero(self):
        ds = DetectionSet.from_arrays([1.0, 2.0], [1, 1], [0.5, 0.6])
        r = ap_loss_grad(ds)
        assert r.loss == 0.0 and np.all(r.grads == 0.0)

    def test_counter_closed_form(self, e1):
        c = OpCounters()
        ap_loss_grad(e1, counters=c)
        p, n = 2, 4
        assert c.diff_ops == p * (p + n)

    def test_matches_loops_across_deltas(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            for d in (0.0, 0.25, 0.5, 1.5):
                ds = make_random_set(rng, max_pos=12, max_neg=60, delta=d)
                r = ap_loss_grad(ds)
                loss, g = loop_ap(ds.scores, ds.labels, ds.ious, d)
                assert r.loss == pytest.approx(loss, abs=1e-12)
                assert np.allclose(r.grads, g, atol=1e-12)

    def test_discard_trivial_changes_nothing(self):
        rng = np.random.default_rng(9)
        for _ in range(25):
            ds = make_random_set(rng, max_pos=10, max_neg=80, delta=float(rng.uniform(0, 1)))
            base = ap_loss_grad(ds)
            skim = ap_loss_grad(ds, ReferenceConfig(discard_trivial=True))
            assert base.loss == pytest.approx(skim.loss, abs=1e-12)
            assert np.allclose(base.grads, skim.grads, atol=1e-12)

    def test_discard_trivial_reduces_counted_work(self):
        # positives clustered far above most negatives, so most negatives
        # fall below s_min - delta and generate no primary terms
        scores = np.r_[np.full(5, 10.0) + np.arange(5) * 0.1, np.linspace(-5, 0, 200)]
        labels = np.r_[np.ones(5, bool), np.zeros(200, bool)]
        ds = DetectionSet.from_arrays(scores, labels, np.full(205, 0.5), delta=0.5)
        c_all, c_skim = OpCounters(), OpCounters()
        ap_loss_grad(ds, counters=c_all)
        ap_loss_grad(ds, ReferenceConfig(discard_trivial=True), counters=c_skim)
        assert c_skim.diff_ops < c_all.diff_ops


class TestRsReference:
    def test_worked_example(self, e2):
        r = rs_loss_grad(e2)
        assert r.loss == pytest.approx(0.075, abs=1e-12)
        assert r.ranking_component == 0.0
        assert r.sorting_component == pytest.approx(0.075, abs=1e-12)
        assert np.allclose(r.grads, [0.075, -0.075], atol=1e-12)

    def test_sorted_ious_add_nothing(self, e1):
        # IoUs already agree with the score order, so only ranking remains
        ap = ap_loss_grad(e1)
        rs = rs_loss_grad(e1)
        assert rs.sorting_component == pytest.approx(0.0, abs=1e-12)
        assert rs.ranking_component == pytest.approx(ap.loss, abs=1e-12)
        neg = ~e1.labels
        assert np.allclose(rs.grads[neg], ap.grads[neg], atol=1e-12)

    def test_requires_ious(self):
        ds = DetectionSet.from_arrays([1.0, 0.0], [1, 1])
        with pytest.raises(ValueError, match="IoU"):
            rs_loss_grad(ds)

    def test_matches_loops_across_deltas(self):
        rng = np.random.default_rng(10)
        for _ in range(30):
            for d in (0.0, 0.25, 0.5):
                ds = make_random_set(rng, max_pos=12, max_neg=60, delta=d)
                r = rs_loss_grad(ds)
                rank, sort, g = loop_rs(ds.scores, ds.labels, ds.ious, d)
                assert r.ranking_component == pytest.approx(rank, abs=1e-12)
                assert r.sorting_component == pytest.approx(sort, abs=1e-11)
                assert np.allclose(r.grads, g, atol=1e-11)

    def test_equal_ious_have_no_sorting_error(self):
        rng = np.random.default_rng(12)
        scores = rng.normal(size=30)
        labels = np.r_[np.ones(8, bool), np.zeros(22, bool)]
        ds = DetectionSet.from_arrays(scores, labels, np.full(30, 0.7), delta=0.3)
        r = rs_loss_grad(ds)
        assert r.sorting_component == pytest.approx(0.0, abs=1e-12)

    def test_gradients_sum_to_zero(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            ds = make_random_set(rng, max_pos=15, max_neg=100, delta=float(rng.uniform(0, 1)))
            assert abs(rs_loss_grad(ds).grads.sum()) < 1e-10
            assert abs(ap_loss_grad(ds).grads.sum()) < 1e-10
