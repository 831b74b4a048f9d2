"""Bucketed ranking losses: the fast path.

After one descending sort, every maximal run of negatives between two
adjacent positives collapses into a single prototype logit carrying the
run's mass. Positives then compare against at most P+1 prototypes instead
of N negatives, which drops the pairwise work from O(P*(P+N)) to O(P^2)
plus the sort. Prototype gradients are spread evenly back over bucket
members, so members of one bucket always receive identical gradients.
"""

from __future__ import annotations

import numpy as np

from .counting import OpCounters, sort_cost_model
from .model import DetectionSet, GradResult, SortedBuckets, smooth_step, sort_and_bucket
from .reference import _row_block, _sorting_pass

__all__ = ["bap_loss_grad", "brs_loss_grad", "count_reference_ops"]


def count_reference_ops(p: int, n_hat: int) -> int:
    """Difference transforms the reference path performs: P*(P+N_hat)."""
    if p < 0 or n_hat < 0:
        raise ValueError("counts must be >= 0")
    return p * (p + n_hat)


def _rank_plus_bucketed(s_pos_sorted: np.ndarray, delta: float, counters: OpCounters) -> np.ndarray:
    """rank_plus over individual positives, exploiting sortedness when exact.

    With delta 0 and tie-free positives the smoothed comparisons are all
    hard 0/1, so the sorted position already is the answer and no
    difference transforms are needed. Any other case falls back to the
    dense pairwise sums.
    """
    p = s_pos_sorted.size
    if delta == 0.0 and not np.any(s_pos_sorted[1:] == s_pos_sorted[:-1]):
        return np.arange(1, p + 1, dtype=np.float64)
    rank_plus = np.empty(p)
    block = _row_block(p)
    for start in range(0, p, block):
        stop = min(start + block, p)
        h = smooth_step(s_pos_sorted[None, :] - s_pos_sorted[start:stop, None], delta)
        counters.count_diffs(h.size)
        rank_plus[start:stop] = h.sum(axis=1) + 0.5
    return rank_plus


def _bucket_ranking(
    ds: DetectionSet,
    sb: SortedBuckets,
    rank_plus: np.ndarray,
    counters: OpCounters,
) -> tuple[np.ndarray, np.ndarray]:
    """ell_b per sorted positive and the per-member negative gradient.

    Bucket mass substitutes for individual negatives: N_FP(i) sums
    H(prototype - s_i) weighted by bucket size over the non-empty buckets.
    Each prototype's gradient is then divided evenly among its members.
    Returns (ell_b, member gradient per bucket), both unnormalised by |P|.
    """
    s_sorted_pos = ds.scores[sb.perm[sb.positive_positions]]
    nonempty = sb.bucket_sizes > 0
    protos = sb.prototypes[nonempty]
    masses = sb.bucket_sizes[nonempty].astype(np.float64)
    p = s_sorted_pos.size
    nb = protos.size

    ell_b = np.zeros(p)
    colsum = np.zeros(nb)
    if nb:
        block = _row_block(nb)
        for start in range(0, p, block):
            stop = min(start + block, p)
            h = smooth_step(protos[None, :] - s_sorted_pos[start:stop, None], ds.delta)
            counters.count_diffs(h.size)
            n_fp = h @ masses
            rank = rank_plus[start:stop] + n_fp
            ell = np.where(n_fp > 0.0, n_fp / rank, 0.0)
            ell_b[start:stop] = ell
            coef = np.where(n_fp > 0.0, ell / np.where(n_fp > 0.0, n_fp, 1.0), 0.0)
            colsum += h.T @ coef
    # prototype gradient, then an even split across the bucket's members
    member = np.zeros(sb.bucket_sizes.size)
    if nb:
        g_proto = colsum * masses
        member[nonempty] = g_proto / masses
    return ell_b, member


def _assemble(
    ds: DetectionSet,
    sb: SortedBuckets,
    g_pos_sorted: np.ndarray,
    member: np.ndarray,
    counters: OpCounters,
) -> np.ndarray:
    n = len(ds)
    grads = np.zeros(n)
    grads[sb.perm[sb.positive_positions]] = g_pos_sorted
    neg_mask = np.ones(n, dtype=bool)
    neg_mask[sb.positive_positions] = False
    neg_positions = np.flatnonzero(neg_mask)
    grads[sb.perm[neg_positions]] = np.repeat(member, sb.bucket_sizes)
    counters.count_pass(n - sb.positive_positions.size)
    counters.count_pass(n)
    return grads


def bap_loss_grad(ds: DetectionSet) -> tuple[GradResult, OpCounters]:
    """Bucketed ranking loss; numerics match the reference at delta 0."""
    counters = OpCounters()
    n = len(ds)
    if n == 0 or not np.any(ds.labels):
        return GradResult.zeros(n), counters
    sb = sort_and_bucket(ds)
    counters.count_sort(sort_cost_model(n))
    counters.count_pass(n)
    p = sb.positive_positions.size

    rank_plus = _rank_plus_bucketed(ds.scores[sb.perm[sb.positive_positions]], ds.delta, counters)
    ell_b, member = _bucket_ranking(ds, sb, rank_plus, counters)
    ranking = float(ell_b.sum()) / p
    grads = _assemble(ds, sb, -ell_b / p, member / p, counters)
    return (
        GradResult(loss=ranking, ranking_component=ranking, sorting_component=0.0, grads=grads),
        counters,
    )


def brs_loss_grad(ds: DetectionSet) -> tuple[GradResult, OpCounters]:
    """Bucketed ranking plus the positive-order sorting penalty.

    Bucketing only ever touches negatives; the sorting half runs over the
    individual positives exactly as in the reference, so only the ranking
    errors and negative gradients go through prototypes.
    """
    counters = OpCounters()
    n = len(ds)
    ds.require_ious()
    if n == 0 or not np.any(ds.labels):
        return GradResult.zeros(n), counters
    sb = sort_and_bucket(ds)
    counters.count_sort(sort_cost_model(n))
    counters.count_pass(n)
    p = sb.positive_positions.size

    pos_orig = sb.perm[sb.positive_positions]
    s_pos_sorted = ds.scores[pos_orig]
    ious_sorted = ds.ious[pos_orig]
    rank_plus, err, promote = _sorting_pass(s_pos_sorted, ious_sorted, ds.delta, counters)
    ell_b, member = _bucket_ranking(ds, sb, rank_plus, counters)

    ranking = float(ell_b.sum()) / p
    sorting = float(err.sum()) / p
    g_pos = (-ell_b - err + promote) / p
    grads = _assemble(ds, sb, g_pos, member / p, counters)
    return (
        GradResult(
            loss=ranking + sorting,
            ranking_component=ranking,
            sorting_component=sorting,
            grads=grads,
        ),
        counters,
    )
