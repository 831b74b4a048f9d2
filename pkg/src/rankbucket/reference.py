"""Unbucketed ranking losses, computed by looping on positives.

Both losses share one error-driven recipe: per positive, count how much
mass outranks it, turn that into an error, and hand the error back to the
examples that caused it. Gradients therefore come straight from the error
bookkeeping, no differentiation involved. This is the slow-but-trusted
path; it evaluates a difference transform for every (positive, logit) pair.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from . import _kernels
from .counting import OpCounters
from .model import DetectionSet, GradResult, smooth_step

__all__ = ["ReferenceConfig", "ap_loss_grad", "rs_loss_grad"]

# cap on elements per temporary block, keeps peak memory modest
_BLOCK_ELEMS = 1 << 24


@dataclasses.dataclass(frozen=True)
class ReferenceConfig:
    """Reference-path switches.

    discard_trivial skips negatives scoring below every positive minus
    delta; they cannot generate error mass, so results are unchanged while
    the inner loop shrinks.
    """

    discard_trivial: bool = False


def _row_block(n_cols: int) -> int:
    return max(1, _BLOCK_ELEMS // max(1, n_cols))


def _split(ds: DetectionSet, cfg: ReferenceConfig):
    pos_idx = ds.pos_idx
    neg_idx = ds.neg_idx
    s_pos = ds.scores[pos_idx]
    if cfg.discard_trivial and pos_idx.size:
        keep = ds.scores[neg_idx] > s_pos.min() - ds.delta
        neg_idx = neg_idx[keep]
    return pos_idx, neg_idx, s_pos, ds.scores[neg_idx]


def ap_loss_grad(
    ds: DetectionSet,
    cfg: ReferenceConfig = ReferenceConfig(),
    counters: OpCounters | None = None,
) -> GradResult:
    """Average-precision-style ranking loss with identity-update gradients.

    loss = mean over positives of N_FP(i)/rank(i). Each positive is pushed
    up by its own error; negatives absorb the error of every positive they
    outrank, in proportion to their H share.
    """
    n = len(ds)
    pos_idx, neg_idx, s_pos, s_neg = _split(ds, cfg)
    p = pos_idx.size
    if p == 0:
        return GradResult.zeros(n)

    rank_plus, evals_pp = _kernels.rank_plus_pass(s_pos, ds.delta)
    n_fp, ell_r, g_neg, evals_pn = _kernels.negative_pass(s_pos, s_neg, rank_plus, ds.delta)
    if counters is not None:
        counters.count_diffs(evals_pp + evals_pn)
        counters.count_pass(n)

    ranking = float(ell_r.sum()) / p
    grads = np.zeros(n)
    grads[pos_idx] = -ell_r / p
    grads[neg_idx] = g_neg / p
    return GradResult(loss=ranking, ranking_component=ranking, sorting_component=0.0, grads=grads)


def _sorting_pass(s_pos, ious, delta, counters):
    """One chunked sweep over the positive-pair matrix.

    Produces rank_plus, the per-positive sorting error (current minus
    target), and the promotion each positive receives from worse-localised
    higher-errors, all from a single H evaluation per pair.
    """
    p = s_pos.size
    one_minus = 1.0 - ious
    rank_plus = np.empty(p)
    err = np.empty(p)
    promote = np.zeros(p)
    block = _row_block(p)
    for start in range(0, p, block):
        stop = min(start + block, p)
        h = smooth_step(s_pos[None, :] - s_pos[start:stop, None], delta)
        if counters is not None:
            counters.count_diffs(h.size)
        u_i = ious[start:stop, None]
        # full-row sums include the self pair at H(0) = 0.5; the convention
        # is a self weight of exactly 1, hence the +0.5 corrections
        rp = h.sum(axis=1) + 0.5
        cur = (h @ one_minus + 0.5 * one_minus[start:stop]) / rp
        geq = ious[None, :] >= u_i
        hg = h * geq
        tgt_den = hg.sum(axis=1) + 0.5
        tgt_num = hg @ one_minus + 0.5 * one_minus[start:stop]
        e = cur - tgt_num / tgt_den
        rank_plus[start:stop] = rp
        err[start:stop] = e
        lt = ious[None, :] < u_i
        hl = h * lt
        mass = hl.sum(axis=1)
        # zero mass forces a zero error analytically; guard the division
        coef = np.where(mass > 0.0, e / np.where(mass > 0.0, mass, 1.0), 0.0)
        promote += hl.T @ coef
    return rank_plus, err, promote


def rs_loss_grad(
    ds: DetectionSet,
    cfg: ReferenceConfig = ReferenceConfig(),
    counters: OpCounters | None = None,
) -> GradResult:
    """Ranking loss plus an IoU-ordering penalty over the positives.

    The ranking half matches ap_loss_grad. The sorting half charges each
    positive the gap between the mean (1 - IoU) of whoever outranks it and
    the same mean restricted to at-least-as-well-localised positives;
    gradients promote better-localised positives over worse ones.
    """
    n = len(ds)
    ds.require_ious()
    pos_idx, neg_idx, s_pos, s_neg = _split(ds, cfg)
    p = pos_idx.size
    if p == 0:
        return GradResult.zeros(n)

    ious = ds.ious[pos_idx]
    rank_plus, err, promote = _sorting_pass(s_pos, ious, ds.delta, counters)
    n_fp, ell_r, g_neg, evals_pn = _kernels.negative_pass(s_pos, s_neg, rank_plus, ds.delta)
    if counters is not None:
        counters.count_diffs(evals_pn)
        counters.count_pass(n)

    ranking = float(ell_r.sum()) / p
    sorting = float(err.sum()) / p
    grads = np.zeros(n)
    grads[pos_idx] = (-ell_r - err + promote) / p
    grads[neg_idx] = g_neg / p
    return GradResult(
        loss=ranking + sorting,
        ranking_component=ranking,
        sorting_component=sorting,
        grads=grads,
    )
