"""Compiled inner loops for the unbucketed reference losses.

The reference algorithm walks every positive and compares it against the
whole logit list, which is quadratic work by design; plain array code would
need either per-positive temporaries or huge difference matrices, so the
two hot loops are JIT-compiled instead. Each kernel reports how many
difference transforms it actually evaluated.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(inline="always")
def _h(x: float, delta: float) -> float:
    if delta == 0.0:
        if x > 0.0:
            return 1.0
        if x < 0.0:
            return 0.0
        return 0.5
    v = x / (2.0 * delta) + 0.5
    if v < 0.0:
        return 0.0
    if v > 1.0:
        return 1.0
    return v


@numba.njit(cache=True)
def rank_plus_pass(s_pos: np.ndarray, delta: float):
    """rank_plus(i) = 1 + sum over other positives of H(s_j - s_i)."""
    p = s_pos.size
    rank_plus = np.empty(p)
    evals = 0
    for a in range(p):
        si = s_pos[a]
        acc = 0.0
        for j in range(p):
            acc += _h(s_pos[j] - si, delta)
        evals += p
        # the full row includes the self pair at H(0) = 0.5
        rank_plus[a] = acc - 0.5 + 1.0
    return rank_plus, evals


@numba.njit(cache=True)
def negative_pass(s_pos: np.ndarray, s_neg: np.ndarray, rank_plus: np.ndarray, delta: float):
    """Per-positive false-positive mass, ranking errors, negative gradients.

    For each positive the H row over negatives is evaluated once, kept in a
    buffer, and reused to spread ell_r(i)/N_FP(i); gradients come back
    unnormalised (caller divides by the positive count).
    """
    p = s_pos.size
    nn = s_neg.size
    n_fp = np.zeros(p)
    ell_r = np.zeros(p)
    g_neg = np.zeros(nn)
    row = np.empty(nn)
    evals = 0
    for a in range(p):
        si = s_pos[a]
        acc = 0.0
        for k in range(nn):
            v = _h(s_neg[k] - si, delta)
            row[k] = v
            acc += v
        evals += nn
        n_fp[a] = acc
        if acc > 0.0:
            e = acc / (rank_plus[a] + acc)
            w = e / acc
            for k in range(nn):
                g_neg[k] += w * row[k]
            ell_r[a] = e
    return n_fp, ell_r, g_neg, evals


def warmup() -> None:
    """Force JIT compilation so timed runs never pay for it."""
    pos = np.array([0.5, -0.25])
    neg = np.array([1.0, -1.0, 0.0])
    for d in (0.0, 0.5):
        rp, _ = rank_plus_pass(pos, d)
        negative_pass(pos, neg, rp, d)
