"""Brute-force pairwise evaluator used as ground truth on small instances.

Builds the full difference-transform matrix and the full primary-term
matrix, then reads gradients off row and column sums. No loop on
positives, no trivial-negative filtering, no bucketing: deliberately a
structurally different route to the same numbers, so agreement with the
other paths is evidence rather than tautology. Quadratic memory, hence
the hard instance-size guard.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .counting import OpCounters
from .model import DetectionSet, GradResult, smooth_step

__all__ = ["SIZE_GUARD", "InstanceTooLarge", "PairwiseOracleState", "build_state", "oracle_grad"]

SIZE_GUARD = 5000


class InstanceTooLarge(ValueError):
    """Instance exceeds the quadratic-memory guard."""


@dataclasses.dataclass(frozen=True)
class PairwiseOracleState:
    """Dense x_ij = s_j - s_i and primary-term matrices, input order."""

    x: np.ndarray
    primary: np.ndarray


def build_state(ds: DetectionSet, kind: str) -> PairwiseOracleState:
    kind = kind.lower()
    if kind not in ("ap", "rs"):
        raise ValueError(f"unknown oracle kind {kind!r}")
    n = len(ds)
    if n > SIZE_GUARD:
        raise InstanceTooLarge(f"{n} logits exceed the oracle guard of {SIZE_GUARD}")
    if kind == "rs":
        ds.require_ious()

    x = ds.scores[None, :] - ds.scores[:, None]
    primary = np.zeros((n, n))
    pos = ds.labels
    p = int(pos.sum())
    if p == 0:
        return PairwiseOracleState(x=x, primary=primary)

    h = smooth_step(x, ds.delta)
    pos_idx = ds.pos_idx
    neg_idx = ds.neg_idx
    hp = h[np.ix_(pos_idx, pos_idx)]
    hn = h[np.ix_(pos_idx, neg_idx)]

    # self pair sits on hp's diagonal at H(0) = 0.5; the convention gives
    # the self term weight exactly 1, hence the +0.5 corrections below
    rank_plus = hp.sum(axis=1) + 0.5
    n_fp = hn.sum(axis=1)
    safe_fp = np.where(n_fp > 0.0, n_fp, 1.0)
    ell_r = np.where(n_fp > 0.0, n_fp / (rank_plus + n_fp), 0.0)
    primary[np.ix_(pos_idx, neg_idx)] = ell_r[:, None] * (hn / safe_fp[:, None])

    if kind == "rs":
        u = ds.ious[pos_idx]
        one_minus = 1.0 - u
        cur = (hp @ one_minus + 0.5 * one_minus) / rank_plus
        geq = u[None, :] >= u[:, None]
        hg = hp * geq
        tgt = (hg @ one_minus + 0.5 * one_minus) / (hg.sum(axis=1) + 0.5)
        err = cur - tgt
        hl = hp * (u[None, :] < u[:, None])
        mass = hl.sum(axis=1)
        safe_mass = np.where(mass > 0.0, mass, 1.0)
        primary[np.ix_(pos_idx, pos_idx)] = np.where(
            mass > 0.0, err / safe_mass, 0.0
        )[:, None] * hl
    return PairwiseOracleState(x=x, primary=primary)


def oracle_grad(ds: DetectionSet, kind: str, counters: OpCounters | None = None) -> GradResult:
    """Loss and gradients from the dense primary-term matrix (row/column sums)."""
    kind = kind.lower()
    n = len(ds)
    state = build_state(ds, kind)
    if counters is not None:
        counters.count_diffs(n * n)
        counters.count_pass(n * n)
    pos_idx = ds.pos_idx
    p = pos_idx.size
    if p == 0:
        return GradResult.zeros(n)

    neg_idx = ds.neg_idx
    ranking = float(state.primary[np.ix_(pos_idx, neg_idx)].sum()) / p
    sorting = 0.0
    if kind == "rs":
        # row sums of the positive block equal the per-positive sorting
        # error whenever its pmf has mass; zero-mass rows are exact zeros
        sorting = float(state.primary[np.ix_(pos_idx, pos_idx)].sum()) / p
    grads = (state.primary.sum(axis=0) - state.primary.sum(axis=1)) / p
    return GradResult(
        loss=ranking + sorting,
        ranking_component=ranking,
        sorting_component=sorting,
        grads=grads,
    )
