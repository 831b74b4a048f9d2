"""Domain types shared by every loss implementation.

A detection problem is a flat list of logits: each entry has a score, a
positive/negative label, and (for positives) a localisation-quality IoU in
[0, 1]. All loss paths consume the same frozen ``DetectionSet`` and produce a
``GradResult`` whose gradients are aligned to the input order. The bucketing
transform used by the fast losses lives here too, so the reference and
bucketed paths cannot drift apart on sorting or tie conventions.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

__all__ = [
    "DetectionSet",
    "SortedBuckets",
    "GradResult",
    "smooth_step",
    "sort_and_bucket",
    "rank_stats",
]


@dataclasses.dataclass(frozen=True)
class DetectionSet:
    """One scoring problem: logits, labels, per-positive IoUs, and delta.

    ``scores`` and ``labels`` have equal length L. ``ious`` is a float64
    vector of the same length holding the IoU for every positive index and
    NaN elsewhere; a positive may also carry NaN when the IoU is unknown,
    in which case only the IoU-free losses accept the set. ``delta`` is the
    half-width of the smoothed step used in every pairwise comparison.
    """

    scores: np.ndarray
    labels: np.ndarray
    ious: np.ndarray
    delta: float = 0.5

    def __post_init__(self) -> None:
        scores = np.ascontiguousarray(self.scores, dtype=np.float64)
        labels = np.ascontiguousarray(self.labels, dtype=bool)
        ious = np.ascontiguousarray(self.ious, dtype=np.float64)
        if scores.ndim != 1 or labels.shape != scores.shape or ious.shape != scores.shape:
            raise ValueError("scores, labels and ious must be 1-d and equally long")
        if not np.all(np.isfinite(scores)):
            raise ValueError("scores must be finite")
        if not (math.isfinite(self.delta) and self.delta >= 0.0):
            raise ValueError("delta must be finite and >= 0")
        known = ~np.isnan(ious)
        if np.any(known & ~labels):
            raise ValueError("iou given for a negative index")
        bad = known & ((ious < 0.0) | (ious > 1.0))
        if np.any(bad):
            raise ValueError("iou outside [0, 1]")
        object.__setattr__(self, "scores", scores)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "ious", ious)
        object.__setattr__(self, "delta", float(self.delta))

    @classmethod
    def from_arrays(cls, scores, labels, ious=None, delta: float = 0.5) -> "DetectionSet":
        """Build a set from raw arrays, ignoring iou entries at negatives.

        ``ious`` may be None (all unknown) or a full-length array whose
        values at negative indices are placeholders to be discarded.
        """
        scores = np.asarray(scores, dtype=np.float64)
        labels = np.asarray(labels).astype(bool)
        full = np.full(scores.shape, np.nan)
        if ious is not None:
            ious = np.asarray(ious, dtype=np.float64)
            if ious.shape != scores.shape:
                raise ValueError("ious length differs from scores")
            full[labels] = ious[labels]
        return cls(scores=scores, labels=labels, ious=full, delta=delta)

    def __len__(self) -> int:
        return self.scores.size

    @property
    def pos_idx(self) -> np.ndarray:
        return np.flatnonzero(self.labels)

    @property
    def neg_idx(self) -> np.ndarray:
        return np.flatnonzero(~self.labels)

    def require_ious(self) -> None:
        """Raise unless every positive carries a usable IoU."""
        pos = self.labels
        if np.any(np.isnan(self.ious[pos])):
            raise ValueError("positive without an IoU")

    def with_delta(self, delta: float) -> "DetectionSet":
        return dataclasses.replace(self, delta=delta)


@dataclasses.dataclass(frozen=True)
class SortedBuckets:
    """Result of the descending sort plus negative-bucketing transform.

    ``perm`` maps sorted position to original index. Bucket j (0-based)
    holds the run of negatives between positive j-1 and positive j in the
    sorted order; bucket 0 sits above all positives and bucket P below all
    of them. ``prototypes`` holds each bucket's mean member score, NaN for
    empty buckets (never 0.0, which would fabricate comparison terms).
    """

    perm: np.ndarray
    positive_positions: np.ndarray
    bucket_sizes: np.ndarray
    prototypes: np.ndarray


@dataclasses.dataclass(frozen=True)
class GradResult:
    """Loss value, its two components, and input-aligned gradients."""

    loss: float
    ranking_component: float
    sorting_component: float
    grads: np.ndarray

    @classmethod
    def zeros(cls, n: int) -> "GradResult":
        return cls(0.0, 0.0, 0.0, np.zeros(n))


def smooth_step(x, delta: float):
    """Piecewise-linear step surrogate with half-width ``delta``.

    Returns 0 below -delta, 1 above +delta, and a linear ramp between.
    At delta == 0 this degenerates to the step with value 0.5 at exactly 0.
    Accepts scalars or arrays; arrays come back elementwise.
    """
    if delta < 0.0:
        raise ValueError("delta must be >= 0")
    arr = np.asarray(x, dtype=np.float64)
    if delta == 0.0:
        out = np.where(arr > 0.0, 1.0, 0.0)
        out = np.where(arr == 0.0, 0.5, out)
    else:
        # a subnormal delta can overflow the ramp to +-inf; the clip below
        # still lands on the correct flat value, so the warning is noise
        with np.errstate(over="ignore"):
            out = np.clip(arr / (2.0 * delta) + 0.5, 0.0, 1.0)
    if np.ndim(x) == 0:
        return float(out)
    return out


def _descending_perm(scores: np.ndarray, labels: np.ndarray) -> np.ndarray:
    """Descending-score permutation with canonical tie order.

    Ties are broken positive-before-negative, then by original index. The
    common path is a single argsort; tied runs (rare in generated data) are
    repaired afterwards so the main sort does not need to be stable.
    """
    perm = np.argsort(-scores)
    s = scores[perm]
    tied = np.flatnonzero(s[1:] == s[:-1])
    if tied.size == 0:
        return perm
    # walk maximal runs of equal scores and reorder each one
    run_start = None
    prev = -2
    neg = ~labels
    for t in tied:
        if t != prev + 1 or run_start is None:
            if run_start is not None:
                _repair_run(perm, run_start, prev + 2, neg)
            run_start = t
        prev = t
    _repair_run(perm, run_start, prev + 2, neg)
    return perm


def _repair_run(perm: np.ndarray, start: int, stop: int, neg: np.ndarray) -> None:
    chunk = perm[start:stop]
    order = np.lexsort((chunk, neg[chunk]))
    perm[start:stop] = chunk[order]


def sort_and_bucket(ds: DetectionSet) -> SortedBuckets:
    """Sort descending and group consecutive negatives into buckets.

    Produces P+1 buckets for P positives; empty buckets are legal and keep
    a NaN prototype. Non-empty prototypes are the arithmetic mean of the
    member scores, so a size-1 bucket's prototype equals its member.
    """
    n = len(ds)
    if n == 0:
        raise ValueError("cannot bucket an empty set")
    perm = _descending_perm(ds.scores, ds.labels)
    sorted_scores = ds.scores[perm]
    sorted_pos = ds.labels[perm]
    pos_positions = np.flatnonzero(sorted_pos)
    p = pos_positions.size

    starts = np.empty(p + 1, dtype=np.int64)
    ends = np.empty(p + 1, dtype=np.int64)
    starts[0] = 0
    starts[1:] = pos_positions + 1
    ends[:p] = pos_positions
    ends[p] = n
    sizes = ends - starts

    # a negative's bucket id is the number of positives ranked above it
    bucket_of_neg = np.cumsum(sorted_pos)[~sorted_pos]
    sums = np.bincount(bucket_of_neg, weights=sorted_scores[~sorted_pos], minlength=p + 1)
    protos = np.full(p + 1, np.nan)
    nonempty = sizes > 0
    protos[nonempty] = sums[nonempty] / sizes[nonempty]

    return SortedBuckets(
        perm=perm,
        positive_positions=pos_positions,
        bucket_sizes=sizes,
        prototypes=protos,
    )


def rank_stats(ds: DetectionSet, i: int) -> tuple[float, float, float]:
    """Smoothed (rank_plus, n_fp, rank) for the positive at input index i.

    rank_plus counts positives at-or-above i with the self pair contributing
    exactly 1; n_fp is the smoothed count of negatives above i; rank is
    their sum.
    """
    if not ds.labels[i]:
        raise ValueError("rank_stats is defined for positive indices only")
    x = ds.scores - ds.scores[i]
    h = smooth_step(x, ds.delta)
    pos = ds.labels.copy()
    pos[i] = False
    rank_plus = 1.0 + float(h[pos].sum())
    n_fp = float(h[~ds.labels].sum())
    return rank_plus, n_fp, rank_plus + n_fp
