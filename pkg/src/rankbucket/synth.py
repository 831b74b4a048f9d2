"""Deterministic synthetic detection sets for the benchmark grid.

Positive scores come from one Gaussian, negative scores from another whose
mean sits above the positive one, so nearly every (positive, negative)
pair does real pairwise work. IoUs are uniform on [0, 1]. Everything is a
pure function of the config (PCG64 stream): same config, same bytes.
"""

from __future__ import annotations

import dataclasses

import numpy as np

from .model import DetectionSet

__all__ = ["SyntheticConfig", "generate", "metadata", "GENERATOR_NAME"]

GENERATOR_NAME = "numpy.random.Generator/PCG64"


@dataclasses.dataclass(frozen=True)
class SyntheticConfig:
    num_logits: int
    positive_pct: float
    pos_mean: float = -1.0
    pos_std: float = 1.0
    neg_mean: float = 1.0
    neg_std: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.num_logits < 1:
            raise ValueError("num_logits must be >= 1")
        if not 0.0 <= self.positive_pct <= 100.0:
            raise ValueError("positive_pct must be in [0, 100]")
        if self.pos_std <= 0.0 or self.neg_std <= 0.0:
            raise ValueError("standard deviations must be > 0")

    @property
    def num_positives(self) -> int:
        return int(round(self.num_logits * self.positive_pct / 100.0))


def _break_ties(scores: np.ndarray) -> np.ndarray:
    """Bump duplicate scores apart by single ulps until the set is tie-free.

    Collisions are astronomically rare for continuous draws, but the
    losses' exact-equivalence guarantees assume distinct scores, so repair
    deterministically: the k-th extra occupant of a value moves k ulps up.
    """
    for _ in range(16):
        order = np.argsort(scores, kind="stable")
        s = scores[order]
        dup = np.flatnonzero(s[1:] == s[:-1])
        if dup.size == 0:
            return scores
        bumped = scores.copy()
        run_occurrence = 0
        prev = -2
        for t in dup:
            run_occurrence = run_occurrence + 1 if t == prev + 1 else 1
            idx = order[t + 1]
            v = scores[idx]
            for _ in range(run_occurrence):
                v = np.nextafter(v, np.inf)
            bumped[idx] = v
            prev = t
        scores = bumped
    raise RuntimeError("could not break score ties")


def generate(cfg: SyntheticConfig, delta: float = 0.5) -> DetectionSet:
    """Draw a detection set: positives first, then negatives.

    delta is not part of the statistical config; it is attached to the
    returned set for downstream evaluation convenience.
    """
    rng = np.random.default_rng(cfg.seed)
    p = cfg.num_positives
    n = cfg.num_logits - p
    pos_scores = rng.normal(cfg.pos_mean, cfg.pos_std, p)
    neg_scores = rng.normal(cfg.neg_mean, cfg.neg_std, n)
    ious = rng.random(p)

    scores = np.concatenate([pos_scores, neg_scores])
    scores = _break_ties(scores)
    labels = np.zeros(cfg.num_logits, dtype=bool)
    labels[:p] = True
    full_ious = np.full(cfg.num_logits, np.nan)
    full_ious[:p] = ious
    return DetectionSet(scores=scores, labels=labels, ious=full_ious, delta=delta)


def metadata(cfg: SyntheticConfig) -> dict:
    """JSONL header carrying enough generator detail to reproduce the file."""
    return {
        "format": "rankbucket-detections",
        "version": 1,
        "generator": GENERATOR_NAME,
        "numpy": np.__version__,
        "config": dataclasses.asdict(cfg),
        "num_positives": cfg.num_positives,
    }
