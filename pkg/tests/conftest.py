import numpy as np
import pytest

from rankbucket import DetectionSet


@pytest.fixture
def e1():
    """Six logits, two positives with IoUs, classic worked example."""
    return DetectionSet(
        scores=np.array([3.0, 2.5, 2.0, 1.0, 0.5, 0.0]),
        labels=np.array([False, False, True, False, True, False]),
        ious=np.array([np.nan, np.nan, 0.9, np.nan, 0.6, np.nan]),
        delta=0.0,
    )


@pytest.fixture
def e2():
    """Two positives only; the higher-scored one has the worse IoU."""
    return DetectionSet(
        scores=np.array([2.0, 0.5]),
        labels=np.array([True, True]),
        ious=np.array([0.6, 0.9]),
        delta=0.0,
    )


@pytest.fixture
def e3():
    """One positive ranked below one negative."""
    return DetectionSet(
        scores=np.array([0.0, 1.0]),
        labels=np.array([True, False]),
        ious=np.array([0.9, np.nan]),
        delta=0.0,
    )


def make_random_set(rng, max_pos=50, max_neg=500, delta=0.0, tie_free=True):
    p = int(rng.integers(1, max_pos + 1))
    n = int(rng.integers(0, max_neg + 1))
    scores = rng.normal(0.0, 2.0, p + n)
    if tie_free:
        while np.unique(scores).size != scores.size:
            scores = rng.normal(0.0, 2.0, p + n)
    labels = np.zeros(p + n, dtype=bool)
    labels[:p] = True
    order = rng.permutation(p + n)
    scores, labels = scores[order], labels[order]
    ious = np.where(labels, rng.uniform(0.0, 1.0, p + n), np.nan)
    return DetectionSet(scores=scores, labels=labels, ious=ious, delta=delta)
