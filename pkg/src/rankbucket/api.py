"""Uniform entry point over every loss implementation.

Maps a kind name to the matching implementation and always returns the
pair (GradResult, OpCounters), so the CLI, the bench, and the comparison
tooling can treat all six paths identically.
"""

from __future__ import annotations

from .bucketed import bap_loss_grad, brs_loss_grad
from .counting import OpCounters
from .model import DetectionSet, GradResult
from .oracle import oracle_grad
from .reference import ReferenceConfig, ap_loss_grad, rs_loss_grad

__all__ = ["KINDS", "evaluate_kind"]

KINDS = ("ap", "rs", "bap", "brs", "oracle-ap", "oracle-rs")


def evaluate_kind(
    ds: DetectionSet,
    kind: str,
    discard_trivial: bool = False,
) -> tuple[GradResult, OpCounters]:
    """Evaluate one loss kind on a set; discard_trivial only affects ap/rs."""
    if kind not in KINDS:
        raise ValueError(f"unknown loss kind {kind!r} (choose from {', '.join(KINDS)})")
    if kind in ("bap", "brs"):
        return (bap_loss_grad if kind == "bap" else brs_loss_grad)(ds)
    counters = OpCounters()
    if kind == "ap":
        return ap_loss_grad(ds, ReferenceConfig(discard_trivial), counters), counters
    if kind == "rs":
        return rs_loss_grad(ds, ReferenceConfig(discard_trivial), counters), counters
    return oracle_grad(ds, kind.removeprefix("oracle-"), counters), counters
