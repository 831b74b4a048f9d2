"""Ranking-based detection losses with a bucketed fast path.

Public surface: the domain types, the reference and bucketed loss
implementations, the dense pairwise oracle, the synthetic generator, and
JSONL exchange. The `rankbucket` CLI wraps all of it.
"""

from .api import KINDS, evaluate_kind
from .bucketed import bap_loss_grad, brs_loss_grad, count_reference_ops
from .counting import OpCounters, sort_cost_model
from .jsonl import DataFormatError, read_jsonl, write_jsonl
from .model import (
    DetectionSet,
    GradResult,
    SortedBuckets,
    rank_stats,
    smooth_step,
    sort_and_bucket,
)
from .oracle import (
    SIZE_GUARD,
    InstanceTooLarge,
    PairwiseOracleState,
    build_state,
    oracle_grad,
)
from .reference import ReferenceConfig, ap_loss_grad, rs_loss_grad
from .synth import GENERATOR_NAME, SyntheticConfig, generate, metadata

__version__ = "0.1.0"

__all__ = [
    "KINDS",
    "evaluate_kind",
    "bap_loss_grad",
    "brs_loss_grad",
    "count_reference_ops",
    "OpCounters",
    "sort_cost_model",
    "DataFormatError",
    "read_jsonl",
    "write_jsonl",
    "DetectionSet",
    "GradResult",
    "SortedBuckets",
    "rank_stats",
    "smooth_step",
    "sort_and_bucket",
    "SIZE_GUARD",
    "InstanceTooLarge",
    "PairwiseOracleState",
    "build_state",
    "oracle_grad",
    "ReferenceConfig",
    "ap_loss_grad",
    "rs_loss_grad",
    "GENERATOR_NAME",
    "SyntheticConfig",
    "generate",
    "metadata",
    "__version__",
]
