"""Regenerate the golden vectors under golden/.

Each vector file carries one input detection set (or a generator config)
plus the expected loss, components, and full gradient vector for every
covered kind. Downstream consumers compare against these values at 1e-12,
so this script must only be re-run when the numerics intentionally change.
"""

import hashlib
import json
import pathlib
import sys
import tempfile

import numpy as np

from rankbucket import DetectionSet, SyntheticConfig, evaluate_kind, generate, metadata
from rankbucket.jsonl import write_jsonl

OUT_DIR = pathlib.Path(__file__).resolve().parent.parent / "golden"
ALL_KINDS = ("ap", "rs", "bap", "brs", "oracle-ap", "oracle-rs")
RANKING_ONLY = ("ap", "bap", "oracle-ap")


def expected_for(ds, kinds):
    out = {}
    for kind in kinds:
        r, _ = evaluate_kind(ds, kind)
        out[kind] = {
            "loss": r.loss,
            "ranking": r.ranking_component,
            "sorting": r.sorting_component,
            "grads": [float(g) for g in r.grads],
        }
    return out


def input_block(ds):
    return {
        "scores": [float(s) for s in ds.scores],
        "labels": [int(l) for l in ds.labels],
        "ious": [None if np.isnan(u) else float(u) for u in ds.ious],
        "delta": ds.delta,
    }


def vector(name, ds, kinds, extra=None):
    body = {
        "format": "rankbucket-golden",
        "version": 1,
        "name": name,
        "input": input_block(ds),
        "expected": expected_for(ds, kinds),
    }
    if extra:
        body.update(extra)
    return body


def synthetic_vector(name, cfg, delta, kinds):
    ds = generate(cfg, delta=delta)
    with tempfile.NamedTemporaryFile("w", suffix=".jsonl", delete=False) as fh:
        write_jsonl(fh, ds, header=metadata(cfg))
        tmp = pathlib.Path(fh.name)
    digest = hashlib.sha256(tmp.read_bytes()).hexdigest()
    tmp.unlink()
    body = vector(name, ds, kinds)
    body["generator"] = {
        "num_logits": cfg.num_logits,
        "positive_pct": cfg.positive_pct,
        "seed": cfg.seed,
        "delta": delta,
        "jsonl_sha256": digest,
    }
    return body


def main():
    rng = np.random.default_rng(987654)

    e1 = DetectionSet(
        scores=np.array([3.0, 2.5, 2.0, 1.0, 0.5, 0.0]),
        labels=np.array([False, False, True, False, True, False]),
        ious=np.array([np.nan, np.nan, 0.9, np.nan, 0.6, np.nan]),
        delta=0.0,
    )
    e2 = DetectionSet(
        scores=np.array([2.0, 0.5]),
        labels=np.array([True, True]),
        ious=np.array([0.6, 0.9]),
        delta=0.0,
    )
    e3 = DetectionSet(
        scores=np.array([0.0, 1.0]),
        labels=np.array([True, False]),
        ious=np.array([0.9, np.nan]),
        delta=0.0,
    )

    p, n = 20, 180
    scores = rng.normal(0, 2, p + n)
    while np.unique(scores).size != p + n:
        scores = rng.normal(0, 2, p + n)
    labels = np.zeros(p + n, bool)
    labels[:p] = True
    order = rng.permutation(p + n)
    scores, labels = scores[order], labels[order]
    ious = np.where(labels, rng.uniform(0, 1, p + n), np.nan)
    mixed0 = DetectionSet(scores=scores, labels=labels, ious=ious, delta=0.0)
    mixed_half = mixed0.with_delta(0.5)

    all_neg = DetectionSet(
        scores=np.array([1.5, 0.5, -0.5]),
        labels=np.zeros(3, bool),
        ious=np.full(3, np.nan),
        delta=0.0,
    )
    all_pos = DetectionSet(
        scores=np.array([1.0, 0.2, -0.3]),
        labels=np.ones(3, bool),
        ious=np.array([0.3, 0.8, 0.5]),
        delta=0.5,
    )

    vectors = [
        vector("e1", e1, ALL_KINDS),
        vector("e2", e2, ALL_KINDS),
        vector("e3", e3, RANKING_ONLY),
        vector("mixed_delta0", mixed0, ALL_KINDS),
        vector("mixed_delta05", mixed_half, ALL_KINDS),
        vector("all_negative", all_neg, RANKING_ONLY),
        vector("all_positive_sorting", all_pos, ("rs", "brs", "oracle-rs")),
        synthetic_vector(
            "synthetic_2k",
            SyntheticConfig(num_logits=2000, positive_pct=1.0, seed=424_242),
            0.0,
            ("ap", "bap", "rs", "brs"),
        ),
    ]

    OUT_DIR.mkdir(exist_ok=True)
    for body in vectors:
        path = OUT_DIR / f"{body['name']}.json"
        path.write_text(json.dumps(body, indent=1) + "\n")
        print(f"wrote {path}")
    index = {
        "format": "rankbucket-golden-index",
        "version": 1,
        "vectors": [b["name"] for b in vectors],
    }
    (OUT_DIR / "index.json").write_text(json.dumps(index, indent=1) + "\n")
    print(f"wrote {OUT_DIR / 'index.json'}")


if __name__ == "__main__":
    sys.exit(main())
