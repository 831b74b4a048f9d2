"""JSONL exchange format for detection sets.

One object per logit: {"score": number, "label": 0 or 1, "iou": number}
with "iou" present exactly when label is 1. An optional metadata header
(any leading object without a "score" field) may precede the records.
Delta is deliberately not part of the format; it travels out-of-band.
"""

from __future__ import annotations

import json
from typing import IO

import numpy as np

from .model import DetectionSet

__all__ = ["DataFormatError", "read_jsonl", "write_jsonl"]


class DataFormatError(ValueError):
    """Malformed JSONL input; carries the 1-based offending line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def _parse_record(line_no: int, obj) -> tuple[float, bool, float]:
    if not isinstance(obj, dict):
        raise DataFormatError(line_no, "record is not an object")
    if "score" not in obj:
        raise DataFormatError(line_no, "missing 'score'")
    score = obj["score"]
    if isinstance(score, bool) or not isinstance(score, (int, float)):
        raise DataFormatError(line_no, "'score' is not a number")
    label = obj.get("label")
    if label not in (0, 1) or isinstance(label, bool):
        raise DataFormatError(line_no, "'label' must be 0 or 1")
    iou = np.nan
    if label == 1:
        if "iou" in obj:
            iou = obj["iou"]
            if isinstance(iou, bool) or not isinstance(iou, (int, float)):
                raise DataFormatError(line_no, "'iou' is not a number")
            if not 0.0 <= float(iou) <= 1.0:
                raise DataFormatError(line_no, "'iou' outside [0, 1]")
    elif "iou" in obj:
        raise DataFormatError(line_no, "'iou' given for a negative record")
    return float(score), label == 1, float(iou)


def read_jsonl(path, delta: float = 0.5) -> tuple[DetectionSet, dict | None]:
    """Load a detection set; returns (set, metadata-or-None)."""
    header: dict | None = None
    scores: list[float] = []
    labels: list[bool] = []
    ious: list[float] = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise DataFormatError(line_no, f"invalid JSON ({exc.msg})") from exc
            if line_no == 1 and isinstance(obj, dict) and "score" not in obj:
                header = obj
                continue
            rec = _parse_record(line_no, obj)
            scores.append(rec[0])
            labels.append(rec[1])
            ious.append(rec[2])
    if not scores:
        raise DataFormatError(1, "no detection records in file")
    try:
        ds = DetectionSet(
            scores=np.asarray(scores, dtype=np.float64),
            labels=np.asarray(labels, dtype=bool),
            ious=np.asarray(ious, dtype=np.float64),
            delta=delta,
        )
    except ValueError as exc:
        raise DataFormatError(0, str(exc)) from exc
    return ds, header


def _dump(obj) -> str:
    return json.dumps(obj, separators=(",", ":"), allow_nan=False)


def write_jsonl(path_or_fh, ds: DetectionSet, header: dict | None = None) -> None:
    """Write a detection set, optionally preceded by a metadata header."""

    def _emit(fh: IO[str]) -> None:
        if header is not None:
            fh.write(_dump(header) + "\n")
        for score, is_pos, iou in zip(ds.scores, ds.labels, ds.ious):
            rec: dict = {"score": float(score), "label": 1 if is_pos else 0}
            if is_pos:
                if np.isnan(iou):
                    raise ValueError("cannot serialise a positive without an IoU")
                rec["iou"] = float(iou)
            fh.write(_dump(rec) + "\n")

    if hasattr(path_or_fh, "write"):
        _emit(path_or_fh)
    else:
        with open(path_or_fh, "w", encoding="utf-8") as fh:
            _emit(fh)
