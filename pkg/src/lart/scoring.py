"""Accuracy scoring of prediction files against gold corpora, plus baselines."""

from __future__ import annotations

import json
import random
from collections import Counter
from dataclasses import dataclass
from typing import Mapping, Sequence

from .render import Sample

__all__ = ["EvalReport", "score", "baseline"]


@dataclass(frozen=True)
class EvalReport:
    n: int
    accuracy: float
    tp: int
    tn: int
    fp: int
    fn: int
    missing_ids: tuple[str, ...] = ()
    extra_ids: tuple[str, ...] = ()

    def __post_init__(self):
        if self.tp + self.tn + self.fp + self.fn != self.n:
            raise ValueError("confusion counts must sum to n")

    def to_text(self) -> str:
        lines = [
            f"n        {self.n}",
            f"accuracy {self.accuracy:.4f}",
            f"tp       {self.tp}",
            f"tn       {self.tn}",
            f"fp       {self.fp}",
            f"fn       {self.fn}",
            f"missing  {len(self.missing_ids)}",
            f"extra    {len(self.extra_ids)}",
        ]
        if self.missing_ids:
            lines.append("missing ids: " + " ".join(self.missing_ids))
        if self.extra_ids:
            lines.append("extra ids: " + " ".join(self.extra_ids))
        return "\n".join(lines) + "\n"

    def to_json_record(self) -> str:
        return json.dumps(
            {
                "n": self.n,
                "accuracy": round(self.accuracy, 4),
                "tp": self.tp,
                "tn": self.tn,
                "fp": self.fp,
                "fn": self.fn,
                "missing_ids": list(self.missing_ids),
                "extra_ids": list(self.extra_ids),
            }
        )


def score(gold: Sequence[Sample], predictions: Sequence[Mapping]) -> EvalReport:
    """Pair predictions with gold by id and count the confusion.

    A gold sample with no prediction is counted as answered wrongly (and
    listed), so partial coverage cannot inflate accuracy.  Prediction ids
    not present in gold are listed and ignored.
    """
    if not gold:
        raise ValueError("gold corpus is empty")
    by_id: dict[str, int] = {}
    for record in predictions:
        pid = record["id"]
        if pid in by_id:
            raise ValueError(f"duplicate prediction id {pid!r}")
        by_id[pid] = record["pred"]

    tp = tn = fp = fn = 0
    missing: list[str] = []
    gold_ids = set()
    for sample in gold:
        gold_ids.add(sample.id)
        pred = by_id.get(sample.id)
        if pred is None:
            missing.append(sample.id)
            pred = 1 - sample.label  # missing counts as wrong
        if sample.label == 1:
            tp, fn = (tp + 1, fn) if pred == 1 else (tp, fn + 1)
        else:
            tn, fp = (tn + 1, fp) if pred == 0 else (tn, fp + 1)
    extra = sorted(set(by_id) - gold_ids)
    n = len(gold)
    return EvalReport(
        n=n,
        accuracy=(tp + tn) / n,
        tp=tp,
        tn=tn,
        fp=fp,
        fn=fn,
        missing_ids=tuple(missing),
        extra_ids=tuple(extra),
    )


def baseline(kind: str, gold: Sequence[Sample], seed: int = 0) -> list[dict]:
    """Trivial predictors: the majority gold label (ties favor 1) or a seeded coin."""
    if not gold:
        raise ValueError("gold corpus is empty")
    if kind == "majority":
        counts = Counter(s.label for s in gold)
        label = 1 if counts[1] >= counts[0] else 0
        return [{"id": s.id, "pred": label} for s in gold]
    if kind == "random":
        rng = random.Random(seed)
        return [{"id": s.id, "pred": rng.randint(0, 1)} for s in gold]
    raise ValueError(f"unknown baseline kind {kind!r}")
