"""Corpus serialization, ART conversion, splitting, balancing, statistics.

JSONL is the single corpus format.  Sample schema, one object per line::

    {"id": str, "obs1": str, "obs2": str, "hyp": str, "label": 0|1, "provenance": str}

ART input schema: ``{"obs1", "obs2", "hyp1", "hyp2", "label": 1|2}`` per line.
Predictions schema: ``{"id": str, "pred": 0|1}`` per line.

A symbolic sidecar file accompanies generated corpora so every sample can be
re-checked by the oracle; its statements use the bare rule-DSL expressions
(``smart(john)``, ``smart(X) => rich(X)``).
"""

from __future__ import annotations

import json
import logging
import math
import random
from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

from .chaining import ProofDag
from .logic import atom_key, parse_statement, render_statement_expr
from .render import Sample
from .triples import INVALID, VALID, AbductiveTriple, make_triple

__all__ = [
    "CorpusFormatError",
    "SplitSpec",
    "SplitStats",
    "CorpusStats",
    "PAPER_TOTAL",
    "PAPER_SPLIT_COUNTS",
    "write_samples",
    "read_samples",
    "convert_art",
    "read_art_records",
    "split",
    "balance_labels",
    "stats",
    "write_triples",
    "read_triples",
    "write_predictions",
    "read_predictions",
    "dump_proof_dag",
]

log = logging.getLogger(__name__)

_SAMPLE_FIELDS = ("id", "obs1", "obs2", "hyp", "label", "provenance")
_ART_FIELDS = ("obs1", "obs2", "hyp1", "hyp2", "label")

# Published corpus arithmetic: 498,697 records split 476,167 / 9,339 / 13,191.
PAPER_TOTAL = 498_697
PAPER_SPLIT_COUNTS = (476_167, 9_339, 13_191)


class CorpusFormatError(ValueError):
    """A corpus file violates its line schema."""


@dataclass(frozen=True)
class SplitSpec:
    """Train/validation/test fractions plus the shuffle seed.

    Defaults are the exact published proportions, i.e. the quotients of the
    split counts above; they reproduce those counts at the published total.
    """

    train: float = PAPER_SPLIT_COUNTS[0] / PAPER_TOTAL
    validation: float = PAPER_SPLIT_COUNTS[1] / PAPER_TOTAL
    test: float = PAPER_SPLIT_COUNTS[2] / PAPER_TOTAL
    seed: int = 0

    def __post_init__(self):
        ratios = (self.train, self.validation, self.test)
        if any(r <= 0 for r in ratios):
            raise ValueError("all split ratios must be positive")
        if abs(sum(ratios) - 1.0) > 1e-9:
            raise ValueError(f"ratios must sum to 1, got {sum(ratios)!r}")


def write_samples(samples: Iterable[Sample], path) -> int:
    """One JSONL record per sample; returns the count written."""
    seen: set[str] = set()
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for sample in samples:
            if sample.id in seen:
                raise CorpusFormatError(f"duplicate sample id {sample.id!r}")
            seen.add(sample.id)
            handle.write(sample.to_json_line() + "\n")
            count += 1
    return count


def read_samples(path) -> list[Sample]:
    samples: list[Sample] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from None
            if not isinstance(record, dict) or set(record) != set(_SAMPLE_FIELDS):
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected exactly fields {list(_SAMPLE_FIELDS)}"
                )
            if record["label"] not in (0, 1):
                raise CorpusFormatError(
                    f"{path}:{lineno}: unknown label value {record['label']!r}"
                )
            if any(not isinstance(record[k], str) for k in ("id", "obs1", "obs2", "hyp", "provenance")):
                raise CorpusFormatError(f"{path}:{lineno}: text fields must be strings")
            if record["id"] in seen:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate id {record['id']!r}")
            seen.add(record["id"])
            samples.append(Sample(**record))
    return samples


# ---------------------------------------------------------------------------
# ART conversion
# ---------------------------------------------------------------------------


def read_art_records(path) -> list[dict]:
    records: list[dict] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from None
            records.append(record)
    return records


def _art_sample_id(provenance: str, obs1: str, hyp: str, obs2: str) -> str:
    import hashlib

    payload = "\x1f".join([provenance, obs1, hyp, obs2])
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def convert_art(
    records: Sequence[Mapping], include_interchange: bool = False
) -> list[Sample]:
    """Turn two-choice records into valid-labeled binary samples.

    Only the gold hypothesis is emitted; the rejected one is merely the less
    plausible of the pair, not known to be invalid, so it yields no negative.
    With ``include_interchange`` each positive is also emitted with the first
    observation and the hypothesis swapped.
    """
    out: list[Sample] = []
    for index, record in enumerate(records, start=1):
        missing = [k for k in _ART_FIELDS if k not in record]
        if missing:
            raise CorpusFormatError(f"record {index}: missing field(s) {missing}")
        if record["label"] not in (1, 2):
            raise CorpusFormatError(
                f"record {index}: gold choice must be 1 or 2, got {record['label']!r}"
            )
        hyp = record["hyp1"] if record["label"] == 1 else record["hyp2"]
        provenance = f"art:{index}"
        sample = Sample(
            id=_art_sample_id(provenance, record["obs1"], hyp, record["obs2"]),
            obs1=record["obs1"],
            obs2=record["obs2"],
            hyp=hyp,
            label=1,
            provenance=provenance,
        )
        out.append(sample)
        if include_interchange:
            swapped_prov = f"interchange-of:{sample.id}"
            out.append(
                Sample(
                    id=_art_sample_id(swapped_prov, hyp, record["obs1"], record["obs2"]),
                    obs1=hyp,
                    obs2=record["obs2"],
                    hyp=record["obs1"],
                    label=1,
                    provenance=swapped_prov,
                )
            )
    return out


# ---------------------------------------------------------------------------
# Splitting
# ---------------------------------------------------------------------------

# Absorbs float noise in ratio*N without disturbing legitimate floors.
_SIZE_EPS = 1e-6


def balance_labels(samples: list[Sample]) -> tuple[list[Sample], list[Sample]]:
    """Drop the minimum number of excess-class samples; returns (kept, dropped)."""
    positives = sum(1 for s in samples if s.label == 1)
    negatives = len(samples) - positives
    excess_label = 1 if positives > negatives else 0
    excess = abs(positives - negatives)
    if excess == 0:
        return samples, []
    kept: list[Sample] = []
    dropped: list[Sample] = []
    # Walk from the tail so the drop is deterministic in the shuffled order.
    for sample in reversed(samples):
        if excess and sample.label == excess_label:
            dropped.append(sample)
            excess -= 1
        else:
            kept.append(sample)
    kept.reverse()
    dropped.reverse()
    return kept, dropped


def split(
    samples: Sequence[Sample], spec: SplitSpec, balance: bool = False
) -> tuple[list[Sample], list[Sample], list[Sample]]:
    """Deterministic shuffle then partition into train/validation/test.

    Validation and test take floor(ratio * N); the remainder goes to train.
    With ``balance`` each split drops the minimum number of excess-class
    samples (from its tail, logged) so its label counts are exactly equal.
    """
    n = len(samples)
    n_validation = math.floor(spec.validation * n + _SIZE_EPS)
    n_test = math.floor(spec.test * n + _SIZE_EPS)
    n_train = n - n_validation - n_test
    if min(n_train, n_validation, n_test) <= 0:
        raise ValueError(
            f"split of {n} samples yields an empty part "
            f"({n_train}/{n_validation}/{n_test})"
        )
    shuffled = list(samples)
    random.Random(spec.seed).shuffle(shuffled)
    parts = [
        shuffled[:n_train],
        shuffled[n_train : n_train + n_validation],
        shuffled[n_train + n_validation :],
    ]
    if balance:
        for i, name in enumerate(("train", "validation", "test")):
            parts[i], dropped = balance_labels(parts[i])
            if dropped:
                log.info(
                    "balance dropped %d sample(s) from %s: %s",
                    len(dropped),
                    name,
                    [s.id for s in dropped],
                )
    return parts[0], parts[1], parts[2]


# ---------------------------------------------------------------------------
# Statistics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SplitStats:
    name: str
    total: int
    positives: int
    negatives: int
    max_obs1: int
    max_obs2: int
    max_hyp: int


@dataclass(frozen=True)
class CorpusStats:
    splits: tuple[SplitStats, ...]

    @property
    def total(self) -> int:
        return sum(s.total for s in self.splits)

    def to_text(self) -> str:
        header = f"{'split':<12}{'total':>8}{'pos':>8}{'neg':>8}{'obs1':>6}{'obs2':>6}{'hyp':>6}"
        lines = [header]
        for s in self.splits:
            lines.append(
                f"{s.name:<12}{s.total:>8}{s.positives:>8}{s.negatives:>8}"
                f"{s.max_obs1:>6}{s.max_obs2:>6}{s.max_hyp:>6}"
            )
        lines.append(f"all splits: {self.total} samples")
        return "\n".join(lines) + "\n"

    def to_json_record(self) -> str:
        return json.dumps(
            {
                "total": self.total,
                "splits": [
                    {
                        "name": s.name,
                        "total": s.total,
                        "positives": s.positives,
                        "negatives": s.negatives,
                        "max_chars": {
                            "obs1": s.max_obs1,
                            "obs2": s.max_obs2,
                            "hyp": s.max_hyp,
                        },
                    }
                    for s in self.splits
                ],
            }
        )


def stats(split_paths: Mapping[str, object]) -> CorpusStats:
    """Exact per-field max char lengths and label counts per split."""
    splits = []
    for name, path in split_paths.items():
        samples = read_samples(path)
        positives = sum(1 for s in samples if s.label == 1)
        splits.append(
            SplitStats(
                name=name,
                total=len(samples),
                positives=positives,
                negatives=len(samples) - positives,
                max_obs1=max((len(s.obs1) for s in samples), default=0),
                max_obs2=max((len(s.obs2) for s in samples), default=0),
                max_hyp=max((len(s.hyp) for s in samples), default=0),
            )
        )
    return CorpusStats(splits=tuple(splits))


# ---------------------------------------------------------------------------
# Symbolic sidecar
# ---------------------------------------------------------------------------


def write_triples(triples: Iterable[AbductiveTriple], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for t in triples:
            record = {
                "id": t.id,
                "o1": [render_statement_expr(s) for s in t.o1],
                "h": [render_statement_expr(s) for s in t.h],
                "o2": render_statement_expr(t.o2),
                "o2_negated": t.o2_negated,
                "label": 1 if t.label == VALID else 0,
                "provenance": t.provenance,
                "theory": t.theory_ref,
                "depth": t.depth,
            }
            handle.write(json.dumps(record, ensure_ascii=False) + "\n")
            count += 1
    return count


def _parse_statement_list(exprs: Sequence[str], prefix: str) -> tuple:
    out = []
    rule_no = 0
    for expr in exprs:
        rule_no += 1
        out.append(parse_statement(expr, rule_id=f"{prefix}{rule_no}"))
    return tuple(out)


def read_triples(path) -> dict[str, AbductiveTriple]:
    """Sidecar records keyed by sample id, statements re-parsed."""
    triples: dict[str, AbductiveTriple] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from None
            try:
                o2 = parse_statement(record["o2"])
                triple = AbductiveTriple(
                    id=record["id"],
                    o1=_parse_statement_list(record["o1"], "o"),
                    h=_parse_statement_list(record["h"], "h"),
                    o2=o2,
                    o2_negated=bool(record["o2_negated"]),
                    label=VALID if record["label"] == 1 else INVALID,
                    provenance=record["provenance"],
                    theory_ref=record.get("theory"),
                    depth=record.get("depth"),
                )
            except (KeyError, ValueError) as exc:
                raise CorpusFormatError(f"{path}:{lineno}: {exc}") from None
            if triple.id in triples:
                raise CorpusFormatError(f"{path}:{lineno}: duplicate id {triple.id!r}")
            triples[triple.id] = triple
    return triples


# ---------------------------------------------------------------------------
# Predictions
# ---------------------------------------------------------------------------


def write_predictions(predictions: Iterable[Mapping], path) -> int:
    count = 0
    with open(path, "w", encoding="utf-8") as handle:
        for record in predictions:
            handle.write(
                json.dumps({"id": record["id"], "pred": record["pred"]}) + "\n"
            )
            count += 1
    return count


def read_predictions(path) -> list[dict]:
    predictions: list[dict] = []
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            if not raw.strip():
                continue
            try:
                record = json.loads(raw)
            except json.JSONDecodeError as exc:
                raise CorpusFormatError(f"{path}:{lineno}: not valid JSON ({exc.msg})") from None
            if set(record) != {"id", "pred"} or record["pred"] not in (0, 1):
                raise CorpusFormatError(
                    f"{path}:{lineno}: expected {{'id': str, 'pred': 0|1}}"
                )
            predictions.append(record)
    return predictions


# ---------------------------------------------------------------------------
# Debug dumps
# ---------------------------------------------------------------------------


def dump_proof_dag(dag: ProofDag) -> str:
    """Line-oriented dump, one fact or derivation step per line."""
    lines = [f"0 {atom.render()}" for atom in sorted(dag.facts, key=atom_key)]
    for step in sorted(dag.iter_steps(), key=lambda s: (s.depth, atom_key(s.derived))):
        premises = " ".join(p.render() for p in step.premises)
        lines.append(f"{step.depth} {step.derived.render()} <= {step.rule_id} [{premises}]")
    return "\n".join(lines) + "\n"
