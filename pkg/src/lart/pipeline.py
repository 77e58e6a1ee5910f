"""End-to-end corpus construction: generate, augment, negate, render, split.

Assembly is deterministic for a fixed (seed, flags): theories come from
per-index random streams and are consumed in index order even when generated
by a worker pool, every negation draws from a stream derived from the run
seed and the parent triple id, and exact duplicate renderings are dropped in
insertion order.

Each positive contributes a block [positive, its negative, the interchanged
positive, its negative], so truncating the assembled corpus to any even
target keeps the classes exactly balanced.
"""

from __future__ import annotations

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .chaining import ProofDag, saturate
from .dataset import (
    CorpusStats,
    SplitSpec,
    balance_labels,
    split,
    stats,
    write_samples,
    write_triples,
)
from .generate import GenConfig, derive_seed, generate_theory
from .logic import Theory
from .oracle import ValidationReport, validate_corpus
from .render import Sample, TemplateSet, default_templates, render_triple
from .triples import AbductiveTriple, extract_triples, interchange, negate

__all__ = [
    "PipelineConfig",
    "PipelineResult",
    "CorpusBuild",
    "templates_for_triple",
    "build_corpus",
    "run_pipeline",
]

log = logging.getLogger(__name__)

_BATCH = 32
# Generous ceiling; reaching it means the config yields almost no triples.
_MAX_THEORIES_PER_SAMPLE = 10


@dataclass(frozen=True)
class PipelineConfig:
    gen: GenConfig = GenConfig()
    split: SplitSpec = SplitSpec()
    n_samples: int = 1000
    neg_strategy: str = "substitute"  # substitute | textual | none
    interchange: bool = True
    balance: bool = True
    workers: int = 1
    max_per_theory: int = 4
    min_depth: int = 2
    max_chars: int = 0  # 0 disables the length cap

    def __post_init__(self):
        if self.n_samples < 1:
            raise ValueError("n_samples must be positive")
        if self.neg_strategy not in ("substitute", "textual", "none"):
            raise ValueError(f"unknown negation strategy {self.neg_strategy!r}")
        if self.neg_strategy == "none" and self.balance:
            raise ValueError("cannot balance a corpus generated without negatives")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")
        if self.min_depth < 1:
            raise ValueError("min_depth must be >= 1")


@dataclass
class CorpusBuild:
    samples: list[Sample]
    triples: list[AbductiveTriple]
    theories: list[tuple[str, Theory, ProofDag]] = field(default_factory=list)


@dataclass(frozen=True)
class PipelineResult:
    out_dir: Path
    split_paths: dict[str, Path]
    split_counts: dict[str, int]
    triples_path: Path
    report: ValidationReport
    corpus_stats: CorpusStats


def templates_for_triple(
    triple: AbductiveTriple, overrides: Optional[TemplateSet] = None
) -> TemplateSet:
    """Default templates for every predicate the triple mentions."""
    theory = Theory.from_statements(triple.statements())
    predicates = dict(theory.predicates)
    predicates.setdefault(triple.o2.predicate, triple.o2.arity)
    templates = default_templates(predicates)
    if overrides is not None:
        templates = templates.overlay(overrides)
    return templates


def _theory_ref(seed: int, index: int) -> str:
    return f"s{seed}.t{index:06d}"


def _mine_theory(args: tuple) -> tuple[int, Theory, list[AbductiveTriple]]:
    gen, index, max_per_theory, min_depth = args
    theory, dag = generate_theory(gen, index=index)
    positives = extract_triples(
        theory,
        dag,
        min_depth=min_depth,
        max_per_theory=max_per_theory,
        theory_ref=_theory_ref(gen.seed, index),
    )
    return index, theory, positives


def _expand(
    positive: AbductiveTriple, theory: Theory, cfg: PipelineConfig
) -> list[AbductiveTriple]:
    block = [positive]
    if cfg.neg_strategy != "none":
        block.append(
            negate(
                positive,
                strategy=cfg.neg_strategy,
                rng_seed=derive_seed(cfg.gen.seed, "neg", positive.id),
                theory=theory,
            )
        )
    if cfg.interchange:
        swapped = interchange(positive)
        block.append(swapped)
        if cfg.neg_strategy != "none":
            block.append(
                negate(
                    swapped,
                    strategy=cfg.neg_strategy,
                    rng_seed=derive_seed(cfg.gen.seed, "neg", swapped.id),
                    theory=theory,
                )
            )
    return block


def build_corpus(cfg: PipelineConfig, keep_theories: bool = False) -> CorpusBuild:
    """Assemble exactly cfg.n_samples rendered samples with aligned triples."""
    build = CorpusBuild(samples=[], triples=[])
    seen_texts: set[tuple[str, str, str]] = set()
    next_index = 0
    executor = ProcessPoolExecutor(cfg.workers) if cfg.workers > 1 else None
    try:
        while len(build.samples) < cfg.n_samples:
            if next_index > _MAX_THEORIES_PER_SAMPLE * cfg.n_samples + _BATCH:
                raise RuntimeError(
                    "theory budget exhausted before reaching the sample target; "
                    "the generator config yields too few extractable triples"
                )
            tasks = [
                (cfg.gen, i, cfg.max_per_theory, cfg.min_depth)
                for i in range(next_index, next_index + _BATCH)
            ]
            next_index += _BATCH
            results = executor.map(_mine_theory, tasks) if executor else map(_mine_theory, tasks)
            for index, theory, positives in results:
                if keep_theories:
                    build.theories.append(
                        (_theory_ref(cfg.gen.seed, index), theory, saturate(theory))
                    )
                for positive in positives:
                    block = _expand(positive, theory, cfg)
                    rendered = [render_triple(t, templates_for_triple(t)) for t in block]
                    if cfg.max_chars and any(
                        length > cfg.max_chars
                        for s in rendered
                        for length in s.char_lengths.values()
                    ):
                        continue
                    texts = [(s.obs1, s.hyp, s.obs2) for s in rendered]
                    if any(t in seen_texts for t in texts):
                        continue
                    seen_texts.update(texts)
                    build.samples.extend(rendered)
                    build.triples.extend(block)
                if len(build.samples) >= cfg.n_samples:
                    break
    finally:
        if executor:
            executor.shutdown(cancel_futures=True)
    del build.samples[cfg.n_samples :]
    del build.triples[cfg.n_samples :]
    return build


def run_pipeline(cfg: PipelineConfig, out_dir) -> PipelineResult:
    """Build, split, write, and oracle-check a corpus under ``out_dir``."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    build = build_corpus(cfg)
    parts = dict(
        zip(("train", "validation", "test"), split(build.samples, cfg.split))
    )
    dropped: list[Sample] = []
    if cfg.balance:
        # Balance each split by dropping the excess class; keep the drops on
        # disk so the emitted corpus is still exactly the assembled one.
        for name, part in parts.items():
            parts[name], part_dropped = balance_labels(part)
            dropped.extend(part_dropped)

    split_paths: dict[str, Path] = {}
    split_counts: dict[str, int] = {}
    for name, part in parts.items():
        path = out / f"{name}.jsonl"
        split_counts[name] = write_samples(part, path)
        split_paths[name] = path
    if cfg.balance:
        write_samples(dropped, out / "dropped.jsonl")

    triples_path = out / "triples.jsonl"
    write_triples(build.triples, triples_path)

    report = validate_corpus(build.samples, {t.id: t for t in build.triples})
    (out / "validation_report.txt").write_text(report.to_text(), encoding="utf-8")
    (out / "validation_report.jsonl").write_text(
        report.to_json_record() + "\n", encoding="utf-8"
    )

    corpus_stats = stats(split_paths)
    (out / "stats.txt").write_text(corpus_stats.to_text(), encoding="utf-8")

    log.info(
        "pipeline wrote %s samples (%s) to %s; oracle disagreements: %d",
        sum(split_counts.values()),
        split_counts,
        out,
        len(report.disagreements),
    )
    return PipelineResult(
        out_dir=out,
        split_paths=split_paths,
        split_counts=split_counts,
        triples_path=triples_path,
        report=report,
        corpus_stats=corpus_stats,
    )
