"""Command-line entry point for the whole toolkit.

Exit status contract: 0 success, 1 usage or module error, 2 oracle
validation failure, so CI can gate on corpus soundness.
"""

from __future__ import annotations

import argparse
import dataclasses
import sys
from pathlib import Path

from . import dataset, scoring
from .dataset import CorpusFormatError, SplitSpec
from .generate import GenConfig, GenerationExhaustedError, derive_seed, load_gen_config
from .logic import ParseError
from .oracle import validate_corpus
from .pipeline import PipelineConfig, build_corpus, run_pipeline, templates_for_triple
from .render import load_templates, render_triple

__all__ = ["main"]

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def _on_off(value: str) -> bool:
    if value not in ("on", "off"):
        raise argparse.ArgumentTypeError("expected 'on' or 'off'")
    return value == "on"


def _ratio_triple(value: str) -> tuple[float, float, float]:
    parts = value.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated ratios")
    try:
        a, b, c = (float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError("ratios must be numbers") from None
    return a, b, c


def _gen_config(args) -> GenConfig:
    config = load_gen_config(args.config) if args.config else GenConfig()
    if args.seed is not None:
        config = dataclasses.replace(config, seed=args.seed)
    return config


def _split_spec(args, seed: int) -> SplitSpec:
    if args.ratios is not None:
        train, validation, test = args.ratios
        return SplitSpec(train=train, validation=validation, test=test, seed=seed)
    return SplitSpec(seed=seed)


def _write_report(text: str, args) -> None:
    print(text, end="")
    if getattr(args, "report", None):
        Path(args.report).write_text(text, encoding="utf-8")


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    cfg = PipelineConfig(
        gen=_gen_config(args),
        n_samples=args.n,
        neg_strategy=args.neg_strategy,
        interchange=args.interchange,
        balance=False,
        workers=args.workers,
        max_per_theory=args.max_per_theory,
    )
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    build = build_corpus(cfg, keep_theories=args.dump_theories)
    count = dataset.write_triples(build.triples, out / "triples.jsonl")
    if args.dump_theories:
        theories_dir = out / "theories"
        theories_dir.mkdir(exist_ok=True)
        for ref, theory, dag in build.theories:
            (theories_dir / f"{ref}.rules").write_text(theory.render(), encoding="utf-8")
            (theories_dir / f"{ref}.proof").write_text(
                dataset.dump_proof_dag(dag), encoding="utf-8"
            )
    print(f"wrote {count} triples to {out / 'triples.jsonl'}")
    return EXIT_OK


def _cmd_render(args) -> int:
    triples = dataset.read_triples(args.triples)
    overrides = load_templates(args.templates) if args.templates else None
    samples = [
        render_triple(t, templates_for_triple(t, overrides=overrides))
        for t in triples.values()
    ]
    count = dataset.write_samples(samples, args.out)
    print(f"rendered {count} samples to {args.out}")
    return EXIT_OK


def _cmd_split(args) -> int:
    samples = dataset.read_samples(args.input)
    spec = _split_spec(args, args.seed)
    train, validation, test = dataset.split(samples, spec, balance=args.balance)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for name, part in (("train", train), ("validation", validation), ("test", test)):
        dataset.write_samples(part, out / f"{name}.jsonl")
        print(f"{name}: {len(part)}")
    return EXIT_OK


def _cmd_stats(args) -> int:
    paths = {Path(p).stem: p for p in args.corpus}
    if len(paths) != len(args.corpus):
        raise _UsageError("corpus files must have distinct names")
    result = dataset.stats(paths)
    _write_report(result.to_text(), args)
    if args.json:
        Path(args.json).write_text(result.to_json_record() + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_validate(args) -> int:
    samples = []
    for path in args.corpus:
        samples.extend(dataset.read_samples(path))
    triples = dataset.read_triples(args.triples)
    report = validate_corpus(samples, triples)
    _write_report(report.to_text(), args)
    if args.json:
        Path(args.json).write_text(report.to_json_record() + "\n", encoding="utf-8")
    return EXIT_OK if report.ok else EXIT_VALIDATION


def _cmd_convert_art(args) -> int:
    records = dataset.read_art_records(args.input)
    samples = dataset.convert_art(records, include_interchange=args.interchange)
    count = dataset.write_samples(samples, args.out)
    print(f"converted {len(records)} records into {count} samples at {args.out}")
    return EXIT_OK


def _cmd_score(args) -> int:
    gold = dataset.read_samples(args.gold)
    predictions = dataset.read_predictions(args.preds)
    report = scoring.score(gold, predictions)
    _write_report(report.to_text(), args)
    if args.json:
        Path(args.json).write_text(report.to_json_record() + "\n", encoding="utf-8")
    return EXIT_OK


def _cmd_baseline(args) -> int:
    gold = dataset.read_samples(args.gold)
    predictions = scoring.baseline(args.kind, gold, seed=args.seed)
    count = dataset.write_predictions(predictions, args.out)
    print(f"wrote {count} {args.kind} predictions to {args.out}")
    return EXIT_OK


def _cmd_pipeline(args) -> int:
    gen = _gen_config(args)
    cfg = PipelineConfig(
        gen=gen,
        split=_split_spec(args, seed=derive_seed(gen.seed, "split")),
        n_samples=args.n,
        neg_strategy=args.neg_strategy,
        interchange=args.interchange,
        balance=args.balance,
        workers=args.workers,
        max_per_theory=args.max_per_theory,
        max_chars=args.max_chars,
    )
    result = run_pipeline(cfg, args.out)
    for name, count in result.split_counts.items():
        print(f"{name}: {count} -> {result.split_paths[name]}")
    print(result.report.to_text(), end="")
    return EXIT_OK if result.report.ok else EXIT_VALIDATION


# ---------------------------------------------------------------------------
# Parser assembly
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="lart", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate theories and symbolic triples")
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--n", type=int, required=True, help="number of triples to emit")
    gen.add_argument("--out", required=True)
    gen.add_argument("--config", default=None, help="flat key=value generator config")
    gen.add_argument(
        "--neg-strategy", choices=("substitute", "textual", "none"), default="substitute"
    )
    gen.add_argument("--interchange", type=_on_off, default=True, metavar="on|off")
    gen.add_argument("--max-per-theory", type=int, default=4)
    gen.add_argument("--workers", type=int, default=1)
    gen.add_argument("--dump-theories", action="store_true")
    gen.set_defaults(func=_cmd_gen)

    render = sub.add_parser("render", help="render symbolic triples to JSONL samples")
    render.add_argument("--triples", required=True)
    render.add_argument("--out", required=True)
    render.add_argument("--templates", default=None)
    render.set_defaults(func=_cmd_render)

    split_p = sub.add_parser("split", help="split a corpus into train/validation/test")
    split_p.add_argument("--in", dest="input", required=True)
    split_p.add_argument("--out", required=True)
    split_p.add_argument("--ratios", type=_ratio_triple, default=None, metavar="a,b,c")
    split_p.add_argument("--seed", type=int, default=0)
    split_p.add_argument("--balance", type=_on_off, default=False, metavar="on|off")
    split_p.set_defaults(func=_cmd_split)

    stats_p = sub.add_parser("stats", help="per-split label counts and max char lengths")
    stats_p.add_argument("corpus", nargs="+")
    stats_p.add_argument("--report", default=None)
    stats_p.add_argument("--json", default=None)
    stats_p.set_defaults(func=_cmd_stats)

    validate = sub.add_parser("validate", help="oracle-check a corpus against its triples")
    validate.add_argument("--corpus", nargs="+", required=True)
    validate.add_argument("--triples", required=True)
    validate.add_argument("--report", default=None)
    validate.add_argument("--json", default=None)
    validate.set_defaults(func=_cmd_validate)

    convert = sub.add_parser("convert-art", help="convert two-choice records to samples")
    convert.add_argument("--in", dest="input", required=True)
    convert.add_argument("--out", required=True)
    convert.add_argument("--interchange", type=_on_off, default=False, metavar="on|off")
    convert.set_defaults(func=_cmd_convert_art)

    score = sub.add_parser("score", help="score a predictions file against gold")
    score.add_argument("--gold", required=True)
    score.add_argument("--preds", required=True)
    score.add_argument("--report", default=None)
    score.add_argument("--json", default=None)
    score.set_defaults(func=_cmd_score)

    baseline = sub.add_parser("baseline", help="emit majority or random predictions")
    baseline.add_argument("--kind", choices=("majority", "random"), required=True)
    baseline.add_argument("--gold", required=True)
    baseline.add_argument("--out", required=True)
    baseline.add_argument("--seed", type=int, default=0)
    baseline.set_defaults(func=_cmd_baseline)

    pipeline = sub.add_parser("pipeline", help="gen + augment + negate + render + split + validate")
    pipeline.add_argument("--seed", type=int, default=None)
    pipeline.add_argument("--n", type=int, required=True, help="total samples to emit")
    pipeline.add_argument("--out", required=True)
    pipeline.add_argument("--ratios", type=_ratio_triple, default=None, metavar="a,b,c")
    pipeline.add_argument(
        "--neg-strategy", choices=("substitute", "textual", "none"), default="substitute"
    )
    pipeline.add_argument("--interchange", type=_on_off, default=True, metavar="on|off")
    pipeline.add_argument("--balance", type=_on_off, default=True, metavar="on|off")
    pipeline.add_argument("--workers", type=int, default=1)
    pipeline.add_argument("--config", default=None)
    pipeline.add_argument("--max-per-theory", type=int, default=4)
    pipeline.add_argument("--max-chars", type=int, default=0)
    pipeline.set_defaults(func=_cmd_pipeline)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    try:
        return args.func(args)
    except _UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except (
        CorpusFormatError,
        ParseError,
        GenerationExhaustedError,
        ValueError,
        OSError,
        RuntimeError,
    ) as exc:
        print(f"lart: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
