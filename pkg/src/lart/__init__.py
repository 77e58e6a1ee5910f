"""Logic-grounded abductive reasoning triples and corpus tooling.

The toolkit generates random definite-clause theories, mines self-contained
(o1, h, o2) triples from their forward-chaining proofs, doubles positives by
interchanging o1 and h, manufactures negatives by making o2 false, renders
everything to deterministic English JSONL, and provides split/stats/score
utilities plus an independent brute-force oracle that certifies every label.
"""

from .chaining import FixpointLimitError, ProofDag, ProofStep, chain_depth, entails, saturate
from .dataset import (
    CorpusFormatError,
    CorpusStats,
    SplitSpec,
    convert_art,
    read_samples,
    split,
    stats,
    write_samples,
)
from .generate import GenConfig, GenerationExhaustedError, generate_theory
from .logic import (
    Atom,
    ParseError,
    Rule,
    Theory,
    ground_match,
    parse_theory,
    render_theory,
)
from .oracle import ValidationReport, naive_fixpoint, validate_corpus, validate_triple
from .pipeline import PipelineConfig, build_corpus, run_pipeline
from .render import Sample, TemplateSet, default_templates, render_statement, render_triple
from .scoring import EvalReport, baseline, score
from .triples import (
    AbductiveTriple,
    TruthAssignment,
    eval_expression,
    extract_triples,
    interchange,
    negate,
)

__version__ = "0.1.0"
