"""Mining (o1, h, o2) abductive triples and manufacturing their negatives.

A valid triple is self-contained: its second observation must follow from
exactly the union of the first observation and the hypothesis, with every
statement necessary, so no unstated bridge is smuggled in.  Because
conjunction commutes, o1 and h are interchangeable, which doubles the
positives.  Negatives flip the implication's only falsifying row by making
o2 false: either substituting a non-derivable atom (default, leaves no
lexical cue) or wrapping the original o2 in an explicit negation.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, replace
from typing import Iterable, Optional, Sequence

from .chaining import ProofDag, saturate
from .logic import Atom, Rule, Statement, Theory, atom_key, statement_key

__all__ = [
    "AbductiveTriple",
    "TruthAssignment",
    "NegationExhaustedError",
    "eval_expression",
    "make_triple",
    "extract_triples",
    "interchange",
    "negate",
]

VALID = "valid"
INVALID = "invalid"


class NegationExhaustedError(RuntimeError):
    """Every well-formed ground atom is entailed; nothing left to substitute."""


@dataclass(frozen=True)
class TruthAssignment:
    o1_true: bool
    h_true: bool
    o2_true: bool


def eval_expression(assignment: TruthAssignment) -> bool:
    """Truth value of 'o1 and h imply o2' under the given assignment.

    False on exactly one of the eight assignments: (T, T, F).
    """
    return not (
        assignment.o1_true and assignment.h_true and not assignment.o2_true
    )


@dataclass(frozen=True)
class AbductiveTriple:
    """Symbolic (o1, h, o2) with validity label and provenance.

    o1 and h are disjoint nonempty statement tuples; o2 is a single ground
    atom, rendered negated when o2_negated is set.
    """

    id: str
    o1: tuple[Statement, ...]
    h: tuple[Statement, ...]
    o2: Atom
    o2_negated: bool
    label: str
    provenance: str
    theory_ref: Optional[str] = None
    depth: Optional[int] = None

    def __post_init__(self):
        if not self.o1 or not self.h:
            raise ValueError("o1 and h must both be nonempty")
        if set(self.o1) & set(self.h):
            raise ValueError("o1 and h must be disjoint")
        if self.label not in (VALID, INVALID):
            raise ValueError(f"label must be {VALID!r} or {INVALID!r}")
        if not isinstance(self.o2, Atom) or not self.o2.is_ground():
            raise ValueError("o2 must be a ground atom")

    def statements(self) -> tuple[Statement, ...]:
        return (*self.o1, *self.h)


def _triple_id(
    o1: Sequence[Statement],
    h: Sequence[Statement],
    o2: Atom,
    o2_negated: bool,
    label: str,
    provenance: str,
) -> str:
    payload = "\x1f".join(
        [
            provenance,
            label,
            ";".join(s.render() for s in o1),
            ";".join(s.render() for s in h),
            ("not " if o2_negated else "") + o2.render(),
        ]
    )
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:16]


def make_triple(
    o1: Sequence[Statement],
    h: Sequence[Statement],
    o2: Atom,
    label: str,
    provenance: str,
    o2_negated: bool = False,
    theory_ref: Optional[str] = None,
    depth: Optional[int] = None,
) -> AbductiveTriple:
    """Construct a triple with its content-derived stable id."""
    o1 = tuple(o1)
    h = tuple(h)
    return AbductiveTriple(
        id=_triple_id(o1, h, o2, o2_negated, label, provenance),
        o1=o1,
        h=h,
        o2=o2,
        o2_negated=o2_negated,
        label=label,
        provenance=provenance,
        theory_ref=theory_ref,
        depth=depth,
    )


def _support(dag: ProofDag, atom: Atom) -> tuple[set[Atom], set[str]]:
    """Facts and rule ids on the recorded derivation of ``atom``."""
    facts: set[Atom] = set()
    rule_ids: set[str] = set()
    stack = [atom]
    seen: set[Atom] = set()
    while stack:
        current = stack.pop()
        if current in seen:
            continue
        seen.add(current)
        step = dag.steps.get(current)
        if step is None:
            facts.add(current)
            continue
        rule_ids.add(step.rule_id)
        stack.extend(step.premises)
    return facts, rule_ids


def _entailed_depth(statements: Iterable[Statement], o2: Atom) -> Optional[int]:
    sub = Theory.from_statements(statements)
    return saturate(sub).depth(o2)


def extract_triples(
    theory: Theory,
    dag: ProofDag,
    min_depth: int = 2,
    max_per_theory: int = 4,
    theory_ref: Optional[str] = None,
    partition: str = "facts-rules",
    rng_seed: int = 0,
) -> list[AbductiveTriple]:
    """Mine valid triples from a saturated theory's proof record.

    Candidates are derived atoms whose chain has at least ``min_depth`` rule
    applications, deepest first.  For each, o1 takes the ground facts of the
    proof's support and h its rules (``partition="random"`` reshuffles the
    support into two random nonempty sides instead).  A candidate is kept
    only if o2 still reaches ``min_depth`` from exactly o1 + h and removing
    any single statement breaks entailment.
    """
    if min_depth < 1:
        raise ValueError("min_depth must be >= 1")
    if partition not in ("facts-rules", "random"):
        raise ValueError(f"unknown partition {partition!r}")
    candidates = sorted(
        (step.derived for step in dag.iter_steps() if step.depth >= min_depth),
        key=lambda a: (-dag.steps[a].depth, atom_key(a)),
    )
    rules_by_id = {r.id: r for r in theory.rules}
    rng = random.Random(rng_seed)
    out: list[AbductiveTriple] = []
    for o2 in candidates:
        if len(out) >= max_per_theory:
            break
        support_facts, support_rule_ids = _support(dag, o2)
        facts = sorted(support_facts, key=atom_key)
        rules = [r for r in theory.rules if r.id in support_rule_ids]
        statements: list[Statement] = [*facts, *rules]
        depth = _entailed_depth(statements, o2)
        if depth is None or depth < min_depth:
            continue
        if not _all_necessary(statements, o2):
            continue
        if partition == "facts-rules":
            o1: tuple[Statement, ...] = tuple(facts)
            h: tuple[Statement, ...] = tuple(rules)
        else:
            shuffled = list(statements)
            rng.shuffle(shuffled)
            cut = rng.randint(1, len(shuffled) - 1)
            o1 = tuple(sorted(shuffled[:cut], key=statement_key))
            h = tuple(sorted(shuffled[cut:], key=statement_key))
        if not o1 or not h:
            continue
        out.append(
            make_triple(
                o1=o1,
                h=h,
                o2=o2,
                label=VALID,
                provenance=f"generated:{theory_ref}" if theory_ref else "generated",
                theory_ref=theory_ref,
                depth=depth,
            )
        )
    return out


def _all_necessary(statements: Sequence[Statement], o2: Atom) -> bool:
    for i in range(len(statements)):
        rest = [s for j, s in enumerate(statements) if j != i]
        if _entailed_depth(rest, o2) is not None:
            return False
    return True


def interchange(triple: AbductiveTriple) -> AbductiveTriple:
    """Swap the first observation and the hypothesis of a valid triple.

    Licensed by conjunction commutativity, so validity is unaffected; an
    involution on the statement sets.
    """
    if triple.label != VALID:
        raise ValueError("interchange is defined for valid triples only")
    return make_triple(
        o1=triple.h,
        h=triple.o1,
        o2=triple.o2,
        label=VALID,
        provenance=f"interchange-of:{triple.id}",
        o2_negated=triple.o2_negated,
        theory_ref=triple.theory_ref,
        depth=triple.depth,
    )


def negate(
    triple: AbductiveTriple,
    strategy: str = "substitute",
    rng_seed: int = 0,
    theory: Optional[Theory] = None,
) -> AbductiveTriple:
    """Make o2 false, turning a valid triple into an invalid one.

    strategy="substitute" replaces o2 with a well-formed ground atom that
    o1 + h does not entail (closed world: outside the fixpoint is false),
    sampled deterministically from ``rng_seed`` over the parent theory's
    predicates and constants when ``theory`` is given, else over the
    triple's own vocabulary.  strategy="textual" keeps o2 and flags it for
    sentential negation when rendered.
    """
    if triple.label != VALID:
        raise ValueError("negation is defined for valid triples only")
    if strategy == "textual":
        return make_triple(
            o1=triple.o1,
            h=triple.h,
            o2=triple.o2,
            label=INVALID,
            provenance=f"negation-of:{triple.id}:textual",
            o2_negated=True,
            theory_ref=triple.theory_ref,
            depth=triple.depth,
        )
    if strategy != "substitute":
        raise ValueError(f"unknown negation strategy {strategy!r}")

    if theory is not None:
        predicates = dict(theory.predicates)
        constants = sorted(theory.constants)
    else:
        sub = Theory.from_statements(triple.statements())
        predicates = dict(sub.predicates)
        constants = sorted(sub.constants | triple.o2.constants())
    fixpoint = saturate(Theory.from_statements(triple.statements())).fixpoint

    candidates: list[Atom] = []
    for pred, arity in sorted(predicates.items()):
        if arity == 1:
            candidates.extend(Atom(pred, (c,)) for c in constants)
        else:
            candidates.extend(
                Atom(pred, (a, b)) for a in constants for b in constants
            )
    candidates = [a for a in candidates if a not in fixpoint]
    if not candidates:
        raise NegationExhaustedError(
            "every well-formed ground atom is entailed by o1 + h"
        )
    chosen = random.Random(rng_seed).choice(candidates)
    return make_triple(
        o1=triple.o1,
        h=triple.h,
        o2=chosen,
        label=INVALID,
        provenance=f"negation-of:{triple.id}:substitute",
        o2_negated=False,
        theory_ref=triple.theory_ref,
        depth=None,
    )
