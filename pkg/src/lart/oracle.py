"""Brute-force validity checking, kept independent of the chaining engine.

naive_fixpoint re-derives the minimal model by enumerating every ground
substitution for every rule on every round until nothing changes.  It shares
only the data model with the engine, never the join machinery, so agreement
between the two is a real two-implementation check and every emitted sample
can be certified against it.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

from .chaining import DEFAULT_MAX_ATOMS, FixpointLimitError
from .logic import Atom, Rule, Statement, is_variable, statement_key

__all__ = [
    "ValidationReport",
    "naive_fixpoint",
    "validate_triple",
    "validate_corpus",
]


def naive_fixpoint(
    statements: Iterable[Statement], max_atoms: int = DEFAULT_MAX_ATOMS
) -> frozenset[Atom]:
    """Closure of the statements' facts under their rules, by generate-and-test.

    Every round instantiates every rule with every substitution over the
    constants occurring in the statements.  Deliberately unoptimized.
    """
    facts: set[Atom] = set()
    rules: list[Rule] = []
    constants: set[str] = set()
    for stmt in sorted(statements, key=statement_key):
        if isinstance(stmt, Atom):
            if not stmt.is_ground():
                raise ValueError(f"fact {stmt.render()} is not ground")
            facts.add(stmt)
            constants |= stmt.constants()
        else:
            rules.append(stmt)
            constants |= stmt.constants()

    universe = sorted(constants)
    closure = set(facts)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            variables = sorted(rule.variables_in_body())
            for combo in itertools.product(universe, repeat=len(variables)):
                subst = dict(zip(variables, combo))
                if all(a.substitute(subst) in closure for a in rule.body):
                    head = rule.head.substitute(subst)
                    if head not in closure:
                        closure.add(head)
                        changed = True
        if len(closure) > max_atoms:
            raise FixpointLimitError(f"closure exceeded {max_atoms} atoms")
    return frozenset(closure)


def validate_triple(triple) -> bool:
    """Oracle verdict on an abductive triple: is it actually valid?

    For a positive-form second observation the verdict is membership of the
    closure of o1 + h; for a negated one it is the complement.  Raises if the
    triple carries no symbolic statements (free-text triples are not
    oracle-checkable).
    """
    if not getattr(triple, "o1", None) or not getattr(triple, "h", None):
        raise ValueError("triple has no symbolic payload; cannot oracle-check")
    closure = naive_fixpoint((*triple.o1, *triple.h))
    entailed = triple.o2 in closure
    return (not entailed) if triple.o2_negated else entailed


@dataclass(frozen=True)
class ValidationReport:
    """Outcome of sweeping a corpus against the oracle."""

    checked: int
    agreed: int
    disagreements: tuple[tuple[str, bool, bool], ...]
    skipped: tuple[str, ...] = ()

    def __post_init__(self):
        if self.agreed > self.checked:
            raise ValueError("agreed cannot exceed checked")
        if bool(self.disagreements) != (self.agreed < self.checked):
            raise ValueError("disagreements must account exactly for checked - agreed")

    @property
    def ok(self) -> bool:
        return not self.disagreements

    def to_text(self) -> str:
        lines = [
            f"checked {self.checked}",
            f"agreed {self.agreed}",
            f"skipped {len(self.skipped)}",
            f"disagreements {len(self.disagreements)}",
        ]
        for sample_id, engine, oracle in self.disagreements:
            lines.append(
                f"DISAGREE {sample_id} engine={int(engine)} oracle={int(oracle)}"
            )
        return "\n".join(lines) + "\n"

    def to_json_record(self) -> str:
        return json.dumps(
            {
                "checked": self.checked,
                "agreed": self.agreed,
                "skipped": len(self.skipped),
                "disagreements": [
                    {"id": i, "engine": int(e), "oracle": int(o)}
                    for i, e, o in self.disagreements
                ],
            }
        )


def validate_corpus(samples: Sequence, triples_by_id: Mapping[str, object]) -> ValidationReport:
    """Check every sample's emitted label against the oracle's verdict.

    ``triples_by_id`` maps sample id to its symbolic triple.  Samples with no
    symbolic payload (e.g. converted free-text records) are skipped and
    reported, not failed.
    """
    checked = 0
    agreed = 0
    disagreements: list[tuple[str, bool, bool]] = []
    skipped: list[str] = []
    for sample in samples:
        triple = triples_by_id.get(sample.id)
        if triple is None:
            skipped.append(sample.id)
            continue
        checked += 1
        engine_verdict = sample.label == 1
        oracle_verdict = validate_triple(triple)
        if engine_verdict == oracle_verdict:
            agreed += 1
        else:
            disagreements.append((sample.id, engine_verdict, oracle_verdict))
    return ValidationReport(
        checked=checked,
        agreed=agreed,
        disagreements=tuple(disagreements),
        skipped=tuple(skipped),
    )
