"""Deterministic English rendering of statements and triples.

Each predicate carries exactly one template, so identical symbolic input
always yields byte-identical text.  Unary predicates come in three flavors:

  adj    "smart"                        -> "John is smart."
  desc   "the smartest person in town"  -> "John is the smartest person in town."
  vp     "has a green car"              -> "John has a green car."

Binary predicates are verbs: "knows" -> "John knows Mary."  Rules with a
single unary body atom read as universals ("Every smart person has a green
car."); everything else falls back to an if/then reading with the rule's own
variable letters ("If X knows Y and Y is smart then X likes Y.").
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Optional

from .logic import Atom, Rule, Statement, is_variable
from .triples import VALID, AbductiveTriple

__all__ = [
    "PredicateTemplate",
    "TemplateSet",
    "MissingTemplateError",
    "Sample",
    "default_templates",
    "load_templates",
    "render_statement",
    "render_triple",
]

_UNARY_KINDS = ("adj", "desc", "vp")
_BINARY_KINDS = ("verb",)

DEFAULT_NEGATION = "It is not the case that {sentence}."


class MissingTemplateError(KeyError):
    """A statement uses a predicate with no template."""


@dataclass(frozen=True)
class PredicateTemplate:
    predicate: str
    arity: int
    kind: str
    phrase: str

    def __post_init__(self):
        allowed = _UNARY_KINDS if self.arity == 1 else _BINARY_KINDS
        if self.kind not in allowed:
            raise ValueError(
                f"{self.predicate}/{self.arity}: kind must be one of {allowed}"
            )
        if not self.phrase:
            raise ValueError(f"{self.predicate}: empty phrase")


@dataclass(frozen=True)
class TemplateSet:
    entries: Mapping[str, PredicateTemplate]
    negation: str = DEFAULT_NEGATION

    def __post_init__(self):
        if "{sentence}" not in self.negation:
            raise ValueError("negation wrapper must contain {sentence}")

    def for_predicate(self, predicate: str) -> PredicateTemplate:
        entry = self.entries.get(predicate)
        if entry is None:
            raise MissingTemplateError(f"no template for predicate {predicate!r}")
        return entry

    def overlay(self, other: "TemplateSet") -> "TemplateSet":
        """This set with the other's entries (and wrapper) taking precedence."""
        merged = dict(self.entries)
        merged.update(other.entries)
        return TemplateSet(entries=merged, negation=other.negation)


def default_templates(predicates: Mapping[str, int]) -> TemplateSet:
    """Templates derived from predicate names: unary adjectives, binary verbs."""
    entries = {
        name: PredicateTemplate(
            predicate=name,
            arity=arity,
            kind="adj" if arity == 1 else "verb",
            phrase=name,
        )
        for name, arity in predicates.items()
    }
    return TemplateSet(entries=entries)


def load_templates(path) -> TemplateSet:
    """Parse a template file: one ``name/arity kind phrase...`` line per predicate.

    Lines starting with ``negation:`` override the negation wrapper; ``#``
    comments and blank lines are ignored.
    """
    entries: dict[str, PredicateTemplate] = {}
    negation = DEFAULT_NEGATION
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if line.startswith("negation:"):
                negation = line.removeprefix("negation:").strip()
                continue
            try:
                spec, kind, phrase = line.split(maxsplit=2)
                name, arity = spec.split("/")
                entry = PredicateTemplate(name, int(arity), kind, phrase)
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from None
            if entry.predicate in entries:
                raise ValueError(f"{path}:{lineno}: duplicate template for {name}")
            entries[entry.predicate] = entry
    return TemplateSet(entries=entries, negation=negation)


def _term_text(term: str) -> str:
    # Variables keep their letter; constants read as capitalized names.
    return term if is_variable(term) else term.capitalize()


def _atom_clause(atom: Atom, templates: TemplateSet) -> str:
    """The atom as a clause without final period, e.g. 'John is smart'."""
    entry = templates.for_predicate(atom.predicate)
    if entry.arity != atom.arity:
        raise MissingTemplateError(
            f"template for {atom.predicate} has arity {entry.arity}, atom has {atom.arity}"
        )
    if entry.arity == 1:
        subject = _term_text(atom.args[0])
        if entry.kind == "vp":
            return f"{subject} {entry.phrase}"
        return f"{subject} is {entry.phrase}"
    a, b = (_term_text(t) for t in atom.args)
    return f"{a} {entry.phrase} {b}"


def _head_phrase(head: Atom, templates: TemplateSet) -> str:
    entry = templates.for_predicate(head.predicate)
    if entry.kind == "vp":
        return entry.phrase
    return f"is {entry.phrase}"


def _rule_sentence(rule: Rule, templates: TemplateSet) -> str:
    body = rule.body
    head = rule.head
    if (
        len(body) == 1
        and body[0].arity == 1
        and head.arity == 1
        and body[0].args == head.args
        and is_variable(body[0].args[0])
    ):
        entry = templates.for_predicate(body[0].predicate)
        tail = _head_phrase(head, templates)
        if entry.kind == "adj":
            return f"Every {entry.phrase} person {tail}."
        if entry.kind == "desc":
            return f"Everyone who is {entry.phrase} {tail}."
        return f"Everyone who {entry.phrase} {tail}."
    conditions = " and ".join(_atom_clause(a, templates) for a in body)
    return f"If {conditions} then {_atom_clause(head, templates)}."


def render_statement(
    stmt: Statement, templates: TemplateSet, negated: bool = False
) -> str:
    """One deterministic English sentence ending with a period."""
    if isinstance(stmt, Rule):
        if negated:
            raise ValueError("only ground atoms can be rendered negated")
        return _rule_sentence(stmt, templates)
    if not stmt.is_ground():
        raise ValueError(f"cannot render non-ground atom {stmt.render()} standalone")
    sentence = f"{_atom_clause(stmt, templates)}."
    if negated:
        return templates.negation.format(sentence=sentence.removesuffix("."))
    return sentence


@dataclass(frozen=True)
class Sample:
    """A rendered record: one line of the JSONL corpus."""

    id: str
    obs1: str
    obs2: str
    hyp: str
    label: int
    provenance: str

    def __post_init__(self):
        if self.label not in (0, 1):
            raise ValueError(f"label must be 0 or 1, got {self.label!r}")
        if not (self.id and self.obs1 and self.obs2 and self.hyp):
            raise ValueError("id and text fields must be nonempty")

    @property
    def char_lengths(self) -> dict[str, int]:
        return {"obs1": len(self.obs1), "obs2": len(self.obs2), "hyp": len(self.hyp)}

    def to_json_line(self) -> str:
        return json.dumps(
            {
                "id": self.id,
                "obs1": self.obs1,
                "obs2": self.obs2,
                "hyp": self.hyp,
                "label": self.label,
                "provenance": self.provenance,
            },
            ensure_ascii=False,
        )


def render_triple(triple: AbductiveTriple, templates: TemplateSet) -> Sample:
    """Render o1 -> obs1, h -> hyp, o2 -> obs2 as period-joined sentences."""
    return Sample(
        id=triple.id,
        obs1=" ".join(render_statement(s, templates) for s in triple.o1),
        obs2=render_statement(triple.o2, templates, negated=triple.o2_negated),
        hyp=" ".join(render_statement(s, templates) for s in triple.h),
        label=1 if triple.label == VALID else 0,
        provenance=triple.provenance,
    )
