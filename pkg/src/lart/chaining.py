"""Forward chaining to fixpoint with proof recording and depth measurement.

Evaluation is semi-naive: each round only fires rule instances that use at
least one atom derived in the previous round, so the fixpoint is reached
without rescanning settled facts.  Rounds are processed in deterministic
rule/substitution order and only the first derivation of an atom is stored,
which makes recorded depths deterministic.  An atom's depth equals the number
of rule applications on its derivation path: facts are depth 0, and a derived
atom is one deeper than its deepest premise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Mapping, Optional

from .logic import Atom, Rule, Theory, atom_key

__all__ = [
    "ProofStep",
    "ProofDag",
    "FixpointLimitError",
    "DEFAULT_MAX_ATOMS",
    "saturate",
    "entails",
    "chain_depth",
]

# Guards against pathological generator configs, not a tuning knob.
DEFAULT_MAX_ATOMS = 100_000


class FixpointLimitError(RuntimeError):
    """Fixpoint grew past the configured atom cap."""


@dataclass(frozen=True)
class ProofStep:
    derived: Atom
    rule_id: str
    premises: tuple[Atom, ...]
    depth: int


@dataclass(frozen=True)
class ProofDag:
    """First-derivation record per atom plus the full fixpoint."""

    steps: Mapping[Atom, ProofStep]
    fixpoint: frozenset[Atom]

    @property
    def facts(self) -> frozenset[Atom]:
        return self.fixpoint - self.steps.keys()

    def depth(self, atom: Atom) -> Optional[int]:
        if atom in self.steps:
            return self.steps[atom].depth
        if atom in self.fixpoint:
            return 0
        return None

    def iter_steps(self) -> Iterator[ProofStep]:
        return iter(self.steps.values())


def _seminaive_substitutions(
    rule: Rule, known_by_pred: dict[str, list[Atom]], delta: set[Atom]
) -> list[dict[str, str]]:
    """Substitutions grounding the whole body in `known` with >=1 premise in `delta`."""
    from .logic import _match_atom  # shared matching primitive, not the join

    found: set[tuple[tuple[str, str], ...]] = set()

    def extend(i: int, anchor: int, subst: dict[str, str]) -> None:
        if i == len(rule.body):
            found.add(tuple(sorted(subst.items())))
            return
        pattern = rule.body[i]
        pool = (
            [f for f in known_by_pred.get(pattern.predicate, ()) if f in delta]
            if i == anchor
            else known_by_pred.get(pattern.predicate, ())
        )
        for fact in pool:
            nxt = _match_atom(pattern, fact, subst)
            if nxt is not None:
                extend(i + 1, anchor, nxt)

    # Anchoring each body position on the delta in turn covers every instance
    # that uses at least one new atom; the set dedupes overlaps.
    for anchor in range(len(rule.body)):
        extend(0, anchor, {})

    var_order = sorted(rule.variables_in_body())
    ordered = [dict(items) for items in found]
    ordered.sort(key=lambda s: tuple(s[v] for v in var_order))
    return ordered


def saturate(theory: Theory, max_atoms: int = DEFAULT_MAX_ATOMS) -> ProofDag:
    """Compute the theory's minimal model and record one proof per derived atom.

    Idempotent: saturating a theory whose facts already form its fixpoint
    derives nothing new.  Raises FixpointLimitError past ``max_atoms``.
    """
    if len(theory.facts) > max_atoms:
        raise FixpointLimitError(
            f"fact set already exceeds the {max_atoms}-atom cap"
        )
    known: set[Atom] = set(theory.facts)
    known_by_pred: dict[str, list[Atom]] = {}
    for f in sorted(theory.facts, key=atom_key):
        known_by_pred.setdefault(f.predicate, []).append(f)
    depth: dict[Atom, int] = {f: 0 for f in theory.facts}
    steps: dict[Atom, ProofStep] = {}

    delta = set(theory.facts)
    while delta:
        round_steps: dict[Atom, ProofStep] = {}
        for rule in theory.rules:
            for subst in _seminaive_substitutions(rule, known_by_pred, delta):
                head = rule.head.substitute(subst)
                if head in known or head in round_steps:
                    continue
                premises = tuple(a.substitute(subst) for a in rule.body)
                round_steps[head] = ProofStep(
                    derived=head,
                    rule_id=rule.id,
                    premises=premises,
                    depth=max(depth[p] for p in premises) + 1,
                )
        for atom, step in round_steps.items():
            known.add(atom)
            known_by_pred.setdefault(atom.predicate, []).append(atom)
            depth[atom] = step.depth
            steps[atom] = step
        if len(known) > max_atoms:
            raise FixpointLimitError(
                f"fixpoint exceeded {max_atoms} atoms; check the generator config"
            )
        delta = set(round_steps)

    return ProofDag(steps=steps, fixpoint=frozenset(known))


def entails(theory: Theory, atom: Atom, max_atoms: int = DEFAULT_MAX_ATOMS) -> bool:
    """True iff the ground atom is in the theory's minimal model."""
    theory.validate_atom(atom)
    if not atom.is_ground():
        raise ValueError(f"entailment query must be ground: {atom.render()}")
    return atom in saturate(theory, max_atoms=max_atoms).fixpoint


def chain_depth(dag: ProofDag, atom: Atom) -> Optional[int]:
    """0 for facts, derivation depth for derived atoms, None outside the fixpoint."""
    return dag.depth(atom)
