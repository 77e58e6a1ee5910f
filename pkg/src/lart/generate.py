"""Random theory generation with a guaranteed target-depth derivation.

Generation is rejection sampling: draw a random theory, saturate it, keep it
only if some atom's chain depth lands in the configured window.  Each theory
draws from its own pseudo-random stream derived from (seed, index), so
generation is reproducible and parallelizes deterministically.
"""

from __future__ import annotations

import hashlib
import random
from dataclasses import dataclass, fields
from importlib import resources
from typing import Optional

from .chaining import ProofDag, saturate
from .logic import Atom, Rule, Theory

__all__ = [
    "GenConfig",
    "GenerationExhaustedError",
    "generate_theory",
    "load_gen_config",
    "derive_seed",
    "word_list",
]

_VAR_NAMES = ("X", "Y", "Z", "U", "V", "W")


class GenerationExhaustedError(RuntimeError):
    """Rejection sampling hit max_attempts without reaching the target depth."""


@dataclass(frozen=True)
class GenConfig:
    seed: int = 0
    n_constants: int = 5
    n_predicates_unary: int = 6
    n_predicates_binary: int = 1
    n_facts: int = 4
    n_rules: int = 7
    max_body_atoms: int = 2
    target_depth_min: int = 2
    target_depth_max: int = 4
    max_attempts: int = 50

    def __post_init__(self):
        if self.target_depth_min < 2:
            raise ValueError("target_depth_min must be >= 2")
        if self.target_depth_max < self.target_depth_min:
            raise ValueError("target_depth_max must be >= target_depth_min")
        for name in ("n_constants", "n_facts", "max_body_atoms", "max_attempts"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.n_predicates_unary < 0 or self.n_predicates_binary < 0:
            raise ValueError("predicate counts cannot be negative")
        if self.n_predicates_unary + self.n_predicates_binary < 1:
            raise ValueError("at least one predicate is required")
        if self.n_rules < 0:
            raise ValueError("n_rules cannot be negative")


def load_gen_config(path) -> GenConfig:
    """Read a flat key=value file; unknown keys are an error, all keys optional."""
    known = {f.name for f in fields(GenConfig)}
    values: dict[str, int] = {}
    with open(path, "r", encoding="utf-8") as handle:
        for lineno, raw in enumerate(handle, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key=value, got {raw.strip()!r}")
            key, _, value = line.partition("=")
            key = key.strip()
            if key not in known:
                raise ValueError(f"{path}:{lineno}: unknown key {key!r}")
            try:
                values[key] = int(value.strip())
            except ValueError:
                raise ValueError(
                    f"{path}:{lineno}: value for {key} must be an integer"
                ) from None
    return GenConfig(**values)


def derive_seed(seed: int, *tokens) -> int:
    """Stable 64-bit stream seed for (seed, tokens...); independent of PYTHONHASHSEED."""
    payload = ":".join([str(seed), *map(str, tokens)])
    return int.from_bytes(
        hashlib.sha256(payload.encode("utf-8")).digest()[:8], "big"
    )


def word_list(kind: str) -> tuple[str, ...]:
    """One of the shipped vocabularies: names, adjectives, or verbs."""
    text = resources.files("lart.words").joinpath(f"{kind}.txt").read_text("utf-8")
    return tuple(w for w in text.splitlines() if w.strip())


def _sample_vocabulary(config: GenConfig, rng: random.Random):
    names = word_list("names")
    adjectives = word_list("adjectives")
    verbs = word_list("verbs")
    if config.n_constants > len(names):
        raise ValueError(f"n_constants exceeds the {len(names)}-name vocabulary")
    if config.n_predicates_unary > len(adjectives):
        raise ValueError(
            f"n_predicates_unary exceeds the {len(adjectives)}-adjective vocabulary"
        )
    if config.n_predicates_binary > len(verbs):
        raise ValueError(
            f"n_predicates_binary exceeds the {len(verbs)}-verb vocabulary"
        )
    constants = rng.sample(names, config.n_constants)
    unary = rng.sample(adjectives, config.n_predicates_unary)
    binary = rng.sample(verbs, config.n_predicates_binary)
    return constants, unary, binary


def _random_atom(rng, predicates, arities, pool) -> Atom:
    pred = rng.choice(predicates)
    return Atom(pred, tuple(rng.choice(pool) for _ in range(arities[pred])))


def _random_rule(rng, rule_id, predicates, arities, max_body_atoms) -> Rule:
    body_len = 1
    if max_body_atoms > 1 and rng.random() >= 0.7:
        body_len = rng.randint(2, max_body_atoms)
    body: list[Atom] = []
    used_vars: list[str] = []

    def pick_var() -> str:
        # Reuse an existing variable most of the time so body atoms chain.
        if used_vars and (rng.random() < 0.7 or len(used_vars) == len(_VAR_NAMES)):
            return rng.choice(used_vars)
        var = _VAR_NAMES[len(used_vars)]
        used_vars.append(var)
        return var

    for _ in range(body_len):
        for _attempt in range(20):
            pred = rng.choice(predicates)
            atom = Atom(pred, tuple(pick_var() for _ in range(arities[pred])))
            if atom not in body:
                body.append(atom)
                break
        else:
            break

    body_preds = {a.predicate for a in body}
    head_pool = [p for p in predicates if p not in body_preds]
    # Heads usually introduce a new predicate; that is what grows chains.
    if not head_pool or rng.random() >= 0.8:
        head_pool = list(predicates)
    head_pred = rng.choice(head_pool)
    head_args = tuple(rng.choice(used_vars) for _ in range(arities[head_pred]))
    return Rule(rule_id, tuple(body), Atom(head_pred, head_args))


def _candidate_theory(config: GenConfig, rng: random.Random) -> Theory:
    constants_pool, unary, binary = _sample_vocabulary(config, rng)
    predicates = sorted(unary + binary)
    arities = {p: 1 for p in unary} | {p: 2 for p in binary}

    facts: set[Atom] = set()
    for _ in range(50 * config.n_facts):
        if len(facts) >= config.n_facts:
            break
        facts.add(_random_atom(rng, predicates, arities, constants_pool))

    rules: list[Rule] = []
    rendered: set[str] = set()
    for _ in range(50 * config.n_rules if config.n_rules else 0):
        if len(rules) >= config.n_rules:
            break
        rule = _random_rule(
            rng, f"r{len(rules) + 1}", predicates, arities, config.max_body_atoms
        )
        if rule.render() not in rendered:
            rendered.add(rule.render())
            rules.append(rule)

    occurring: set[str] = set()
    for f in facts:
        occurring |= f.constants()
    for r in rules:
        occurring |= r.constants()
    return Theory(
        predicates=dict(sorted(arities.items())),
        constants=frozenset(occurring),
        rules=tuple(rules),
        facts=frozenset(facts),
    )


def generate_theory(
    config: GenConfig, index: int = 0
) -> tuple[Theory, ProofDag]:
    """Generate a consistent theory holding >= 1 atom at the target depth.

    Identical (config, index) always yields the identical theory.  Raises
    GenerationExhaustedError after max_attempts rejected candidates.
    """
    rng = random.Random(derive_seed(config.seed, "theory", index))
    for _attempt in range(config.max_attempts):
        theory = _candidate_theory(config, rng)
        dag = saturate(theory)
        in_window = any(
            config.target_depth_min <= step.depth <= config.target_depth_max
            for step in dag.iter_steps()
        )
        if in_window:
            return theory, dag
    raise GenerationExhaustedError(
        f"no theory with a depth {config.target_depth_min}..{config.target_depth_max} "
        f"derivation in {config.max_attempts} attempts (seed={config.seed}, index={index})"
    )
