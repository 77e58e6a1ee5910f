"""Rule language: function-free definite clauses over a finite constant universe.

Grammar (UTF-8 text, ``#`` comments run to end of line)::

    program := (decl | fact | rule)*
    decl    := "pred" NAME "/" ("1"|"2") "."
    fact    := "fact" NAME "(" CONST ("," CONST)? ")" "."
    rule    := "rule" atom ("&" atom)* "=>" atom "."
    atom    := NAME "(" term ("," term)? ")"
    term    := CONST | VAR

Constants and predicate names start lowercase, variables start uppercase.
Predicates that never appear in a ``pred`` line are declared implicitly at
first use with the observed arity.  Constants are implicitly declared by use;
a theory's constant set is exactly the set of constants that occur in it.

All types here are immutable after construction and safe to share across
threads; every operation is a pure function.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Mapping, Sequence, Union

__all__ = [
    "Atom",
    "Rule",
    "Theory",
    "Statement",
    "Substitution",
    "ParseError",
    "DslSyntaxError",
    "ArityMismatchError",
    "RangeRestrictionError",
    "UndeclaredSymbolError",
    "is_variable",
    "atom_key",
    "statement_key",
    "parse_theory",
    "render_theory",
    "parse_statement",
    "render_statement_expr",
    "ground_match",
]

Substitution = Mapping[str, str]


def is_variable(term: str) -> bool:
    return term[:1].isupper()


class ParseError(ValueError):
    """Rule-DSL error carrying a 1-based source position."""

    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{line}:{col}: {message}")
        self.line = line
        self.col = col


class DslSyntaxError(ParseError):
    pass


class ArityMismatchError(ParseError):
    pass


class RangeRestrictionError(ParseError):
    pass


class UndeclaredSymbolError(ValueError):
    """An atom refers to a predicate or constant unknown to the theory."""


@dataclass(frozen=True)
class Atom:
    """A predicate applied to one or two terms, e.g. ``smart(john)``."""

    predicate: str
    args: tuple[str, ...]

    def __post_init__(self):
        if len(self.args) not in (1, 2):
            raise ValueError(f"atom arity must be 1 or 2, got {len(self.args)}")

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return not any(is_variable(t) for t in self.args)

    def variables(self) -> set[str]:
        return {t for t in self.args if is_variable(t)}

    def constants(self) -> set[str]:
        return {t for t in self.args if not is_variable(t)}

    def substitute(self, subst: Substitution) -> "Atom":
        return Atom(self.predicate, tuple(subst.get(t, t) for t in self.args))

    def render(self) -> str:
        return f"{self.predicate}({','.join(self.args)})"


def atom_key(atom: Atom) -> tuple:
    return (atom.predicate, atom.args)


@dataclass(frozen=True)
class Rule:
    """Definite clause: conjunctive body of atoms implying a single head atom.

    Range restriction (every head variable occurs in the body) guarantees
    that a fully matched body grounds the head.
    """

    id: str
    body: tuple[Atom, ...]
    head: Atom

    def __post_init__(self):
        if not self.body:
            raise ValueError(f"rule {self.id}: body must be nonempty")
        missing = self.head.variables() - self.variables_in_body()
        if missing:
            raise ValueError(
                f"rule {self.id}: head variable(s) {sorted(missing)} not in body"
            )

    def variables_in_body(self) -> set[str]:
        out: set[str] = set()
        for a in self.body:
            out |= a.variables()
        return out

    def constants(self) -> set[str]:
        out: set[str] = set()
        for a in (*self.body, self.head):
            out |= a.constants()
        return out

    def atoms(self) -> tuple[Atom, ...]:
        return (*self.body, self.head)

    def render(self) -> str:
        body = " & ".join(a.render() for a in self.body)
        return f"{body} => {self.head.render()}"


Statement = Union[Atom, Rule]


def statement_key(stmt: Statement) -> tuple:
    # Atoms sort before rules; both orders are content-derived.
    if isinstance(stmt, Atom):
        return (0, stmt.predicate, stmt.args)
    return (1, stmt.id, stmt.render())


@dataclass(frozen=True)
class Theory:
    """Declared predicate table, constants in use, rules, and ground facts.

    As a definite-clause program a theory always has a unique minimal model,
    so every theory is satisfiable by construction.
    """

    predicates: Mapping[str, int]
    constants: frozenset[str]
    rules: tuple[Rule, ...]
    facts: frozenset[Atom]

    def __post_init__(self):
        ids = [r.id for r in self.rules]
        if len(ids) != len(set(ids)):
            raise ValueError("rule ids must be unique")
        occurring: set[str] = set()
        for f in self.facts:
            if not f.is_ground():
                raise ValueError(f"fact {f.render()} is not ground")
            self._check_declared(f)
            occurring |= f.constants()
        for r in self.rules:
            for a in r.atoms():
                self._check_declared(a)
            occurring |= r.constants()
        if occurring != set(self.constants):
            raise ValueError(
                "constant set must equal the constants occurring in facts/rules"
            )

    def _check_declared(self, atom: Atom) -> None:
        declared = self.predicates.get(atom.predicate)
        if declared is None:
            raise ValueError(f"predicate {atom.predicate} not declared")
        if declared != atom.arity:
            raise ValueError(
                f"predicate {atom.predicate} declared with arity {declared},"
                f" used with {atom.arity}"
            )

    @classmethod
    def from_statements(cls, statements: Iterable[Statement]) -> "Theory":
        """Build a theory from a bag of facts and rules, deriving the tables."""
        facts: set[Atom] = set()
        rules: list[Rule] = []
        preds: dict[str, int] = {}
        consts: set[str] = set()
        for stmt in statements:
            atoms: tuple[Atom, ...]
            if isinstance(stmt, Atom):
                if not stmt.is_ground():
                    raise ValueError(f"fact {stmt.render()} is not ground")
                facts.add(stmt)
                atoms = (stmt,)
            else:
                rules.append(stmt)
                atoms = stmt.atoms()
            for a in atoms:
                known = preds.setdefault(a.predicate, a.arity)
                if known != a.arity:
                    raise ValueError(
                        f"predicate {a.predicate} used with arities {known} and {a.arity}"
                    )
                consts |= a.constants()
        return cls(
            predicates=dict(sorted(preds.items())),
            constants=frozenset(consts),
            rules=tuple(rules),
            facts=frozenset(facts),
        )

    def validate_atom(self, atom: Atom) -> None:
        """Raise UndeclaredSymbolError unless the ground atom fits this theory."""
        declared = self.predicates.get(atom.predicate)
        if declared is None:
            raise UndeclaredSymbolError(f"undeclared predicate: {atom.predicate}")
        if declared != atom.arity:
            raise UndeclaredSymbolError(
                f"predicate {atom.predicate} has arity {declared}, got {atom.arity}"
            )
        unknown = atom.constants() - set(self.constants)
        if unknown:
            raise UndeclaredSymbolError(f"unknown constant(s): {sorted(unknown)}")

    def render(self) -> str:
        return render_theory(self)


# ---------------------------------------------------------------------------
# Tokenizer
# ---------------------------------------------------------------------------

_PUNCT = ("=>", "(", ")", ",", ".", "/", "&")


@dataclass(frozen=True)
class _Token:
    kind: str  # NAME | VAR | NUM | PUNCT | EOF
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i, n = 0, len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if text.startswith("=>", i):
            tokens.append(_Token("PUNCT", "=>", line, col))
            i += 2
            col += 2
            continue
        if ch in "().,/&":
            tokens.append(_Token("PUNCT", ch, line, col))
            i += 1
            col += 1
            continue
        if ch.isalpha():
            j = i
            while j < n and (text[j].isalnum() or text[j] == "_"):
                j += 1
            word = text[i:j]
            kind = "VAR" if word[0].isupper() else "NAME"
            tokens.append(_Token(kind, word, line, col))
            col += j - i
            i = j
            continue
        if ch.isdigit():
            j = i
            while j < n and text[j].isdigit():
                j += 1
            tokens.append(_Token("NUM", text[i:j], line, col))
            col += j - i
            i = j
            continue
        raise DslSyntaxError(f"unexpected character {ch!r}", line, col)
    tokens.append(_Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0
        self.predicates: dict[str, int] = {}
        self.facts: set[Atom] = set()
        self.rules: list[Rule] = []

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def next(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, kind: str, text: str | None = None) -> _Token:
        tok = self.next()
        if tok.kind != kind or (text is not None and tok.text != text):
            want = text if text is not None else kind
            raise DslSyntaxError(
                f"expected {want!r}, got {tok.text or 'end of input'!r}",
                tok.line,
                tok.col,
            )
        return tok

    def declare(self, name: str, arity: int, tok: _Token) -> None:
        known = self.predicates.setdefault(name, arity)
        if known != arity:
            raise ArityMismatchError(
                f"predicate {name} has arity {known}, used with {arity}",
                tok.line,
                tok.col,
            )

    def parse_program(self) -> Theory:
        while True:
            tok = self.peek()
            if tok.kind == "EOF":
                break
            if tok.kind != "NAME" or tok.text not in ("pred", "fact", "rule"):
                raise DslSyntaxError(
                    f"expected 'pred', 'fact' or 'rule', got {tok.text!r}",
                    tok.line,
                    tok.col,
                )
            self.next()
            if tok.text == "pred":
                self.parse_decl()
            elif tok.text == "fact":
                self.parse_fact()
            else:
                self.parse_rule()
        constants: set[str] = set()
        for f in self.facts:
            constants |= f.constants()
        for r in self.rules:
            constants |= r.constants()
        return Theory(
            predicates=dict(sorted(self.predicates.items())),
            constants=frozenset(constants),
            rules=tuple(self.rules),
            facts=frozenset(self.facts),
        )

    def parse_decl(self) -> None:
        name = self.expect("NAME")
        self.expect("PUNCT", "/")
        num = self.next()
        if num.kind != "NUM" or num.text not in ("1", "2"):
            raise DslSyntaxError("arity must be 1 or 2", num.line, num.col)
        self.expect("PUNCT", ".")
        self.declare(name.text, int(num.text), name)

    def parse_atom(self) -> tuple[Atom, _Token]:
        name = self.expect("NAME")
        self.expect("PUNCT", "(")
        args = [self.parse_term()]
        if self.peek().text == ",":
            self.next()
            args.append(self.parse_term())
        self.expect("PUNCT", ")")
        self.declare(name.text, len(args), name)
        return Atom(name.text, tuple(args)), name

    def parse_term(self) -> str:
        tok = self.next()
        if tok.kind not in ("NAME", "VAR"):
            raise DslSyntaxError(f"expected a term, got {tok.text!r}", tok.line, tok.col)
        return tok.text

    def parse_fact(self) -> None:
        atom, tok = self.parse_atom()
        self.expect("PUNCT", ".")
        if not atom.is_ground():
            raise DslSyntaxError(
                f"fact {atom.render()} contains a variable", tok.line, tok.col
            )
        self.facts.add(atom)

    def parse_rule(self) -> None:
        body = []
        first_tok = self.peek()
        atom, _ = self.parse_atom()
        body.append(atom)
        while self.peek().text == "&":
            self.next()
            atom, _ = self.parse_atom()
            body.append(atom)
        self.expect("PUNCT", "=>")
        head, _ = self.parse_atom()
        self.expect("PUNCT", ".")
        body_vars: set[str] = set()
        for a in body:
            body_vars |= a.variables()
        loose = head.variables() - body_vars
        if loose:
            raise RangeRestrictionError(
                f"head variable(s) {sorted(loose)} do not appear in the body",
                first_tok.line,
                first_tok.col,
            )
        self.rules.append(Rule(f"r{len(self.rules) + 1}", tuple(body), head))


def parse_theory(text: str) -> Theory:
    """Parse rule-DSL source into a Theory.

    Raises DslSyntaxError / ArityMismatchError / RangeRestrictionError with
    1-based line and column on malformed input.
    """
    return _Parser(text).parse_program()


def render_theory(theory: Theory) -> str:
    """Canonical source text; ``parse_theory(render_theory(t)) == t``.

    Declarations and facts are emitted sorted, rules in order (their ids are
    positional), so equal theories render to identical bytes.
    """
    lines = [f"pred {name}/{arity}." for name, arity in sorted(theory.predicates.items())]
    lines += [f"fact {a.render()}." for a in sorted(theory.facts, key=atom_key)]
    lines += [f"rule {r.render()}." for r in theory.rules]
    return "\n".join(lines) + "\n"


def parse_statement(text: str, rule_id: str = "r1") -> Statement:
    """Parse a bare statement expression: ``p(a)`` or ``a(X) & b(X) => c(X)``."""
    src = text.strip()
    if "=>" in src:
        theory = _Parser(f"rule {src}.").parse_program()
        rule = theory.rules[0]
        return Rule(rule_id, rule.body, rule.head)
    theory = _Parser(f"fact {src}.").parse_program()
    return next(iter(theory.facts))


def render_statement_expr(stmt: Statement) -> str:
    """Inverse of parse_statement for ground atoms and rules."""
    return stmt.render()


# ---------------------------------------------------------------------------
# Matching
# ---------------------------------------------------------------------------


def _match_atom(pattern: Atom, fact: Atom, subst: dict[str, str]) -> dict[str, str] | None:
    if pattern.predicate != fact.predicate or pattern.arity != fact.arity:
        return None
    out = dict(subst)
    for p, f in zip(pattern.args, fact.args):
        if is_variable(p):
            bound = out.get(p)
            if bound is None:
                out[p] = f
            elif bound != f:
                return None
        elif p != f:
            return None
    return out


def ground_match(rule: Rule, facts: Iterable[Atom]) -> list[dict[str, str]]:
    """Every substitution under which all body atoms are in ``facts``.

    Returned in lexicographic order of the constants bound to the rule's
    variables (sorted by variable name), so output is deterministic.
    """
    by_pred: dict[str, list[Atom]] = {}
    for f in facts:
        by_pred.setdefault(f.predicate, []).append(f)
    for group in by_pred.values():
        group.sort(key=atom_key)

    results: list[dict[str, str]] = []

    def extend(i: int, subst: dict[str, str]) -> None:
        if i == len(rule.body):
            results.append(subst)
            return
        pattern = rule.body[i]
        for fact in by_pred.get(pattern.predicate, ()):
            nxt = _match_atom(pattern, fact, subst)
            if nxt is not None:
                extend(i + 1, nxt)

    extend(0, {})
    var_order = sorted(rule.variables_in_body())
    results.sort(key=lambda s: tuple(s[v] for v in var_order))
    return results
