"""A small answer-set-style constraint language: facts plus headless
integrity constraints with negation-as-failure and variables.

Only hard constraints are supported. Candidate generation happens
combinatorially elsewhere; this module just decides admissibility.
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple


class RuleError(ValueError):
    pass


class ParseError(RuleError):
    def __init__(self, message: str, source: str, line: int, column: int,
                 expected: Sequence[str] = ()) -> None:
        self.source = source
        self.line = line
        self.column = column
        self.expected = tuple(expected)
        detail = "%s:%d:%d: %s" % (source, line, column, message)
        if expected:
            detail += " (expected %s)" % ", ".join(expected)
        super().__init__(detail)


class EvaluationError(RuleError):
    pass


@dataclass(frozen=True)
class Term:
    kind: str  # "sym" | "str" | "int" | "var"
    value: object

    def is_var(self) -> bool:
        return self.kind == "var"

    def render(self) -> str:
        if self.kind == "str":
            return '"%s"' % str(self.value).replace("\\", "\\\\").replace('"', '\\"')
        return str(self.value)


def sym(name: str) -> Term:
    return Term("sym", name)


def var(name: str) -> Term:
    return Term("var", name)


def make_term(value: object) -> Term:
    """Ground term from a Python value: int stays int, str becomes a symbol
    when it scans as an identifier, otherwise a quoted string."""
    if isinstance(value, Term):
        return value
    if isinstance(value, bool):
        raise RuleError("boolean terms are not part of the language")
    if isinstance(value, int):
        return Term("int", value)
    s = str(value)
    if re.fullmatch(r"[a-z_][A-Za-z0-9_]*", s):
        return Term("sym", s)
    return Term("str", s)


@dataclass(frozen=True)
class Atom:
    predicate: str
    args: Tuple[Term, ...] = ()

    @property
    def arity(self) -> int:
        return len(self.args)

    def is_ground(self) -> bool:
        return all(not t.is_var() for t in self.args)

    def variables(self) -> Set[str]:
        return {t.value for t in self.args if t.is_var()}  # type: ignore[misc]

    def render(self) -> str:
        if not self.args:
            return self.predicate
        return "%s(%s)" % (self.predicate, ", ".join(t.render() for t in self.args))


def atom(predicate: str, *args: object) -> Atom:
    return Atom(predicate, tuple(make_term(a) for a in args))


@dataclass(frozen=True)
class Literal:
    atom: Atom
    negated: bool = False

    def render(self) -> str:
        return ("not " if self.negated else "") + self.atom.render()


@dataclass(frozen=True)
class IntegrityConstraint:
    body: Tuple[Literal, ...]
    # provenance only, irrelevant to rule identity
    origin: str = field(default="<unknown>", compare=False)

    def render(self) -> str:
        return ":- " + ", ".join(lit.render() for lit in self.body) + "."

    def variables(self) -> Set[str]:
        out: Set[str] = set()
        for lit in self.body:
            out |= lit.atom.variables()
        return out


@dataclass(frozen=True)
class RuleSet:
    facts: Tuple[Atom, ...] = ()
    constraints: Tuple[IntegrityConstraint, ...] = ()

    def merge(self, other: "RuleSet") -> "RuleSet":
        merged = RuleSet(self.facts + other.facts, self.constraints + other.constraints)
        _check_arities(merged)
        return merged


AtomSet = FrozenSet[Atom]


# ---------------------------------------------------------------------------
# Parsing

_TOKEN_RE = re.compile(
    r"""(?P<ws>\s+)
      | (?P<comment>%[^\n]*)
      | (?P<constraint>:-)
      | (?P<int>-?\d+\b)
      | (?P<var>[A-Z][A-Za-z0-9_]*)
      | (?P<ident>[a-z_][A-Za-z0-9_]*)
      | (?P<string>"(?:[^"\\\n]|\\.)*")
      | (?P<sym>[(),.{};])
    """,
    re.VERBOSE,
)

_CHOICE_MESSAGE = (
    "choice rules like `p {a; b} q` are not supported: "
    "only facts and `:-` integrity constraints are accepted"
)


@dataclass
class _Token:
    kind: str
    text: str
    line: int
    column: int


def _scan(text: str, source: str) -> List[_Token]:
    tokens: List[_Token] = []
    line = 1
    line_start = 0
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(
                "unexpected character %r" % text[pos], source, line, pos - line_start + 1
            )
        kind = m.lastgroup or ""
        raw = m.group()
        if kind not in ("ws", "comment"):
            tokens.append(_Token(kind, raw, line, m.start() - line_start + 1))
        newlines = raw.count("\n")
        if newlines:
            line += newlines
            line_start = m.start() + raw.rfind("\n") + 1
        pos = m.end()
    tokens.append(_Token("eof", "", line, len(text) - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str, source: str) -> None:
        self.source = source
        self.tokens = _scan(text, source)
        self.pos = 0
        self.arities: Dict[str, int] = {}

    def peek(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def error(self, message: str, tok: Optional[_Token] = None,
              expected: Sequence[str] = ()) -> ParseError:
        tok = tok or self.peek()
        return ParseError(message, self.source, tok.line, tok.column, expected)

    def expect_symbol(self, symbol: str) -> _Token:
        tok = self.peek()
        if tok.kind in ("sym", "constraint") and tok.text == symbol:
            return self.advance()
        raise self.error("found %r" % (tok.text or "end of input"), tok, expected=[symbol])

    def parse_term(self) -> Term:
        tok = self.peek()
        if tok.kind == "ident":
            self.advance()
            return Term("sym", tok.text)
        if tok.kind == "var":
            self.advance()
            return Term("var", tok.text)
        if tok.kind == "int":
            self.advance()
            return Term("int", int(tok.text))
        if tok.kind == "string":
            self.advance()
            body = tok.text[1:-1]
            body = body.replace('\\"', '"').replace("\\\\", "\\")
            return Term("str", body)
        raise self.error(
            "found %r" % (tok.text or "end of input"), tok,
            expected=["identifier", "variable", "integer", "string"],
        )

    def parse_atom(self) -> Atom:
        tok = self.peek()
        if tok.kind != "ident":
            raise self.error(
                "found %r" % (tok.text or "end of input"), tok, expected=["predicate"]
            )
        self.advance()
        predicate = tok.text
        nxt = self.peek()
        if nxt.kind == "sym" and nxt.text == "{":
            raise self.error(_CHOICE_MESSAGE, nxt)
        if not (nxt.kind == "sym" and nxt.text == "("):
            self._note_arity(predicate, 0, tok)
            return Atom(predicate, ())
        self.advance()
        args = [self.parse_term()]
        while True:
            end = self.peek()
            if end.kind == "sym" and end.text == ",":
                self.advance()
                args.append(self.parse_term())
            elif end.kind == "sym" and end.text == ")":
                self.advance()
                self._note_arity(predicate, len(args), tok)
                return Atom(predicate, tuple(args))
            else:
                raise self.error(
                    "found %r" % (end.text or "end of input"), end, expected=[",", ")"]
                )

    def _note_arity(self, predicate: str, arity: int, tok: _Token) -> None:
        seen = self.arities.setdefault(predicate, arity)
        if seen != arity:
            raise self.error(
                "predicate %s used with arity %d and arity %d" % (predicate, seen, arity),
                tok,
            )

    def parse_literal(self) -> Literal:
        tok = self.peek()
        if tok.kind == "ident" and tok.text == "not":
            nxt = self.tokens[self.pos + 1]
            if nxt.kind == "ident":
                self.advance()
                return Literal(self.parse_atom(), negated=True)
        return Literal(self.parse_atom(), negated=False)

    def parse_constraint(self, origin: str) -> IntegrityConstraint:
        self.expect_symbol(":-")
        body = [self.parse_literal()]
        while True:
            tok = self.peek()
            if tok.kind == "sym" and tok.text == ",":
                self.advance()
                body.append(self.parse_literal())
            elif tok.kind == "sym" and tok.text == ".":
                self.advance()
                break
            else:
                raise self.error(
                    "found %r" % (tok.text or "end of input"), tok, expected=[",", "."]
                )
        constraint = IntegrityConstraint(tuple(body), origin)
        positive: Set[str] = set()
        negated: Dict[str, Literal] = {}
        for lit in body:
            if lit.negated:
                for v in lit.atom.variables():
                    negated.setdefault(v, lit)
            else:
                positive |= lit.atom.variables()
        for name in sorted(negated):
            if name not in positive:
                raise ParseError(
                    "unsafe variable %s: it appears only under negation" % name,
                    self.source,
                    self.tokens[self.pos - 1].line,
                    1,
                )
        return constraint

    def parse_program(self) -> RuleSet:
        facts: List[Atom] = []
        constraints: List[IntegrityConstraint] = []
        while True:
            tok = self.peek()
            if tok.kind == "eof":
                break
            if tok.kind == "sym" and tok.text == "{":
                raise self.error(_CHOICE_MESSAGE, tok)
            origin = "%s:%d" % (self.source, tok.line)
            if tok.kind == "constraint":
                constraints.append(self.parse_constraint(origin))
                continue
            a = self.parse_atom()
            nxt = self.peek()
            if nxt.kind == "sym" and nxt.text == "{":
                raise self.error(_CHOICE_MESSAGE, nxt)
            self.expect_symbol(".")
            if not a.is_ground():
                raise ParseError(
                    "fact %s must be ground (no variables)" % a.render(),
                    self.source, tok.line, tok.column,
                )
            facts.append(a)
        ruleset = RuleSet(tuple(facts), tuple(constraints))
        _check_arities(ruleset)
        return ruleset


def parse_rules(text: str, source: str = "<string>") -> RuleSet:
    return _Parser(text, source).parse_program()


def format_ruleset(rules: RuleSet) -> str:
    lines = [f.render() + "." for f in rules.facts]
    lines += [c.render() for c in rules.constraints]
    return "\n".join(lines) + ("\n" if lines else "")


def _iter_atoms(rules: RuleSet) -> Iterable[Atom]:
    yield from rules.facts
    for c in rules.constraints:
        for lit in c.body:
            yield lit.atom


def _check_arities(rules: RuleSet, extra: Iterable[Atom] = ()) -> Dict[str, int]:
    arities: Dict[str, int] = {}
    for a in list(_iter_atoms(rules)) + list(extra):
        seen = arities.setdefault(a.predicate, a.arity)
        if seen != a.arity:
            raise EvaluationError(
                "predicate %s used with arities %d and %d" % (a.predicate, seen, a.arity)
            )
    return arities


# ---------------------------------------------------------------------------
# Evaluation

def _match(pattern: Atom, ground: Atom, binding: Dict[str, Term]) -> Optional[Dict[str, Term]]:
    if pattern.predicate != ground.predicate or pattern.arity != ground.arity:
        return None
    out = binding
    for p, g in zip(pattern.args, ground.args):
        if p.is_var():
            bound = out.get(p.value)  # type: ignore[arg-type]
            if bound is None:
                if out is binding:
                    out = dict(binding)
                out[p.value] = g  # type: ignore[index]
            elif bound != g:
                return None
        elif p != g:
            return None
    return out


def _substitute(a: Atom, binding: Dict[str, Term]) -> Atom:
    if a.is_ground():
        return a
    return Atom(a.predicate, tuple(binding.get(t.value, t) if t.is_var() else t for t in a.args))


def violates(atoms: AtomSet, constraint: IntegrityConstraint) -> bool:
    """True iff some substitution satisfies every body literal against atoms."""
    universe = atoms if isinstance(atoms, (set, frozenset)) else frozenset(atoms)
    index: Dict[Tuple[str, int], List[Atom]] = {}
    for a in universe:
        index.setdefault((a.predicate, a.arity), []).append(a)

    positives = [lit.atom for lit in constraint.body if not lit.negated]
    negatives = [lit.atom for lit in constraint.body if lit.negated]

    def negatives_hold(binding: Dict[str, Term]) -> bool:
        return all(_substitute(n, binding) not in universe for n in negatives)

    def search(i: int, binding: Dict[str, Term]) -> bool:
        if i == len(positives):
            return negatives_hold(binding)
        pattern = _substitute(positives[i], binding)
        if pattern.is_ground():
            return pattern in universe and search(i + 1, binding)
        for candidate in index.get((pattern.predicate, pattern.arity), ()):
            extended = _match(pattern, candidate, binding)
            if extended is not None and search(i + 1, extended):
                return True
        return False

    return search(0, {})


def check(atoms: Iterable[Atom], rules: RuleSet) -> List[IntegrityConstraint]:
    """All violated constraints; empty list means admissible."""
    atom_list = list(atoms)
    for a in atom_list:
        if not a.is_ground():
            raise EvaluationError("atom set must be ground, got %s" % a.render())
    _check_arities(rules, extra=atom_list)
    universe = frozenset(atom_list) | frozenset(rules.facts)
    return [c for c in rules.constraints if violates(universe, c)]


# ---------------------------------------------------------------------------
# Shipped rule base loading

RULES_DIR_ENV = "TASKVIS_RULES_DIR"


def default_rules_dir() -> Path:
    override = os.environ.get(RULES_DIR_ENV)
    if override:
        return Path(override)
    return Path(str(resources.files("taskvis.resources").joinpath("rules")))


def load_rules(task: Optional[str] = None, rules_dir: Optional[Path] = None) -> RuleSet:
    """Base rules plus the per-task file when a task is given."""
    root = Path(rules_dir) if rules_dir is not None else default_rules_dir()
    ruleset = RuleSet()
    base = root / "base.rules"
    if base.exists():
        ruleset = ruleset.merge(parse_rules(base.read_text("utf-8"), str(base)))
    if task is not None:
        per_task = root / "tasks" / ("%s.rules" % task)
        if per_task.exists():
            ruleset = ruleset.merge(parse_rules(per_task.read_text("utf-8"), str(per_task)))
    return ruleset
