"""Ground hybrid MKNF knowledge bases: domain types, text parser, serializer.

File format::

    % comment
    goodCand(p) :- cand(p), not highRisk(p).
    a ; d.
    #ontology
    highBP(p) -> cand(p).
    #end

Rule heads are disjunctions separated by ``;``.  The optional ontology block
holds propositional formulas over ``~ & | -> <->`` which are compiled to
clauses by distribution.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Iterator

from .errors import ParseError
from .formula import (
    Clause,
    ClauseLimitExceeded,
    Formula,
    Iff,
    Implies,
    Not,
    Var,
    conj,
    disj,
    to_clauses,
)

log = logging.getLogger(__name__)

Atom = str
KInterpretation = frozenset  # frozenset[Atom], always a subset of kb.vocab

BOT: Atom = "_bot"
CLAUSE_LIMIT = 4096


def normalize_atom(text: str) -> Atom:
    return re.sub(r"\s+", "", text)


@dataclass(frozen=True)
class Rule:
    head: frozenset[Atom]
    body_pos: frozenset[Atom] = frozenset()
    body_neg: frozenset[Atom] = frozenset()
    id: int = 0

    def __post_init__(self):
        if not self.head:
            raise ValueError("rule head must be non-empty")

    @property
    def atoms(self) -> frozenset[Atom]:
        return self.head | self.body_pos | self.body_neg

    def body_holds(self, interp: AbstractSet[Atom]) -> bool:
        return self.body_pos <= interp and not (self.body_neg & interp)

    def __str__(self) -> str:
        text = " ; ".join(sorted(self.head))
        body = sorted(self.body_pos) + [f"not {n}" for n in sorted(self.body_neg)]
        if body:
            text += " :- " + ", ".join(body)
        return text + "."


@dataclass(frozen=True)
class Ontology:
    clauses: frozenset[Clause] = frozenset()

    def __post_init__(self):
        for c in self.clauses:
            if not c:
                raise ValueError("ontology clauses must be non-empty")
            atoms = [a for a, _ in c]
            if len(set(atoms)) != len(atoms):
                raise ValueError(f"tautological clause {sorted(c)}")

    @property
    def atoms(self) -> frozenset[Atom]:
        return frozenset(a for c in self.clauses for a, _ in c)

    def sorted_clauses(self) -> list[Clause]:
        return sorted(self.clauses, key=lambda c: sorted(c))


@dataclass(frozen=True)
class KnowledgeBase:
    rules: tuple[Rule, ...] = ()
    ontology: Ontology = field(default_factory=Ontology)
    vocab: frozenset[Atom] = field(init=False)
    ka: frozenset[Atom] = field(init=False)
    ka_o: frozenset[Atom] = field(init=False)

    def __post_init__(self):
        ka = frozenset().union(*(r.atoms for r in self.rules))
        onto = self.ontology.atoms
        if BOT in ka or BOT in onto:
            raise ValueError(f"reserved atom {BOT} may not occur in a knowledge base")
        object.__setattr__(self, "ka", ka)
        object.__setattr__(self, "ka_o", onto)
        object.__setattr__(self, "vocab", ka | onto)

    @classmethod
    def from_parts(cls, rules: Iterable[Rule], clauses: Iterable[Iterable[tuple[Atom, bool]]] = ()) -> KnowledgeBase:
        """Build a KB, renumbering rules 1..n in the given order."""
        numbered = tuple(
            Rule(r.head, r.body_pos, r.body_neg, i) for i, r in enumerate(rules, start=1)
        )
        return cls(numbered, Ontology(frozenset(frozenset(c) for c in clauses)))

    def atoms_sorted(self) -> list[Atom]:
        return sorted(self.vocab)

    def rules_with_head(self, atom: Atom) -> list[Rule]:
        return [r for r in self.rules if atom in r.head]


def k_atoms(kb: KnowledgeBase) -> frozenset[Atom]:
    """Atoms occurring in the rule base (heads or bodies)."""
    return kb.ka


def dl_atoms(kb: KnowledgeBase) -> frozenset[Atom]:
    """Vocabulary atoms occurring in at least one ontology clause."""
    return kb.ka_o


# ---------------------------------------------------------------------------
# parsing

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>%[^\n]*)
  | (?P<directive>\#[A-Za-z]+)
  | (?P<iff><->)
  | (?P<implies>->)
  | (?P<if>:-)
  | (?P<ident>[A-Za-z0-9_][A-Za-z0-9_']*)
  | (?P<punct>[().,;~&|])
    """,
    re.VERBOSE,
)


@dataclass
class _Tok:
    kind: str
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks: list[_Tok] = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        kind = m.lastgroup
        value = m.group()
        if kind not in ("ws", "comment"):
            if kind == "punct":
                kind = value
            toks.append(_Tok(kind, value, line, pos - line_start + 1))
        for i, ch in enumerate(value):
            if ch == "\n":
                line += 1
                line_start = pos + i + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None) -> ParseError:
        tok = tok or self.tok
        return ParseError(msg, tok.line, tok.col)

    def expect(self, kind: str) -> _Tok:
        tok = self.tok
        if tok.kind != kind:
            found = tok.text or "end of input"
            raise self.error(f"expected {kind!r}, found {found!r}")
        self.i += 1
        return tok

    def accept(self, kind: str) -> bool:
        if self.tok.kind == kind:
            self.i += 1
            return True
        return False

    def atom(self) -> Atom:
        start = self.tok
        if start.kind != "ident" or start.text == "not":
            raise self.error(f"expected atom, found {start.text or 'end of input'!r}")
        self.i += 1
        name = start.text
        if self.accept("("):
            args = [self.expect("ident").text]
            while self.accept(","):
                args.append(self.expect("ident").text)
            self.expect(")")
            name += "(" + ",".join(args) + ")"
        if name == BOT:
            raise self.error(f"reserved atom {BOT!r} may not appear in input", start)
        return name

    def rule(self, rule_id: int) -> Rule:
        head = [self.atom()]
        while self.accept(";"):
            head.append(self.atom())
        pos: list[Atom] = []
        neg: list[Atom] = []
        if self.accept("if"):
            while True:
                if self.tok.kind == "ident" and self.tok.text == "not":
                    self.i += 1
                    neg.append(self.atom())
                else:
                    pos.append(self.atom())
                if not self.accept(","):
                    break
        self.expect(".")
        return Rule(frozenset(head), frozenset(pos), frozenset(neg), rule_id)

    # formula := iff ; iff := imp ('<->' imp)* ; imp := or ('->' imp)?
    def formula(self) -> Formula:
        f = self.implication()
        while self.accept("iff"):
            f = Iff(f, self.implication())
        return f

    def implication(self) -> Formula:
        lhs = self.disjunction()
        if self.accept("implies"):
            return Implies(lhs, self.implication())
        return lhs

    def disjunction(self) -> Formula:
        parts = [self.conjunction()]
        while self.accept("|"):
            parts.append(self.conjunction())
        return disj(parts)

    def conjunction(self) -> Formula:
        parts = [self.unary()]
        while self.accept("&"):
            parts.append(self.unary())
        return conj(parts)

    def unary(self) -> Formula:
        if self.accept("~"):
            return Not(self.unary())
        if self.accept("("):
            f = self.formula()
            self.expect(")")
            return f
        return Var(self.atom())

    def program(self) -> KnowledgeBase:
        rules: list[Rule] = []
        clauses: list[Clause] = []
        while self.tok.kind == "ident":
            rules.append(self.rule(len(rules) + 1))
        if self.tok.kind == "directive":
            if self.tok.text != "#ontology":
                raise self.error(f"unknown directive {self.tok.text!r}")
            self.i += 1
            while self.tok.kind != "directive":
                start = self.tok
                f = self.formula()
                self.expect(".")
                try:
                    produced, dropped = to_clauses(f, CLAUSE_LIMIT)
                except ClauseLimitExceeded:
                    raise self.error(
                        f"formula expands to more than {CLAUSE_LIMIT} clauses", start
                    ) from None
                if dropped:
                    log.warning("line %d: dropped %d tautological clause(s)", start.line, dropped)
                clauses.extend(c for c in produced if c not in clauses)
            if self.tok.text != "#end":
                raise self.error(f"expected '#end', found {self.tok.text!r}")
            self.i += 1
        if self.tok.kind != "eof":
            raise self.error(f"unexpected {self.tok.text!r}")
        return KnowledgeBase(tuple(rules), Ontology(frozenset(clauses)))


def parse_kb(text: str) -> KnowledgeBase:
    """Parse knowledge-base text; raises :class:`ParseError` with line/column."""
    return _Parser(text).program()


def load_kb(path) -> KnowledgeBase:
    with open(path, encoding="utf-8") as fh:
        return parse_kb(fh.read())


def parse_atom_list(text: str) -> frozenset[Atom]:
    """Parse ``a, p(x,y), c`` (optionally wrapped in braces) into a set of atoms."""
    text = text.strip()
    if text.startswith("{") and text.endswith("}"):
        text = text[1:-1]
    p = _Parser(text)
    atoms: set[Atom] = set()
    if p.tok.kind == "eof":
        return frozenset()
    atoms.add(p.atom())
    while p.accept(","):
        atoms.add(p.atom())
    if p.tok.kind != "eof":
        raise p.error(f"unexpected {p.tok.text!r}")
    return frozenset(atoms)


def serialize_kb(kb: KnowledgeBase) -> str:
    """Text form of ``kb`` that :func:`parse_kb` reads back to the same content."""
    lines = [str(r) for r in kb.rules]
    if kb.ontology.clauses:
        lines.append("#ontology")
        for c in kb.ontology.sorted_clauses():
            lits = [a if pos else f"~{a}" for a, pos in sorted(c)]
            lines.append(" | ".join(lits) + ".")
        lines.append("#end")
    return "\n".join(lines) + ("\n" if lines else "")


def format_atoms(atoms: Iterable[Atom]) -> str:
    return "{" + ", ".join(sorted(atoms)) + "}"


def iter_subsets(atoms: Iterable[Atom]) -> Iterator[frozenset[Atom]]:
    items = sorted(atoms)
    for mask in range(1 << len(items)):
        yield frozenset(a for i, a in enumerate(items) if mask >> i & 1)
