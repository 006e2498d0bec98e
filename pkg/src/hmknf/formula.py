"""Propositional (and ground modal) formula trees.

The same node types serve three purposes: ontology formulas read from input
files (compiled to clauses), the completion and loop formulas built by
:mod:`hmknf.characterize`, and the ground MKNF formula evaluated by the direct
semantic checker (which additionally uses :class:`Know` and :class:`NotKnow`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import AbstractSet, Iterable

# A signed atom inside a clause: (atom, positive?)
SignedAtom = tuple[str, bool]
Clause = frozenset[SignedAtom]


class Formula:
    __slots__ = ()

    def atoms(self) -> frozenset[str]:
        raise NotImplementedError

    def holds(self, true_atoms: AbstractSet[str]) -> bool:
        """Evaluate under the closed-world interpretation given by ``true_atoms``."""
        raise NotImplementedError

    def __and__(self, other: Formula) -> Formula:
        return conj([self, other])

    def __or__(self, other: Formula) -> Formula:
        return disj([self, other])

    def __invert__(self) -> Formula:
        return Not(self)


@dataclass(frozen=True)
class Top(Formula):
    def atoms(self):
        return frozenset()

    def holds(self, true_atoms):
        return True

    def __str__(self):
        return "true"


@dataclass(frozen=True)
class Bottom(Formula):
    def atoms(self):
        return frozenset()

    def holds(self, true_atoms):
        return False

    def __str__(self):
        return "false"


TOP = Top()
BOTTOM = Bottom()


@dataclass(frozen=True)
class Var(Formula):
    name: str

    def atoms(self):
        return frozenset([self.name])

    def holds(self, true_atoms):
        return self.name in true_atoms

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Not(Formula):
    arg: Formula

    def atoms(self):
        return self.arg.atoms()

    def holds(self, true_atoms):
        return not self.arg.holds(true_atoms)

    def __str__(self):
        return f"~{_wrap(self.arg)}"


@dataclass(frozen=True)
class And(Formula):
    args: tuple[Formula, ...]

    def atoms(self):
        return frozenset().union(*(a.atoms() for a in self.args))

    def holds(self, true_atoms):
        return all(a.holds(true_atoms) for a in self.args)

    def __str__(self):
        return " & ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True)
class Or(Formula):
    args: tuple[Formula, ...]

    def atoms(self):
        return frozenset().union(*(a.atoms() for a in self.args))

    def holds(self, true_atoms):
        return any(a.holds(true_atoms) for a in self.args)

    def __str__(self):
        return " | ".join(_wrap(a) for a in self.args)


@dataclass(frozen=True)
class Implies(Formula):
    lhs: Formula
    rhs: Formula

    def atoms(self):
        return self.lhs.atoms() | self.rhs.atoms()

    def holds(self, true_atoms):
        return (not self.lhs.holds(true_atoms)) or self.rhs.holds(true_atoms)

    def __str__(self):
        return f"{_wrap(self.lhs)} -> {_wrap(self.rhs)}"


@dataclass(frozen=True)
class Iff(Formula):
    lhs: Formula
    rhs: Formula

    def atoms(self):
        return self.lhs.atoms() | self.rhs.atoms()

    def holds(self, true_atoms):
        return self.lhs.holds(true_atoms) == self.rhs.holds(true_atoms)

    def __str__(self):
        return f"{_wrap(self.lhs)} <-> {_wrap(self.rhs)}"


@dataclass(frozen=True)
class Know(Formula):
    """Modal ``K phi``; only meaningful for the MKNF evaluator."""

    arg: Formula

    def atoms(self):
        return self.arg.atoms()

    def holds(self, true_atoms):
        raise TypeError("modal formula has no propositional truth value")

    def __str__(self):
        return f"K {_wrap(self.arg)}"


@dataclass(frozen=True)
class NotKnow(Formula):
    """Modal ``not phi`` (negation as failure)."""

    arg: Formula

    def atoms(self):
        return self.arg.atoms()

    def holds(self, true_atoms):
        raise TypeError("modal formula has no propositional truth value")

    def __str__(self):
        return f"not {_wrap(self.arg)}"


def _wrap(f: Formula) -> str:
    if isinstance(f, (Var, Top, Bottom, Not, Know, NotKnow)):
        return str(f)
    return f"({f})"


def conj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return TOP
    if len(parts) == 1:
        return parts[0]
    return And(parts)


def disj(parts: Iterable[Formula]) -> Formula:
    parts = tuple(parts)
    if not parts:
        return BOTTOM
    if len(parts) == 1:
        return parts[0]
    return Or(parts)


def clause_formula(clause: Clause) -> Formula:
    lits = sorted(clause)
    return disj(Var(a) if pos else Not(Var(a)) for a, pos in lits)


# ---------------------------------------------------------------------------
# CNF by distribution

class ClauseLimitExceeded(ValueError):
    pass


def _nnf(f: Formula, positive: bool = True) -> Formula:
    if isinstance(f, Var):
        return f if positive else Not(f)
    if isinstance(f, Top):
        return TOP if positive else BOTTOM
    if isinstance(f, Bottom):
        return BOTTOM if positive else TOP
    if isinstance(f, Not):
        return _nnf(f.arg, not positive)
    if isinstance(f, And):
        parts = [_nnf(a, positive) for a in f.args]
        return And(tuple(parts)) if positive else Or(tuple(parts))
    if isinstance(f, Or):
        parts = [_nnf(a, positive) for a in f.args]
        return Or(tuple(parts)) if positive else And(tuple(parts))
    if isinstance(f, Implies):
        return _nnf(Or((Not(f.lhs), f.rhs)), positive)
    if isinstance(f, Iff):
        both = And((Implies(f.lhs, f.rhs), Implies(f.rhs, f.lhs)))
        return _nnf(both, positive)
    raise TypeError(f"cannot convert {type(f).__name__} to clauses")


def _cnf(f: Formula, limit: int) -> list[frozenset[SignedAtom]] | None:
    """Clause list of an NNF formula; None encodes the constant false clause set."""
    if isinstance(f, Var):
        return [frozenset([(f.name, True)])]
    if isinstance(f, Not):
        assert isinstance(f.arg, Var)
        return [frozenset([(f.arg.name, False)])]
    if isinstance(f, Top):
        return []
    if isinstance(f, Bottom):
        return [frozenset()]
    if isinstance(f, And):
        out: list[frozenset[SignedAtom]] = []
        for a in f.args:
            out.extend(_cnf(a, limit))
            if len(out) > limit:
                raise ClauseLimitExceeded(len(out))
        return out
    if isinstance(f, Or):
        acc: list[frozenset[SignedAtom]] = [frozenset()]
        for a in f.args:
            sub = _cnf(a, limit)
            if len(acc) * len(sub) > limit:
                raise ClauseLimitExceeded(len(acc) * len(sub))
            acc = [c | d for c, d in itertools.product(acc, sub)]
        return acc
    raise TypeError(type(f).__name__)


def is_tautology(clause: Iterable[SignedAtom]) -> bool:
    seen: dict[str, bool] = {}
    for atom, pos in clause:
        if seen.get(atom, pos) != pos:
            return True
        seen[atom] = pos
    return False


def to_clauses(f: Formula, limit: int = 4096) -> tuple[list[Clause], int]:
    """Clausal form of ``f`` by syntactic distribution (no auxiliary atoms).

    Returns the non-tautological clauses and the number of tautologies dropped.
    An empty clause in the result means ``f`` is unsatisfiable on its own.
    """
    raw = _cnf(_nnf(f), limit)
    kept: list[Clause] = []
    dropped = 0
    for c in raw:
        if is_tautology(c):
            dropped += 1
        elif c not in kept:
            kept.append(c)
    return kept, dropped
