"""Entailment oracle for the objective knowledge of a knowledge base.

Every question other modules ask about the ontology goes through the three
calls of :class:`EntailmentOracle`: ``entails``, ``consistent`` and
``entailment_closure``.  :class:`ClausalOracle` is the shipped backend: a small
DPLL refutation engine over the ontology clauses, which short-circuits to unit
propagation when the clause set is Horn.
"""

from __future__ import annotations

import functools
import threading
from dataclasses import dataclass
from typing import Iterable, Protocol

from .errors import ContractError
from .kb import BOT, Atom, KnowledgeBase

Target = Atom | Iterable[Atom] | None
"""An atom, a disjunction of atoms, or ``None``/``BOT``/empty for falsity."""

CACHE_SIZE = 1 << 16


@dataclass(frozen=True)
class OracleQueryResult:
    inconsistent: bool
    pos: frozenset[Atom] = frozenset()
    neg: frozenset[Atom] = frozenset()


@dataclass
class OracleStats:
    queries: int = 0
    cache_hits: int = 0
    sat_calls: int = 0

    def as_dict(self) -> dict[str, int]:
        return {"oracle_queries": self.queries, "oracle_cache_hits": self.cache_hits,
                "oracle_sat_calls": self.sat_calls}


class EntailmentOracle(Protocol):
    kb: KnowledgeBase
    stats: OracleStats

    def entails(self, assumptions: Iterable[Atom], target: Target) -> bool: ...

    def entails_not(self, assumptions: Iterable[Atom], atom: Atom) -> bool: ...

    def consistent(self, assumptions: Iterable[Atom]) -> bool: ...

    def entailment_closure(self, assumptions: Iterable[Atom]) -> OracleQueryResult: ...


def _target_atoms(target: Target) -> tuple[Atom, ...]:
    if target is None or target == BOT:
        return ()
    if isinstance(target, str):
        return (target,)
    atoms = tuple(target)
    return tuple(a for a in atoms if a != BOT)


class ClausalOracle:
    """Refutation-based oracle over the KB's propositional clauses.

    ``entails(S, t)`` holds iff ``clauses ∪ S ∪ {¬t}`` is unsatisfiable.
    Assumption sets must be subsets of ``kb.ka_o``; callers filter.
    """

    def __init__(self, kb: KnowledgeBase, cache_size: int = CACHE_SIZE):
        self.kb = kb
        self.stats = OracleStats()
        self._lock = threading.Lock()
        self._index: dict[Atom, int] = {a: i + 1 for i, a in enumerate(sorted(kb.ka_o))}
        self._clauses: tuple[tuple[int, ...], ...] = tuple(
            tuple(self._index[a] if pos else -self._index[a] for a, pos in sorted(c))
            for c in kb.ontology.sorted_clauses()
        )
        self.horn = all(sum(1 for lit in c if lit > 0) <= 1 for c in self._clauses)
        self._occurs: dict[int, list[int]] = {}
        for ci, c in enumerate(self._clauses):
            for lit in c:
                self._occurs.setdefault(-lit, []).append(ci)
        self._sat_cached = functools.lru_cache(maxsize=cache_size)(self._sat)

    # -- public interface ------------------------------------------------

    def entails(self, assumptions: Iterable[Atom], target: Target) -> bool:
        lits = self._assume(assumptions)
        for t in _target_atoms(target):
            v = self._index.get(t)
            if v is None:
                # atom unconstrained by the ontology: entailed only if assumed
                # (it never is, assumptions being ontology atoms) or if inconsistent
                continue
            lits.add(-v)
        return not self._query(frozenset(lits))

    def entails_not(self, assumptions: Iterable[Atom], atom: Atom) -> bool:
        lits = self._assume(assumptions)
        v = self._index.get(atom)
        if v is not None:
            lits.add(v)
        return not self._query(frozenset(lits))

    def consistent(self, assumptions: Iterable[Atom]) -> bool:
        return self._query(frozenset(self._assume(assumptions)))

    def entailment_closure(self, assumptions: Iterable[Atom]) -> OracleQueryResult:
        s = frozenset(assumptions)
        if not self.consistent(s):
            return OracleQueryResult(True, frozenset([BOT]), frozenset())
        pos = frozenset(p for p in self.kb.ka_o if p in s or self.entails(s, p))
        neg = frozenset(p for p in self.kb.ka_o if p not in pos and self.entails_not(s, p))
        return OracleQueryResult(False, pos, neg)

    # -- internals ---------------------------------------------------------

    def _assume(self, assumptions: Iterable[Atom]) -> set[int]:
        lits = set()
        for a in assumptions:
            v = self._index.get(a)
            if v is None:
                raise ContractError(f"assumption {a!r} is not an ontology atom")
            lits.add(v)
        return lits

    def _query(self, lits: frozenset[int]) -> bool:
        with self._lock:
            self.stats.queries += 1
            before = self._sat_cached.cache_info().hits
            result = self._sat_cached(lits)
            if self._sat_cached.cache_info().hits > before:
                self.stats.cache_hits += 1
        return result

    def _sat(self, units: frozenset[int]) -> bool:
        self.stats.sat_calls += 1
        assign: dict[int, bool] = {}
        for lit in units:
            if assign.get(abs(lit), lit > 0) != (lit > 0):
                return False
            assign[abs(lit)] = lit > 0
        if not self._unit_propagate(assign, range(len(self._clauses))):
            return False
        # unit propagation is complete for Horn clauses plus unit assumptions
        return self.horn or self._dpll(assign)

    def _unit_propagate(self, assign: dict[int, bool], pending: Iterable[int]) -> bool:
        pending = set(pending)
        while pending:
            woken: set[int] = set()
            for ci in sorted(pending):
                free = 0
                nfree = 0
                for lit in self._clauses[ci]:
                    val = assign.get(abs(lit))
                    if val is None:
                        nfree += 1
                        free = lit
                    elif val == (lit > 0):
                        break
                else:
                    if nfree == 0:
                        return False
                    if nfree == 1:
                        assign[abs(free)] = free > 0
                        woken.update(self._occurs.get(free, ()))
            pending = woken
        return True

    def _dpll(self, assign: dict[int, bool]) -> bool:
        branch = 0
        for clause in self._clauses:
            if any(assign.get(abs(lit)) == (lit > 0) for lit in clause):
                continue
            branch = next(lit for lit in clause if abs(lit) not in assign)
            break
        if not branch:
            return True
        for lit in (branch, -branch):
            trial = dict(assign)
            trial[abs(lit)] = lit > 0
            if self._unit_propagate(trial, self._occurs.get(lit, ())) and self._dpll(trial):
                return True
        return False


@functools.lru_cache(maxsize=32)
def default_oracle(kb: KnowledgeBase) -> ClausalOracle:
    return ClausalOracle(kb)


def entails(kb: KnowledgeBase, assumptions: Iterable[Atom], target: Target) -> bool:
    return default_oracle(kb).entails(assumptions, target)


def consistent(kb: KnowledgeBase, assumptions: Iterable[Atom]) -> bool:
    return default_oracle(kb).consistent(assumptions)


def entailment_closure(kb: KnowledgeBase, assumptions: Iterable[Atom]) -> OracleQueryResult:
    return default_oracle(kb).entailment_closure(assumptions)
