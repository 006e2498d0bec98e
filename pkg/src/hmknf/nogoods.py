"""Solver variables, literals, assignments and the nogood families.

Three kinds of variables exist.  An :class:`AtomVar` per vocabulary atom (and
one for ``_bot``); a :class:`ConjVar` per distinct literal set standing for a
rule body ``β(r)`` or a rule-support set ``β_P(r, p)``; an :class:`OntVar`
``β_O(p)`` per ontology atom (and ``_bot``) recording ontology support.
ConjVars are interned by content, so two rules with the same body share one
variable.
"""

from __future__ import annotations

import functools
import itertools
from dataclasses import dataclass, field
from typing import AbstractSet, Iterable, Iterator, Sequence, Union

from .depgraph import GraphMode, Loop, kb_graph, loops
from .errors import ContractError, GateExceeded
from .kb import BOT, Atom, KnowledgeBase, Rule, iter_subsets
from .ontology import EntailmentOracle, default_oracle

FULL_ENUM_GATE = 10
NOGOOD_GATE = 500_000


@dataclass(frozen=True)
class AtomVar:
    atom: Atom


@dataclass(frozen=True)
class OntVar:
    atom: Atom


@dataclass(frozen=True)
class ConjVar:
    lits: frozenset[Literal]


SolverVariable = Union[AtomVar, ConjVar, OntVar]


@dataclass(frozen=True)
class Literal:
    sign: bool
    var: SolverVariable

    def complement(self) -> Literal:
        return Literal(not self.sign, self.var)

    def __invert__(self) -> Literal:
        return self.complement()


def T(var: SolverVariable) -> Literal:
    return Literal(True, var)


def F(var: SolverVariable) -> Literal:
    return Literal(False, var)


Nogood = frozenset  # frozenset[Literal]


def make_nogood(lits: Iterable[Literal]) -> Nogood | None:
    """A nogood over ``lits``, or None when it mentions both polarities of a variable."""
    ng = frozenset(lits)
    seen: dict[SolverVariable, bool] = {}
    for lit in ng:
        if seen.setdefault(lit.var, lit.sign) != lit.sign:
            return None
    return ng


BOT_VAR = AtomVar(BOT)
BOT_ONT = OntVar(BOT)


class Encoding:
    """The variables of a KB and the static nogood families over them."""

    def __init__(self, kb: KnowledgeBase):
        self.kb = kb
        self._labels: dict[SolverVariable, str] = {}
        self._beta: dict[int, ConjVar] = {}
        self._beta_p: dict[tuple[int, Atom], ConjVar] = {}
        conj_order: list[ConjVar] = []
        for r in kb.rules:
            b = ConjVar(frozenset([T(AtomVar(p)) for p in r.body_pos] + [F(AtomVar(n)) for n in r.body_neg]))
            self._beta[r.id] = b
            if b not in self._labels:
                self._labels[b] = f"b(r{r.id})"
                conj_order.append(b)
        for r in kb.rules:
            for p in sorted(r.head):
                bp = ConjVar(frozenset([T(self._beta[r.id])] + [F(AtomVar(q)) for q in r.head - {p}]))
                self._beta_p[(r.id, p)] = bp
                if bp not in self._labels:
                    self._labels[bp] = f"bp(r{r.id},{p})"
                    conj_order.append(bp)
        self.atom_vars: tuple[AtomVar, ...] = tuple(AtomVar(a) for a in sorted(kb.vocab)) + (BOT_VAR,)
        self.conj_vars: tuple[ConjVar, ...] = tuple(conj_order)
        self.ont_vars: tuple[OntVar, ...] = tuple(OntVar(a) for a in sorted(kb.ka_o)) + (BOT_ONT,)
        for v in self.atom_vars:
            self._labels[v] = v.atom
        for v in self.ont_vars:
            self._labels[v] = f"bo({v.atom})"
        self.variables: tuple[SolverVariable, ...] = self.atom_vars + self.conj_vars + self.ont_vars
        self._rank = {v: i for i, v in enumerate(self.variables)}

    # -- variables and formatting -----------------------------------------

    def beta(self, rule: Rule) -> ConjVar:
        return self._beta[rule.id]

    def beta_p(self, rule: Rule, atom: Atom) -> ConjVar:
        return self._beta_p[(rule.id, atom)]

    def rank(self, var: SolverVariable) -> int:
        return self._rank[var]

    def label(self, var: SolverVariable) -> str:
        return self._labels[var]

    def literal_key(self, lit: Literal) -> tuple[int, bool]:
        return (self._rank[lit.var], not lit.sign)

    def sort_literals(self, lits: Iterable[Literal]) -> list[Literal]:
        return sorted(lits, key=self.literal_key)

    def format_literal(self, lit: Literal) -> str:
        return ("T " if lit.sign else "F ") + self._labels[lit.var]

    def format_nogood(self, ng: Iterable[Literal]) -> str:
        return "{" + ", ".join(self.format_literal(l) for l in self.sort_literals(ng)) + "}"

    def nogood_key(self, ng: Iterable[Literal]) -> tuple:
        return tuple(self.literal_key(l) for l in self.sort_literals(ng))

    # -- static families ----------------------------------------------------

    def rule_nogoods(self) -> list[Nogood]:
        out = []
        for r in self.kb.rules:
            ng = make_nogood([F(AtomVar(h)) for h in r.head] + [T(self.beta(r))])
            if ng is not None:
                out.append(ng)
        return _dedup(out)

    def saturation_nogoods(self) -> list[Nogood]:
        return [frozenset([F(AtomVar(v.atom)), T(v)]) for v in self.ont_vars]

    def support_nogood(self, atom: Atom) -> Nogood:
        lits = [T(AtomVar(atom))]
        lits += [F(self.beta_p(r, atom)) for r in self.kb.rules if atom in r.head]
        if atom in self.kb.ka_o:
            lits.append(F(OntVar(atom)))
        return frozenset(lits)

    def support_nogoods(self) -> list[Nogood]:
        return [self.support_nogood(a) for a in sorted(self.kb.vocab)]

    def conjunction_nogoods(self) -> list[Nogood]:
        out = []
        for b in self.conj_vars:
            ng = make_nogood([F(b)] + list(b.lits))
            if ng is not None:
                out.append(ng)
            out.extend(frozenset([T(b), ~s]) for s in self.sort_literals(b.lits))
        return _dedup(out)

    def bottom_nogood(self) -> Nogood:
        return frozenset([T(BOT_VAR)])

    def static_nogoods(self) -> list[Nogood]:
        """Rule, saturation, support and conjunction nogoods plus ``{T _bot}``."""
        return _dedup(self.rule_nogoods() + self.saturation_nogoods() + self.support_nogoods()
                      + self.conjunction_nogoods() + [self.bottom_nogood()])


def _dedup(nogoods: Iterable[Nogood]) -> list[Nogood]:
    seen: set[Nogood] = set()
    out = []
    for ng in nogoods:
        if ng not in seen:
            seen.add(ng)
            out.append(ng)
    return out


@functools.lru_cache(maxsize=32)
def encoding(kb: KnowledgeBase) -> Encoding:
    return Encoding(kb)


def rule_nogoods(kb: KnowledgeBase) -> list[Nogood]:
    return encoding(kb).rule_nogoods()


def saturation_nogoods(kb: KnowledgeBase) -> list[Nogood]:
    return encoding(kb).saturation_nogoods()


def support_nogoods(kb: KnowledgeBase) -> list[Nogood]:
    return encoding(kb).support_nogoods()


def conjunction_nogoods(kb: KnowledgeBase) -> list[Nogood]:
    return encoding(kb).conjunction_nogoods()


# ---------------------------------------------------------------------------
# entailment nogoods


def pos_entailment_nogood(kb: KnowledgeBase, p: Atom, s: Iterable[Atom],
                          oracle: EntailmentOracle | None = None) -> Nogood:
    """``{F β_O(p)} ∪ {T s | s ∈ S}``; requires ``S∖{p}`` to entail ``p``."""
    oracle = oracle or default_oracle(kb)
    s = frozenset(s)
    if p != BOT and p not in kb.ka_o:
        raise ContractError(f"{p} is not an ontology atom")
    if not s <= kb.ka_o:
        raise ContractError(f"assumptions {sorted(s - kb.ka_o)} are not ontology atoms")
    if not oracle.entails(s - {p}, p):
        raise ContractError(f"positive entailment nogood for {p} under {sorted(s)} would be unsound")
    return frozenset([F(OntVar(p))] + [T(AtomVar(a)) for a in s])


def neg_entailment_nogood(kb: KnowledgeBase, p: Atom, s: Iterable[Atom],
                          oracle: EntailmentOracle | None = None) -> Nogood:
    """``{T β_O(p)} ∪ {F s | s ∈ S}``; requires ``ka_o∖(S∪{p})`` not to entail ``p``."""
    oracle = oracle or default_oracle(kb)
    s = frozenset(s)
    if p not in kb.ka_o:
        raise ContractError(f"{p} is not an ontology atom")
    if not s <= kb.ka_o:
        raise ContractError(f"assumptions {sorted(s - kb.ka_o)} are not ontology atoms")
    if oracle.entails(kb.ka_o - s - {p}, p):
        raise ContractError(f"negative entailment nogood for {p} under {sorted(s)} would be unsound")
    return frozenset([T(OntVar(p))] + [F(AtomVar(a)) for a in s])


def entailment_nogoods_full(kb: KnowledgeBase, oracle: EntailmentOracle | None = None,
                            gate: int = FULL_ENUM_GATE) -> list[Nogood]:
    """Every positive and negative entailment nogood, by enumerating subsets of ka_o."""
    if len(kb.ka_o) > gate:
        raise GateExceeded("full-enumeration", gate, len(kb.ka_o))
    oracle = oracle or default_oracle(kb)
    out = []
    for s in iter_subsets(kb.ka_o):
        for p in sorted(kb.ka_o) + [BOT]:
            if oracle.entails(s - {p}, p):
                out.append(frozenset([F(OntVar(p))] + [T(AtomVar(a)) for a in s]))
        for p in sorted(kb.ka_o):
            if not oracle.entails(kb.ka_o - s - {p}, p):
                out.append(frozenset([T(OntVar(p))] + [F(AtomVar(a)) for a in s]))
    return [ng for ng in out if make_nogood(ng) is not None]


# ---------------------------------------------------------------------------
# loop nogoods


def external_supports(kb: KnowledgeBase, loop: AbstractSet[Atom]) -> list[Rule]:
    """Rules that can support ``loop`` from outside: head meets it, positive body avoids it."""
    return [r for r in kb.rules if r.head & loop and not r.body_pos & loop]


def rho(kb: KnowledgeBase, rule: Rule, loop: AbstractSet[Atom]) -> frozenset[Literal]:
    """Literals under which ``rule`` gives no external support to ``loop``."""
    enc = encoding(kb)
    return frozenset([F(enc.beta(rule))] + [T(AtomVar(h)) for h in rule.head - loop])


def check_loop_nogood_conditions(kb: KnowledgeBase, loop: AbstractSet[Atom], s: AbstractSet[Atom],
                                 oracle: EntailmentOracle | None = None) -> None:
    oracle = oracle or default_oracle(kb)
    if not loop:
        raise ContractError("empty loop")
    if not loop <= kb.vocab:
        raise ContractError(f"loop atoms {sorted(loop - kb.vocab)} outside the vocabulary")
    if not s <= kb.ka_o:
        raise ContractError(f"assumptions {sorted(s - kb.ka_o)} are not ontology atoms")
    if loop & s:
        raise ContractError("loop and assumption set overlap")
    if oracle.entails(kb.ka_o - s - loop, loop):
        raise ContractError(f"loop {sorted(loop)} is supported by the ontology without {sorted(s)}")


def loop_nogood(kb: KnowledgeBase, p: Atom, loop: AbstractSet[Atom], s: AbstractSet[Atom],
                choice: Sequence[Literal]) -> Nogood | None:
    """The member of the loop nogoods for ``p`` with one ρ literal per external rule."""
    return make_nogood([T(AtomVar(p)), *choice] + [F(AtomVar(a)) for a in s])


def loop_nogoods(kb: KnowledgeBase, loop: Iterable[Atom], s: Iterable[Atom],
                 oracle: EntailmentOracle | None = None) -> list[Nogood]:
    loop = frozenset(loop)
    s = frozenset(s)
    check_loop_nogood_conditions(kb, loop, s, oracle)
    return list(_iter_loop_nogoods(kb, loop, s))


def _iter_loop_nogoods(kb: KnowledgeBase, loop: Loop, s: frozenset[Atom]) -> Iterator[Nogood]:
    enc = encoding(kb)
    choices = [enc.sort_literals(rho(kb, r, loop)) for r in external_supports(kb, loop)]
    seen: set[Nogood] = set()
    for p in sorted(loop):
        for combo in itertools.product(*choices):
            ng = loop_nogood(kb, p, loop, s, combo)
            if ng is not None and ng not in seen:
                seen.add(ng)
                yield ng


def loop_nogoods_full(kb: KnowledgeBase, mode: GraphMode = "overapprox", *,
                      oracle: EntailmentOracle | None = None, gate: int = FULL_ENUM_GATE,
                      max_nogoods: int = NOGOOD_GATE) -> list[Nogood]:
    if len(kb.ka_o) > gate:
        raise GateExceeded("full-enumeration", gate, len(kb.ka_o))
    oracle = oracle or default_oracle(kb)
    out: list[Nogood] = []
    for loop in loops(kb_graph(kb, mode, oracle=oracle)):
        for s in iter_subsets(kb.ka_o - loop):
            if oracle.entails(kb.ka_o - s - loop, loop):
                continue
            for ng in _iter_loop_nogoods(kb, loop, s):
                out.append(ng)
                if len(out) > max_nogoods:
                    raise GateExceeded("max-nogoods", max_nogoods, len(out))
    return out


# ---------------------------------------------------------------------------
# assignments


@dataclass(frozen=True)
class TrailEntry:
    literal: Literal
    level: int
    reason: Nogood | None = None


@dataclass
class Assignment:
    """A consistent sequence of literals with decision levels."""

    trail: list[TrailEntry] = field(default_factory=list)
    _value: dict[SolverVariable, bool] = field(default_factory=dict, repr=False)

    def assign(self, lit: Literal, level: int = 0, reason: Nogood | None = None) -> None:
        current = self._value.get(lit.var)
        if current is not None:
            if current != lit.sign:
                raise ContractError(f"{lit.var} already assigned the other way")
            return
        if self.trail and level < self.trail[-1].level:
            raise ContractError("decision levels must not decrease along the trail")
        self._value[lit.var] = lit.sign
        self.trail.append(TrailEntry(lit, level, reason))

    def value(self, var: SolverVariable) -> bool | None:
        return self._value.get(var)

    def holds(self, lit: Literal) -> bool:
        return self._value.get(lit.var) == lit.sign

    def contains(self, nogood: Iterable[Literal]) -> bool:
        return all(self.holds(l) for l in nogood)

    def literals(self) -> frozenset[Literal]:
        return frozenset(e.literal for e in self.trail)

    def true_atoms(self) -> frozenset[Atom]:
        return frozenset(v.atom for v, s in self._value.items() if s and isinstance(v, AtomVar) and v.atom != BOT)

    def is_total(self, variables: Iterable[SolverVariable]) -> bool:
        return all(v in self._value for v in variables)

    def __len__(self) -> int:
        return len(self.trail)


def induced_assignment(kb: KnowledgeBase, interp: Iterable[Atom],
                       oracle: EntailmentOracle | None = None) -> Assignment:
    """The total assignment over every variable determined by a K-interpretation."""
    oracle = oracle or default_oracle(kb)
    enc = encoding(kb)
    interp = frozenset(interp)
    s = interp & kb.ka_o
    a = Assignment()
    for v in enc.atom_vars:
        a.assign(Literal(v.atom in interp, v))
    for r in kb.rules:
        body = r.body_holds(interp)
        a.assign(Literal(body, enc.beta(r)))
        for p in sorted(r.head):
            a.assign(Literal(body and r.head & (interp | {p}) == {p}, enc.beta_p(r, p)))
    for v in enc.ont_vars:
        a.assign(Literal(oracle.entails(s - {v.atom}, v.atom), v))
    return a


def completion_nogoods_full(kb: KnowledgeBase, oracle: EntailmentOracle | None = None,
                            gate: int = FULL_ENUM_GATE) -> list[Nogood]:
    """All completion nogoods (static families plus every entailment nogood), plus ``{T _bot}``."""
    return _dedup(encoding(kb).static_nogoods() + entailment_nogoods_full(kb, oracle, gate))


def is_solution(assignment: Assignment, nogoods: Iterable[Nogood]) -> bool:
    return not any(assignment.contains(ng) for ng in nogoods)


def enumerate_solutions_full(kb: KnowledgeBase, mode: GraphMode = "overapprox", *,
                             with_loops: bool = True, oracle: EntailmentOracle | None = None,
                             gate: int = FULL_ENUM_GATE) -> set[frozenset[Atom]]:
    """K-interpretations whose induced assignment violates none of the materialized nogoods."""
    oracle = oracle or default_oracle(kb)
    nogoods = completion_nogoods_full(kb, oracle, gate)
    if with_loops:
        nogoods += loop_nogoods_full(kb, mode, oracle=oracle, gate=gate)
    return {
        interp
        for interp in iter_subsets(kb.vocab)
        if is_solution(induced_assignment(kb, interp, oracle), nogoods)
    }
