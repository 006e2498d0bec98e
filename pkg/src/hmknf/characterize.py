"""Formula-level characterization of model-induced K-interpretations.

Two independent oracles live here:

* the completion / loop-formula check (rule, saturation and support
  completion plus loop formulas), which is what the solver's model check
  delegates to and what the brute-force enumerator applies to every subset of
  the vocabulary;
* a direct evaluator of the MKNF satisfaction relation over finite Herbrand
  interpretations, usable only for very small vocabularies.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import AbstractSet, Iterable, Sequence

from .depgraph import GraphMode, Loop, kb_graph, loops
from .errors import GateExceeded
from .formula import (
    And,
    Bottom,
    Formula,
    Iff,
    Implies,
    Know,
    Not,
    NotKnow,
    Or,
    Top,
    Var,
    clause_formula,
    conj,
    disj,
)
from .kb import BOT, Atom, KnowledgeBase, Rule, format_atoms, iter_subsets
from .ontology import EntailmentOracle, default_oracle

FORMULA_ENUM_GATE = 20
DIRECT_GATE = 4


def body_formula(rule: Rule) -> Formula:
    return conj([Var(p) for p in sorted(rule.body_pos)] + [Not(Var(n)) for n in sorted(rule.body_neg)])


def rule_completion(kb: KnowledgeBase) -> list[tuple[Rule, Formula]]:
    return [(r, Implies(body_formula(r), disj(Var(h) for h in sorted(r.head)))) for r in kb.rules]


def saturation_completion(kb: KnowledgeBase, interp: AbstractSet[Atom],
                          oracle: EntailmentOracle | None = None) -> frozenset[Atom]:
    """Atoms of vocab ∪ {⊥} entailed by the ontology under ``interp``."""
    oracle = oracle or default_oracle(kb)
    s = frozenset(interp) & kb.ka_o
    if not oracle.consistent(s):
        return kb.vocab | {BOT}
    return frozenset(a for a in kb.vocab if a in s or oracle.entails(s, a))


def is_saturated(kb: KnowledgeBase, interp: AbstractSet[Atom],
                 oracle: EntailmentOracle | None = None) -> bool:
    """Consistent under the ontology and closed under its entailments."""
    oracle = oracle or default_oracle(kb)
    s = frozenset(interp) & kb.ka_o
    if not oracle.consistent(s):
        return False
    closure = oracle.entailment_closure(s)
    return closure.pos <= interp


def satisfies_saturation_completion(kb: KnowledgeBase, interp: AbstractSet[Atom],
                                    oracle: EntailmentOracle | None = None) -> bool:
    sat = saturation_completion(kb, interp, oracle)
    return BOT not in sat and sat <= interp


def nothing_outside_entailed(kb: KnowledgeBase, interp: AbstractSet[Atom],
                             oracle: EntailmentOracle | None = None) -> bool:
    """No atom of (vocab ∪ {⊥}) outside ``interp`` is entailed under it."""
    oracle = oracle or default_oracle(kb)
    s = frozenset(interp) & kb.ka_o
    return not any(oracle.entails(s, a) for a in sorted(kb.vocab - interp) + [BOT])


def support_completion(kb: KnowledgeBase, interp: AbstractSet[Atom],
                       oracle: EntailmentOracle | None = None) -> dict[Atom, Formula]:
    """One support formula per atom lacking ontology support under ``interp``."""
    oracle = oracle or default_oracle(kb)
    s = frozenset(interp) & kb.ka_o
    out: dict[Atom, Formula] = {}
    for a in sorted(kb.vocab):
        if oracle.entails(s - {a}, a):
            continue
        disjuncts = [
            conj([body_formula(r)] + [Not(Var(p)) for p in sorted(r.head - {a})])
            for r in kb.rules
            if a in r.head
        ]
        out[a] = Implies(Var(a), disj(disjuncts))
    return out


def loop_formulas(kb: KnowledgeBase, interp: AbstractSet[Atom], mode: GraphMode = "overapprox",
                  oracle: EntailmentOracle | None = None,
                  loop_list: Sequence[Loop] | None = None,
                  max_loops: int | None = None) -> dict[Loop, Formula]:
    """Loop formulas for every loop without ontology support under ``interp``."""
    oracle = oracle or default_oracle(kb)
    if loop_list is None:
        loop_list = all_loops(kb, mode, oracle=oracle, max_loops=max_loops)
    s = frozenset(interp) & kb.ka_o
    out: dict[Loop, Formula] = {}
    for loop in loop_list:
        if oracle.entails(s - loop, loop):
            continue
        disjuncts = [
            conj([body_formula(r)] + [Not(Var(a)) for a in sorted(r.head - loop)])
            for r in kb.rules
            if r.head & loop and not r.body_pos & loop
        ]
        out[loop] = Implies(disj(Var(a) for a in sorted(loop)), disj(disjuncts))
    return out


def all_loops(kb: KnowledgeBase, mode: GraphMode = "overapprox", *,
              oracle: EntailmentOracle | None = None, max_loops: int | None = None) -> list[Loop]:
    graph = kb_graph(kb, mode, oracle=oracle)
    return loops(graph) if max_loops is None else loops(graph, max_loops)


@dataclass(frozen=True)
class Violation:
    component: str  # rule-completion | saturation | support | loop
    formula: Formula | None
    atoms: frozenset[Atom] = frozenset()
    detail: str = ""

    def label(self) -> str:
        if self.component == "support":
            (a,) = self.atoms
            return f"support({a})"
        if self.component == "loop":
            return f"loop {format_atoms(self.atoms)}"
        return self.component

    def as_dict(self) -> dict:
        return {
            "component": self.component,
            "label": self.label(),
            "atoms": sorted(self.atoms),
            "formula": None if self.formula is None else str(self.formula),
            "detail": self.detail,
        }


def violations(kb: KnowledgeBase, interp: AbstractSet[Atom], mode: GraphMode = "overapprox", *,
               with_loops: bool = True, oracle: EntailmentOracle | None = None,
               loop_list: Sequence[Loop] | None = None, max_loops: int | None = None,
               first_only: bool = False) -> list[Violation]:
    """Every completion or loop-formula component that ``interp`` falsifies."""
    oracle = oracle or default_oracle(kb)
    interp = frozenset(interp)
    found: list[Violation] = []

    def done() -> bool:
        return first_only and bool(found)

    for r, f in rule_completion(kb):
        if not f.holds(interp):
            found.append(Violation("rule-completion", f, r.head, f"rule r{r.id} {r} is violated"))
            if done():
                return found

    sat = saturation_completion(kb, interp, oracle)
    if BOT in sat:
        found.append(Violation("saturation", Bottom(), frozenset(),
                               "the ontology is inconsistent with the interpretation"))
    else:
        for a in sorted(sat - interp):
            found.append(Violation("saturation", Var(a), frozenset([a]),
                                   f"{a} entailed but absent"))
    if done():
        return found

    for a, f in support_completion(kb, interp, oracle).items():
        if not f.holds(interp):
            found.append(Violation("support", f, frozenset([a]), f"{a} lacks rule and ontology support"))
            if done():
                return found

    if with_loops:
        for loop, f in loop_formulas(kb, interp, mode, oracle, loop_list, max_loops).items():
            if not f.holds(interp):
                found.append(Violation("loop", f, loop,
                                       f"loop {format_atoms(loop)} lacks external support"))
                if done():
                    return found
    return found


def first_violation(kb: KnowledgeBase, interp: AbstractSet[Atom], mode: GraphMode = "overapprox",
                    **kw) -> Violation | None:
    v = violations(kb, interp, mode, first_only=True, **kw)
    return v[0] if v else None


def satisfies_completion(kb: KnowledgeBase, interp: AbstractSet[Atom], **kw) -> bool:
    return first_violation(kb, interp, with_loops=False, **kw) is None


def is_model_induced(kb: KnowledgeBase, interp: AbstractSet[Atom],
                     mode: GraphMode = "overapprox", **kw) -> bool:
    """Completion and loop formulas both hold under ``interp``."""
    return first_violation(kb, interp, mode, **kw) is None


def enumerate_models_formulas(kb: KnowledgeBase, mode: GraphMode = "overapprox", *,
                              with_loops: bool = True, gate: int = FORMULA_ENUM_GATE,
                              oracle: EntailmentOracle | None = None,
                              max_loops: int | None = None) -> set[frozenset[Atom]]:
    if len(kb.vocab) > gate:
        raise GateExceeded("formula-enumeration", gate, len(kb.vocab))
    oracle = oracle or default_oracle(kb)
    loop_list = all_loops(kb, mode, oracle=oracle, max_loops=max_loops) if with_loops else []
    return {
        interp
        for interp in iter_subsets(kb.vocab)
        if first_violation(kb, interp, mode, with_loops=with_loops, oracle=oracle,
                           loop_list=loop_list) is None
    }


# ---------------------------------------------------------------------------
# direct MKNF semantics over finite Herbrand interpretations

Interpretation = frozenset  # frozenset[Atom]
MknfInterpretation = frozenset  # frozenset[Interpretation]


def pi_rule(rule: Rule) -> Formula:
    body = [Know(Var(p)) for p in sorted(rule.body_pos)]
    body += [NotKnow(Var(n)) for n in sorted(rule.body_neg)]
    return Implies(conj(body), disj(Know(Var(h)) for h in sorted(rule.head)))


def pi_ontology(kb: KnowledgeBase) -> Formula:
    return conj(clause_formula(c) for c in kb.ontology.sorted_clauses())


def pi_kb(kb: KnowledgeBase) -> Formula:
    return conj([Know(pi_ontology(kb))] + [pi_rule(r) for r in kb.rules])


def mknf_holds(f: Formula, i: Interpretation, m: MknfInterpretation, n: MknfInterpretation) -> bool:
    """Satisfaction of a ground MKNF formula by the structure (I, M, N)."""
    if isinstance(f, Var):
        return f.name in i
    if isinstance(f, Top):
        return True
    if isinstance(f, Bottom):
        return False
    if isinstance(f, Not):
        return not mknf_holds(f.arg, i, m, n)
    if isinstance(f, And):
        return all(mknf_holds(g, i, m, n) for g in f.args)
    if isinstance(f, Or):
        return any(mknf_holds(g, i, m, n) for g in f.args)
    if isinstance(f, Implies):
        return not mknf_holds(f.lhs, i, m, n) or mknf_holds(f.rhs, i, m, n)
    if isinstance(f, Iff):
        return mknf_holds(f.lhs, i, m, n) == mknf_holds(f.rhs, i, m, n)
    if isinstance(f, Know):
        return all(mknf_holds(f.arg, j, m, n) for j in m)
    if isinstance(f, NotKnow):
        return any(not mknf_holds(f.arg, j, m, n) for j in n)
    raise TypeError(type(f).__name__)


def mknf_satisfies(m: MknfInterpretation, f: Formula) -> bool:
    return bool(m) and all(mknf_holds(f, i, m, m) for i in m)


def herbrand_interpretations(kb: KnowledgeBase) -> list[Interpretation]:
    return list(iter_subsets(kb.vocab))


def _check_direct_gate(kb: KnowledgeBase, gate: int) -> None:
    if len(kb.vocab) > gate:
        raise GateExceeded("max-direct", gate, len(kb.vocab),
                           "direct MKNF checking is doubly exponential")


def is_mknf_model(kb: KnowledgeBase, m: MknfInterpretation, *, gate: int = DIRECT_GATE,
                  universe: Sequence[Interpretation] | None = None) -> bool:
    """M satisfies π(K) and every strict superset M' has some I' in M' with
    (I', M', M) falsifying π(K)."""
    _check_direct_gate(kb, gate)
    phi = pi_kb(kb)
    if not mknf_satisfies(m, phi):
        return False
    universe = universe if universe is not None else herbrand_interpretations(kb)
    extra = [i for i in universe if i not in m]
    for k in range(1, len(extra) + 1):
        for added in itertools.combinations(extra, k):
            bigger = m | frozenset(added)
            if all(mknf_holds(phi, i, bigger, m) for i in bigger):
                return False
    return True


def induced_kinterpretation(kb: KnowledgeBase, m: MknfInterpretation) -> frozenset[Atom]:
    """Atoms known (true in every member) under M."""
    return frozenset(a for a in kb.vocab if all(a in i for i in m))


def enumerate_mknf_models(kb: KnowledgeBase, *, gate: int = DIRECT_GATE) -> list[MknfInterpretation]:
    _check_direct_gate(kb, gate)
    universe = herbrand_interpretations(kb)
    models = []
    for k in range(1, len(universe) + 1):
        for members in itertools.combinations(universe, k):
            m = frozenset(members)
            if is_mknf_model(kb, m, gate=gate, universe=universe):
                models.append(m)
    return models


def enumerate_models_direct(kb: KnowledgeBase, *, gate: int = DIRECT_GATE) -> set[frozenset[Atom]]:
    return {induced_kinterpretation(kb, m) for m in enumerate_mknf_models(kb, gate=gate)}


def mknf_model_check_direct(kb: KnowledgeBase, interp: Iterable[Atom], *,
                            gate: int = DIRECT_GATE) -> bool:
    return frozenset(interp) in enumerate_models_direct(kb, gate=gate)


def extension(kb: KnowledgeBase, interp: AbstractSet[Atom]) -> MknfInterpretation:
    """All Herbrand interpretations satisfying the ontology and every atom of ``interp``."""
    onto = pi_ontology(kb)
    return frozenset(i for i in herbrand_interpretations(kb) if interp <= i and onto.holds(i))
