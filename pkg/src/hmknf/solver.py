"""Conflict-driven nogood learning over the completion nogoods of a KB.

The static store holds the rule, saturation, support and conjunction nogoods
plus ``{T _bot}``.  Entailment and loop nogoods are generated lazily at
propagation fixpoints.  A total assignment that survives propagation is
certified by the formula-level model check before being reported.

Internally variables are numbered ``1..n`` in the encoding's order and a
literal is ``+v`` (true) or ``-v`` (false).
"""

from __future__ import annotations

import logging
import random
import time
from dataclasses import dataclass, field
from typing import AbstractSet, Callable, Iterable, Literal as Lit

from . import characterize
from .depgraph import (
    DependencyGraph,
    GraphMode,
    Loop,
    cyclic_components,
    ext,
    is_strongly_connected_subset,
    kb_graph,
    loops,
    ontology_graph,
    EXACT_GRAPH_GATE,
    LOOP_GATE,
)
from .errors import ContractError, GateExceeded
from .kb import BOT, Atom, KnowledgeBase, format_atoms, iter_subsets
from .nogoods import (
    Assignment,
    AtomVar,
    Literal,
    Nogood,
    OntVar,
    SolverVariable,
    encoding,
    external_supports,
    make_nogood,
    neg_entailment_nogood,
    pos_entailment_nogood,
    rho,
)
from .ontology import EntailmentOracle, default_oracle

log = logging.getLogger(__name__)

MODEL = "model"
NO_MODEL = "no-model"
UNKNOWN = "unknown"

SUBSET_SEARCH_LIMIT = 12
LUBY_UNIT = 64
ACTIVITY_DECAY = 0.95

ValueFn = Callable[[SolverVariable], "bool | None"]


@dataclass
class SolverOptions:
    graph_mode: GraphMode = "overapprox"
    heuristic: Lit["lex", "activity"] = "lex"
    seed: int = 0
    conflict_budget: int | None = None
    time_budget_ms: int | None = None
    restarts: bool = False
    learned_cap: int = 10_000
    max_loops: int = LOOP_GATE
    exact_gate: int = EXACT_GRAPH_GATE
    trace: Callable[[str], None] | None = None


@dataclass
class SolveResult:
    outcome: str
    model: frozenset[Atom] | None = None
    stats: dict[str, int] = field(default_factory=dict)
    detail: str = ""


@dataclass
class EnumerationResult:
    models: list[frozenset[Atom]]
    outcome: str  # MODEL when complete, UNKNOWN when a budget ran out
    stats: dict[str, int] = field(default_factory=dict)
    detail: str = ""

    @property
    def complete(self) -> bool:
        return self.outcome != UNKNOWN


@dataclass(frozen=True)
class EntRecord:
    kind: str  # "+" or "-"
    atom: Atom
    assumptions: frozenset[Atom]
    nogood: Nogood


# ---------------------------------------------------------------------------
# entailment and unfounded-set procedures over an abstract assignment


def _true_atoms(atoms: Iterable[Atom], value: ValueFn) -> frozenset[Atom]:
    return frozenset(a for a in atoms if value(AtomVar(a)) is True)


def _false_atoms(atoms: Iterable[Atom], value: ValueFn) -> frozenset[Atom]:
    return frozenset(a for a in atoms if value(AtomVar(a)) is False)


def _pos_record(kb, p, preferred, fallback, oracle) -> EntRecord:
    for s in (preferred, fallback):
        if oracle.entails(s - {p}, p):
            return EntRecord("+", p, s, pos_entailment_nogood(kb, p, s, oracle))
    raise ContractError(f"no sound positive entailment nogood for {p}")


def _neg_record(kb, p, preferred, fallback, oracle) -> EntRecord:
    for s in (preferred, fallback):
        if not oracle.entails(kb.ka_o - s - {p}, p):
            return EntRecord("-", p, s, neg_entailment_nogood(kb, p, s, oracle))
    raise ContractError(f"no sound negative entailment nogood for {p}")


def ent_nogoods(kb: KnowledgeBase, value: ValueFn, onto_graph: DependencyGraph,
                oracle: EntailmentOracle | None = None) -> list[EntRecord]:
    """Entailment nogoods warranted by the ontology atoms currently true or false.

    The order of checks is: inconsistency of the true atoms; atoms newly
    entailed true; true atoms entailed by the others whose ontology-support
    variable is still open; atoms entailed false; and finally atoms that
    cannot be entailed even when every non-false atom is assumed.
    """
    oracle = oracle or default_oracle(kb)
    at = _true_atoms(kb.ka_o, value)
    af = _false_atoms(kb.ka_o, value)
    out: list[EntRecord] = []
    if not oracle.consistent(at):
        return [EntRecord("+", BOT, at, pos_entailment_nogood(kb, BOT, at, oracle))]
    closure = oracle.entailment_closure(at)
    for p in sorted(closure.pos - at):
        out.append(_pos_record(kb, p, at & ext(onto_graph, [p]), at, oracle))
    for p in sorted(at):
        if value(OntVar(p)) is None and oracle.entails(at - {p}, p):
            out.append(_pos_record(kb, p, (at & ext(onto_graph, [p])) - {p}, at - {p}, oracle))
    for p in sorted(closure.neg - af):
        s = at | {p}
        out.append(EntRecord("+", BOT, s, pos_entailment_nogood(kb, BOT, s, oracle)))
    for p in sorted(kb.ka_o):
        if value(OntVar(p)) is False:
            continue
        upper = kb.ka_o - af - {p}
        if oracle.consistent(upper) and not oracle.entails(upper, p):
            out.append(_neg_record(kb, p, af & ext(onto_graph, [p]), af, oracle))
    return out


def _blocking_literal(kb: KnowledgeBase, rule, loop: AbstractSet[Atom], value: ValueFn) -> Literal | None:
    enc = encoding(kb)
    for lit in enc.sort_literals(rho(kb, rule, loop)):
        if value(lit.var) is lit.sign:
            return lit
    return None


def _externally_blocked(kb: KnowledgeBase, loop: AbstractSet[Atom], value: ValueFn) -> bool:
    return all(_blocking_literal(kb, r, loop, value) is not None for r in external_supports(kb, loop))


def _loop_condition(kb, loop, s, oracle) -> bool:
    return not oracle.entails(kb.ka_o - s - loop, loop)


def _valid_unfounded(kb, u, af, value, oracle) -> bool:
    return bool(u) and _externally_blocked(kb, u, value) and _loop_condition(kb, u, af, oracle)


def _greatest_unfounded(kb: KnowledgeBase, comp: frozenset[Atom], af: frozenset[Atom],
                        value: ValueFn, oracle: EntailmentOracle) -> frozenset[Atom]:
    u = {p for p in comp if value(AtomVar(p)) is not False}
    changed = True
    while changed and u:
        changed = False
        for p in sorted(u):
            supported = any(
                not (r.body_pos & u) and _blocking_literal(kb, r, u, value) is None
                for r in kb.rules_with_head(p)
            ) or oracle.entails(kb.ka_o - u - af, p)
            if supported:
                u.discard(p)
                changed = True
    return frozenset(u)


def unfounded_set_from(kb: KnowledgeBase, value: ValueFn, components: list[frozenset[Atom]],
                       onto_graph: DependencyGraph, oracle: EntailmentOracle | None = None,
                       ) -> tuple[frozenset[Atom], frozenset[Atom]]:
    """A non-false atom set ``U`` inside one cyclic component whose external
    supports are all blocked and which the ontology cannot support once the
    atoms of ``S`` (all false) are withheld; ``(∅, ∅)`` if none is found."""
    oracle = oracle or default_oracle(kb)
    af = _false_atoms(kb.ka_o, value)
    for comp in components:
        u = _greatest_unfounded(kb, comp, af, value, oracle)
        if not u:
            continue
        if not _loop_condition(kb, u, af, oracle):
            u = _subset_search(kb, u, af, value, oracle)
            if not u:
                continue
        s = af & ext(onto_graph, u)
        if not _loop_condition(kb, u, s, oracle):
            s = af
        return u, s
    return frozenset(), frozenset()


def _subset_search(kb, u, af, value, oracle) -> frozenset[Atom]:
    if len(u) > SUBSET_SEARCH_LIMIT:
        return frozenset()
    for cand in sorted(iter_subsets(u), key=lambda c: (-len(c), sorted(c))):
        if cand and cand != u and _valid_unfounded(kb, cand, af, value, oracle):
            return cand
    return frozenset()


def unfounded_set(kb: KnowledgeBase, assignment: Assignment, mode: GraphMode = "overapprox",
                  oracle: EntailmentOracle | None = None) -> tuple[frozenset[Atom], frozenset[Atom]]:
    oracle = oracle or default_oracle(kb)
    graph = kb_graph(kb, mode, oracle=oracle)
    return unfounded_set_from(kb, assignment.value, cyclic_components(graph),
                              ontology_graph(kb, mode, oracle=oracle), oracle)


def loop_nogoods_for(kb: KnowledgeBase, u: frozenset[Atom], s: frozenset[Atom],
                     value: ValueFn) -> list[Nogood]:
    """One loop nogood per atom of ``u``, using the ρ literals currently holding."""
    choice = []
    for r in external_supports(kb, u):
        lit = _blocking_literal(kb, r, u, value)
        if lit is None:
            raise ContractError(f"rule r{r.id} is not blocked for {sorted(u)}")
        choice.append(lit)
    out = []
    for p in sorted(u):
        ng = make_nogood([Literal(True, AtomVar(p)), *choice] + [Literal(False, AtomVar(a)) for a in s])
        if ng is not None:
            out.append(ng)
    return out


# ---------------------------------------------------------------------------
# the engine


@dataclass
class _Stored:
    lits: tuple[int, ...]
    kind: str  # static | ent | loop | learned | check | block
    activity: float = 0.0
    deleted: bool = False
    watch: list[int] = field(default_factory=list)


_EVICTABLE = {"ent", "loop", "learned"}


def luby(i: int) -> int:
    """The ``i``-th term (1-based) of the Luby sequence."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while i != (1 << k) - 1:
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1
    return 1 << (k - 1)


class _Stop(Exception):
    def __init__(self, detail: str):
        self.detail = detail


class Solver:
    def __init__(self, kb: KnowledgeBase, options: SolverOptions | None = None,
                 oracle: EntailmentOracle | None = None):
        self.kb = kb
        self.opts = options or SolverOptions()
        self.oracle = oracle or default_oracle(kb)
        self.enc = encoding(kb)
        self.vars: list[SolverVariable | None] = [None, *self.enc.variables]
        self.index = {v: i for i, v in enumerate(self.vars) if v is not None}
        n = len(self.vars)
        self.value = [0] * n
        self.level = [0] * n
        self.reason = [-1] * n
        self.pos = [0] * n
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.store: list[_Stored] = []
        self.watches: dict[int, list[int]] = {}
        self.keys: dict[tuple[int, ...], int] = {}
        self.pending: list[int] = []
        self.stats = {
            "decisions": 0, "conflicts": 0, "propagations": 0, "learned": 0,
            "entailment_nogoods": 0, "loop_nogoods": 0, "model_checks": 0,
            "restarts": 0, "evicted": 0,
        }
        self.rng = random.Random(self.opts.seed)
        self.var_activity = [self.rng.random() * 1e-6 for _ in range(n)]
        self.var_inc = 1.0
        self.ng_inc = 1.0
        self.decidable = [
            i for i, v in enumerate(self.vars)
            if v is not None and not isinstance(v, OntVar) and v != AtomVar(BOT)
        ]
        self.atom_index = {v.atom: i for i, v in enumerate(self.vars) if isinstance(v, AtomVar)}

        graph = kb_graph(kb, self.opts.graph_mode, oracle=self.oracle, exact_gate=self.opts.exact_gate)
        self.onto_graph = ontology_graph(kb, self.opts.graph_mode, oracle=self.oracle,
                                         exact_gate=self.opts.exact_gate)
        self.components = cyclic_components(graph)
        self.graph = graph
        self._loops: list[Loop] | None = None
        self._loops_exceeded = False
        self._u_cache: frozenset[Atom] = frozenset()

        self._deadline = None
        self._conflicts_at_restart = 0
        self._luby_i = 1

        self._assign(self._lit(Literal(False, AtomVar(BOT))), -1)
        for ng in self.enc.static_nogoods():
            self._add(ng, "static")

    # -- literal plumbing ---------------------------------------------------

    def _lit(self, lit: Literal) -> int:
        v = self.index[lit.var]
        return v if lit.sign else -v

    def _sym(self, lit: int) -> Literal:
        return Literal(lit > 0, self.vars[abs(lit)])

    def _val(self, lit: int) -> int:
        v = self.value[abs(lit)]
        return v if lit > 0 else -v

    def lookup(self, var: SolverVariable) -> bool | None:
        v = self.value[self.index[var]]
        return None if v == 0 else v > 0

    def _fmt(self, lit: int) -> str:
        return self.enc.format_literal(self._sym(lit))

    def _fmt_ng(self, lits: Iterable[int]) -> str:
        return "{" + ", ".join(self._fmt(l) for l in lits) + "}"

    def _trace(self, text: str) -> None:
        if self.opts.trace is not None:
            self.opts.trace(text)

    @property
    def dl(self) -> int:
        return len(self.trail_lim)

    # -- assignment -----------------------------------------------------------

    def _assign(self, lit: int, reason: int) -> None:
        v = abs(lit)
        self.value[v] = 1 if lit > 0 else -1
        self.level[v] = self.dl
        self.reason[v] = reason
        self.pos[v] = len(self.trail)
        self.trail.append(lit)
        if reason >= 0:
            self.stats["propagations"] += 1
            self._trace(f"PROP {self._fmt(lit)} reason={reason}")

    def _backtrack(self, level: int) -> None:
        if self.dl <= level:
            return
        cut = self.trail_lim[level]
        for lit in self.trail[cut:]:
            v = abs(lit)
            self.value[v] = 0
            self.reason[v] = -1
        del self.trail[cut:]
        del self.trail_lim[level:]
        self.qhead = min(self.qhead, len(self.trail))

    # -- nogood store ---------------------------------------------------------

    def _add(self, ng: Iterable[Literal] | Iterable[int], kind: str) -> tuple[int | None, bool]:
        """Store a nogood; returns ``(id, new)``.  Unit nogoods propagate at
        once, conflicting ones are parked until the next propagation."""
        key = self._key(ng)
        if key in self.keys:
            nid = self.keys[key]
            if kind in ("block", "check"):
                self.store[nid].kind = kind
            return nid, False
        nid = len(self.store)
        entry = _Stored(key, kind)
        self.store.append(entry)
        self.keys[key] = nid
        self._rewatch(nid)
        self._settle(nid)
        if kind in _EVICTABLE:
            self._maybe_evict()
        return nid, True

    def _key(self, ng: Iterable[Literal] | Iterable[int]) -> tuple[int, ...]:
        lits = {l if isinstance(l, int) else self._lit(l) for l in ng}
        return tuple(sorted(lits, key=lambda l: (abs(l), l < 0)))

    def _known(self, ng: Iterable[Literal]) -> bool:
        return self._key(ng) in self.keys

    def _rewatch(self, nid: int) -> None:
        # watch the two least-true literals: open or false first, then the most recent
        e = self.store[nid]
        for l in e.watch:
            lst = self.watches.get(l)
            if lst and nid in lst:
                lst.remove(nid)
        order = sorted(e.lits, key=lambda l: (self._val(l) == 1,
                                              -self.pos[abs(l)] if self._val(l) == 1 else 0))
        e.watch = order[:2]
        for l in e.watch:
            self.watches.setdefault(l, []).append(nid)

    def _settle(self, nid: int) -> bool:
        """Propagate a freshly (re)watched nogood; True if it is conflicting."""
        non_true = [l for l in self.store[nid].lits if self._val(l) != 1]
        if not non_true:
            self.pending.append(nid)
            return True
        if len(non_true) == 1 and self._val(non_true[0]) == 0:
            self._assign(-non_true[0], nid)
        return False

    def _maybe_evict(self) -> None:
        live = [i for i, e in enumerate(self.store) if e.kind in _EVICTABLE and not e.deleted]
        if len(live) <= self.opts.learned_cap:
            return
        locked = {self.reason[abs(l)] for l in self.trail}
        locked.update(self.pending)
        locked.add(len(self.store) - 1)
        victims = sorted((i for i in live if i not in locked),
                         key=lambda i: (self.store[i].activity, i))[: len(live) // 2]
        for i in victims:
            e = self.store[i]
            e.deleted = True
            del self.keys[e.lits]
            self.stats["evicted"] += 1

    # -- propagation --------------------------------------------------------

    def _unit_propagate(self) -> int | None:
        while self.pending:
            nid = self.pending.pop(0)
            if self.store[nid].deleted:
                continue
            self._rewatch(nid)
            if all(self._val(l) == 1 for l in self.store[nid].lits):
                return nid
            self._settle(nid)
        while self.qhead < len(self.trail):
            x = self.trail[self.qhead]
            self.qhead += 1
            watchers = self.watches.get(x)
            if not watchers:
                continue
            keep: list[int] = []
            conflict = None
            for k, nid in enumerate(watchers):
                e = self.store[nid]
                if e.deleted:
                    continue
                if conflict is not None:
                    keep.append(nid)
                    continue
                other = e.watch[0] if e.watch[-1] == x else e.watch[-1]
                if other == x:
                    other = None
                if other is not None and self._val(other) == -1:
                    keep.append(nid)
                    continue
                repl = next((l for l in e.lits if l != x and l != other and self._val(l) != 1), None)
                if repl is not None:
                    e.watch = [other, repl] if other is not None else [repl]
                    self.watches.setdefault(repl, []).append(nid)
                    continue
                keep.append(nid)
                if other is None or self._val(other) == 1:
                    conflict = nid
                else:
                    self._assign(-other, nid)
            self.watches[x] = keep
            if conflict is not None:
                return conflict
        return None

    def _ent_step(self) -> bool:
        added = False
        for rec in ent_nogoods(self.kb, self.lookup, self.onto_graph, self.oracle):
            # only nogoods that are unit or conflicting now carry information
            if self._known(rec.nogood) or any(self.lookup(l.var) is (not l.sign) for l in rec.nogood):
                continue
            self._trace(f"ENT{rec.kind} {rec.atom} {format_atoms(rec.assumptions)}")
            self._add(rec.nogood, "ent")
            added = True
            self.stats["entailment_nogoods"] += 1
        return added

    def _unfounded_step(self) -> bool:
        af = _false_atoms(self.kb.ka_o, self.lookup)
        u = frozenset(p for p in self._u_cache if self.lookup(AtomVar(p)) is not False)
        s = frozenset()
        if u and _valid_unfounded(self.kb, u, af, self.lookup, self.oracle):
            s = af & ext(self.onto_graph, u)
            if not _loop_condition(self.kb, u, s, self.oracle):
                s = af
        else:
            u, s = unfounded_set_from(self.kb, self.lookup, self.components, self.onto_graph, self.oracle)
        self._u_cache = u
        if not u:
            return False
        fresh = [ng for ng in loop_nogoods_for(self.kb, u, s, self.lookup) if not self._known(ng)]
        if fresh:
            self._trace(f"UNFOUNDED {format_atoms(u)} {format_atoms(s)}")
        for ng in fresh:
            self._add(ng, "loop")
            self.stats["loop_nogoods"] += 1
        return bool(fresh)

    def propagate(self) -> int | None:
        """Unit propagation, then entailment nogoods, then loop nogoods, until
        a conflict (its nogood id is returned) or nothing new is learned."""
        while True:
            c = self._unit_propagate()
            if c is not None:
                return c
            if self._ent_step():
                continue
            if not self._unfounded_step():
                return None

    # -- conflicts ------------------------------------------------------------

    def _bump_nogood(self, nid: int) -> None:
        e = self.store[nid]
        e.activity += self.ng_inc

    def _analyze(self, lits: Iterable[int]) -> tuple[list[int], int, int]:
        cur = self.dl
        delta = set(lits)
        while True:
            at_cur = [l for l in delta if self.level[abs(l)] == cur]
            if len(at_cur) == 1:
                break
            x = max(at_cur, key=lambda l: self.pos[abs(l)])
            r = self.reason[abs(x)]
            if r < 0:
                raise ContractError("resolution reached a literal without a reason")
            self._bump_nogood(r)
            delta.discard(x)
            delta.update(l for l in self.store[r].lits if l != -x)
        uip = at_cur[0]
        bj = max((self.level[abs(l)] for l in delta if l != uip), default=0)
        learned = sorted(delta, key=lambda l: (abs(l), l < 0))
        return learned, uip, bj

    def _resolve(self, cid: int) -> bool:
        """Analyse a conflict and backjump; False when it holds at level 0."""
        self.stats["conflicts"] += 1
        self._trace(f"CONFLICT {cid}")
        self._bump_nogood(cid)
        lits = self.store[cid].lits
        top = max((self.level[abs(l)] for l in lits), default=0)
        if top == 0:
            return False
        if top < self.dl:
            self._backtrack(top)
        learned, uip, bj = self._analyze(lits)
        self._backtrack(bj)
        for l in learned:
            self.var_activity[abs(l)] += self.var_inc
        self.var_inc /= ACTIVITY_DECAY
        self.ng_inc /= ACTIVITY_DECAY
        self._trace(f"LEARN {self._fmt_ng(learned)} backjump={bj}")
        nid, new = self._add(learned, "learned")
        if new:
            self.stats["learned"] += 1
            self._bump_nogood(nid)
        elif self._val(uip) == 0:
            self._assign(-uip, nid)
        self._check_budgets()
        self._maybe_restart()
        return True

    def _check_budgets(self) -> None:
        budget = self.opts.conflict_budget
        if budget is not None and self.stats["conflicts"] > budget:
            raise _Stop(f"conflict budget of {budget} exhausted")
        if self._deadline is not None and time.monotonic() > self._deadline:
            raise _Stop(f"time budget of {self.opts.time_budget_ms} ms exhausted")

    def _maybe_restart(self) -> None:
        if not self.opts.restarts:
            return
        if self.stats["conflicts"] - self._conflicts_at_restart >= luby(self._luby_i) * LUBY_UNIT:
            self._luby_i += 1
            self._conflicts_at_restart = self.stats["conflicts"]
            self.stats["restarts"] += 1
            self._backtrack(0)

    # -- decisions and model check --------------------------------------------

    def _select(self) -> int | None:
        free = [v for v in self.decidable if self.value[v] == 0]
        if not free:
            return None
        if self.opts.heuristic == "activity":
            return max(free, key=lambda v: (self.var_activity[v], -v))
        return free[0]

    def _decide(self, v: int) -> None:
        self.stats["decisions"] += 1
        self.trail_lim.append(len(self.trail))
        self._assign(v, -1)
        self._trace(f"DECIDE {self.dl} {self._fmt(v)}")

    def model_check(self, interp: frozenset[Atom]) -> bool:
        """Certify a candidate through its completion and loop formulas."""
        self.stats["model_checks"] += 1
        mode = self.opts.graph_mode
        if not self._loops_exceeded and self._loops is None:
            try:
                self._loops = loops(self.graph, self.opts.max_loops)
            except GateExceeded:
                self._loops_exceeded = True
        if not self._loops_exceeded:
            return characterize.first_violation(self.kb, interp, mode, oracle=self.oracle,
                                                loop_list=self._loops) is None
        if characterize.first_violation(self.kb, interp, mode, oracle=self.oracle,
                                        with_loops=False) is not None:
            return False
        # only loops inside the candidate can be unsupported
        inside = [c & interp for c in self.components if len(c & interp) > 0]
        found: list[Loop] = []
        for comp in inside:
            if len(comp) > SUBSET_SEARCH_LIMIT + 8:
                raise _Stop("loop gate exceeded during model check")
            for sub in iter_subsets(comp):
                if sub and is_strongly_connected_subset(self.graph, sub):
                    found.append(sub)
                    if len(found) > self.opts.max_loops:
                        raise _Stop("loop gate exceeded during model check")
        formulas = characterize.loop_formulas(self.kb, interp, mode, self.oracle, found)
        return all(f.holds(interp) for f in formulas.values())

    def _current_model(self) -> frozenset[Atom]:
        return frozenset(a for a, i in self.atom_index.items() if a != BOT and self.value[i] == 1)

    def _search(self) -> SolveResult:
        while True:
            c = self.propagate()
            if c is not None:
                if not self._resolve(c):
                    return SolveResult(NO_MODEL, stats=self.collect_stats())
                continue
            v = self._select()
            if v is not None:
                self._decide(v)
                continue
            if any(self.value[i] == 0 for i in range(1, len(self.vars))):
                raise ContractError("propagation left ontology-support variables open")
            model = self._current_model()
            ok = self.model_check(model)
            self._trace(f"CHECK {'pass' if ok else 'fail'}")
            if ok:
                self._trace(f"MODEL {format_atoms(model)}")
                return SolveResult(MODEL, model, self.collect_stats())
            self._add(list(self.trail), "check")

    def solve(self) -> SolveResult:
        """Search for the next model; may be called again after :meth:`block`."""
        if self.opts.time_budget_ms is not None:
            self._deadline = time.monotonic() + self.opts.time_budget_ms / 1000
        try:
            return self._search()
        except _Stop as stop:
            return SolveResult(UNKNOWN, stats=self.collect_stats(), detail=stop.detail)

    def block(self, model: AbstractSet[Atom]) -> None:
        """Forbid ``model``'s atom polarities in every later answer."""
        lits = [Literal(a in model, AtomVar(a)) for a in sorted(self.kb.vocab)]
        self._add(lits, "block")

    def collect_stats(self) -> dict[str, int]:
        out = dict(self.stats)
        out["nogoods"] = sum(1 for e in self.store if not e.deleted)
        out.update(self.oracle.stats.as_dict())
        return out


def cdnl_solve(kb: KnowledgeBase, options: SolverOptions | None = None,
               oracle: EntailmentOracle | None = None) -> SolveResult:
    return Solver(kb, options, oracle).solve()


def enumerate_all(kb: KnowledgeBase, options: SolverOptions | None = None,
                  oracle: EntailmentOracle | None = None, limit: int | None = None) -> EnumerationResult:
    solver = Solver(kb, options, oracle)
    models: list[frozenset[Atom]] = []
    while limit is None or len(models) < limit:
        res = solver.solve()
        if res.outcome == UNKNOWN:
            return EnumerationResult(models, UNKNOWN, res.stats, res.detail)
        if res.outcome == NO_MODEL:
            break
        models.append(res.model)
        solver.block(res.model)
    return EnumerationResult(models, MODEL, solver.collect_stats())
