import pytest

from hmknf.characterize import enumerate_models_formulas, is_model_induced
from hmknf.depgraph import ontology_graph
from hmknf.kb import BOT, parse_kb
from hmknf.nogoods import (
    AtomVar,
    Assignment,
    F,
    OntVar,
    T,
    encoding,
    neg_entailment_nogood,
    pos_entailment_nogood,
)
from hmknf.ontology import ClausalOracle
from hmknf.solver import (
    MODEL,
    NO_MODEL,
    UNKNOWN,
    Solver,
    SolverOptions,
    cdnl_solve,
    enumerate_all,
    ent_nogoods,
    loop_nogoods_for,
    luby,
    unfounded_set,
)

from oracles import random_kbs


def pigeons(n, m):
    rules = "".join(" ; ".join(f"p{i}h{h}" for h in range(m)) + ".\n" for i in range(n))
    onto = "".join(f"~p{i}h{h} | ~p{j}h{h}.\n" for h in range(m) for i in range(n) for j in range(i + 1, n))
    return parse_kb(rules + "#ontology\n" + onto + "#end\n")


def assignment(*lits):
    a = Assignment()
    for lit in lits:
        a.assign(lit)
    return a


def records(kb, a):
    out = ent_nogoods(kb, a.value, ontology_graph(kb, "overapprox"), ClausalOracle(kb))
    return {(r.kind, r.atom, r.assumptions) for r in out}, {r.nogood for r in out}


# -- entailment nogoods -------------------------------------------------------


def test_ent_nogoods_with_a_true(sample):
    kb = sample("entail")
    recs, ngs = records(kb, assignment(T(AtomVar("a")), F(OntVar("a"))))
    assert {("+", "c", frozenset("a")), ("+", BOT, frozenset("ab"))} <= recs
    assert pos_entailment_nogood(kb, "c", {"a"}) in ngs
    assert pos_entailment_nogood(kb, BOT, {"a", "b"}) in ngs
    # the negative step also fires for b, with no assumptions
    assert recs == {("+", "c", frozenset("a")), ("+", BOT, frozenset("ab")), ("-", "b", frozenset())}


def test_ent_nogoods_with_inconsistent_true_atoms(sample):
    kb = sample("entail")
    recs, ngs = records(kb, assignment(T(AtomVar("a")), T(AtomVar("b"))))
    assert recs == {("+", BOT, frozenset("ab"))}
    assert ngs == {frozenset([F(OntVar(BOT)), T(AtomVar("a")), T(AtomVar("b"))])}


def test_ent_nogoods_with_a_false(sample):
    kb = sample("entail")
    recs, ngs = records(kb, assignment(F(AtomVar("a")), F(OntVar("a"))))
    assert recs == {("-", "b", frozenset("a")), ("-", "c", frozenset("a"))}
    assert ngs == {neg_entailment_nogood(kb, "b", {"a"}), neg_entailment_nogood(kb, "c", {"a"})}


def test_ent_nogoods_on_empty_assignment(sample):
    kb = sample("entail")
    recs, _ = records(kb, Assignment())
    # a and b are underivable even with every atom open; c follows from a
    assert recs == {("-", "a", frozenset()), ("-", "b", frozenset())}


# -- unfounded sets -------------------------------------------------------------


def test_unfounded_loop_in_loops_example(sample):
    kb = sample("loops")
    enc = encoding(kb)
    b3 = enc.beta(kb.rules[2])
    a = assignment(T(AtomVar("e")), T(AtomVar("f")), F(AtomVar("c")), F(b3))
    u, s = unfounded_set(kb, a, "exact")
    assert (u, s) == (frozenset("ef"), frozenset("c"))
    assert set(loop_nogoods_for(kb, u, s, a.value)) == {
        frozenset([T(AtomVar("e")), F(b3), F(AtomVar("c"))]),
        frozenset([T(AtomVar("f")), F(b3), F(AtomVar("c"))]),
    }


def test_unfounded_set_empty_when_loop_is_false(sample):
    kb = sample("loops")
    a = assignment(F(AtomVar("e")), F(AtomVar("f")))
    assert unfounded_set(kb, a, "exact") == (frozenset(), frozenset())


def test_unfounded_self_support(sample):
    kb = sample("selfloop")
    assert unfounded_set(kb, assignment(T(AtomVar("a")))) == (frozenset("a"), frozenset())


def test_unfounded_set_respects_ontology_support(sample):
    kb = sample("loops")
    b3 = encoding(kb).beta(kb.rules[2])
    # with c open the ontology may still derive e and f
    a = assignment(T(AtomVar("e")), T(AtomVar("f")), F(b3))
    assert unfounded_set(kb, a, "exact") == (frozenset(), frozenset())


# -- conflict analysis ----------------------------------------------------------


def _clear(solver):
    for v in range(len(solver.vars)):
        solver.value[v] = 0
        solver.reason[v] = -1
    solver.trail.clear()
    solver.trail_lim.clear()
    solver.qhead = 0
    solver.pending.clear()


def test_resolution_over_ontology_support(sample):
    kb = sample("loops")
    enc = encoding(kb)
    s = Solver(kb)
    _clear(s)
    bp = enc.beta_p(kb.rules[1], "d")
    gamma = neg_entailment_nogood(kb, "d", {"c"})
    gid, _ = s._add(gamma, "ent")
    psi = enc.support_nogood("d")
    assert psi == frozenset([T(AtomVar("d")), F(bp), F(OntVar("d"))])
    s._assign(s._lit(F(bp)), -1)
    s._assign(s._lit(F(AtomVar("c"))), -1)
    s.trail_lim.append(len(s.trail))
    s._assign(s._lit(T(AtomVar("d"))), -1)
    s._assign(s._lit(F(OntVar("d"))), gid)
    learned, uip, bj = s._analyze([s._lit(l) for l in psi])
    assert {s._sym(l) for l in learned} == {T(AtomVar("d")), F(bp), F(AtomVar("c"))}
    assert s._sym(uip) == T(AtomVar("d")) and bj == 0


def test_decision_only_conflict(sample):
    kb = sample("choice")
    s = Solver(kb)
    _clear(s)
    s.trail_lim.append(0)
    s._assign(s._lit(T(AtomVar("a"))), -1)
    learned, uip, bj = s._analyze([s._lit(T(AtomVar("a")))])
    assert [s._sym(l) for l in learned] == [T(AtomVar("a"))] and bj == 0


class CheckedSolver(Solver):
    """Asserts the propagation and learning invariants as the search runs."""

    def _assign(self, lit, reason):
        if reason >= 0:
            lits = self.store[reason].lits
            assert -lit in lits
            assert self.value[abs(lit)] == 0
            assert all(self._val(l) == 1 for l in lits if l != -lit)
        super()._assign(lit, reason)

    def _add(self, ng, kind):
        if kind == "learned":
            lits = list(ng)
            assert not any(-l in lits for l in lits)
            open_ = [l for l in lits if self._val(l) != 1]
            assert len(open_) == 1 and self._val(open_[0]) == 0
        return super()._add(ng, kind)


@pytest.mark.parametrize("opts", [
    SolverOptions(),
    SolverOptions(heuristic="activity", seed=3),
    SolverOptions(restarts=True, learned_cap=20),
])
def test_invariants_hold_during_search(opts):
    kbs = random_kbs(60, base=20000, horn=False) + [pigeons(4, 3), pigeons(3, 3)]
    for kb in kbs:
        s = CheckedSolver(kb, opts)
        models = []
        while True:
            res = s.solve()
            if res.outcome != MODEL:
                break
            models.append(res.model)
            s.block(res.model)
        assert res.outcome == NO_MODEL
        assert set(models) == enumerate_models_formulas(kb)


# -- whole-engine behaviour -----------------------------------------------------


def test_examples(sample):
    assert enumerate_all(sample("bp")).models == [frozenset({"cand(p)", "goodCand(p)", "highBP(p)"})]
    assert enumerate_all(sample("loops")).models == [frozenset("ab")]
    assert set(enumerate_all(sample("choice")).models) == {frozenset("a"), frozenset("b")}
    assert enumerate_all(sample("empty")).models == [frozenset()]
    assert enumerate_all(sample("selfloop")).models == [frozenset()]
    assert cdnl_solve(sample("odd")).outcome == NO_MODEL
    assert cdnl_solve(sample("entail")).model == frozenset()


def test_loops_example_needs_no_decisions(sample):
    lines = []
    res = cdnl_solve(sample("loops"), SolverOptions(trace=lines.append))
    assert res.outcome == MODEL and res.stats["decisions"] == 0
    assert not any(l.startswith("DECIDE") for l in lines)


def test_first_decision_is_lexicographic(sample):
    lines = []
    cdnl_solve(sample("choice"), SolverOptions(trace=lines.append))
    assert next(l for l in lines if l.startswith("DECIDE")) == "DECIDE 1 T a"


def test_pigeonholes():
    assert cdnl_solve(pigeons(4, 3)).outcome == NO_MODEL
    assert len(enumerate_all(pigeons(3, 3)).models) == 6


def test_conflict_budget_gives_unknown():
    res = cdnl_solve(pigeons(5, 4), SolverOptions(conflict_budget=3))
    assert res.outcome == UNKNOWN and "conflict budget" in res.detail
    partial = enumerate_all(pigeons(5, 4), SolverOptions(conflict_budget=3))
    assert not partial.complete


def test_time_budget_gives_unknown():
    res = cdnl_solve(pigeons(6, 5), SolverOptions(time_budget_ms=1))
    assert res.outcome == UNKNOWN and "time budget" in res.detail


def test_restarts_and_eviction():
    res = cdnl_solve(pigeons(6, 5), SolverOptions(restarts=True, learned_cap=100))
    assert res.outcome == NO_MODEL
    assert res.stats["restarts"] >= 1 and res.stats["evicted"] > 0


def test_luby_sequence():
    assert [luby(i) for i in range(1, 16)] == [1, 1, 2, 1, 1, 2, 4, 1, 1, 2, 1, 1, 2, 4, 8]


def test_enumeration_limit(sample):
    assert len(enumerate_all(sample("choice"), limit=1).models) == 1


def test_returned_models_are_induced():
    for kb in random_kbs(100, base=21000, horn=False):
        for mode in ("overapprox", "exact"):
            res = cdnl_solve(kb, SolverOptions(graph_mode=mode))
            if res.outcome == MODEL:
                assert is_model_induced(kb, res.model)
            else:
                assert res.outcome == NO_MODEL and not enumerate_models_formulas(kb)


def test_small_loop_gate_falls_back(sample):
    kb = parse_kb("a :- b.\nb :- a.\na :- c.\nc :- a.\nb :- c.\nc :- b.\nd :- not e.\ne :- not d.\n")
    res = enumerate_all(kb, SolverOptions(max_loops=2))
    assert set(res.models) == enumerate_models_formulas(kb)


def test_stats_are_reported(sample):
    stats = cdnl_solve(sample("bp")).stats
    assert {"decisions", "conflicts", "propagations", "learned", "nogoods", "oracle_queries"} <= set(stats)
