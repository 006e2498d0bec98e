import threading

import pytest
from hypothesis import given, settings, strategies as st

from hmknf.errors import ContractError
from hmknf.kb import BOT, iter_subsets, parse_kb
from hmknf.ontology import ClausalOracle, consistent, entailment_closure, entails

from oracles import random_kb, truth_table_entails


@pytest.fixture
def ex3(sample):
    return sample("entail")


def test_entailment_on_the_three_atom_ontology(ex3):
    o = ClausalOracle(ex3)
    assert o.entails({"a"}, "c")
    assert not o.entails({"a"}, "b")
    assert o.entails_not({"a"}, "b")
    assert not o.entails(set(), "c")
    assert o.consistent({"b", "c"})
    assert not o.consistent({"a", "b"})
    assert o.entails({"a", "b"}, BOT)
    assert not o.entails({"a"}, BOT)


def test_closure(ex3):
    r = entailment_closure(ex3, {"a"})
    assert not r.inconsistent and r.pos == {"a", "c"} and r.neg == {"b"}
    assert entailment_closure(ex3, set()).pos == frozenset()
    bad = entailment_closure(ex3, {"a", "b"})
    assert bad.inconsistent and bad.pos == {BOT}


def test_disjunctive_targets():
    kb = parse_kb("#ontology\nx -> y | z.\n#end\n")
    assert entails(kb, {"x"}, ["y", "z"])
    assert not entails(kb, {"x"}, "y")
    assert not entails(kb, {"x"}, [])
    assert consistent(kb, {"x"})


def test_atoms_outside_the_ontology():
    kb = parse_kb("q.\n#ontology\nx -> y.\n~x | ~w.\n#end\n")
    o = ClausalOracle(kb)
    assert not o.entails({"x"}, "q")
    assert o.entails({"x", "w"}, "q")  # anything follows from an inconsistent theory
    with pytest.raises(ContractError):
        o.entails({"q"}, "y")


def test_empty_ontology():
    kb = parse_kb("a.\n")
    o = ClausalOracle(kb)
    assert o.consistent(set())
    assert not o.entails(set(), "a")
    assert not o.entails(set(), BOT)


def test_stats_and_cache(ex3):
    o = ClausalOracle(ex3)
    o.entails({"a"}, "c")
    o.entails({"a"}, "c")
    assert o.stats.queries == 2 and o.stats.cache_hits == 1 and o.stats.sat_calls == 1


def test_horn_detection(ex3):
    assert ClausalOracle(ex3).horn
    assert not ClausalOracle(parse_kb("#ontology\na | b.\n#end\n")).horn


def test_concurrent_queries_agree(ex3):
    o = ClausalOracle(ex3, cache_size=4)
    results = []

    def work():
        results.append([o.entails(s, p) for s in iter_subsets(ex3.ka_o) for p in sorted(ex3.ka_o)])

    threads = [threading.Thread(target=work) for _ in range(8)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert all(r == results[0] for r in results)


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_oracle_matches_truth_tables(seed, horn):
    kb = random_kb(seed, horn=horn)
    o = ClausalOracle(kb)
    for s in iter_subsets(kb.ka_o):
        for t in sorted(kb.vocab) + [BOT]:
            assert o.entails(s, t) == truth_table_entails(kb, s, t)
        assert o.consistent(s) == (not truth_table_entails(kb, s, BOT))
        for t in sorted(kb.ka_o):
            for u in sorted(kb.ka_o):
                assert o.entails(s, [t, u]) == truth_table_entails(kb, s, [t, u])
