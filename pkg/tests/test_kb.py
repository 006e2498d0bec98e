import logging

import pytest
from hypothesis import given, settings, strategies as st

from hmknf.errors import ParseError
from hmknf.formula import Iff, Implies, Not, Var, conj, disj, to_clauses
from hmknf.kb import (
    BOT,
    KnowledgeBase,
    Rule,
    format_atoms,
    iter_subsets,
    k_atoms,
    dl_atoms,
    parse_atom_list,
    parse_kb,
    serialize_kb,
)


def test_parse_blood_pressure(sample):
    kb = sample("bp")
    assert [r.id for r in kb.rules] == [1, 2, 3]
    r1, r2, r3 = kb.rules
    assert r1.head == {"goodCand(p)"} and r1.body_pos == {"cand(p)"} and r1.body_neg == {"highRisk(p)"}
    assert r2.head == {"highBP(p)"} and not r2.body_pos and not r2.body_neg
    assert r3.body_neg == {"risksTreated(p)"}
    assert kb.ontology.clauses == {
        frozenset([("highBP(p)", False), ("cand(p)", True)]),
        frozenset([("highRisk(p)", False), ("riskFactor(p)", True)]),
    }
    assert len(kb.vocab) == 6
    assert kb.ka_o == {"highBP(p)", "cand(p)", "highRisk(p)", "riskFactor(p)"}


def test_ontology_only_atoms_join_the_vocabulary(sample):
    kb = sample("loops")
    assert k_atoms(kb) == {"a", "d", "e", "f"}
    assert dl_atoms(kb) == {"a", "b", "c", "d", "e", "f"}
    assert kb.vocab == set("abcdef")


def test_disjunctive_heads_and_constraints_free_facts():
    kb = parse_kb("a ; d.\nb.\n")
    assert kb.rules[0].head == {"a", "d"}
    assert str(kb.rules[0]) == "a ; d."
    assert kb.rules[1].body_holds(frozenset())


def test_empty_input():
    kb = parse_kb("% nothing here\n")
    assert kb.rules == () and not kb.ontology.clauses and not kb.vocab


def test_formula_operators_compile_to_clauses():
    kb = parse_kb("#ontology\n(a <-> b) & ~c.\n#end\n")
    assert kb.ontology.clauses == {
        frozenset([("a", False), ("b", True)]),
        frozenset([("b", False), ("a", True)]),
        frozenset([("c", False)]),
    }


def test_implication_is_right_associative():
    kb = parse_kb("#ontology\na -> b -> c.\n#end\n")
    assert kb.ontology.clauses == {frozenset([("a", False), ("b", False), ("c", True)])}


def test_tautologies_are_dropped_with_a_warning(caplog):
    with caplog.at_level(logging.WARNING):
        kb = parse_kb("#ontology\na | ~a.\nb.\n#end\n")
    assert kb.ontology.clauses == {frozenset([("b", True)])}
    assert "tautological" in caplog.text


@pytest.mark.parametrize(
    "text, line, column",
    [
        ("a :- b\n", 2, 1),
        ("a :- .", 1, 6),
        ("a.\n  b :- $c.", 2, 8),
        ("#ontology\na -> .\n#end", 2, 6),
        ("#ontology\na.\n", 3, 1),
        ("#rules\n", 1, 1),
        ("#ontology\na.\n#end\nb.", 4, 1),
        (f"{BOT}.", 1, 1),
        ("a :- not.", 1, 9),
    ],
)
def test_parse_errors_carry_positions(text, line, column):
    with pytest.raises(ParseError) as info:
        parse_kb(text)
    assert (info.value.line, info.value.column) == (line, column)


def test_clause_blowup_is_reported():
    pairs = " | ".join(f"(x{i} & y{i})" for i in range(13))
    with pytest.raises(ParseError, match="clauses"):
        parse_kb(f"#ontology\n{pairs}.\n#end\n")


def test_reserved_atom_rejected_programmatically():
    with pytest.raises(ValueError):
        KnowledgeBase.from_parts([Rule(frozenset([BOT]))])


def test_rule_requires_head():
    with pytest.raises(ValueError):
        Rule(frozenset())


def test_atom_lists():
    assert parse_atom_list("highBP(p), cand(p)") == {"highBP(p)", "cand(p)"}
    assert parse_atom_list("{a, b}") == {"a", "b"}
    assert parse_atom_list("{}") == frozenset()
    assert parse_atom_list("") == frozenset()
    assert parse_atom_list("edge(x,y)") == {"edge(x,y)"}
    with pytest.raises(ParseError):
        parse_atom_list("a b")


def test_formatting_and_subsets():
    assert format_atoms(["b", "a"]) == "{a, b}"
    assert format_atoms([]) == "{}"
    assert [sorted(s) for s in iter_subsets("ba")] == [[], ["a"], ["b"], ["a", "b"]]


def test_serialize_round_trip_on_samples(sample):
    for name in ("bp", "loops", "entail", "odd", "choice", "selfloop", "empty"):
        kb = sample(name)
        assert parse_kb(serialize_kb(kb)) == kb


atom_names = st.sampled_from(["a", "b", "c", "p(x)", "q(x,y)", "r_1", "s'"])


@st.composite
def knowledge_bases(draw):
    rules = []
    for _ in range(draw(st.integers(0, 5))):
        head = draw(st.frozensets(atom_names, min_size=1, max_size=3))
        pos = draw(st.frozensets(atom_names, max_size=3))
        neg = draw(st.frozensets(atom_names, max_size=3))
        rules.append(Rule(head, pos, neg))
    clauses = []
    for _ in range(draw(st.integers(0, 4))):
        atoms = draw(st.lists(atom_names, min_size=1, max_size=3, unique=True))
        clauses.append([(a, draw(st.booleans())) for a in atoms])
    return KnowledgeBase.from_parts(rules, clauses)


@settings(max_examples=200, deadline=None)
@given(knowledge_bases())
def test_serialize_parse_round_trip(kb):
    assert parse_kb(serialize_kb(kb)) == kb


formulas = st.recursive(
    st.sampled_from("abcd").map(Var),
    lambda sub: st.one_of(
        sub.map(Not),
        st.lists(sub, min_size=2, max_size=3).map(conj),
        st.lists(sub, min_size=2, max_size=3).map(disj),
        st.tuples(sub, sub).map(lambda t: Implies(*t)),
        st.tuples(sub, sub).map(lambda t: Iff(*t)),
    ),
    max_leaves=8,
)


@settings(max_examples=300, deadline=None)
@given(formulas)
def test_clausal_form_is_equivalent(f):
    clauses, _ = to_clauses(f)
    for world in iter_subsets("abcd"):
        by_clauses = all(any((a in world) == pos for a, pos in c) for c in clauses)
        assert by_clauses == f.holds(world)
