import random

import pytest

from scenerules.induction import (Clause, InductionError, InductionParams,
                                  Literal, covers, induce, m_estimate,
                                  parse_problem, render_clause,
                                  render_problem, render_rules, translate)
from scenerules.kb import KnowledgeBase, Provenance
from conftest import (build_fruit_kb, clause_masses, find_separating_clause,
                      random_kb)

DIALOG = Provenance("dialog", 1.0)
VISION = Provenance("vision", 0.9)


def make_kb(rows):
    kb = KnowledgeBase()
    for row in rows:
        kb.create_entity({attr: (value, DIALOG) for attr, value in row.items()})
    return kb


# -- translate ---------------------------------------------------------------

def test_translate_fruit_kb(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    assert fb.columns == ["category", "color"]
    assert fb.target_name == "hermoine"
    weights = [w for _, w in fb.examples]
    assert weights == [0.0, 0.0, 1.0, 1.0]
    # value extensions are singletons keyed by value name
    assert {p: len(s) for p, s in fb.value_facts.items()} == {
        "red": 1, "green": 1, "yellow": 1, "apple": 1, "pear": 1}
    # positives share the yellow symbol in the color column
    (yellow_sym,) = fb.value_facts["yellow"]
    assert fb.examples[2][0][1] == yellow_sym
    assert fb.examples[3][0][1] == yellow_sym
    # negatives: (apple,red) and (pear,green)
    (apple,) = fb.value_facts["apple"]
    (red,) = fb.value_facts["red"]
    assert fb.examples[0][0] == (apple, red)


def test_translate_symbol_bijection(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    seen = {}
    for row, _ in fb.examples:
        for col, sym in enumerate(row):
            if sym in fb.symbol_value:
                value = fb.symbol_value[sym]
                key = (fb.columns[col], value)
                assert seen.setdefault(key, sym) == sym


def test_translate_excludes_entities_without_query_attr():
    kb = make_kb([
        {"category": "cup", "color": "white", "location": "on_table"},
        {"category": "cup", "color": "blue"},  # lacks location
    ])
    fb = translate(kb, ("location", "on_table"))
    assert len(fb.examples) == 1
    assert fb.examples[0][1] == 1.0


def test_translate_all_positive():
    kb = make_kb([{"category": "mug", "color": "red"},
                  {"category": "mug", "color": "blue"}])
    fb = translate(kb, ("category", "mug"))
    assert [w for _, w in fb.examples] == [1.0, 1.0]
    assert fb.columns == ["color"]


def test_translate_empty_example_set():
    kb = make_kb([{"category": "cup"}])
    with pytest.raises(InductionError, match="empty example set"):
        translate(kb, ("owner", "mary"))


def test_translate_anonymous_symbols_in_no_fact():
    kb = make_kb([
        {"category": "cup", "color": "white", "owner": "mary"},
        {"category": "ball", "owner": "toby"},  # color missing -> anonymous
    ])
    fb = translate(kb, ("owner", "mary"))
    all_fact_syms = set().union(*fb.value_facts.values())
    anon = [sym for row, _ in fb.examples for sym in row
            if sym not in fb.symbol_value]
    assert anon and all(sym not in all_fact_syms for sym in anon)


def test_translate_excludes_inferred_by_default():
    kb = make_kb([{"category": "cup", "owner": "mary"}])
    kb.create_entity({"category": ("cup", DIALOG)})
    kb.revise_attribute("obj2", "owner", "mary",
                        Provenance("inferred", 1.0, rule="r"))
    fb = translate(kb, ("owner", "mary"))
    assert len(fb.examples) == 1
    fb_inc = translate(kb, ("owner", "mary"), include_inferred=True)
    assert len(fb_inc.examples) == 2


def test_translate_probabilistic_weights():
    kb = KnowledgeBase()
    kb.create_entity({"category": ("mug", Provenance("vision", 0.7)),
                      "color": ("white", Provenance("vision", 1.0))})
    kb.create_entity({"category": ("bowl", Provenance("vision", 0.8)),
                      "color": ("white", Provenance("vision", 1.0))})
    fb = translate(kb, ("category", "mug"), probabilistic=True)
    assert [w for _, w in fb.examples] == [0.7, 0.0]


# -- covers ------------------------------------------------------------------

def test_covers_examples(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    yellow = Clause("hermoine", 2, (Literal("yellow", 1),))
    assert covers(yellow, fb.examples[2][0], fb)  # a yellow positive
    assert not covers(yellow, fb.examples[0][0], fb)  # (apple, red)
    empty = Clause("hermoine", 2)
    assert all(covers(empty, row, fb) for row, _ in fb.examples)


# -- m-estimate --------------------------------------------------------------

def test_m_estimate_derived_values(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    yellow = Clause("hermoine", 2, (Literal("yellow", 1),))
    # (2 + 1*0.5) / (2 + 0 + 1)
    assert m_estimate(yellow, fb, m=1.0, prior=0.5) == pytest.approx(2.5 / 3)
    empty = Clause("hermoine", 2)
    # TP=2, FP=2 -> (2 + 0.5) / (4 + 1)
    assert m_estimate(empty, fb, m=1.0, prior=0.5) == pytest.approx(0.5)
    # a clause covering nothing returns the prior
    nothing = Clause("hermoine", 2, (Literal("yellow", 1), Literal("red", 1)))
    assert m_estimate(nothing, fb, m=1.0, prior=0.5) == pytest.approx(0.5)


def test_m_estimate_converges_to_precision(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    clause = Clause("hermoine", 2, (Literal("apple", 0),))  # 1 pos, 1 neg
    assert m_estimate(clause, fb, m=1e-9, prior=0.5) == pytest.approx(
        0.5, abs=1e-6)


# -- induce: golden examples -------------------------------------------------

def test_induce_fruit_golden(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    rs = induce(fb)
    assert render_rules(rs) == "hermoine(A,B) :- yellow(B).\n"
    assert rs.stats[0].tp == pytest.approx(2.0)
    assert rs.stats[0].fp == pytest.approx(0.0)


def test_induce_all_positive_gives_empty_body():
    kb = make_kb([{"category": "mug", "color": c, "location": "on_table"}
                  for c in ("red", "blue", "green", "yellow")])
    fb = translate(kb, ("location", "on_table"))
    rs = induce(fb)
    assert len(rs.clauses) == 1
    assert rs.clauses[0].body == ()


def test_induce_no_singleton_color_rules():
    """All-distinct colors with mixed categories: no general color rule
    exists, and none may be invented."""
    kb = make_kb([{"category": "mug", "color": "red"},
                  {"category": "mug", "color": "blue"},
                  {"category": "bowl", "color": "green"},
                  {"category": "bowl", "color": "yellow"}])
    fb = translate(kb, ("category", "mug"))
    rs = induce(fb)
    assert rs.clauses == []


def test_induce_deterministic(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    assert render_rules(induce(fb)) == render_rules(induce(fb))


def test_induce_type_safety(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    rs = induce(fb)
    for clause in rs.clauses:
        for lit in clause.body:
            (sym,) = fb.value_facts[lit.predicate]
            assert fb.predicate_column[lit.predicate] == lit.column


# -- induce vs brute-force oracle --------------------------------------------

def _ruleset_coverage(rs, fb):
    tp = fp = 0.0
    for row, w in fb.examples:
        if any(covers(c, row, fb) for c in rs.clauses):
            tp += w
            fp += 1.0 - w
    return tp, fp


def test_oracle_equivalence_small_sample():
    rng = random.Random(20240817)
    checked = 0
    for _ in range(120):
        kb, query = random_kb(rng)
        try:
            fb = translate(kb, query)
        except InductionError:
            continue
        oracle = find_separating_clause(fb, max_body_len=3)
        if oracle is None:
            continue
        checked += 1
        rs = induce(fb)
        tp, fp = _ruleset_coverage(rs, fb)
        assert fp == pytest.approx(0.0), render_rules(rs)
        assert tp == pytest.approx(fb.positive_mass())
    assert checked > 5


# -- rendering / parsing -----------------------------------------------------

def test_render_problem_contains_paper_lines(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    text = render_problem(fb)
    assert "1.0::hermoine(cat1, col3)." in text
    assert "red(col1)." in text
    assert "% target: hermoine/2" in text
    assert "% types: col_0=category, col_1=color" in text
    assert "% modes: input-only" in text


def test_render_clause_forms():
    assert render_clause(Clause("on_table", 4)) == "on_table(A,B,C,D) :- true."
    assert render_clause(Clause("mary", 4, (Literal("kitchenware", 2),))) == \
        "mary(A,B,C,D) :- kitchenware(C)."
    assert render_clause(Clause("t", 0)) == "t :- true."


def test_problem_round_trip(fruit_kb):
    fb = translate(fruit_kb, ("owner", "hermoine"))
    assert parse_problem(render_problem(fb)) == fb


def test_problem_round_trip_random():
    rng = random.Random(7)
    for _ in range(25):
        kb, query = random_kb(rng)
        try:
            fb = translate(kb, query)
        except InductionError:
            continue
        assert parse_problem(render_problem(fb)) == fb
