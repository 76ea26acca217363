import pytest
from hypothesis import given, strategies as st

from scenerules.kb import (ATTRIBUTES, DocumentError, KnowledgeBase,
                           NoSuchEntityError, Provenance, normalize_value)

DIALOG = Provenance("dialog", 1.0)
VISION = Provenance("vision", 0.9)
INFERRED = Provenance("inferred", 1.0, rule="x :- true.")


def test_normalize_idempotent_examples():
    assert normalize_value("Not Working") == "not_working"
    assert normalize_value("  on  the table ") == "on_the_table"
    assert normalize_value(normalize_value("Not Working")) == "not_working"


@given(st.text(min_size=0, max_size=30))
def test_normalize_idempotent_property(s):
    once = normalize_value(s)
    assert normalize_value(once) == once


def test_create_entity_basic():
    kb = KnowledgeBase()
    eid = kb.create_entity({"category": ("apple", VISION),
                            "color": ("red", VISION),
                            "owner": ("harry", DIALOG)})
    assert eid == "obj1"
    entity = kb.get_entity(eid)
    assert entity.value("category") == "apple"
    assert entity.value("owner") == "harry"


def test_create_entity_empty_and_distinct_ids():
    kb = KnowledgeBase()
    a = kb.create_entity({})
    b = kb.create_entity({"color": ("red", VISION)})
    c = kb.create_entity({"color": ("red", VISION)})
    assert len({a, b, c}) == 3
    assert kb.get_entity(a).assignments == {}


def test_revision_strictly_increases():
    kb = KnowledgeBase()
    r0 = kb.revision
    eid = kb.create_entity({})
    r1 = kb.revision
    kb.revise_attribute(eid, "owner", "mary", DIALOG)
    assert r0 < r1 < kb.revision


def test_revise_created_overwritten_rejected():
    kb = KnowledgeBase()
    eid = kb.create_entity({})
    assert kb.revise_attribute(eid, "owner", "mary", DIALOG) == "created"
    assert kb.revise_attribute(eid, "location", "on_table",
                               INFERRED) == "created"
    # inferred never overwrites dialog
    assert kb.revise_attribute(eid, "owner", "toby", INFERRED) == "rejected"
    assert kb.get_entity(eid).value("owner") == "mary"
    # vision never overwrites dialog
    assert kb.revise_attribute(eid, "owner", "toby", VISION) == "rejected"
    # dialog overwrites anything, vision overwrites vision/inferred
    assert kb.revise_attribute(eid, "location", "in_box",
                               VISION) == "overwritten"
    assert kb.revise_attribute(eid, "location", "on_shelf",
                               DIALOG) == "overwritten"


def test_revise_unknown_entity():
    kb = KnowledgeBase()
    with pytest.raises(NoSuchEntityError, match="no such entity"):
        kb.revise_attribute("obj99", "owner", "mary", DIALOG)


def test_revise_rejected_keeps_revision():
    kb = KnowledgeBase()
    eid = kb.create_entity({"owner": ("mary", DIALOG)})
    before = kb.revision
    kb.revise_attribute(eid, "owner", "toby", INFERRED)
    assert kb.revision == before


def test_query_entities(fruit_kb):
    assert fruit_kb.query_entities("owner", "hermoine") == ["obj3", "obj4"]
    assert fruit_kb.query_entities("owner", "nobody") == []
    assert fruit_kb.query_entities("color", "yellow") == ["obj3", "obj4"]


def test_revise_then_query_coherence():
    kb = KnowledgeBase()
    eid = kb.create_entity({})
    kb.revise_attribute(eid, "owner", "mary", DIALOG)
    assert eid in kb.query_entities("owner", "mary")


def test_save_load_round_trip(fruit_kb, tmp_path):
    path = tmp_path / "kb.json"
    fruit_kb.save(str(path))
    loaded = KnowledgeBase.load(str(path))
    assert loaded == fruit_kb


def test_empty_round_trip():
    kb = KnowledgeBase()
    assert KnowledgeBase.from_document(kb.to_document()) == kb


def test_duplicate_id_rejected():
    doc = ('{"revision": 2, "entities": ['
           '{"id": "obj1", "attrs": {}}, {"id": "obj1", "attrs": {}}]}')
    with pytest.raises(DocumentError, match="duplicate entity id"):
        KnowledgeBase.from_document(doc)


def test_malformed_document_reports_position():
    with pytest.raises(DocumentError, match="line"):
        KnowledgeBase.from_document('{"revision": 1, "entities": [')


def test_ids_not_reused_after_load(tmp_path):
    kb = KnowledgeBase()
    kb.create_entity({})
    kb.create_entity({})
    path = tmp_path / "kb.json"
    kb.save(str(path))
    loaded = KnowledgeBase.load(str(path))
    assert loaded.create_entity({}) == "obj3"


# -- property tests ----------------------------------------------------------

_attr = st.sampled_from(ATTRIBUTES)
_value = st.from_regex(r"[a-z][a-z0-9_]{0,8}", fullmatch=True)
_prov = st.builds(Provenance,
                  st.sampled_from(["vision", "dialog", "inferred"]),
                  st.floats(0.0, 1.0, allow_nan=False))
_assignment = st.tuples(_attr, _value, _prov)


@given(st.lists(st.lists(_assignment, max_size=5), max_size=5))
def test_round_trip_random_kbs(entity_specs):
    kb = KnowledgeBase()
    for spec in entity_specs:
        eid = kb.create_entity({})
        for attr, value, prov in spec:
            kb.revise_attribute(eid, attr, value, prov)
    assert KnowledgeBase.from_document(kb.to_document()) == kb


@given(st.lists(_assignment, min_size=1, max_size=12))
def test_precedence_lattice(writes):
    """The surviving assignment has maximal provenance among the writes of
    that attribute, and is the last write within that level."""
    kb = KnowledgeBase()
    eid = kb.create_entity({})
    rank = {"dialog": 2, "vision": 1, "inferred": 0}
    for attr, value, prov in writes:
        kb.revise_attribute(eid, attr, value, prov)
    entity = kb.get_entity(eid)
    per_attr = {}
    for attr, value, prov in writes:
        per_attr.setdefault(attr, []).append((value, prov))
    for attr, history in per_attr.items():
        best = max(rank[p.source] for _, p in history)
        value, prov = entity.assignments[attr]
        assert rank[prov.source] == best
        survivors = [v for v, p in history if rank[p.source] == best]
        if best > 0:
            assert value == normalize_value(survivors[-1])
        else:  # inferred only fills: first write wins
            assert value == normalize_value(survivors[0])
        assert len([a for a in entity.assignments if a == attr]) == 1
