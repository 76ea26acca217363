import itertools
import random
from pathlib import Path

import pytest

from scenerules.induction import Clause, FactBase, Literal
from scenerules.kb import ATTRIBUTES, KnowledgeBase, Provenance

DATA = Path(__file__).resolve().parents[1] / "src" / "scenerules" / "data"
SCENES = DATA / "scenes"
SCRIPTS = Path(__file__).resolve().parents[1] / "scripts"

SHOWCASE_UTTERANCES = [
    "Hello.",
    "the white mug on the table",
    "i guess it is for mary",
    "its label is kitchenware",
    "the scissor on the table",
    "also it is for mary",
    "name it kitchenware",
    "the tennis ball on the table",
    "the label is toy",
    "it belongs to toby",
    "the car on the table",
    "it also belongs to toby",
    "save the label is toy",
]


def build_fruit_kb() -> KnowledgeBase:
    """Four fruits, two owners; the classic two-column induction instance."""
    kb = KnowledgeBase()
    rows = [
        ("apple", "red", "harry"),
        ("pear", "green", "harry"),
        ("pear", "yellow", "hermoine"),
        ("apple", "yellow", "hermoine"),
    ]
    for category, color, owner in rows:
        kb.create_entity({
            "category": (category, Provenance("vision", 0.95)),
            "color": (color, Provenance("vision", 1.0)),
            "owner": (owner, Provenance("dialog", 1.0)),
        })
    return kb


@pytest.fixture
def fruit_kb():
    return build_fruit_kb()


# -- independent clause-search oracle ---------------------------------------

def enumerate_clauses(factbase: FactBase, max_body_len: int = 3):
    """Every clause (as a literal tuple) up to the body-length cap."""
    literals = [Literal(pred, col)
                for pred, col in sorted(factbase.predicate_column.items())]
    for size in range(0, max_body_len + 1):
        for combo in itertools.combinations(literals, size):
            yield Clause(factbase.target_name, len(factbase.columns),
                         tuple(combo))


def clause_masses(clause: Clause, factbase: FactBase):
    from scenerules.induction import covers
    tp = fp = 0.0
    for row, w in factbase.examples:
        if covers(clause, row, factbase):
            tp += w
            fp += 1.0 - w
    return tp, fp


def find_separating_clause(factbase: FactBase, max_body_len: int = 3):
    """Brute force: a clause covering all positive mass with zero FP mass,
    or None."""
    total_pos = factbase.positive_mass()
    for clause in enumerate_clauses(factbase, max_body_len):
        tp, fp = clause_masses(clause, factbase)
        if fp <= 1e-12 and tp >= total_pos - 1e-12:
            return clause
    return None


# -- random KB generator -----------------------------------------------------

def random_kb(rng: random.Random, max_entities: int = 8,
              max_attributes: int = 4, max_values: int = 3):
    n_attrs = rng.randint(2, max_attributes)
    attrs = rng.sample(list(ATTRIBUTES), n_attrs)
    pools = {a: [f"{a[:2]}v{i}" for i in range(1, rng.randint(2, max_values) + 1)]
             for a in attrs}
    qattr = rng.choice(attrs)
    kb = KnowledgeBase()
    for _ in range(rng.randint(1, max_entities)):
        initial = {}
        for a in attrs:
            if rng.random() < 0.8:  # any attribute may be absent
                initial[a] = (rng.choice(pools[a]),
                              Provenance(rng.choice(["vision", "dialog"]), 1.0))
        kb.create_entity(initial)
    qvalue = rng.choice(pools[qattr])
    # guarantee at least one entity carries the query value
    first = kb.entities()[0]
    first.assignments[qattr] = (qvalue, Provenance("dialog", 1.0))
    return kb, (qattr, qvalue)
