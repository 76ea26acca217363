"""Apply induced rules: enrich missing attributes, answer queries, and
re-rank uncertain category candidates."""
from __future__ import annotations

from dataclasses import dataclass

from .kb import Entity, KnowledgeBase, Provenance
from .induction import Clause, RuleSet, render_clause
from .perception import CategoryCandidate


@dataclass(frozen=True)
class InferenceRecord:
    entity: str
    attribute: str
    value: str
    rule: Clause
    fired_at_revision: int

    def render(self) -> str:
        return (f"rev={self.fired_at_revision} entity={self.entity} "
                f"attr={self.attribute} value={self.value} "
                f'rule="{render_clause(self.rule)}"')


def clause_satisfied(clause: Clause, entity: Entity,
                     columns: list[str]) -> bool:
    """True iff every body literal matches the entity's assignment on that
    column's attribute.  Missing attributes satisfy no literal, so only an
    empty body covers an entity that lacks a tested column."""
    for lit in clause.body:
        if entity.value(columns[lit.column]) != lit.predicate:
            return False
    return True


def _would_infer(kb: KnowledgeBase, ruleset: RuleSet) -> list[tuple[str, Clause]]:
    qattr, _ = ruleset.target
    hits = []
    for entity in kb.entities():
        if qattr in entity.assignments:
            continue
        for clause in ruleset.clauses:
            if clause_satisfied(clause, entity, ruleset.columns):
                hits.append((entity.id, clause))
                break
    return hits


def apply_rules(kb: KnowledgeBase, ruleset: RuleSet,
                query: tuple[str, str] | None = None) -> list[InferenceRecord]:
    """One forward-chaining pass: fill the query attribute on entities whose
    assignments satisfy some clause body.  Idempotent, never overwrites."""
    qattr, qvalue = query or ruleset.target
    records = []
    for entity_id, clause in _would_infer(kb, ruleset):
        prov = Provenance("inferred", 1.0, rule=render_clause(clause))
        outcome = kb.revise_attribute(entity_id, qattr, qvalue, prov)
        if outcome != "rejected":
            records.append(InferenceRecord(entity_id, qattr, qvalue, clause,
                                           kb.revision))
    return records


def answer_query(kb: KnowledgeBase, ruleset: RuleSet | None,
                 query: tuple[str, str]) -> dict[str, list[str]]:
    """Direct matches plus entities that would gain the value under
    apply_rules; the KB itself is left untouched."""
    qattr, qvalue = query
    direct = kb.query_entities(qattr, qvalue)
    inferred: list[str] = []
    if ruleset is not None and ruleset.target == (qattr, qvalue):
        inferred = [eid for eid, _ in _would_infer(kb, ruleset)]
    return {"direct": direct, "inferred": inferred}


def disambiguate_category(kb: KnowledgeBase, entity_id: str,
                          candidates: list[CategoryCandidate],
                          rules: dict[str, RuleSet],
                          tau: float = 0.5) -> str:
    """Prefer the highest-confidence rule-supported candidate whose
    confidence clears tau times the top confidence; fall back to the top
    candidate.  Empty bodies support every category vacuously and do not
    count.  The choice is written back with vision provenance."""
    if not candidates:
        raise ValueError("no candidates to disambiguate")
    if not 0.0 < tau <= 1.0:
        raise ValueError(f"tau {tau} outside (0,1]")
    ordered = sorted(candidates, key=lambda c: (-c.confidence, c.category))
    c_max = ordered[0].confidence
    entity = kb.get_entity(entity_id)
    chosen = ordered[0]
    for cand in ordered:
        if cand.confidence < tau * c_max:
            continue
        ruleset = rules.get(cand.category)
        if ruleset is None:
            continue
        supported = any(
            clause.body and clause_satisfied(clause, entity, ruleset.columns)
            for clause in ruleset.clauses
            # the category column is the one under dispute: only non-category
            # evidence may support a candidate
            if all(ruleset.columns[lit.column] != "category"
                   for lit in clause.body))
        if supported:
            chosen = cand
            break
    kb.revise_attribute(entity_id, "category", chosen.category,
                        Provenance("vision", chosen.confidence))
    return chosen.category


def append_inference_log(records: list[InferenceRecord], path: str) -> None:
    with open(path, "a", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.render() + "\n")
