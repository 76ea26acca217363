"""Referential expression grounding.

Scores each KB entity by the mean, over dialogue descriptors, of the
minimum semantic distance to any of the entity's attribute values, and
returns the entity with the lowest score.  Distances come from a pluggable
word-vector table with a string-similarity fallback.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from importlib import resources

from .kb import KnowledgeBase, normalize_value
from .nlu import ReferentialExpression


class GroundingError(Exception):
    pass


class EmbeddingError(Exception):
    pass


@dataclass
class EmbeddingTable:
    dimension: int = 0
    vectors: dict[str, tuple[float, ...]] = field(default_factory=dict)

    def __contains__(self, token: str) -> bool:
        return token in self.vectors


@dataclass
class GroundingResult:
    entity: str
    score: float
    ranking: list[tuple[str, float]]


def load_embeddings(path: str) -> EmbeddingTable:
    """Parse a `token f1 ... fD` file; an optional `COUNT DIM` header and
    duplicate tokens (last wins) are tolerated."""
    table = EmbeddingTable()
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            parts = raw.split()
            if not parts:
                continue
            if (lineno == 1 and len(parts) == 2
                    and all(p.isdigit() for p in parts)):
                continue  # header line
            token, floats = parts[0], parts[1:]
            try:
                vec = tuple(float(f) for f in floats)
            except ValueError as exc:
                raise EmbeddingError(
                    f"{path}:{lineno}: bad float: {exc}") from exc
            if not vec:
                raise EmbeddingError(f"{path}:{lineno}: no vector components")
            if table.dimension == 0:
                table.dimension = len(vec)
            elif len(vec) != table.dimension:
                raise EmbeddingError(
                    f"{path}:{lineno}: dimension {len(vec)} != "
                    f"{table.dimension}")
            table.vectors[normalize_value(token)] = vec
    return table


def bundled_embeddings() -> EmbeddingTable:
    with resources.as_file(resources.files("scenerules.data")
                           .joinpath("toy_embeddings.txt")) as p:
        return load_embeddings(str(p))


def _cosine_distance(a: tuple[float, ...], b: tuple[float, ...]) -> float:
    dot = sum(x * y for x, y in zip(a, b))
    na = math.sqrt(sum(x * x for x in a))
    nb = math.sqrt(sum(y * y for y in b))
    if na == 0.0 or nb == 0.0:
        return 1.0  # zero vectors carry no information
    return 1.0 - dot / (na * nb)


def levenshtein(a: str, b: str) -> int:
    if not a:
        return len(b)
    if not b:
        return len(a)
    prev = list(range(len(b) + 1))
    for i, ca in enumerate(a, start=1):
        cur = [i]
        for j, cb in enumerate(b, start=1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1,
                           prev[j - 1] + (ca != cb)))
        prev = cur
    return prev[-1]


def token_distance(a: str, b: str, table: EmbeddingTable) -> float:
    """Cosine distance when both tokens have vectors, else normalized
    Levenshtein scaled to [0,2] to share the cosine range."""
    if a == b:
        return 0.0
    va, vb = table.vectors.get(a), table.vectors.get(b)
    if va is not None and vb is not None:
        return _cosine_distance(va, vb)
    return 2.0 * levenshtein(a, b) / max(len(a), len(b))


def ground(ref: ReferentialExpression, kb: KnowledgeBase,
           table: EmbeddingTable) -> GroundingResult:
    """Eq.-style best-match grounding: per descriptor take the closest of
    the entity's attribute values, then average over descriptors."""
    if not ref.symbols:
        raise GroundingError("referential expression has no symbols")
    candidates = []
    for entity in kb.entities():
        if ref.location is not None:
            loc = entity.value("location")
            if loc is not None and loc != ref.location:
                continue  # contradicting location excludes the entity
        candidates.append(entity)
    if not candidates:
        raise GroundingError("nothing to ground against")
    symbols = [normalize_value(s) for s in ref.symbols]
    ranking = []
    for entity in candidates:
        values = [v for v, _ in entity.assignments.values()]
        if values:
            score = sum(min(token_distance(s, v, table) for v in values)
                        for s in symbols) / len(symbols)
        else:
            score = 2.0  # attribute-less entity: maximal distance
        ranking.append((entity.id, score))
    ranking.sort(key=lambda pair: pair[1])  # stable: insertion order on ties
    best_id, best_score = ranking[0]
    return GroundingResult(best_id, best_score, ranking)
