"""Entity-Attribute-Value knowledge base shared by every other module.

Entities are scene objects; each carries at most one value per attribute,
tagged with the provenance of the assignment (vision, dialog, inferred) and
a confidence.  Mutations are serialized behind a single lock; readers can
take a consistent snapshot.
"""
from __future__ import annotations

import copy
import json
import re
import threading
from dataclasses import dataclass, field

# Canonical attribute set and total order (alphabetical).  The order is load
# bearing: rule induction derives its argument columns from it.
ATTRIBUTES = (
    "category",
    "color",
    "functionality",
    "label",
    "location",
    "owner",
    "restriction",
    "size",
    "weight",
)

VISUAL_ATTRIBUTES = ("category", "color")
VERBAL_ATTRIBUTES = (
    "functionality",
    "label",
    "location",
    "owner",
    "restriction",
    "size",
    "weight",
)

SOURCES = ("vision", "dialog", "inferred")

# dialog > vision > inferred.  Dialog overwrites anything, vision overwrites
# vision/inferred, inferred only fills absent slots.
_PRECEDENCE = {"dialog": 2, "vision": 1, "inferred": 0}

_WS = re.compile(r"\s+")


class KBError(Exception):
    pass


class NoSuchEntityError(KBError):
    pass


class DocumentError(KBError):
    """Malformed KB snapshot document (carries line/position when known)."""


def check_attribute(name: str) -> str:
    if name not in ATTRIBUTES:
        raise KBError(f"unknown attribute {name!r}")
    return name


def normalize_value(value: str) -> str:
    """Lowercase, trim, and join internal whitespace with underscores.

    Idempotent: normalize(normalize(v)) == normalize(v).
    """
    return _WS.sub("_", value.strip().lower())


@dataclass(frozen=True)
class Provenance:
    source: str
    confidence: float = 1.0
    rule: str | None = None  # rendered clause, for inferred assignments

    def __post_init__(self):
        if self.source not in SOURCES:
            raise KBError(f"unknown provenance source {self.source!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise KBError(f"confidence {self.confidence} outside [0,1]")


@dataclass
class Entity:
    id: str
    # attribute -> (value, provenance); at most one value per attribute
    assignments: dict[str, tuple[str, Provenance]] = field(default_factory=dict)

    def value(self, attr: str) -> str | None:
        pair = self.assignments.get(attr)
        return pair[0] if pair else None


class KnowledgeBase:
    """Single-writer, multi-reader EAV store with deterministic iteration."""

    def __init__(self):
        self._entities: dict[str, Entity] = {}
        self.revision = 0
        self._counter = 1
        self._lock = threading.RLock()

    # -- creation / lookup ------------------------------------------------

    def create_entity(self, initial=None) -> str:
        with self._lock:
            eid = f"obj{self._counter}"
            self._counter += 1
            entity = Entity(eid)
            for attr, (value, prov) in (initial or {}).items():
                check_attribute(attr)
                entity.assignments[attr] = (normalize_value(value), prov)
            self._entities[eid] = entity
            self.revision += 1
            return eid

    def get_entity(self, entity_id: str) -> Entity:
        try:
            return self._entities[entity_id]
        except KeyError:
            raise NoSuchEntityError(f"no such entity: {entity_id}") from None

    def entities(self) -> list[Entity]:
        return list(self._entities.values())

    def __len__(self):
        return len(self._entities)

    # -- revision ---------------------------------------------------------

    def revise_attribute(self, entity_id: str, attr: str, value: str,
                         prov: Provenance) -> str:
        """Write an assignment subject to provenance precedence.

        Returns "created", "overwritten" or "rejected".
        """
        check_attribute(attr)
        value = normalize_value(value)
        with self._lock:
            entity = self.get_entity(entity_id)
            existing = entity.assignments.get(attr)
            if existing is None:
                entity.assignments[attr] = (value, prov)
                self.revision += 1
                return "created"
            if prov.source == "inferred":
                return "rejected"
            if prov.source == "vision" and existing[1].source == "dialog":
                return "rejected"
            entity.assignments[attr] = (value, prov)
            self.revision += 1
            return "overwritten"

    # -- query ------------------------------------------------------------

    def query_entities(self, attr: str, value: str) -> list[str]:
        check_attribute(attr)
        value = normalize_value(value)
        return [e.id for e in self._entities.values()
                if e.value(attr) == value]

    # -- snapshot / persistence -------------------------------------------

    def __deepcopy__(self, memo) -> "KnowledgeBase":
        # the lock is per-instance state, not data: the copy gets a fresh one
        clone = KnowledgeBase()
        clone._entities = copy.deepcopy(self._entities, memo)
        clone.revision = self.revision
        clone._counter = self._counter
        return clone

    def snapshot(self) -> "KnowledgeBase":
        with self._lock:
            return copy.deepcopy(self)

    def to_document(self) -> str:
        records = []
        for entity in self._entities.values():
            attrs = {}
            for attr, (value, prov) in entity.assignments.items():
                cell = {"v": value, "src": prov.source, "conf": prov.confidence}
                if prov.rule is not None:
                    cell["rule"] = prov.rule
                attrs[attr] = cell
            records.append({"id": entity.id, "attrs": attrs})
        return json.dumps({"revision": self.revision, "entities": records},
                          indent=1)

    def save(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write(self.to_document())
            fh.write("\n")

    @classmethod
    def from_document(cls, text: str) -> "KnowledgeBase":
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DocumentError(
                f"parse error at line {exc.lineno}, column {exc.colno}: "
                f"{exc.msg}") from exc
        if not isinstance(doc, dict) or "entities" not in doc:
            raise DocumentError("parse error: missing 'entities' field")
        kb = cls()
        for i, record in enumerate(doc["entities"]):
            try:
                eid = record["id"]
                attrs = record.get("attrs", {})
            except (TypeError, KeyError):
                raise DocumentError(f"parse error: entity record {i} malformed")
            if eid in kb._entities:
                raise DocumentError(
                    f"parse error: duplicate entity id {eid!r} (record {i})")
            entity = Entity(eid)
            for attr, cell in attrs.items():
                check_attribute(attr)
                try:
                    prov = Provenance(cell["src"], cell["conf"],
                                      cell.get("rule"))
                    entity.assignments[attr] = (normalize_value(cell["v"]),
                                                prov)
                except (TypeError, KeyError) as exc:
                    raise DocumentError(
                        f"parse error: entity {eid!r} attribute {attr!r}: "
                        f"{exc}") from exc
            kb._entities[eid] = entity
            suffix = re.fullmatch(r"obj(\d+)", eid)
            if suffix:
                kb._counter = max(kb._counter, int(suffix.group(1)) + 1)
        kb.revision = int(doc.get("revision", 0))
        return kb

    @classmethod
    def load(cls, path: str) -> "KnowledgeBase":
        with open(path, encoding="utf-8") as fh:
            return cls.from_document(fh.read())

    def __eq__(self, other):
        if not isinstance(other, KnowledgeBase):
            return NotImplemented
        return (self.revision == other.revision
                and list(self._entities) == list(other._entities)
                and all(self._entities[k].assignments ==
                        other._entities[k].assignments
                        for k in self._entities))
