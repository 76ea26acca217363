"""Session-scoped dialogue service: the full loop from scene ingestion
through dialogue turns to rule induction and application, exposed both as a
plain Python API (used by the CLI) and as an HTTP app."""
from __future__ import annotations

import threading
import uuid
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from fastapi import FastAPI, HTTPException
from fastapi.staticfiles import StaticFiles
from pydantic import BaseModel

from . import grounder, induction, nlu, perception, reasoner
from .grounder import EmbeddingTable, GroundingError, ground
from .induction import InductionError, InductionParams, RuleSet, render_rules
from .kb import KnowledgeBase, Provenance
from .nlu import NluError, UtteranceParser


def load_templates(path: str | None = None) -> dict[str, str]:
    if path:
        text = open(path, encoding="utf-8").read()
    else:
        text = resources.files("scenerules.data").joinpath(
            "templates.txt").read_text(encoding="utf-8")
    templates = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition(":")
        templates[key.strip()] = value.strip()
    return templates


def _location_phrase(value: str) -> str:
    # on_table -> "on the table"
    parts = value.split("_")
    if len(parts) >= 2:
        return f"{parts[0]} the {' '.join(parts[1:])}"
    return value


@dataclass
class Session:
    id: str
    kb: KnowledgeBase = field(default_factory=KnowledgeBase)
    last_grounded: str | None = None
    rulesets: dict[tuple[str, str], RuleSet] = field(default_factory=dict)
    transcript: list[tuple[str, str]] = field(default_factory=list)
    candidates: dict[str, list] = field(default_factory=dict)
    params: InductionParams = field(default_factory=InductionParams)
    lock: threading.Lock = field(default_factory=threading.Lock)


class DialogueEngine:
    """Owns the NLU parser, embedding table, and reply templates; routes
    dialogue turns and wraps induction/application for a session."""

    def __init__(self, parser: UtteranceParser | None = None,
                 table: EmbeddingTable | None = None,
                 templates: dict[str, str] | None = None):
        self.parser = parser or UtteranceParser()
        self.table = table or grounder.bundled_embeddings()
        self.templates = templates or load_templates()
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()

    # -- session management ------------------------------------------------

    def create_session(self) -> Session:
        session = Session(id=uuid.uuid4().hex[:12])
        with self._lock:
            self._sessions[session.id] = session
        return session

    def get_session(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise KeyError(f"unknown session {session_id!r}") from None

    # -- scene -------------------------------------------------------------

    def ingest_scene(self, session: Session, frame: perception.SceneFrame,
                     threshold: float = 0.5) -> list[str]:
        with session.lock:
            pairs = perception.ingest_scene(frame, session.kb, threshold)
            for eid, det in pairs:
                session.candidates[eid] = list(det.candidates)
            return [eid for eid, _ in pairs]

    # -- dialogue ----------------------------------------------------------

    def handle_utterance(self, session: Session, text: str):
        """Route one turn; returns (reply, effect) and appends exactly one
        human and one robot transcript entry."""
        if not text or not text.strip():
            raise NluError("empty utterance")
        with session.lock:
            reply, effect = self._route(session, text)
            session.transcript.append(("human", text))
            session.transcript.append(("robot", reply))
            return reply, effect

    def _route(self, session: Session, text: str):
        act = self.parser.classify(text)
        effect: dict = {"act": act.kind}

        if act.kind == "greeting":
            return self.templates["greeting"], effect

        if act.kind == "reference":
            try:
                ref = self.parser.parse_reference(text)
                result = ground(ref, session.kb, self.table)
            except (NluError, GroundingError) as exc:
                effect["error"] = str(exc)
                return self.templates["ungroundable"], effect
            session.last_grounded = result.entity
            effect["grounded"] = result.entity
            effect["score"] = result.score
            symbols = " ".join(s.replace("_", " ") for s in ref.symbols)
            if ref.location:
                session.kb.revise_attribute(result.entity, "location",
                                            ref.location,
                                            Provenance("dialog", 1.0))
                effect["revised"] = {"attr": "location", "value": ref.location}
                reply = self.templates["reference"].format(
                    symbols=symbols, location=_location_phrase(ref.location))
            else:
                reply = self.templates["reference_nolocation"].format(
                    symbols=symbols)
            return reply, effect

        if act.kind == "attribute_assignment":
            if session.last_grounded is None:
                return self.templates["need_reference"], effect
            try:
                statement = self.parser.parse_assignment(text)
            except NluError as exc:
                effect["error"] = str(exc)
                return self.templates["unknown"], effect
            outcome = session.kb.revise_attribute(
                session.last_grounded, statement.attribute, statement.value,
                Provenance("dialog", 1.0))
            effect["revised"] = {"entity": session.last_grounded,
                                 "attr": statement.attribute,
                                 "value": statement.value,
                                 "outcome": outcome}
            template = self.templates.get(statement.attribute,
                                          self.templates["assignment"])
            reply = template.format(value=statement.value.replace("_", " "),
                                    attr=statement.attribute)
            return reply, effect

        if act.kind == "rule_query":
            try:
                attr, value = self.parser.parse_rule_query(text)
            except NluError as exc:
                effect["error"] = str(exc)
                return self.templates["unknown"], effect
            try:
                ruleset = self.induce(session, attr, value)
            except InductionError as exc:
                effect["error"] = str(exc)
                return self.templates["rule_query_failed"].format(
                    attr=attr, value=value), effect
            answer = reasoner.answer_query(session.kb, ruleset, (attr, value))
            effect["query"] = {"attr": attr, "value": value}
            effect["rules"] = render_rules(ruleset).splitlines()
            effect["answer"] = answer
            reply = self.templates["rule_query"].format(
                rules=" ".join(effect["rules"]) or "(no rule)",
                direct=", ".join(answer["direct"]) or "none",
                inferred=", ".join(answer["inferred"]) or "none")
            return reply, effect

        return self.templates["unknown"], effect

    # -- induction / application -------------------------------------------

    def induce(self, session: Session, attr: str, value: str) -> RuleSet:
        factbase = induction.translate(session.kb, (attr, value))
        ruleset = induction.induce(factbase, session.params)
        session.rulesets[ruleset.target] = ruleset
        return ruleset

    def apply(self, session: Session, attr: str, value: str):
        from .kb import normalize_value
        key = (attr, normalize_value(value))
        if key not in session.rulesets:
            raise KeyError(f"no ruleset induced for {key}")
        return reasoner.apply_rules(session.kb, session.rulesets[key])


# -- HTTP layer -------------------------------------------------------------

class UtteranceBody(BaseModel):
    text: str


class QueryBody(BaseModel):
    attribute: str
    value: str


class PathBody(BaseModel):
    path: str


def _ruleset_payload(ruleset: RuleSet) -> dict:
    return {
        "target": {"attribute": ruleset.target[0], "value": ruleset.target[1]},
        "columns": ruleset.columns,
        "clauses": [
            {"body": [{"predicate": lit.predicate, "column": lit.column}
                      for lit in clause.body],
             "rendered": induction.render_clause(clause),
             "stats": {"tp": stats.tp, "fp": stats.fp,
                       "m_estimate": stats.m_estimate}}
            for clause, stats in zip(ruleset.clauses, ruleset.stats)],
        "rendered": render_rules(ruleset),
    }


def create_app(engine: DialogueEngine | None = None,
               static_dir: str | None = None) -> FastAPI:
    engine = engine or DialogueEngine()
    app = FastAPI(title="scenerules")
    app.state.engine = engine

    def _session(session_id: str) -> Session:
        try:
            return engine.get_session(session_id)
        except KeyError:
            raise HTTPException(404, f"unknown session {session_id!r}")

    @app.get("/health")
    def health():
        return {"ok": True}

    @app.post("/session")
    def create_session():
        return {"id": engine.create_session().id}

    @app.post("/session/{session_id}/scene")
    def post_scene(session_id: str, body: dict):
        session = _session(session_id)
        try:
            frame = perception.frame_from_dict(body)
            entities = engine.ingest_scene(session, frame)
        except perception.PerceptionError as exc:
            raise HTTPException(400, str(exc))
        return {"entities": entities, "revision": session.kb.revision}

    @app.post("/session/{session_id}/utterance")
    def post_utterance(session_id: str, body: UtteranceBody):
        session = _session(session_id)
        try:
            reply, effect = engine.handle_utterance(session, body.text)
        except NluError as exc:
            raise HTTPException(400, str(exc))
        return {"reply": reply, "effect": effect,
                "revision": session.kb.revision}

    @app.get("/session/{session_id}/kb")
    def get_kb(session_id: str):
        import json
        return json.loads(_session(session_id).kb.to_document())

    @app.post("/session/{session_id}/induce")
    def post_induce(session_id: str, body: QueryBody):
        session = _session(session_id)
        try:
            ruleset = engine.induce(session, body.attribute, body.value)
        except InductionError as exc:
            raise HTTPException(400, str(exc))
        except Exception as exc:
            raise HTTPException(400, str(exc))
        return _ruleset_payload(ruleset)

    @app.get("/session/{session_id}/rules")
    def get_rules(session_id: str):
        session = _session(session_id)
        return {f"{attr}={value}": _ruleset_payload(rs)
                for (attr, value), rs in session.rulesets.items()}

    @app.post("/session/{session_id}/apply")
    def post_apply(session_id: str, body: QueryBody):
        session = _session(session_id)
        try:
            records = engine.apply(session, body.attribute, body.value)
        except KeyError as exc:
            raise HTTPException(400, str(exc))
        return {"records": [{"entity": r.entity, "attribute": r.attribute,
                             "value": r.value,
                             "rule": induction.render_clause(r.rule),
                             "revision": r.fired_at_revision}
                            for r in records],
                "revision": session.kb.revision}

    @app.post("/session/{session_id}/save")
    def post_save(session_id: str, body: PathBody):
        _session(session_id).kb.save(body.path)
        return {"ok": True, "path": body.path}

    @app.post("/session/{session_id}/load")
    def post_load(session_id: str, body: PathBody):
        session = _session(session_id)
        session.kb = KnowledgeBase.load(body.path)
        session.last_grounded = None
        return {"ok": True, "revision": session.kb.revision}

    if static_dir is None:
        try:
            candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
            static_dir = str(candidate) if candidate.is_dir() else None
        except IndexError:
            static_dir = None
    if static_dir:
        app.mount("/ui", StaticFiles(directory=static_dir, html=True),
                  name="ui")
    return app


app = create_app()
