"""HTTP/JSON API over the dialogue engine for the live annotation UI.

Optimistic concurrency: every dialogue carries a revision token (its total
count of utterances, events, and records, so it is derivable from the
persisted state and survives restarts). Mutations must quote the revision
they were based on; a stale token gets a 409. State is persisted to
canonical JSON with an atomic rename after every acknowledged mutation.
"""

from __future__ import annotations

import os
import threading
from pathlib import Path
from typing import Callable, Dict, List, Optional, Union

from fastapi import FastAPI, Query, Request
from fastapi.exceptions import RequestValidationError
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse, Response
from pydantic import BaseModel, Field

from . import corpusio, heuristics
from .engine import DialogueState, Diagnostic
from .errors import CGError, EngineError, LabelError
from .heuristics import DEFAULT_THRESHOLD, DialogMemory, MemoryEntry
from .model import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    Event,
    EventKind,
    Speaker,
)
from .similarity import LexicalSimilarity, RemoteEmbeddings, SimilarityProvider


class ConflictError(CGError):
    def __init__(self, current: int, given: int):
        super().__init__(f"stale revision: dialogue is at {current}, request based on {given}")
        self.current = current


class UnknownDialogueError(CGError):
    pass


def revision_of(state: DialogueState) -> int:
    return state.num_utterances + len(state.events) + len(state.record_log)


class DialogueStore:
    """Directory-backed store of dialogue states with per-dialogue locking."""

    def __init__(self, data_dir: Union[str, Path]):
        self.data_dir = Path(data_dir)
        self.data_dir.mkdir(parents=True, exist_ok=True)
        self._states: Dict[str, DialogueState] = {}
        self._locks: Dict[str, threading.Lock] = {}
        self._registry = threading.Lock()
        for path in sorted(self.data_dir.glob(f"*{corpusio.CANONICAL_EXT}")):
            state = corpusio.from_json(path.read_bytes())
            self._states[state.id] = state
            self._locks[state.id] = threading.Lock()

    def ids(self) -> List[str]:
        with self._registry:
            return sorted(self._states)

    def get(self, dialogue_id: str) -> DialogueState:
        with self._registry:
            state = self._states.get(dialogue_id)
        if state is None:
            raise UnknownDialogueError(f"unknown dialogue: {dialogue_id}")
        return state

    def create(self, state: DialogueState) -> None:
        with self._registry:
            if state.id in self._states:
                raise ConflictError(revision_of(self._states[state.id]), -1)
            self._states[state.id] = state
            self._locks[state.id] = threading.Lock()
        self._persist(state)

    def _path(self, dialogue_id: str) -> Path:
        return self.data_dir / f"{dialogue_id}{corpusio.CANONICAL_EXT}"

    def _persist(self, state: DialogueState) -> None:
        final = self._path(state.id)
        tmp = final.with_name(final.name + ".tmp")
        tmp.write_bytes(corpusio.to_json(state))
        with open(tmp, "rb") as fh:
            os.fsync(fh.fileno())
        os.replace(tmp, final)

    def mutate(
        self, dialogue_id: str, base_revision: int, fn: Callable[[DialogueState], None]
    ) -> int:
        """Apply ``fn`` if the revision matches; persist before acknowledging."""
        state = self.get(dialogue_id)
        with self._locks[dialogue_id]:
            current = revision_of(state)
            if base_revision != current:
                raise ConflictError(current, base_revision)
            fn(state)
            self._persist(state)
            return revision_of(state)


# -- request bodies ----------------------------------------------------------


class UtteranceIn(BaseModel):
    speaker: str
    text: str
    revision: int


class EventIn(BaseModel):
    id: str
    text: str
    source_utterance: int
    kind: str = "asserted"
    negates: Optional[str] = None
    revision: int


class BeliefIn(BaseModel):
    event: str
    speaker: str
    label: str
    effective_from: int
    evidence_at: int
    revision: int


class CGIn(BaseModel):
    event: str
    speaker: str
    label: str
    degree: Optional[str] = None
    at: int
    revision: int


class UtteranceSeed(BaseModel):
    speaker: str
    text: str


class DialogueIn(BaseModel):
    id: str
    utterances: List[UtteranceSeed] = Field(default_factory=list)


# -- serialization helpers ---------------------------------------------------


def _cg_label_dict(label: CGLabel) -> dict:
    return {"label": label.value.value, "degree": label.degree.token if label.degree else None}


def _record_dict(record) -> dict:
    if isinstance(record, BeliefRecord):
        return {
            "type": "belief",
            "event": record.event,
            "speaker": record.speaker.value,
            "label": record.label.token,
            "effective_from": record.effective_from,
            "evidence_at": record.evidence_at,
        }
    return {
        "type": "cg",
        "event": record.event,
        "speaker": record.speaker.value,
        "label": record.label.value.value,
        "degree": record.label.degree.token if record.label.degree else None,
        "at": record.at,
    }


def _diagnostic_dict(d: Diagnostic) -> dict:
    return {"severity": d.severity.value, "code": d.code, "event": d.event, "message": d.message}


def _snapshot(state: DialogueState, at: Optional[int]) -> dict:
    t = state.num_utterances if at is None else at
    beliefs = {
        sp.value: {
            e: state.belief_at(e, sp, t).token
            for e in state.events
            if state.belief_at(e, sp, t) is not BeliefLabel.NULL
        }
        for sp in (Speaker.A, Speaker.B)
    }
    cg = {
        sp.value: {e: _cg_label_dict(label) for e, label in state.cg_state(sp, t).items()}
        for sp in (Speaker.A, Speaker.B)
    }
    return {
        "id": state.id,
        "revision": revision_of(state),
        "at": t,
        "utterances": [
            {"index": u.index, "speaker": u.speaker.value, "text": u.text}
            for u in state.utterances
        ],
        "events": [
            {
                "id": e.id,
                "text": e.text,
                "source_utterance": e.source_utterance,
                "kind": e.kind.value,
                "negates": e.negates,
            }
            for e in state.events.values()
        ],
        "beliefs": beliefs,
        "cg": cg,
    }


def _memory_before(state: DialogueState, target: Event) -> DialogMemory:
    """Dialog memory of all events preceding the target, with current labels."""
    end = state.num_utterances
    memory = DialogMemory()
    position = 0
    for event in sorted(state.events.values(), key=lambda e: e.source_utterance):
        if event.id == target.id:
            continue
        if event.source_utterance > target.source_utterance:
            continue
        position += 1
        memory.append(
            MemoryEntry(
                text=event.text,
                event_id=event.id,
                belief_a=state.belief_at(event.id, Speaker.A, end),
                belief_b=state.belief_at(event.id, Speaker.B, end),
                cg_a=state.cg_at(event.id, Speaker.A, end),
                cg_b=state.cg_at(event.id, Speaker.B, end),
                position=position,
            )
        )
    return memory


def create_app(
    store: DialogueStore,
    provider: Optional[SimilarityProvider] = None,
    cors_origins: Optional[List[str]] = None,
) -> FastAPI:
    app = FastAPI(title="common ground annotation service")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=cors_origins or ["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    suggest_provider = provider or LexicalSimilarity()

    @app.exception_handler(RequestValidationError)
    async def bad_schema(request: Request, exc: RequestValidationError):
        return JSONResponse(status_code=400, content={"error": "schema violation", "detail": exc.errors()})

    @app.exception_handler(UnknownDialogueError)
    async def not_found(request: Request, exc: UnknownDialogueError):
        return JSONResponse(status_code=404, content={"error": str(exc)})

    @app.exception_handler(ConflictError)
    async def conflict(request: Request, exc: ConflictError):
        return JSONResponse(
            status_code=409, content={"error": str(exc), "current_revision": exc.current}
        )

    @app.exception_handler(EngineError)
    async def engine_failure(request: Request, exc: EngineError):
        return JSONResponse(
            status_code=422,
            content={
                "severity": "error",
                "code": exc.code,
                "event": exc.event,
                "message": exc.message,
            },
        )

    @app.exception_handler(LabelError)
    async def label_failure(request: Request, exc: LabelError):
        return JSONResponse(
            status_code=422,
            content={"severity": "error", "code": "BAD_LABEL", "event": None, "message": str(exc)},
        )

    @app.exception_handler(ValueError)
    async def value_failure(request: Request, exc: ValueError):
        # Field-level invariant violations raised by record/event constructors.
        return JSONResponse(
            status_code=422,
            content={
                "severity": "error",
                "code": "INVALID_VALUE",
                "event": None,
                "message": str(exc),
            },
        )

    def _unknown_event_guard(state: DialogueState, event_id: str) -> Event:
        event = state.events.get(event_id)
        if event is None:
            raise UnknownDialogueError(f"unknown event: {event_id}")
        return event

    @app.get("/dialogues")
    def list_dialogues():
        out = []
        for dialogue_id in store.ids():
            state = store.get(dialogue_id)
            out.append(
                {
                    "id": dialogue_id,
                    "utterances": state.num_utterances,
                    "events": len(state.events),
                    "revision": revision_of(state),
                }
            )
        return out

    @app.post("/dialogues", status_code=201)
    def create_dialogue(body: DialogueIn):
        state = DialogueState(body.id)
        for seed in body.utterances:
            state.add_utterance(Speaker.parse(seed.speaker), seed.text)
        store.create(state)
        return {"id": state.id, "revision": revision_of(state)}

    @app.get("/dialogues/{dialogue_id}")
    def get_dialogue(dialogue_id: str, at: Optional[int] = Query(default=None, ge=0)):
        return _snapshot(store.get(dialogue_id), at)

    @app.post("/dialogues/{dialogue_id}/utterances")
    def post_utterance(dialogue_id: str, body: UtteranceIn):
        revision = store.mutate(
            dialogue_id,
            body.revision,
            lambda s: s.add_utterance(Speaker.parse(body.speaker), body.text),
        )
        return {"revision": revision}

    @app.post("/dialogues/{dialogue_id}/events")
    def post_event(dialogue_id: str, body: EventIn):
        event = Event(
            id=body.id,
            text=body.text,
            source_utterance=body.source_utterance,
            kind=EventKind.parse(body.kind),
            negates=body.negates,
        )
        revision = store.mutate(dialogue_id, body.revision, lambda s: s.add_event(event))
        return {"revision": revision}

    @app.post("/dialogues/{dialogue_id}/beliefs")
    def post_belief(dialogue_id: str, body: BeliefIn):
        record = BeliefRecord(
            event=body.event,
            speaker=Speaker.parse(body.speaker),
            label=BeliefLabel.parse(body.label),
            effective_from=body.effective_from,
            evidence_at=body.evidence_at,
        )
        revision = store.mutate(dialogue_id, body.revision, lambda s: s.record_belief(record))
        return {"revision": revision}

    @app.post("/dialogues/{dialogue_id}/cg")
    def post_cg(dialogue_id: str, body: CGIn):
        label = CGLabel(
            CGValue.parse(body.label),
            BeliefLabel.parse(body.degree) if body.degree else None,
        )
        record = CGRecord(
            event=body.event, speaker=Speaker.parse(body.speaker), label=label, at=body.at
        )
        revision = store.mutate(dialogue_id, body.revision, lambda s: s.record_cg(record))
        return {"revision": revision}

    @app.get("/dialogues/{dialogue_id}/history/{event_id}")
    def get_history(dialogue_id: str, event_id: str):
        state = store.get(dialogue_id)
        _unknown_event_guard(state, event_id)
        return [_record_dict(r) for r in state.history(event_id)]

    @app.get("/dialogues/{dialogue_id}/diagnostics")
    def get_diagnostics(dialogue_id: str):
        return [_diagnostic_dict(d) for d in store.get(dialogue_id).validate()]

    @app.get("/dialogues/{dialogue_id}/suggest/{event_id}")
    def get_suggestion(
        dialogue_id: str,
        event_id: str,
        threshold: float = Query(default=DEFAULT_THRESHOLD, ge=0.0, le=1.0),
    ):
        state = store.get(dialogue_id)
        event = _unknown_event_guard(state, event_id)
        end = state.num_utterances
        bel_a = state.belief_at(event_id, Speaker.A, end)
        bel_b = state.belief_at(event_id, Speaker.B, end)
        outcome = heuristics.apply_rules(bel_a, bel_b)
        decision = outcome.decision.value
        max_similarity = None
        if outcome.decision is heuristics.Decision.JA_OR_IN:
            memory = _memory_before(state, event)
            max_similarity = memory.max_similarity(event.text, suggest_provider)
            decision = heuristics.resolve_ja_in(event, memory, suggest_provider, threshold).value
        return {
            "advisory": True,
            "decision": decision,
            "degree": outcome.degree.token if outcome.degree else None,
            "rule": outcome.rule,
            "beliefs": {"A": bel_a.token, "B": bel_b.token},
            "max_similarity": max_similarity,
            "threshold": threshold,
        }

    @app.get("/dialogues/{dialogue_id}/export")
    def export_dialogue(dialogue_id: str):
        return Response(
            content=corpusio.to_json(store.get(dialogue_id)), media_type="application/json"
        )

    return app


def serve(
    data_dir: Union[str, Path],
    host: str = "127.0.0.1",
    port: int = 8777,
    embed_url: Optional[str] = None,
) -> None:
    """Run the annotation service (blocking)."""
    import uvicorn

    provider: SimilarityProvider = LexicalSimilarity()
    if embed_url:
        provider = RemoteEmbeddings(embed_url, fallback=LexicalSimilarity())
    app = create_app(DialogueStore(data_dir), provider=provider)
    uvicorn.run(app, host=host, port=port, log_level="warning")
