"""Parsing and serialization: transcripts, annotation tables, canonical
JSON, and prediction files.

The TSV follows the annotation table layout (Nb | Utterance | e id | Event
| Bel(A) | Bel(B) | CG(A) | CG(B)) with two optional trailing columns for
event kind and negation target. A belief token may carry a ``!`` suffix,
meaning the judgment is back-dated to the event's source utterance even
though its evidence is the current row. Every format round-trips byte
exactly, and the JSON form is canonical (sorted keys, UTF-8, LF).
"""

from __future__ import annotations

import json
import re
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import jsonschema

from .engine import DialogueState
from .errors import CGError, EngineError, LabelError, ParseError
from .model import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    Event,
    EventKind,
    Speaker,
    Utterance,
)

#: Conventional file extensions, all UTF-8.
TRANSCRIPT_EXT = ".txt"
ANNOTATION_EXT = ".cga.tsv"
CANONICAL_EXT = ".cg.json"
PREDICTIONS_EXT = ".pred.tsv"
VECTORS_EXT = ".vec.jsonl"

_TRANSCRIPT_RE = re.compile(r"^([^:]+): (.+)$")

CORE_COLUMNS = ("Nb", "Utterance", "e id", "Event", "Bel(A)", "Bel(B)", "CG(A)", "CG(B)")
EXTENDED_COLUMNS = CORE_COLUMNS + ("Kind", "Negates")

PREDICTION_COLUMNS = ("event_id", "task", "label_a", "label_b")
PREDICTION_TASKS = ("bel", "cg")
_PREDICTION_LABELS = {
    "bel": {"CT+", "CT-", "PS", "NB", "0"},
    "cg": {"JA", "IN", "RT", "0"},
}


# -- transcripts -------------------------------------------------------------


def parse_transcript(text: str) -> List[Utterance]:
    """Parse ``A: ...`` / ``B: ...`` lines; blank lines are ignored."""
    utterances: List[Utterance] = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        m = _TRANSCRIPT_RE.match(line)
        if not m:
            raise ParseError(f"malformed transcript line {line!r}", line=lineno)
        speaker_token, body = m.groups()
        try:
            speaker = Speaker.parse(speaker_token)
        except LabelError:
            raise ParseError(f"unknown speaker {speaker_token!r}", line=lineno) from None
        utterances.append(Utterance(index=len(utterances) + 1, speaker=speaker, text=body))
    return utterances


def serialize_transcript(utterances: Iterable[Utterance]) -> str:
    return "".join(f"{u.speaker.value}: {u.text}\n" for u in utterances)


# -- annotation TSV ----------------------------------------------------------


def _split_cell(cell: str, lineno: int) -> List[Tuple[str, str]]:
    tokens = cell.split()
    if len(tokens) % 2 != 0:
        raise ParseError(f"cell {cell!r} is not LABEL eID pairs", line=lineno)
    return [(tokens[i], tokens[i + 1]) for i in range(0, len(tokens), 2)]


def parse_annotation_tsv(text: str, dialogue_id: str = "dialogue") -> DialogueState:
    """Parse an annotation table into a fully populated dialogue state."""
    lines = [line for line in text.split("\n") if line != ""]
    if not lines:
        raise ParseError("empty annotation table", line=1)
    header = tuple(lines[0].split("\t"))
    if header not in (CORE_COLUMNS, EXTENDED_COLUMNS):
        raise ParseError(f"unexpected header {list(header)}", line=1)

    state = DialogueState(dialogue_id)
    for lineno, line in enumerate(lines[1:], 2):
        cells = line.split("\t")
        if len(cells) > len(EXTENDED_COLUMNS):
            raise ParseError(f"too many columns ({len(cells)})", line=lineno)
        cells += [""] * (len(EXTENDED_COLUMNS) - len(cells))
        nb_cell, utt_cell, eid, etext, bel_a, bel_b, cg_a, cg_b, kind_cell, negates = cells

        try:
            nb = int(nb_cell)
        except ValueError:
            raise ParseError(f"bad utterance number {nb_cell!r}", line=lineno) from None

        if utt_cell:
            m = _TRANSCRIPT_RE.match(utt_cell)
            if not m:
                raise ParseError(f"malformed utterance cell {utt_cell!r}", line=lineno)
            try:
                speaker = Speaker.parse(m.group(1))
            except LabelError:
                raise ParseError(f"unknown speaker {m.group(1)!r}", line=lineno) from None
            if nb != state.num_utterances + 1:
                raise ParseError(
                    f"non-monotone rows: utterance {nb} after {state.num_utterances}",
                    line=lineno,
                )
            state.add_utterance(speaker, m.group(2))
        elif nb != state.num_utterances:
            raise ParseError(
                f"continuation row numbered {nb} under utterance {state.num_utterances}",
                line=lineno,
            )

        if bool(eid) != bool(etext):
            raise ParseError("event id and text must appear together", line=lineno)
        if eid:
            try:
                kind = EventKind.parse(kind_cell) if kind_cell else EventKind.ASSERTED
                event = Event(
                    id=eid,
                    text=etext,
                    source_utterance=nb,
                    kind=kind,
                    negates=negates or None,
                )
                state.add_event(event)
            except (LabelError, ValueError, EngineError) as exc:
                raise ParseError(str(exc), line=lineno) from exc
        elif kind_cell or negates:
            raise ParseError("kind/negates given without an event", line=lineno)

        for cell, speaker in ((bel_a, Speaker.A), (bel_b, Speaker.B)):
            for label_token, event_id in _split_cell(cell, lineno):
                back_dated = label_token.endswith("!")
                if back_dated:
                    label_token = label_token[:-1]
                try:
                    label = BeliefLabel.parse(label_token)
                    event = state.events.get(event_id)
                    if event is None:
                        raise EngineError("UNKNOWN_EVENT", f"unknown event: {event_id}", event_id)
                    record = BeliefRecord(
                        event=event_id,
                        speaker=speaker,
                        label=label,
                        effective_from=event.source_utterance if back_dated else nb,
                        evidence_at=nb,
                    )
                    state.record_belief(record)
                except (LabelError, ValueError, EngineError) as exc:
                    raise ParseError(str(exc), line=lineno) from exc
        for cell, speaker in ((cg_a, Speaker.A), (cg_b, Speaker.B)):
            for label_token, event_id in _split_cell(cell, lineno):
                try:
                    label = CGLabel.parse(label_token)
                    state.record_cg(CGRecord(event=event_id, speaker=speaker, label=label, at=nb))
                except (LabelError, ValueError, EngineError) as exc:
                    raise ParseError(str(exc), line=lineno) from exc
    return state


def _belief_token(state: DialogueState, record: BeliefRecord) -> str:
    if record.effective_from == record.evidence_at:
        return f"{record.label.token} {record.event}"
    source = state.events[record.event].source_utterance
    if record.effective_from != source:
        raise CGError(
            f"record for {record.event} back-dated to {record.effective_from}, "
            f"not its source utterance; not representable in TSV"
        )
    return f"{record.label.token}! {record.event}"


def serialize_annotation_tsv(state: DialogueState) -> str:
    """Regenerate the annotation table in canonical layout.

    One sub-row per event under its source utterance (plus a bare row for
    event-less utterances); records land on their event's sub-row when the
    event arises in that utterance, otherwise on the first sub-row.
    """
    by_time: Dict[int, List] = {}
    for record in state.record_log:
        t = record.evidence_at if isinstance(record, BeliefRecord) else record.at
        by_time.setdefault(t, []).append(record)

    lines = ["\t".join(EXTENDED_COLUMNS)]
    for utterance in state.utterances:
        nb = utterance.index
        events_here = [e for e in state.events.values() if e.source_utterance == nb]
        row_events: List[Optional[Event]] = list(events_here) or [None]
        row_index = {e.id: i for i, e in enumerate(events_here)}
        cells: List[List[List[str]]] = [[[] for _ in range(4)] for _ in row_events]
        for record in by_time.get(nb, []):
            event = state.events[record.event]
            row = row_index.get(event.id, 0) if event.source_utterance == nb else 0
            if isinstance(record, BeliefRecord):
                column = 0 if record.speaker is Speaker.A else 1
                token = _belief_token(state, record)
            else:
                column = 2 if record.speaker is Speaker.A else 3
                token = f"{record.label.token} {record.event}"
            cells[row][column].append(token)
        for i, event in enumerate(row_events):
            utt_cell = f"{utterance.speaker.value}: {utterance.text}" if i == 0 else ""
            eid = event.id if event else ""
            etext = event.text if event else ""
            kind = event.kind.value if event and event.kind is not EventKind.ASSERTED else ""
            negates = event.negates or "" if event else ""
            lines.append(
                "\t".join(
                    [str(nb), utt_cell, eid, etext]
                    + [" ".join(col) for col in cells[i]]
                    + [kind, negates]
                )
            )
    return "\n".join(lines) + "\n"


# -- canonical JSON ----------------------------------------------------------

_SPEAKERS = ["A", "B"]
_BELIEF_TOKENS = ["CT+", "CT-", "PS", "NB"]

_BELIEF_RECORD_SCHEMA = {
    "type": "object",
    "required": ["type", "event", "speaker", "label", "effective_from", "evidence_at"],
    "additionalProperties": False,
    "properties": {
        "type": {"const": "belief"},
        "event": {"type": "string", "minLength": 1},
        "speaker": {"enum": _SPEAKERS},
        "label": {"enum": _BELIEF_TOKENS},
        "effective_from": {"type": "integer", "minimum": 1},
        "evidence_at": {"type": "integer", "minimum": 1},
    },
}

_CG_RECORD_SCHEMA = {
    "type": "object",
    "required": ["type", "event", "speaker", "label", "degree", "at"],
    "additionalProperties": False,
    "properties": {
        "type": {"const": "cg"},
        "event": {"type": "string", "minLength": 1},
        "speaker": {"enum": _SPEAKERS},
        "label": {"enum": ["JA", "IN", "RT"]},
        "degree": {"enum": ["CT+", "PS", None]},
        "at": {"type": "integer", "minimum": 1},
    },
}

DIALOGUE_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["id", "utterances", "events", "records"],
    "additionalProperties": False,
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "utterances": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["index", "speaker", "text"],
                "additionalProperties": False,
                "properties": {
                    "index": {"type": "integer", "minimum": 1},
                    "speaker": {"enum": _SPEAKERS},
                    "text": {"type": "string", "minLength": 1},
                },
            },
        },
        "events": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["id", "text", "source_utterance", "kind", "negates"],
                "additionalProperties": False,
                "properties": {
                    "id": {"type": "string", "minLength": 1},
                    "text": {"type": "string", "minLength": 1},
                    "source_utterance": {"type": "integer", "minimum": 1},
                    "kind": {"enum": [k.value for k in EventKind]},
                    "negates": {"type": ["string", "null"]},
                },
            },
        },
        "records": {
            "type": "array",
            "items": {"oneOf": [_BELIEF_RECORD_SCHEMA, _CG_RECORD_SCHEMA]},
        },
    },
}

_VALIDATOR = jsonschema.Draft202012Validator(DIALOGUE_SCHEMA)


def _pointer(parts: Iterable[Union[str, int]]) -> str:
    return "/" + "/".join(str(p) for p in parts) if parts else "/"


def state_to_dict(state: DialogueState) -> dict:
    records = []
    for record in state.record_log:
        if isinstance(record, BeliefRecord):
            records.append(
                {
                    "type": "belief",
                    "event": record.event,
                    "speaker": record.speaker.value,
                    "label": record.label.token,
                    "effective_from": record.effective_from,
                    "evidence_at": record.evidence_at,
                }
            )
        else:
            records.append(
                {
                    "type": "cg",
                    "event": record.event,
                    "speaker": record.speaker.value,
                    "label": record.label.value.value,
                    "degree": record.label.degree.token if record.label.degree else None,
                    "at": record.at,
                }
            )
    return {
        "id": state.id,
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
        "records": records,
    }


def to_json(state: DialogueState) -> bytes:
    """Canonical JSON bytes: sorted keys, 2-space indent, UTF-8, LF."""
    doc = state_to_dict(state)
    return (json.dumps(doc, sort_keys=True, ensure_ascii=False, indent=2) + "\n").encode("utf-8")


def from_json(data: Union[bytes, str]) -> DialogueState:
    """Parse and replay a canonical JSON document into a dialogue state."""
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc.msg}", line=exc.lineno) from exc
    error = jsonschema.exceptions.best_match(_VALIDATOR.iter_errors(doc))
    if error is not None:
        raise ParseError(f"schema violation: {error.message}", path=_pointer(error.absolute_path))
    return state_from_dict(doc)


def state_from_dict(doc: dict) -> DialogueState:
    state = DialogueState(doc["id"])
    for i, u in enumerate(doc["utterances"]):
        try:
            if u["index"] != state.num_utterances + 1:
                raise EngineError("BAD_INDEX", f"utterance index {u['index']} out of order")
            state.add_utterance(Speaker(u["speaker"]), u["text"])
        except (EngineError, ValueError) as exc:
            raise ParseError(str(exc), path=_pointer(["utterances", i])) from exc
    for i, e in enumerate(doc["events"]):
        try:
            state.add_event(
                Event(
                    id=e["id"],
                    text=e["text"],
                    source_utterance=e["source_utterance"],
                    kind=EventKind(e["kind"]),
                    negates=e["negates"],
                )
            )
        except (EngineError, ValueError) as exc:
            raise ParseError(str(exc), path=_pointer(["events", i])) from exc
    for i, r in enumerate(doc["records"]):
        try:
            if r["type"] == "belief":
                state.record_belief(
                    BeliefRecord(
                        event=r["event"],
                        speaker=Speaker(r["speaker"]),
                        label=BeliefLabel(r["label"]),
                        effective_from=r["effective_from"],
                        evidence_at=r["evidence_at"],
                    )
                )
            else:
                degree = BeliefLabel(r["degree"]) if r["degree"] else None
                state.record_cg(
                    CGRecord(
                        event=r["event"],
                        speaker=Speaker(r["speaker"]),
                        label=CGLabel(CGValue(r["label"]), degree),
                        at=r["at"],
                    )
                )
        except (EngineError, LabelError, ValueError) as exc:
            raise ParseError(str(exc), path=_pointer(["records", i])) from exc
    return state


# -- predictions -------------------------------------------------------------


def parse_predictions(
    text: str, known_events: Optional[Sequence[str]] = None
) -> Dict[str, Dict[str, Tuple[str, str]]]:
    """Parse a predictions TSV into {task: {event_id: (label_a, label_b)}}."""
    lines = [line for line in text.split("\n") if line != ""]
    if not lines:
        raise ParseError("empty predictions file", line=1)
    if tuple(lines[0].split("\t")) != PREDICTION_COLUMNS:
        raise ParseError(f"unexpected header {lines[0]!r}", line=1)
    known = set(known_events) if known_events is not None else None
    out: Dict[str, Dict[str, Tuple[str, str]]] = {}
    for lineno, line in enumerate(lines[1:], 2):
        cells = line.split("\t")
        if len(cells) != 4:
            raise ParseError(f"expected 4 columns, got {len(cells)}", line=lineno)
        event_id, task, label_a, label_b = cells
        if task not in PREDICTION_TASKS:
            raise ParseError(f"unknown task {task!r}", line=lineno)
        for label in (label_a, label_b):
            if label not in _PREDICTION_LABELS[task]:
                raise ParseError(f"unknown label {label!r} for task {task!r}", line=lineno)
        if known is not None and event_id not in known:
            raise ParseError(f"unknown event: {event_id}", line=lineno)
        by_event = out.setdefault(task, {})
        if event_id in by_event:
            raise ParseError(f"duplicate prediction for {event_id}/{task}", line=lineno)
        by_event[event_id] = (label_a, label_b)
    return out


def serialize_predictions(by_task: Mapping[str, Mapping[str, Tuple[str, str]]]) -> str:
    lines = ["\t".join(PREDICTION_COLUMNS)]
    for task in sorted(by_task):
        for event_id, (label_a, label_b) in by_task[task].items():
            lines.append(f"{event_id}\t{task}\t{label_a}\t{label_b}")
    return "\n".join(lines) + "\n"


def predictions_from_records(
    state: DialogueState, records: Iterable[CGRecord]
) -> Dict[str, Tuple[str, str]]:
    """CG label tokens per event from predicted records; "0" where silent."""
    out: Dict[str, Tuple[str, str]] = {e: ("0", "0") for e in state.events}
    for record in records:
        a, b = out[record.event]
        token = record.label.value.value
        if record.speaker is Speaker.A:
            out[record.event] = (token, b)
        else:
            out[record.event] = (a, token)
    return out


# -- file helpers ------------------------------------------------------------


def load_state(path: Union[str, Path]) -> DialogueState:
    """Load a dialogue from canonical JSON or annotation TSV, by extension."""
    path = Path(path)
    name = path.name
    if name.endswith(CANONICAL_EXT):
        return from_json(path.read_bytes())
    if name.endswith(ANNOTATION_EXT):
        stem = name[: -len(ANNOTATION_EXT)]
        return parse_annotation_tsv(path.read_text(encoding="utf-8"), dialogue_id=stem)
    raise CGError(f"cannot infer dialogue format from {name!r}")
