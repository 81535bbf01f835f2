"""Replayable dialogue state: utterances, events, and revisable judgments.

One writer per state; queries never mutate. Per (event, speaker) the
record histories are strictly ordered by evidence time, which makes the
whole state reproducible by replaying its record log.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import Dict, Iterable, List, Optional, Tuple, Union

from .errors import EngineError
from .model import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    Event,
    Speaker,
    Utterance,
    cg_degree,
)

Record = Union[BeliefRecord, CGRecord]

#: Positive belief labels, the only ones compatible with a JA update.
_MUTUAL = (BeliefLabel.CT_PLUS, BeliefLabel.PS)


class Severity(Enum):
    ERROR = "error"
    WARNING = "warning"


@dataclass(frozen=True)
class Diagnostic:
    """One finding from :meth:`DialogueState.validate`."""

    severity: Severity
    code: str
    event: str
    message: str


DIAGNOSTIC_CODES = (
    "CG_SPEAKER_DIVERGENCE",
    "DEGREE_MISMATCH",
    "IN_WITHOUT_PRIOR",
    "JA_WITHOUT_MUTUAL_BELIEF",
    "RT_WITHOUT_CTMINUS",
)


def _record_time(record: Record) -> int:
    return record.evidence_at if isinstance(record, BeliefRecord) else record.at


def _record_onset(record: Record) -> int:
    return record.effective_from if isinstance(record, BeliefRecord) else record.at


class DialogueState:
    """Mutable store for one dialogue's utterances, events, and histories."""

    def __init__(self, dialogue_id: str):
        self.id = dialogue_id
        self.utterances: List[Utterance] = []
        self.events: Dict[str, Event] = {}
        self.belief_history: Dict[Tuple[str, Speaker], List[BeliefRecord]] = {}
        self.cg_history: Dict[Tuple[str, Speaker], List[CGRecord]] = {}
        # Global insertion log; replaying it rebuilds an identical state.
        self.record_log: List[Record] = []
        self._seq: Dict[Record, int] = {}

    # -- registration ------------------------------------------------------

    @property
    def num_utterances(self) -> int:
        return len(self.utterances)

    def add_utterance(self, speaker: Speaker, text: str) -> int:
        if not text.strip():
            raise EngineError("EMPTY_UTTERANCE", "empty utterance")
        index = len(self.utterances) + 1
        self.utterances.append(Utterance(index=index, speaker=speaker, text=text))
        return index

    def add_event(self, event: Event) -> str:
        if event.id in self.events:
            raise EngineError("DUPLICATE_EVENT", f"duplicate event id: {event.id}", event.id)
        if not 1 <= event.source_utterance <= len(self.utterances):
            raise EngineError(
                "UNKNOWN_UTTERANCE",
                f"event {event.id}: source utterance {event.source_utterance} does not exist",
                event.id,
            )
        if event.negates is not None:
            target = self.events.get(event.negates)
            if target is None:
                raise EngineError(
                    "UNKNOWN_EVENT",
                    f"event {event.id} negates unknown event {event.negates}",
                    event.id,
                )
            if target.source_utterance > event.source_utterance:
                raise EngineError(
                    "NEGATES_LATER_EVENT",
                    f"event {event.id} negates {event.negates}, which arises later",
                    event.id,
                )
        self.events[event.id] = event
        return event.id

    def _require_event(self, event_id: str) -> Event:
        event = self.events.get(event_id)
        if event is None:
            raise EngineError("UNKNOWN_EVENT", f"unknown event: {event_id}", event_id)
        return event

    def record_belief(self, record: BeliefRecord) -> None:
        self._require_event(record.event)
        if record.evidence_at > len(self.utterances):
            raise EngineError(
                "EVIDENCE_BEYOND_DIALOGUE",
                f"evidence_at {record.evidence_at} beyond last utterance",
                record.event,
            )
        history = self.belief_history.setdefault((record.event, record.speaker), [])
        if history and record.evidence_at <= history[-1].evidence_at:
            raise EngineError(
                "OUT_OF_ORDER",
                f"out-of-order evidence_at for ({record.event}, {record.speaker.value}): "
                f"{record.evidence_at} <= {history[-1].evidence_at}",
                record.event,
            )
        history.append(record)
        self._log(record)

    def record_cg(self, record: CGRecord) -> None:
        self._require_event(record.event)
        if record.at > len(self.utterances):
            raise EngineError(
                "EVIDENCE_BEYOND_DIALOGUE",
                f"at {record.at} beyond last utterance",
                record.event,
            )
        history = self.cg_history.setdefault((record.event, record.speaker), [])
        if history and record.at <= history[-1].at:
            raise EngineError(
                "OUT_OF_ORDER",
                f"out-of-order at for ({record.event}, {record.speaker.value}): "
                f"{record.at} <= {history[-1].at}",
                record.event,
            )
        history.append(record)
        self._log(record)

    def _log(self, record: Record) -> None:
        self._seq[record] = len(self.record_log)
        self.record_log.append(record)

    # -- queries -----------------------------------------------------------

    def belief_at(self, event_id: str, speaker: Speaker, t: int) -> BeliefLabel:
        """The overhearer's settled view of ``speaker``'s belief holding at ``t``.

        All evidence in the dialogue is admitted (look-ahead included): among
        records with ``effective_from <= t`` the one with the greatest
        evidence time wins. Null if no record applies.
        """
        self._require_event(event_id)
        chosen: Optional[BeliefRecord] = None
        for record in self.belief_history.get((event_id, speaker), ()):
            if record.effective_from <= t:
                chosen = record
        return chosen.label if chosen else BeliefLabel.NULL

    def belief_known_by(self, event_id: str, speaker: Speaker, t: int) -> BeliefLabel:
        """Like :meth:`belief_at`, but restricted to evidence available by ``t``.

        This is the mid-dialogue view: a back-dated record does not count
        until the utterance that licensed it has been heard.
        """
        self._require_event(event_id)
        chosen: Optional[BeliefRecord] = None
        for record in self.belief_history.get((event_id, speaker), ()):
            if record.effective_from <= t and record.evidence_at <= t:
                chosen = record
        return chosen.label if chosen else BeliefLabel.NULL

    def cg_at(self, event_id: str, speaker: Speaker, t: int) -> Optional[CGLabel]:
        self._require_event(event_id)
        chosen: Optional[CGRecord] = None
        for record in self.cg_history.get((event_id, speaker), ()):
            if record.at <= t:
                chosen = record
        return chosen.label if chosen else None

    def cg_state(self, speaker: Speaker, t: int) -> Dict[str, CGLabel]:
        """Latest CG label per event at time ``t`` for ``speaker``'s CG model.

        Rejected events stay visible with their RT label so divergence and
        rejection are auditable; events with no record yet are omitted.
        """
        out: Dict[str, CGLabel] = {}
        for event_id in self.events:
            label = self.cg_at(event_id, speaker, t)
            if label is not None:
                out[event_id] = label
        return out

    def history(self, event_id: str) -> List[Record]:
        """All belief and CG records touching ``event_id``, chronologically.

        Ordered by evidence time, then by onset (effective_from / at) so a
        back-dated judgment precedes same-evidence revisions, then by
        insertion order.
        """
        self._require_event(event_id)
        records: List[Record] = [r for r in self.record_log if r.event == event_id]
        records.sort(key=lambda r: (_record_time(r), _record_onset(r), self._seq[r]))
        return records

    # -- validation --------------------------------------------------------

    def validate(self) -> List[Diagnostic]:
        """Check annotation consistency; deterministic, ordered by (event, code)."""
        findings: List[Diagnostic] = []
        for (event_id, speaker), history in self.cg_history.items():
            for record in history:
                findings.extend(self._check_cg_record(event_id, speaker, record))
        findings.extend(self._check_divergence())
        findings.sort(key=lambda d: (d.event, d.code, d.message))
        return findings

    def _check_cg_record(
        self, event_id: str, speaker: Speaker, record: CGRecord
    ) -> Iterable[Diagnostic]:
        bel_a = self.belief_at(event_id, Speaker.A, record.at)
        bel_b = self.belief_at(event_id, Speaker.B, record.at)
        value = record.label.value
        if value is CGValue.JA and not (bel_a in _MUTUAL and bel_b in _MUTUAL):
            yield Diagnostic(
                Severity.ERROR,
                "JA_WITHOUT_MUTUAL_BELIEF",
                event_id,
                f"CG({speaker.value})=JA at {record.at} but beliefs are "
                f"({bel_a.token}, {bel_b.token})",
            )
        if value is CGValue.RT and BeliefLabel.CT_MINUS not in (bel_a, bel_b):
            yield Diagnostic(
                Severity.ERROR,
                "RT_WITHOUT_CTMINUS",
                event_id,
                f"CG({speaker.value})=RT at {record.at} but neither belief is CT-",
            )
        if value is CGValue.IN and not self._has_prior_cg(event_id, speaker, record.at):
            yield Diagnostic(
                Severity.WARNING,
                "IN_WITHOUT_PRIOR",
                event_id,
                f"CG({speaker.value})=IN at {record.at} with no earlier JA/IN; "
                "may reflect pre-conversation common ground",
            )
        if (
            record.label.degree is not None
            and bel_a in _MUTUAL
            and bel_b in _MUTUAL
            and record.label.degree is not cg_degree(bel_a, bel_b)
        ):
            yield Diagnostic(
                Severity.ERROR,
                "DEGREE_MISMATCH",
                event_id,
                f"CG({speaker.value}) degree {record.label.degree.token} at {record.at} "
                f"but beliefs ({bel_a.token}, {bel_b.token}) "
                f"give {cg_degree(bel_a, bel_b).token}",
            )

    def _has_prior_cg(self, event_id: str, speaker: Speaker, t: int) -> bool:
        linked = {event_id}
        event = self.events[event_id]
        if event.negates:
            linked.add(event.negates)
        linked.update(e.id for e in self.events.values() if e.negates == event_id)
        for other in linked:
            for record in self.cg_history.get((other, speaker), ()):
                if record.at < t and record.label.value in (CGValue.JA, CGValue.IN):
                    return True
        return False

    def _check_divergence(self) -> Iterable[Diagnostic]:
        end = len(self.utterances)
        for event_id in self.events:
            label_a = self.cg_at(event_id, Speaker.A, end)
            label_b = self.cg_at(event_id, Speaker.B, end)
            if label_a is None and label_b is None:
                continue
            value_a = label_a.value if label_a else None
            value_b = label_b.value if label_b else None
            if value_a != value_b:
                yield Diagnostic(
                    Severity.WARNING,
                    "CG_SPEAKER_DIVERGENCE",
                    event_id,
                    f"CG(A)={label_a.token if label_a else 'none'} vs "
                    f"CG(B)={label_b.token if label_b else 'none'} at end of dialogue",
                )
