"""Domain types and label semantics for two-party common ground annotation.

Everything here is an immutable value; all mutation lives in the dialogue
engine. Label enumerations are closed: parsing any token outside them fails.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional

from .errors import LabelError


class Speaker(Enum):
    """One of the two interlocutors in a dialogue."""

    A = "A"
    B = "B"

    def other(self) -> "Speaker":
        return Speaker.B if self is Speaker.A else Speaker.A

    @classmethod
    def parse(cls, token: str) -> "Speaker":
        try:
            return cls(token)
        except ValueError:
            raise LabelError(f"unknown speaker: {token!r}") from None


class EventKind(Enum):
    """How an event came to exist.

    ``asserted`` events are read off a clause's main predicate;
    ``speech_act`` events wrap questions or orders; ``derived_negation``
    events are synthesized when a speaker elliptically rejects an event.
    """

    ASSERTED = "asserted"
    SPEECH_ACT = "speech_act"
    DERIVED_NEGATION = "derived_negation"

    @classmethod
    def parse(cls, token: str) -> "EventKind":
        try:
            return cls(token)
        except ValueError:
            raise LabelError(f"unknown event kind: {token!r}") from None


class BeliefLabel(Enum):
    """Per-speaker attitude toward an event.

    ``NULL`` ("0") is absence of annotation, deliberately distinct from
    ``NB`` which is an annotated judgment that no belief was expressed.
    """

    CT_PLUS = "CT+"
    CT_MINUS = "CT-"
    PS = "PS"
    NB = "NB"
    NULL = "0"

    @property
    def token(self) -> str:
        return self.value

    @classmethod
    def parse(cls, token: str) -> "BeliefLabel":
        try:
            return cls(token)
        except ValueError:
            raise LabelError(f"unknown label: {token!r}") from None


class CGValue(Enum):
    """Common ground update category for one speaker's CG model."""

    JA = "JA"
    IN = "IN"
    RT = "RT"
    NULL = "0"

    @classmethod
    def parse(cls, token: str) -> "CGValue":
        try:
            return cls(token)
        except ValueError:
            raise LabelError(f"unknown label: {token!r}") from None


_CERTAINTY_RANK = {BeliefLabel.CT_PLUS: 3, BeliefLabel.PS: 2, BeliefLabel.NB: 1}

_DEGREE_LABELS = frozenset({BeliefLabel.CT_PLUS, BeliefLabel.PS})

_CG_TOKEN_RE = re.compile(r"^(JA|IN|RT|0)(?:\((CT\+|PS)\))?$")


def certainty_rank(label: BeliefLabel) -> int:
    """Strict total order over the positive-degree labels: CT+ > PS > NB."""
    try:
        return _CERTAINTY_RANK[label]
    except KeyError:
        raise LabelError(f"unranked label: {label.token}") from None


def cg_degree(bel_a: BeliefLabel, bel_b: BeliefLabel) -> BeliefLabel:
    """Degree a shared belief enters the CG with: always the less certain one."""
    if bel_a not in _DEGREE_LABELS or bel_b not in _DEGREE_LABELS:
        bad = bel_a if bel_a not in _DEGREE_LABELS else bel_b
        raise LabelError(f"degree undefined for {bad.token}")
    return bel_a if certainty_rank(bel_a) <= certainty_rank(bel_b) else bel_b


@dataclass(frozen=True)
class Utterance:
    """One turn of the dialogue; indices are 1-based and contiguous."""

    index: int
    speaker: Speaker
    text: str

    def __post_init__(self) -> None:
        if self.index < 1:
            raise ValueError(f"utterance index must be >= 1, got {self.index}")
        if not self.text.strip():
            raise ValueError("empty utterance")
        if any(c in self.text for c in "\t\n\r"):
            raise ValueError("utterance text must be a single line without tabs")


@dataclass(frozen=True)
class Event:
    """An anaphora-resolved proposition extracted from an utterance.

    ``negates`` is set exactly when ``kind`` is ``derived_negation`` and
    points at the event this one is the negated version of.
    """

    id: str
    text: str
    source_utterance: int
    kind: EventKind = EventKind.ASSERTED
    negates: Optional[str] = None

    def __post_init__(self) -> None:
        if not self.id:
            raise ValueError("event id must be non-empty")
        if any(c in self.id for c in " \t\n\r"):
            raise ValueError(f"event id {self.id!r} must not contain whitespace")
        if not self.text.strip():
            raise ValueError(f"event {self.id}: text must be non-empty")
        if any(c in self.text for c in "\t\n\r"):
            raise ValueError(f"event {self.id}: text must be a single line without tabs")
        if self.source_utterance < 1:
            raise ValueError(f"event {self.id}: source_utterance must be >= 1")
        if (self.kind is EventKind.DERIVED_NEGATION) != (self.negates is not None):
            raise ValueError(
                f"event {self.id}: negates must be set iff kind is derived_negation"
            )


@dataclass(frozen=True)
class CGLabel:
    """A CG category plus, for JA/IN, the degree the belief enters with."""

    value: CGValue
    degree: Optional[BeliefLabel] = None

    def __post_init__(self) -> None:
        if self.degree is not None:
            if self.value not in (CGValue.JA, CGValue.IN):
                raise LabelError(f"degree not allowed on {self.value.value}")
            if self.degree not in _DEGREE_LABELS:
                raise LabelError(f"degree must be CT+ or PS, got {self.degree.token}")

    @property
    def token(self) -> str:
        if self.degree is not None:
            return f"{self.value.value}({self.degree.token})"
        return self.value.value

    @classmethod
    def parse(cls, token: str) -> "CGLabel":
        m = _CG_TOKEN_RE.match(token)
        if not m:
            raise LabelError(f"unknown label: {token!r}")
        value = CGValue(m.group(1))
        degree = BeliefLabel(m.group(2)) if m.group(2) else None
        return cls(value, degree)


@dataclass(frozen=True)
class BeliefRecord:
    """A revisable belief judgment for one (event, speaker).

    ``evidence_at`` is the utterance whose content licensed the judgment;
    ``effective_from`` is the utterance the belief is taken to hold from.
    Look-ahead back-dates a record (effective_from < evidence_at); the
    converse is never allowed.
    """

    event: str
    speaker: Speaker
    label: BeliefLabel
    effective_from: int
    evidence_at: int

    def __post_init__(self) -> None:
        if self.label is BeliefLabel.NULL:
            raise LabelError("belief record label must not be null")
        if self.effective_from < 1:
            raise ValueError(f"effective_from must be >= 1, got {self.effective_from}")
        if self.effective_from > self.evidence_at:
            raise ValueError(
                f"effective_from {self.effective_from} > evidence_at {self.evidence_at}"
            )


@dataclass(frozen=True)
class CGRecord:
    """A CG judgment for one event in one speaker's CG model."""

    event: str
    speaker: Speaker
    label: CGLabel
    at: int

    def __post_init__(self) -> None:
        if self.label.value is CGValue.NULL:
            raise LabelError("cg record label must not be null")
        if self.at < 1:
            raise ValueError(f"at must be >= 1, got {self.at}")
