"""Shared fixtures: the worked two-utterance dialogue used across the suite.

Utterance 1 (A) carries a speech-act event e1 and the questioned event e2;
utterance 2 (B) rejects e2, spawning the derived negation e3. B's CT-
toward e2 is evidenced by utterance 2 but back-dated to utterance 1.
"""

from __future__ import annotations

from pathlib import Path

import pytest

from cgworkbench.engine import DialogueState
from cgworkbench.model import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    Event,
    EventKind,
    Speaker,
)

DATA_DIR = Path(__file__).parent / "data"

UTT1 = "So you've been leading the life of Reilly huh?"
UTT2 = "No. Not really."
E1_TEXT = "A asks B if B has been leading the life of Reilly"
E2_TEXT = "B has been leading the life of Reilly"
E3_TEXT = "B has not been leading the life of Reilly"

JA = CGLabel(CGValue.JA)
RT = CGLabel(CGValue.RT)


def build_reilly() -> DialogueState:
    """The fully annotated sample dialogue, in canonical record order."""
    state = DialogueState("reilly")
    state.add_utterance(Speaker.A, UTT1)
    state.add_utterance(Speaker.B, UTT2)
    state.add_event(Event("e1", E1_TEXT, 1, kind=EventKind.SPEECH_ACT))
    state.add_event(Event("e2", E2_TEXT, 1))
    state.add_event(Event("e3", E3_TEXT, 2, kind=EventKind.DERIVED_NEGATION, negates="e2"))

    state.record_belief(BeliefRecord("e1", Speaker.A, BeliefLabel.CT_PLUS, 1, 1))
    state.record_belief(BeliefRecord("e1", Speaker.B, BeliefLabel.CT_PLUS, 1, 1))
    state.record_cg(CGRecord("e1", Speaker.A, JA, 1))
    state.record_cg(CGRecord("e1", Speaker.B, JA, 1))
    state.record_belief(BeliefRecord("e2", Speaker.A, BeliefLabel.PS, 1, 1))

    state.record_belief(BeliefRecord("e2", Speaker.A, BeliefLabel.CT_MINUS, 2, 2))
    state.record_belief(BeliefRecord("e3", Speaker.A, BeliefLabel.CT_PLUS, 2, 2))
    state.record_belief(BeliefRecord("e2", Speaker.B, BeliefLabel.CT_MINUS, 1, 2))
    state.record_belief(BeliefRecord("e3", Speaker.B, BeliefLabel.CT_PLUS, 2, 2))
    state.record_cg(CGRecord("e2", Speaker.A, RT, 2))
    state.record_cg(CGRecord("e3", Speaker.A, JA, 2))
    state.record_cg(CGRecord("e2", Speaker.B, RT, 2))
    state.record_cg(CGRecord("e3", Speaker.B, JA, 2))
    return state


@pytest.fixture
def reilly() -> DialogueState:
    return build_reilly()


@pytest.fixture
def reilly_tsv() -> str:
    return (DATA_DIR / "reilly.cga.tsv").read_text(encoding="utf-8")


@pytest.fixture
def reilly_transcript() -> str:
    return (DATA_DIR / "reilly.txt").read_text(encoding="utf-8")


@pytest.fixture
def reilly_json() -> bytes:
    return (DATA_DIR / "reilly.cg.json").read_bytes()


_TOPICS = [
    "the garden fence",
    "the broken dishwasher",
    "the school play",
    "the trip to Ohio",
    "the new neighbors",
    "grandma's recipe",
    "the car insurance",
    "the missing ladder",
    "the birthday cake",
    "the soccer match",
]

_BELIEF_MIX = [
    (BeliefLabel.CT_PLUS, BeliefLabel.CT_PLUS),
    (BeliefLabel.CT_PLUS, BeliefLabel.CT_PLUS),
    (BeliefLabel.PS, BeliefLabel.CT_PLUS),
    (BeliefLabel.CT_PLUS, BeliefLabel.PS),
    (BeliefLabel.CT_MINUS, BeliefLabel.CT_PLUS),
    (BeliefLabel.CT_PLUS, BeliefLabel.CT_MINUS),
    (BeliefLabel.NB, BeliefLabel.CT_PLUS),
    (BeliefLabel.PS, BeliefLabel.PS),
]


def build_synthetic(n_events: int = 50, seed: int = 13) -> DialogueState:
    """A deterministic corpus with no verbatim repeats but graded overlap.

    Event texts share topic words with earlier ones (so low thresholds see
    many matches) while every text stays unique (so threshold 1.0 under a
    clamped similarity can never fire).
    """
    import random

    rng = random.Random(seed)
    state = DialogueState(f"synthetic-{seed}")
    for i in range(1, n_events + 1):
        speaker = Speaker.A if i % 2 else Speaker.B
        topic = _TOPICS[(i - 1) % len(_TOPICS)]
        state.add_utterance(speaker, f"Turn {i} about {topic}.")
        text = f"{speaker.value} mentioned {topic} in turn {i}"
        state.add_event(Event(f"e{i}", text, i))
        bel_a, bel_b = _BELIEF_MIX[rng.randrange(len(_BELIEF_MIX))]
        state.record_belief(BeliefRecord(f"e{i}", Speaker.A, bel_a, i, i))
        state.record_belief(BeliefRecord(f"e{i}", Speaker.B, bel_b, i, i))
    return state


@pytest.fixture
def synthetic_corpus() -> DialogueState:
    return build_synthetic()
