"""Rule-based common ground classifier over gold beliefs, with dialog memory.

Five ordered rules map a belief pair to RT / "JA or IN" / no update; the
JA-vs-IN ambiguity is resolved by searching previously processed events
for one similar enough to count as already established.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, List, Optional, Tuple

from .engine import DialogueState
from .model import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    Event,
    Speaker,
)
from .similarity import SimilarityProvider

logger = logging.getLogger(__name__)

#: Similarity cut-off that maximized macro F1 in the threshold sweep.
DEFAULT_THRESHOLD = 0.92

#: The sweep grid used to pick the default threshold.
SWEEP_GRID = (0.0, 0.2, 0.4, 0.6, 0.8, 0.9, 0.92, 0.95, 1.0)

#: Which belief snapshot the rules consume: settled end-of-dialogue labels,
#: or only what was evidenced by the event's own utterance.
BELIEF_MODES = ("final", "turn")


class Decision(Enum):
    RT = "RT"
    JA_OR_IN = "JA_OR_IN"
    NULL = "NULL"


@dataclass(frozen=True)
class RuleOutcome:
    """What the rule table decided, before JA/IN disambiguation."""

    decision: Decision
    degree: Optional[BeliefLabel] = None
    rule: str = ""


@dataclass(frozen=True)
class MemoryEntry:
    """One processed event with its beliefs and (predicted) CG labels."""

    text: str
    event_id: str
    belief_a: BeliefLabel
    belief_b: BeliefLabel
    cg_a: Optional[CGLabel]
    cg_b: Optional[CGLabel]
    position: int


@dataclass
class DialogMemory:
    """Ordered store of all events processed before the target event."""

    entries: List[MemoryEntry] = field(default_factory=list)

    def append(self, entry: MemoryEntry) -> None:
        if self.entries and entry.position <= self.entries[-1].position:
            raise ValueError("memory entries must be appended in position order")
        self.entries.append(entry)

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def max_similarity(self, text: str, provider: SimilarityProvider) -> float:
        """Best match against any stored entry; 0.0 when empty."""
        return max((provider.similarity(text, e.text) for e in self.entries), default=0.0)


def apply_rules(bel_a: BeliefLabel, bel_b: BeliefLabel) -> RuleOutcome:
    """Evaluate the rule table in order 1..5 on a pair of belief labels.

    Total over all 25 pairs: CT- on either side wins outright (rejection is
    the strongest signal), then the mutual-positive rules, then NB, and any
    pair involving an unannotated side yields no update. PS/PS is not in
    the original table; it is extended symmetrically to "JA or IN" with
    degree PS and logged for audit.
    """
    if BeliefLabel.CT_MINUS in (bel_a, bel_b):
        return RuleOutcome(Decision.RT, rule="1")
    if bel_a is BeliefLabel.CT_PLUS and bel_b is BeliefLabel.CT_PLUS:
        return RuleOutcome(Decision.JA_OR_IN, degree=BeliefLabel.CT_PLUS, rule="2")
    if bel_a is BeliefLabel.PS and bel_b is BeliefLabel.CT_PLUS:
        return RuleOutcome(Decision.JA_OR_IN, degree=BeliefLabel.PS, rule="3")
    if bel_a is BeliefLabel.CT_PLUS and bel_b is BeliefLabel.PS:
        return RuleOutcome(Decision.JA_OR_IN, degree=BeliefLabel.PS, rule="4")
    if BeliefLabel.NB in (bel_a, bel_b):
        return RuleOutcome(Decision.NULL, rule="5")
    if BeliefLabel.NULL in (bel_a, bel_b):
        return RuleOutcome(Decision.NULL, rule="null")
    # Only PS/PS remains.
    logger.debug("PS/PS belief pair extended to JA_OR_IN(PS)")
    return RuleOutcome(Decision.JA_OR_IN, degree=BeliefLabel.PS, rule="ps-ps")


def resolve_ja_in(
    target: Event,
    memory: DialogMemory,
    provider: SimilarityProvider,
    threshold: float = DEFAULT_THRESHOLD,
) -> CGValue:
    """IN iff some stored event is *strictly* more similar than the threshold.

    At threshold 1.0 nothing can exceed it, so every under-determined event
    comes out JA; an empty memory likewise yields JA.
    """
    if not 0.0 <= threshold <= 1.0:
        raise ValueError(f"threshold must be in [0, 1], got {threshold}")
    if memory.max_similarity(target.text, provider) > threshold:
        return CGValue.IN
    return CGValue.JA


def _events_in_dialogue_order(state: DialogueState) -> List[Event]:
    return sorted(state.events.values(), key=lambda e: e.source_utterance)


def _settled_belief(
    state: DialogueState, event: Event, speaker: Speaker, mode: str
) -> Tuple[BeliefLabel, Optional[BeliefRecord]]:
    records = state.belief_history.get((event.id, speaker), [])
    if mode == "turn":
        records = [
            r
            for r in records
            if r.effective_from <= event.source_utterance
            and r.evidence_at <= event.source_utterance
        ]
    if not records:
        return BeliefLabel.NULL, None
    return records[-1].label, records[-1]


def predict_dialogue(
    state: DialogueState,
    provider: SimilarityProvider,
    threshold: float = DEFAULT_THRESHOLD,
    beliefs_at: str = "final",
) -> List[CGRecord]:
    """Predict CG updates for every event, identically for both speakers.

    Events are processed in dialogue order; each is appended to the dialog
    memory afterwards together with its beliefs and predicted CG, so later
    events can be recognized as already established. Events whose beliefs
    leave the rules silent produce no record (the "0" class).

    A predicted record is stamped at the utterance where both consumed
    beliefs hold: max of the event's source and the effective-from of the
    belief records used.
    """
    if beliefs_at not in BELIEF_MODES:
        raise ValueError(f"beliefs_at must be one of {BELIEF_MODES}, got {beliefs_at!r}")
    memory = DialogMemory()
    predictions: List[CGRecord] = []
    for position, event in enumerate(_events_in_dialogue_order(state), 1):
        bel_a, rec_a = _settled_belief(state, event, Speaker.A, beliefs_at)
        bel_b, rec_b = _settled_belief(state, event, Speaker.B, beliefs_at)
        outcome = apply_rules(bel_a, bel_b)
        label: Optional[CGLabel] = None
        if outcome.decision is not Decision.NULL:
            if outcome.decision is Decision.RT:
                label = CGLabel(CGValue.RT)
            else:
                value = resolve_ja_in(event, memory, provider, threshold)
                label = CGLabel(value, degree=outcome.degree)
            at = max(
                event.source_utterance,
                *(r.effective_from for r in (rec_a, rec_b) if r is not None),
            )
            predictions.append(CGRecord(event.id, Speaker.A, label, at))
            predictions.append(CGRecord(event.id, Speaker.B, label, at))
        memory.append(
            MemoryEntry(
                text=event.text,
                event_id=event.id,
                belief_a=bel_a,
                belief_b=bel_b,
                cg_a=label,
                cg_b=label,
                position=position,
            )
        )
    return predictions


def with_predictions(state: DialogueState, predictions: Iterable[CGRecord]) -> DialogueState:
    """A copy of ``state`` whose CG histories are exactly ``predictions``."""
    out = DialogueState(state.id)
    for utterance in state.utterances:
        out.add_utterance(utterance.speaker, utterance.text)
    for event in state.events.values():
        out.add_event(event)
    for record in state.record_log:
        if isinstance(record, BeliefRecord):
            out.record_belief(record)
    for record in sorted(predictions, key=lambda r: r.at):
        out.record_cg(record)
    return out


def sweep_thresholds(
    state: DialogueState,
    provider: SimilarityProvider,
    grid: Iterable[float] = SWEEP_GRID,
    beliefs_at: str = "final",
) -> "dict[float, List[CGRecord]]":
    """Predictions for every threshold in the grid (for sweep reports)."""
    return {
        t: predict_dialogue(state, provider, threshold=t, beliefs_at=beliefs_at) for t in grid
    }
