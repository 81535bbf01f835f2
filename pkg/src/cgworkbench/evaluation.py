"""Classification scoring and corpus statistics with the reporting
conventions used throughout: percentages, macro F1 over the non-null
classes only, accuracy over everything, and speaker-averaged tables.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence, Tuple

from .engine import DialogueState
from .errors import CGError
from .model import BeliefLabel, Speaker

#: Class universes per task; "0" is the no-annotation class, excluded from
#: macro F1 but counted in accuracy denominators.
NULL_CLASS = "0"
BELIEF_CLASSES = ("CT+", "CT-", "PS", "NB", NULL_CLASS)
BELIEF_MACRO_CLASSES = ("CT+", "CT-", "PS", "NB")
CG_CLASSES = ("JA", "IN", "RT", NULL_CLASS)
CG_MACRO_CLASSES = ("JA", "IN", "RT")


def macro_average(values: Iterable[float]) -> float:
    """Unweighted arithmetic mean, the macro aggregation used in all tables."""
    values = list(values)
    if not values:
        raise CGError("macro average of an empty class set")
    return sum(values) / len(values)


@dataclass(frozen=True)
class EvalReport:
    """Per-class F1, macro F1 and accuracy, all as percentages in [0, 100]."""

    per_class_f1: Mapping[str, float]
    macro_f1: float
    accuracy: float
    support: Mapping[str, float]
    macro_classes: Tuple[str, ...]

    def to_dict(self) -> dict:
        return {
            "per_class_f1": dict(self.per_class_f1),
            "macro_f1": self.macro_f1,
            "accuracy": self.accuracy,
            "support": dict(self.support),
            "macro_classes": list(self.macro_classes),
        }

    def to_text(self) -> str:
        classes = list(self.per_class_f1)
        header = [f"{c} F1" for c in classes] + ["Macro F1", "Accuracy"]
        values = [self.per_class_f1[c] for c in classes] + [self.macro_f1, self.accuracy]
        width = max(len(h) for h in header) + 2
        return (
            "".join(h.rjust(width) for h in header)
            + "\n"
            + "".join(f"{v:.2f}".rjust(width) for v in values)
        )


def _f1(tp: int, fp: int, fn: int) -> float:
    denom = 2 * tp + fp + fn
    if denom == 0:
        return 0.0
    return 2 * tp / denom


def score(
    gold: Sequence[str],
    pred: Sequence[str],
    macro_classes: Sequence[str],
    accuracy_skip_null: bool = False,
    null_label: str = NULL_CLASS,
) -> EvalReport:
    """Score predictions against gold labels.

    Per-class F1 is reported for every macro class plus any label that
    actually occurs; undefined precision/recall counts as 0. Macro F1
    averages the macro classes only. Accuracy runs over all items unless
    ``accuracy_skip_null`` drops items whose gold label is the null class.
    """
    if len(gold) != len(pred):
        raise CGError(f"length mismatch: {len(gold)} gold vs {len(pred)} predictions")
    if not macro_classes:
        raise CGError("macro_classes must be non-empty")
    gold = [str(g) for g in gold]
    pred = [str(p) for p in pred]

    classes = list(dict.fromkeys([*macro_classes, *sorted(set(gold) | set(pred))]))
    per_class: Dict[str, float] = {}
    for c in classes:
        tp = sum(g == c and p == c for g, p in zip(gold, pred))
        fp = sum(g != c and p == c for g, p in zip(gold, pred))
        fn = sum(g == c and p != c for g, p in zip(gold, pred))
        per_class[c] = 100.0 * _f1(tp, fp, fn)

    scored = list(zip(gold, pred))
    if accuracy_skip_null:
        scored = [(g, p) for g, p in scored if g != null_label]
    accuracy = 100.0 * (sum(g == p for g, p in scored) / len(scored)) if scored else 0.0

    support = Counter(gold)
    return EvalReport(
        per_class_f1=per_class,
        macro_f1=macro_average(per_class[c] for c in macro_classes),
        accuracy=accuracy,
        support={c: float(support.get(c, 0)) for c in classes},
        macro_classes=tuple(macro_classes),
    )


def speaker_avg(report_a: EvalReport, report_b: EvalReport) -> EvalReport:
    """Field-wise mean of the two per-speaker reports."""
    if set(report_a.per_class_f1) != set(report_b.per_class_f1) or (
        report_a.macro_classes != report_b.macro_classes
    ):
        raise CGError("class-set mismatch between speaker reports")
    return EvalReport(
        per_class_f1={
            c: (report_a.per_class_f1[c] + report_b.per_class_f1[c]) / 2
            for c in report_a.per_class_f1
        },
        macro_f1=(report_a.macro_f1 + report_b.macro_f1) / 2,
        accuracy=(report_a.accuracy + report_b.accuracy) / 2,
        support={
            c: (report_a.support.get(c, 0.0) + report_b.support.get(c, 0.0)) / 2
            for c in set(report_a.support) | set(report_b.support)
        },
        macro_classes=report_a.macro_classes,
    )


@dataclass(frozen=True)
class DistributionReport:
    """Corpus annotation counts: one final label per (event, speaker)."""

    utterances: int
    events: int
    beliefs: Mapping[str, int]
    cg: Mapping[str, int]

    def to_dict(self) -> dict:
        return {
            "utterances": self.utterances,
            "events": self.events,
            "beliefs": dict(self.beliefs),
            "cg": dict(self.cg),
        }

    def to_text(self) -> str:
        lines = [
            f"{'Utterance':<18}{self.utterances:>8}",
            f"{'Event':<18}{self.events:>8}",
        ]
        for label in BELIEF_CLASSES:
            lines.append(f"{'Bel(A)+Bel(B) ' + label:<18}{self.beliefs[label]:>8}")
        for label in CG_CLASSES:
            lines.append(f"{'CG(A)+CG(B) ' + label:<18}{self.cg[label]:>8}")
        return "\n".join(lines)


def final_labels(state: DialogueState, speaker: Speaker) -> Dict[str, Tuple[str, str]]:
    """Final (belief, cg) label tokens per event for one speaker; "0" if none."""
    end = state.num_utterances
    out: Dict[str, Tuple[str, str]] = {}
    cg_now = state.cg_state(speaker, end) if end else {}
    for event_id in state.events:
        belief = state.belief_at(event_id, speaker, end) if end else BeliefLabel.NULL
        cg = cg_now.get(event_id)
        out[event_id] = (belief.token, cg.value.value if cg else NULL_CLASS)
    return out


def distribution(states: Iterable[DialogueState]) -> DistributionReport:
    """Annotation type counts summed over Bel(A)+Bel(B) and CG(A)+CG(B).

    Following the corpus tables, each (event, speaker) contributes exactly
    one belief and one CG label: the final one, or "0" when unannotated.
    """
    utterances = 0
    events = 0
    beliefs: Counter = Counter({label: 0 for label in BELIEF_CLASSES})
    cg: Counter = Counter({label: 0 for label in CG_CLASSES})
    for state in states:
        utterances += state.num_utterances
        events += len(state.events)
        for speaker in (Speaker.A, Speaker.B):
            for belief_token, cg_token in final_labels(state, speaker).values():
                beliefs[belief_token] += 1
                cg[cg_token] += 1
    return DistributionReport(utterances, events, dict(beliefs), dict(cg))
