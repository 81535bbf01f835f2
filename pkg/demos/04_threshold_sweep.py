"""Sweep the similarity threshold and score each setting against gold CG.

Low thresholds over-predict IN (everything looks familiar); a threshold of
1.0 can never fire under a clamped similarity, so IN predictions vanish.
The count of IN predictions is non-increasing along the grid.
"""

import random

from cgworkbench import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    DialogueState,
    Event,
    LexicalSimilarity,
    Speaker,
    predict_dialogue,
    score,
    speaker_avg,
)
from cgworkbench.corpusio import predictions_from_records
from cgworkbench.evaluation import CG_MACRO_CLASSES, final_labels
from cgworkbench.heuristics import SWEEP_GRID

rng = random.Random(42)
topics = ["the lake house", "dad's surgery", "the broken fence", "tax season",
          "the twins' recital", "the neighbor's dog"]

state = DialogueState("sweep-demo")
for i in range(1, 41):
    speaker = Speaker.A if i % 2 else Speaker.B
    topic = topics[(i - 1) % len(topics)]
    state.add_utterance(speaker, f"Turn {i}, about {topic}.")
    repeat = i > 6 and rng.random() < 0.35
    if repeat:
        text = state.events[f"e{i - 6}"].text + " again"
        gold = CGValue.IN
    else:
        text = f"{speaker.value} brought up {topic} around turn {i}"
        gold = CGValue.JA
    state.add_event(Event(f"e{i}", text, i))
    state.record_belief(BeliefRecord(f"e{i}", Speaker.A, BeliefLabel.CT_PLUS, i, i))
    state.record_belief(BeliefRecord(f"e{i}", Speaker.B, BeliefLabel.CT_PLUS, i, i))
    state.record_cg(CGRecord(f"e{i}", Speaker.A, CGLabel(gold), i))
    state.record_cg(CGRecord(f"e{i}", Speaker.B, CGLabel(gold), i))

gold = {speaker: final_labels(state, speaker) for speaker in (Speaker.A, Speaker.B)}
events = list(state.events)

header = ["Threshold", "JA F1", "IN F1", "RT F1", "Macro F1", "Accuracy", "#IN"]
print("".join(h.rjust(11) for h in header))
for threshold in SWEEP_GRID:
    records = predict_dialogue(state, LexicalSimilarity(), threshold=threshold)
    predicted = predictions_from_records(state, records)
    reports = [
        score(
            [gold[speaker][e][1] for e in events],
            [predicted[e][column] for e in events],
            CG_MACRO_CLASSES,
        )
        for column, speaker in enumerate((Speaker.A, Speaker.B))
    ]
    avg = speaker_avg(*reports)
    in_count = sum(labels.count("IN") for labels in predicted.values())
    print(
        f"{threshold:>11g}"
        + f"{avg.per_class_f1['JA']:>11.2f}{avg.per_class_f1['IN']:>11.2f}"
        + f"{avg.per_class_f1['RT']:>11.2f}{avg.macro_f1:>11.2f}{avg.accuracy:>11.2f}"
        + f"{in_count:>11d}"
    )
