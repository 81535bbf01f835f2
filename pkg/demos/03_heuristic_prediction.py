"""Predict CG updates from gold beliefs with the rule table + dialog memory.

Rules: a CT- on either side rejects the event (RT); mutual positive belief
joins it (JA or IN, at the less certain degree); NB or missing annotation
yields no update. The JA/IN split is decided by searching previously
processed events for a near-duplicate.
"""

from cgworkbench import (
    BeliefLabel,
    BeliefRecord,
    DialogueState,
    Event,
    LexicalSimilarity,
    Severity,
    Speaker,
    apply_rules,
    predict_dialogue,
    with_predictions,
)

for pair in [("CT+", "CT+"), ("PS", "CT+"), ("CT-", "NB"), ("NB", "CT+"), ("PS", "PS")]:
    bel_a, bel_b = (BeliefLabel.parse(t) for t in pair)
    outcome = apply_rules(bel_a, bel_b)
    degree = f"({outcome.degree.token})" if outcome.degree else ""
    print(f"Bel(A)={pair[0]:>3}, Bel(B)={pair[1]:>3} -> {outcome.decision.value}{degree}"
          f"   [rule {outcome.rule}]")

# A dialogue where the same proposition comes up twice: the second mention
# should be recognized as already in common ground.
state = DialogueState("memory-demo")
texts = [
    ("A", "We finally sold the old car."),
    ("B", "Good, the old car was rusting."),
    ("A", "Like I said, we sold the old car."),
]
events = [
    ("e1", "A and B sold the old car", 1),
    ("e2", "the old car was rusting", 2),
    ("e3", "A and B sold the old car", 3),
]
for speaker, text in texts:
    state.add_utterance(Speaker.parse(speaker), text)
for eid, text, source in events:
    state.add_event(Event(eid, text, source))
    state.record_belief(BeliefRecord(eid, Speaker.A, BeliefLabel.CT_PLUS, source, source))
    state.record_belief(BeliefRecord(eid, Speaker.B, BeliefLabel.CT_PLUS, source, source))

print("\npredictions at threshold 0.92:")
for record in predict_dialogue(state, LexicalSimilarity(), threshold=0.92):
    if record.speaker is Speaker.A:  # both speakers always get the same label
        print(f"  {record.event}: {record.label.token}  (at utterance {record.at})")

print("\nat threshold 1.0 nothing clears the bar, so no IN predictions:")
for record in predict_dialogue(state, LexicalSimilarity(), threshold=1.0):
    if record.speaker is Speaker.A:
        print(f"  {record.event}: {record.label.token}")

checked = with_predictions(state, predict_dialogue(state, LexicalSimilarity()))
errors = [d for d in checked.validate() if d.severity is Severity.ERROR]
warnings = [d for d in checked.validate() if d.severity is Severity.WARNING]
print(f"\nvalidation of predicted records: {len(errors)} errors, "
      f"{len(warnings)} warnings ({sorted({d.code for d in warnings}) or 'none'})")
