"""Walk through annotating a two-utterance dialogue.

A asks whether B has been "leading the life of Reilly"; B denies it. That
single exchange exercises every moving part: a speech-act event, a
questioned event, a derived negation, belief revision, look-ahead
back-dating, and a rejection entering both speakers' CG models as RT.
"""

from cgworkbench import (
    BeliefLabel,
    BeliefRecord,
    CGLabel,
    CGRecord,
    CGValue,
    DialogueState,
    Event,
    EventKind,
    Speaker,
)

state = DialogueState("walkthrough")
state.add_utterance(Speaker.A, "So you've been leading the life of Reilly huh?")
state.add_utterance(Speaker.B, "No. Not really.")

# The question itself is an event (speech act); the questioned proposition
# is another; B's denial spawns a fully fledged negated event.
state.add_event(Event("e1", "A asks B if B has been leading the life of Reilly", 1,
                      kind=EventKind.SPEECH_ACT))
state.add_event(Event("e2", "B has been leading the life of Reilly", 1))
state.add_event(Event("e3", "B has not been leading the life of Reilly", 2,
                      kind=EventKind.DERIVED_NEGATION, negates="e2"))

# Utterance 1: both speakers certainly believe the question was asked, and
# it enters both CG models immediately.
state.record_belief(BeliefRecord("e1", Speaker.A, BeliefLabel.CT_PLUS, 1, 1))
state.record_belief(BeliefRecord("e1", Speaker.B, BeliefLabel.CT_PLUS, 1, 1))
state.record_cg(CGRecord("e1", Speaker.A, CGLabel(CGValue.JA), 1))
state.record_cg(CGRecord("e1", Speaker.B, CGLabel(CGValue.JA), 1))
# A's rising intonation marks possible belief in e2.
state.record_belief(BeliefRecord("e2", Speaker.A, BeliefLabel.PS, 1, 1))

# Utterance 2: A revises to CT-. B's denial also tells the overhearer that
# B *always* disbelieved e2, so B's record is back-dated: it holds from
# utterance 1 but its evidence is utterance 2.
state.record_belief(BeliefRecord("e2", Speaker.A, BeliefLabel.CT_MINUS, 2, 2))
state.record_belief(BeliefRecord("e3", Speaker.A, BeliefLabel.CT_PLUS, 2, 2))
state.record_belief(BeliefRecord("e2", Speaker.B, BeliefLabel.CT_MINUS,
                                 effective_from=1, evidence_at=2))
state.record_belief(BeliefRecord("e3", Speaker.B, BeliefLabel.CT_PLUS, 2, 2))
state.record_cg(CGRecord("e2", Speaker.A, CGLabel(CGValue.RT), 2))
state.record_cg(CGRecord("e3", Speaker.A, CGLabel(CGValue.JA), 2))
state.record_cg(CGRecord("e2", Speaker.B, CGLabel(CGValue.RT), 2))
state.record_cg(CGRecord("e3", Speaker.B, CGLabel(CGValue.JA), 2))

print("Beliefs about e2 over time (settled view):")
for t in (1, 2):
    a = state.belief_at("e2", Speaker.A, t).token
    b = state.belief_at("e2", Speaker.B, t).token
    print(f"  t={t}: Bel(A)={a:>3}  Bel(B)={b:>3}")
print("Note Bel(B)=CT- already at t=1: look-ahead back-dated it.")
print("Mid-dialogue view at t=1 (evidence up to t only):",
      state.belief_known_by("e2", Speaker.B, 1).token)

print("\nCG models at the end of the dialogue:")
for speaker in (Speaker.A, Speaker.B):
    labels = {e: label.token for e, label in state.cg_state(speaker, 2).items()}
    print(f"  CG({speaker.value}) = {labels}")

print("\nFull history of e2:")
for record in state.history("e2"):
    print(f"  {record}")

print("\nConsistency diagnostics:", state.validate() or "none")
