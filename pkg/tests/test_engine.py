import pytest
from conftest import build_reilly
from hypothesis import given, settings
from hypothesis import strategies as st

from cgworkbench import corpusio
from cgworkbench.engine import DialogueState, Severity
from cgworkbench.errors import EngineError
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

JA = CGLabel(CGValue.JA)
IN = CGLabel(CGValue.IN)
RT = CGLabel(CGValue.RT)


class TestAddUtterance:
    def test_first_utterance(self):
        state = DialogueState("d")
        assert state.add_utterance(Speaker.A, "So you've been leading the life of Reilly huh?") == 1

    def test_second_utterance(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "hi")
        assert state.add_utterance(Speaker.B, "No. Not really.") == 2
        assert [u.index for u in state.utterances] == [1, 2]

    def test_empty_rejected(self):
        state = DialogueState("d")
        with pytest.raises(EngineError, match="empty utterance"):
            state.add_utterance(Speaker.A, "")


class TestAddEvent:
    def test_register_kinds(self, reilly):
        assert reilly.events["e1"].kind is EventKind.SPEECH_ACT
        assert reilly.events["e2"].kind is EventKind.ASSERTED
        assert reilly.events["e3"].negates == "e2"

    def test_duplicate_id(self, reilly):
        with pytest.raises(EngineError, match="duplicate"):
            reilly.add_event(Event("e1", "again", 1))

    def test_dangling_source(self, reilly):
        with pytest.raises(EngineError, match="does not exist"):
            reilly.add_event(Event("e9", "x", 9))

    def test_dangling_negates(self, reilly):
        with pytest.raises(EngineError, match="unknown event"):
            reilly.add_event(Event("e9", "x", 1, kind=EventKind.DERIVED_NEGATION, negates="zz"))


class TestRecordBelief:
    def test_reilly_records_accepted(self, reilly):
        # Construction in conftest covers the three examples, incl. back-dating.
        assert len(reilly.belief_history[("e2", Speaker.A)]) == 2
        assert reilly.belief_history[("e2", Speaker.B)][0].effective_from == 1

    def test_unknown_event(self, reilly):
        with pytest.raises(EngineError, match="unknown event"):
            reilly.record_belief(BeliefRecord("e9", Speaker.A, BeliefLabel.PS, 1, 1))

    def test_out_of_order_evidence(self, reilly):
        with pytest.raises(EngineError, match="out-of-order"):
            reilly.record_belief(BeliefRecord("e2", Speaker.A, BeliefLabel.PS, 1, 2))

    def test_evidence_beyond_dialogue(self, reilly):
        with pytest.raises(EngineError, match="beyond last utterance"):
            reilly.record_belief(BeliefRecord("e3", Speaker.A, BeliefLabel.PS, 3, 3))


class TestRecordCG:
    def test_unknown_event(self, reilly):
        with pytest.raises(EngineError, match="unknown event"):
            reilly.record_cg(CGRecord("e9", Speaker.A, JA, 1))

    def test_out_of_order_at(self, reilly):
        with pytest.raises(EngineError, match="out-of-order"):
            reilly.record_cg(CGRecord("e1", Speaker.A, JA, 1))


class TestBeliefAt:
    def test_back_dated_visible_at_question_time(self, reilly):
        assert reilly.belief_at("e2", Speaker.B, 1) is BeliefLabel.CT_MINUS

    def test_revision(self, reilly):
        assert reilly.belief_at("e2", Speaker.A, 1) is BeliefLabel.PS
        assert reilly.belief_at("e2", Speaker.A, 2) is BeliefLabel.CT_MINUS

    def test_null_before_any_record(self, reilly):
        assert reilly.belief_at("e3", Speaker.A, 1) is BeliefLabel.NULL

    def test_unknown_event(self, reilly):
        with pytest.raises(EngineError, match="unknown event"):
            reilly.belief_at("e9", Speaker.A, 1)

    def test_known_by_hides_lookahead(self, reilly):
        assert reilly.belief_known_by("e2", Speaker.B, 1) is BeliefLabel.NULL
        assert reilly.belief_known_by("e2", Speaker.B, 2) is BeliefLabel.CT_MINUS


class TestCGState:
    def test_end_state_both_speakers(self, reilly):
        expected = {"e1": JA, "e2": RT, "e3": JA}
        assert reilly.cg_state(Speaker.A, 2) == expected
        assert reilly.cg_state(Speaker.B, 2) == expected

    def test_mid_dialogue(self, reilly):
        assert reilly.cg_state(Speaker.B, 1) == {"e1": JA}

    def test_before_dialogue(self, reilly):
        assert reilly.cg_state(Speaker.A, 0) == {}

    def test_queries_do_not_mutate(self, reilly):
        before = corpusio.to_json(reilly)
        reilly.cg_state(Speaker.A, 2)
        reilly.belief_at("e2", Speaker.B, 1)
        reilly.history("e2")
        reilly.validate()
        assert corpusio.to_json(reilly) == before

    @given(t1=st.integers(0, 2), t2=st.integers(0, 2))
    @settings(max_examples=20)
    def test_monotone_in_time(self, t1, t2):
        state = build_reilly()
        if t1 > t2:
            t1, t2 = t2, t1
        assert set(state.cg_state(Speaker.A, t1)) <= set(state.cg_state(Speaker.A, t2))


class TestValidate:
    def test_reilly_clean(self, reilly):
        assert reilly.validate() == []

    def test_ja_without_mutual_belief(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "x")
        state.add_event(Event("e2", "B did x", 1))
        state.record_belief(BeliefRecord("e2", Speaker.A, BeliefLabel.CT_PLUS, 1, 1))
        state.record_belief(BeliefRecord("e2", Speaker.B, BeliefLabel.CT_MINUS, 1, 1))
        state.record_cg(CGRecord("e2", Speaker.A, JA, 1))
        codes = [(d.severity, d.code) for d in state.validate()]
        assert (Severity.ERROR, "JA_WITHOUT_MUTUAL_BELIEF") in codes

    def test_in_without_prior_is_warning(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "x")
        state.add_event(Event("e1", "A did x", 1))
        state.record_belief(BeliefRecord("e1", Speaker.A, BeliefLabel.CT_PLUS, 1, 1))
        state.record_belief(BeliefRecord("e1", Speaker.B, BeliefLabel.CT_PLUS, 1, 1))
        state.record_cg(CGRecord("e1", Speaker.A, IN, 1))
        state.record_cg(CGRecord("e1", Speaker.B, IN, 1))
        diagnostics = state.validate()
        assert {d.code for d in diagnostics} == {"IN_WITHOUT_PRIOR"}
        assert all(d.severity is Severity.WARNING for d in diagnostics)

    def test_rt_without_ctminus(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "x")
        state.add_event(Event("e1", "A did x", 1))
        state.record_belief(BeliefRecord("e1", Speaker.A, BeliefLabel.CT_PLUS, 1, 1))
        state.record_cg(CGRecord("e1", Speaker.A, RT, 1))
        codes = [(d.severity, d.code) for d in state.validate()]
        assert (Severity.ERROR, "RT_WITHOUT_CTMINUS") in codes

    def test_degree_mismatch(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "x")
        state.add_event(Event("e1", "A did x", 1))
        state.record_belief(BeliefRecord("e1", Speaker.A, BeliefLabel.PS, 1, 1))
        state.record_belief(BeliefRecord("e1", Speaker.B, BeliefLabel.CT_PLUS, 1, 1))
        state.record_cg(CGRecord("e1", Speaker.A, CGLabel(CGValue.JA, BeliefLabel.CT_PLUS), 1))
        codes = [(d.severity, d.code) for d in state.validate()]
        assert (Severity.ERROR, "DEGREE_MISMATCH") in codes

    def test_divergence_reported_as_warning(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "x")
        state.add_event(Event("e1", "A did x", 1))
        state.record_belief(BeliefRecord("e1", Speaker.A, BeliefLabel.CT_PLUS, 1, 1))
        state.record_belief(BeliefRecord("e1", Speaker.B, BeliefLabel.CT_PLUS, 1, 1))
        state.record_cg(CGRecord("e1", Speaker.A, JA, 1))
        diagnostics = state.validate()
        assert [d.code for d in diagnostics] == ["CG_SPEAKER_DIVERGENCE"]
        assert diagnostics[0].severity is Severity.WARNING

    def test_ordering_deterministic(self):
        state = DialogueState("d")
        state.add_utterance(Speaker.A, "x")
        for eid in ("e2", "e1"):
            state.add_event(Event(eid, f"{eid} happened", 1))
            state.record_cg(CGRecord(eid, Speaker.A, RT, 1))
        diagnostics = state.validate()
        keys = [(d.event, d.code) for d in diagnostics]
        assert keys == sorted(keys)


class TestHistory:
    def test_e2_merged_order(self, reilly):
        records = reilly.history("e2")
        summary = [
            (type(r).__name__, r.speaker.value)
            + ((r.effective_from, r.evidence_at) if hasattr(r, "evidence_at") else (r.at,))
            for r in records
        ]
        assert summary == [
            ("BeliefRecord", "A", 1, 1),
            ("BeliefRecord", "B", 1, 2),
            ("BeliefRecord", "A", 2, 2),
            ("CGRecord", "A", 2),
            ("CGRecord", "B", 2),
        ]

    def test_unknown_event(self, reilly):
        with pytest.raises(EngineError, match="unknown event"):
            reilly.history("e9")

    def test_e1_counts(self, reilly):
        records = reilly.history("e1")
        assert len(records) == 4
        assert sum(isinstance(r, BeliefRecord) for r in records) == 2


class TestReplayDeterminism:
    def test_replay_is_bit_identical(self, reilly):
        blob = corpusio.to_json(reilly)
        assert corpusio.to_json(corpusio.from_json(blob)) == blob
