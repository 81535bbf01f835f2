import json

import pytest
from conftest import DATA_DIR, build_reilly
from fastapi.testclient import TestClient

from cgworkbench import corpusio
from cgworkbench.server import DialogueStore, create_app, revision_of


@pytest.fixture
def store(tmp_path):
    (tmp_path / "reilly.cg.json").write_bytes((DATA_DIR / "reilly.cg.json").read_bytes())
    return DialogueStore(tmp_path)


@pytest.fixture
def client(store):
    with TestClient(create_app(store)) as c:
        yield c


def _rev(client, dialogue_id="reilly"):
    return client.get(f"/dialogues/{dialogue_id}").json()["revision"]


class TestReads:
    def test_list_dialogues(self, client):
        [entry] = client.get("/dialogues").json()
        assert entry["id"] == "reilly"
        assert entry["utterances"] == 2
        assert entry["events"] == 3

    def test_snapshot_at_time(self, client):
        snap = client.get("/dialogues/reilly", params={"at": 1}).json()
        assert snap["beliefs"]["B"]["e2"] == "CT-"  # back-dated judgment visible at t=1
        assert snap["cg"]["A"] == {"e1": {"label": "JA", "degree": None}}
        assert len(snap["utterances"]) == 2  # look-ahead is client-managed

    def test_snapshot_default_is_end(self, client):
        snap = client.get("/dialogues/reilly").json()
        assert snap["cg"]["A"]["e2"]["label"] == "RT"

    def test_unknown_dialogue_404(self, client):
        assert client.get("/dialogues/zzz").status_code == 404

    def test_history(self, client):
        records = client.get("/dialogues/reilly/history/e2").json()
        assert [r["type"] for r in records] == ["belief", "belief", "belief", "cg", "cg"]
        assert records[1]["effective_from"] == 1
        assert records[1]["evidence_at"] == 2

    def test_history_unknown_event_404(self, client):
        assert client.get("/dialogues/reilly/history/e99").status_code == 404

    def test_diagnostics_clean(self, client):
        assert client.get("/dialogues/reilly/diagnostics").json() == []

    def test_export_is_canonical(self, client):
        body = client.get("/dialogues/reilly/export").content
        assert body == (DATA_DIR / "reilly.cg.json").read_bytes()


class TestMutations:
    def test_belief_round_trip(self, tmp_path):
        store = DialogueStore(tmp_path)
        with TestClient(create_app(store)) as client:
            created = client.post(
                "/dialogues",
                json={
                    "id": "d1",
                    "utterances": [
                        {"speaker": "A", "text": "Did B fix the sink?"},
                        {"speaker": "B", "text": "No."},
                    ],
                },
            )
            assert created.status_code == 201
            rev = created.json()["revision"]
            resp = client.post(
                "/dialogues/d1/events",
                json={"id": "e2", "text": "B fixed the sink", "source_utterance": 1,
                      "revision": rev},
            )
            assert resp.status_code == 200
            rev = resp.json()["revision"]
            resp = client.post(
                "/dialogues/d1/beliefs",
                json={"event": "e2", "speaker": "B", "label": "CT-", "effective_from": 1,
                      "evidence_at": 2, "revision": rev},
            )
            assert resp.status_code == 200
            snap = client.get("/dialogues/d1", params={"at": 1}).json()
            assert snap["beliefs"]["B"]["e2"] == "CT-"

    def test_suggest_rt_after_both_ctminus(self, client):
        suggestion = client.get("/dialogues/reilly/suggest/e2").json()
        assert suggestion == {
            "advisory": True,
            "decision": "RT",
            "degree": None,
            "rule": "1",
            "beliefs": {"A": "CT-", "B": "CT-"},
            "max_similarity": None,
            "threshold": 0.92,
        }

    def test_suggest_never_mutates(self, client):
        before = client.get("/dialogues/reilly/export").content
        client.get("/dialogues/reilly/suggest/e3", params={"threshold": 0.5})
        assert client.get("/dialogues/reilly/export").content == before

    def test_cg_unknown_event_is_422(self, client):
        resp = client.post(
            "/dialogues/reilly/cg",
            json={"event": "e9", "speaker": "A", "label": "JA", "at": 1,
                  "revision": _rev(client)},
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "UNKNOWN_EVENT"

    def test_engine_precondition_is_422_with_diagnostic(self, client):
        resp = client.post(
            "/dialogues/reilly/beliefs",
            json={"event": "e2", "speaker": "A", "label": "PS", "effective_from": 1,
                  "evidence_at": 1, "revision": _rev(client)},
        )
        assert resp.status_code == 422
        payload = resp.json()
        assert payload["severity"] == "error"
        assert payload["code"] == "OUT_OF_ORDER"

    def test_schema_violation_is_400(self, client):
        resp = client.post("/dialogues/reilly/beliefs", json={"event": "e2"})
        assert resp.status_code == 400
        assert resp.json()["error"] == "schema violation"

    def test_constructor_invariants_are_422(self, client):
        resp = client.post(
            "/dialogues/reilly/beliefs",
            json={"event": "e3", "speaker": "A", "label": "PS", "effective_from": 2,
                  "evidence_at": 1, "revision": _rev(client)},
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "INVALID_VALUE"
        resp = client.post(
            "/dialogues/reilly/events",
            json={"id": "e4", "text": "x happened", "source_utterance": 1,
                  "negates": "e2", "revision": _rev(client)},
        )
        assert resp.status_code == 422  # negates without derived_negation kind

    def test_bad_label_is_422(self, client):
        resp = client.post(
            "/dialogues/reilly/cg",
            json={"event": "e3", "speaker": "A", "label": "XX", "at": 2,
                  "revision": _rev(client)},
        )
        assert resp.status_code == 422
        assert resp.json()["code"] == "BAD_LABEL"

    def test_stale_revision_is_409(self, client):
        rev = _rev(client)
        first = {"speaker": "A", "text": "one more thing", "revision": rev}
        assert client.post("/dialogues/reilly/utterances", json=first).status_code == 200
        second = {"speaker": "B", "text": "me too", "revision": rev}
        resp = client.post("/dialogues/reilly/utterances", json=second)
        assert resp.status_code == 409
        assert resp.json()["current_revision"] == rev + 1

    def test_mutation_persisted_atomically(self, tmp_path):
        store = DialogueStore(tmp_path)
        with TestClient(create_app(store)) as client:
            client.post("/dialogues", json={"id": "d1", "utterances": [
                {"speaker": "A", "text": "hello"}]})
            rev = client.get("/dialogues/d1").json()["revision"]
            client.post("/dialogues/d1/utterances",
                        json={"speaker": "B", "text": "hi", "revision": rev})
        reloaded = DialogueStore(tmp_path)
        assert revision_of(reloaded.get("d1")) == 2
        assert reloaded.get("d1").utterances[1].text == "hi"

    def test_create_conflict(self, client):
        assert client.post("/dialogues", json={"id": "reilly"}).status_code == 409


class TestScriptedAnnotation:
    def test_full_dialogue_export_matches_fixture(self, tmp_path):
        """Rebuilding the worked example through the raw API reproduces the
        canonical fixture byte for byte."""
        expected = build_reilly()
        store = DialogueStore(tmp_path)
        with TestClient(create_app(store)) as client:
            resp = client.post(
                "/dialogues",
                json={
                    "id": "reilly",
                    "utterances": [
                        {"speaker": u.speaker.value, "text": u.text}
                        for u in expected.utterances
                    ],
                },
            )
            rev = resp.json()["revision"]
            for event in expected.events.values():
                resp = client.post(
                    "/dialogues/reilly/events",
                    json={
                        "id": event.id,
                        "text": event.text,
                        "source_utterance": event.source_utterance,
                        "kind": event.kind.value,
                        "negates": event.negates,
                        "revision": rev,
                    },
                )
                assert resp.status_code == 200, resp.text
                rev = resp.json()["revision"]
            for record in expected.record_log:
                payload = json.loads(json.dumps(_record_payload(record)))
                payload["revision"] = rev
                kind = "beliefs" if payload.pop("_kind") == "belief" else "cg"
                resp = client.post(f"/dialogues/reilly/{kind}", json=payload)
                assert resp.status_code == 200, resp.text
                rev = resp.json()["revision"]
            export = client.get("/dialogues/reilly/export").content
        assert export == corpusio.to_json(expected)
        assert export == (DATA_DIR / "reilly.cg.json").read_bytes()


def _record_payload(record):
    from cgworkbench.model import BeliefRecord

    if isinstance(record, BeliefRecord):
        return {
            "_kind": "belief",
            "event": record.event,
            "speaker": record.speaker.value,
            "label": record.label.token,
            "effective_from": record.effective_from,
            "evidence_at": record.evidence_at,
        }
    return {
        "_kind": "cg",
        "event": record.event,
        "speaker": record.speaker.value,
        "label": record.label.value.value,
        "degree": record.label.degree.token if record.label.degree else None,
        "at": record.at,
    }
