"""Drive the annotation HTTP service end to end, in process.

Creates a dialogue, annotates it with optimistic concurrency, asks for a
heuristic suggestion, and exports canonical JSON. The same flow works
against `cgw serve` from any HTTP client.
"""

import tempfile

from fastapi.testclient import TestClient

from cgworkbench.server import DialogueStore, create_app

with tempfile.TemporaryDirectory() as data_dir:
    client = TestClient(create_app(DialogueStore(data_dir)))

    created = client.post("/dialogues", json={
        "id": "demo",
        "utterances": [
            {"speaker": "A", "text": "Did you water the plants?"},
            {"speaker": "B", "text": "No, I forgot."},
        ],
    })
    revision = created.json()["revision"]
    print("created dialogue at revision", revision)

    response = client.post("/dialogues/demo/events", json={
        "id": "e1", "text": "B watered the plants", "source_utterance": 1,
        "revision": revision,
    })
    revision = response.json()["revision"]

    for speaker, label, effective_from, evidence_at in (
        ("A", "PS", 1, 1),      # the question signals possible belief
        ("B", "CT-", 1, 2),     # B always knew otherwise: back-dated
        ("A", "CT-", 2, 2),     # A revises after hearing the answer
    ):
        response = client.post("/dialogues/demo/beliefs", json={
            "event": "e1", "speaker": speaker, "label": label,
            "effective_from": effective_from, "evidence_at": evidence_at,
            "revision": revision,
        })
        revision = response.json()["revision"]

    suggestion = client.get("/dialogues/demo/suggest/e1").json()
    print("suggestion for e1:", suggestion["decision"], f"(rule {suggestion['rule']})")

    stale = client.post("/dialogues/demo/cg", json={
        "event": "e1", "speaker": "A", "label": "RT", "at": 2, "revision": 0,
    })
    print("writing with a stale revision ->", stale.status_code)

    for speaker in ("A", "B"):
        response = client.post("/dialogues/demo/cg", json={
            "event": "e1", "speaker": speaker, "label": "RT", "at": 2,
            "revision": revision,
        })
        revision = response.json()["revision"]

    print("diagnostics:", client.get("/dialogues/demo/diagnostics").json())
    print("history:", [f"{r['type']}:{r['label']}" for r in
                       client.get("/dialogues/demo/history/e1").json()])
    print("--- canonical export ---")
    print(client.get("/dialogues/demo/export").text)
