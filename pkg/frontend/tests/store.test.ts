import { beforeEach, describe, expect, it } from "vitest";

import { ApiClient } from "../src/api";
import { AnnotationStore } from "../src/store";
import { FakeServer } from "./fake-server";

let server: FakeServer;
let store: AnnotationStore;

beforeEach(() => {
  server = new FakeServer();
  store = new AnnotationStore(new ApiClient("http://fake", server.fetch));
});

async function openTwoTurnDialogue(): Promise<void> {
  await store.create("d1", [
    { speaker: "A", text: "Did B fix the sink?" },
    { speaker: "B", text: "No." },
  ]);
}

describe("AnnotationStore", () => {
  it("opens a dialogue and positions the cursor at the first utterance", async () => {
    await openTwoTurnDialogue();
    const state = store.getState();
    expect(state.dialogueId).toBe("d1");
    expect(state.cursor).toBe(1);
    expect(state.snapshot!.utterances).toHaveLength(2);
  });

  it("reading pane shows the cursor plus one look-ahead utterance", async () => {
    await openTwoTurnDialogue();
    expect(store.visibleUtterances().map((u) => u.index)).toEqual([1, 2]);
    await store.stepCursor(-1); // cursor 0: only look-ahead of utterance 1
    expect(store.visibleUtterances().map((u) => u.index)).toEqual([1]);
    await store.stepCursor(+1);
    await store.stepCursor(+1);
    expect(store.getState().cursor).toBe(2);
    await store.stepCursor(+1); // clamped at the end
    expect(store.getState().cursor).toBe(2);
  });

  it("applies mutations through the revision protocol", async () => {
    await openTwoTurnDialogue();
    await store.addEvent({
      id: "e1",
      text: "B fixed the sink",
      source_utterance: 1,
      kind: "asserted",
      negates: null,
    });
    await store.setBelief({
      event: "e1",
      speaker: "B",
      label: "CT-",
      effective_from: 1,
      evidence_at: 2,
    });
    const snapshot = store.getState().snapshot!;
    expect(snapshot.revision).toBe(4);
    expect(snapshot.beliefs.B.e1).toBe("CT-");
    expect(store.getState().pendingEdits).toHaveLength(0);
  });

  it("rolls back and refetches on a stale-revision conflict", async () => {
    await openTwoTurnDialogue();
    // Another writer bumps the revision behind this session's back.
    const other = new ApiClient("http://fake", server.fetch);
    await other.addUtterance("d1", "A", "interloper", 2);

    await store.addUtterance("B", "mine should lose");
    const state = store.getState();
    expect(state.lastError).toContain("stale revision");
    expect(state.pendingEdits).toHaveLength(0);
    // Resynced: the interloper's turn is there, ours is not.
    const texts = state.snapshot!.utterances.map((u) => u.text);
    expect(texts).toContain("interloper");
    expect(texts).not.toContain("mine should lose");
  });

  it("rolls back on a domain precondition failure (422)", async () => {
    await openTwoTurnDialogue();
    await store.setBelief({
      event: "missing",
      speaker: "A",
      label: "CT+",
      effective_from: 1,
      evidence_at: 1,
    });
    const state = store.getState();
    expect(state.lastError).toContain("unknown event");
    expect(state.pendingEdits).toHaveLength(0);
  });

  it("selecting an event loads its history", async () => {
    await openTwoTurnDialogue();
    await store.addEvent({
      id: "e1",
      text: "B fixed the sink",
      source_utterance: 1,
      kind: "asserted",
      negates: null,
    });
    await store.setBelief({
      event: "e1",
      speaker: "A",
      label: "PS",
      effective_from: 1,
      evidence_at: 1,
    });
    await store.selectEvent("e1");
    expect(store.getState().history).toHaveLength(1);
    expect(store.getState().history![0]).toMatchObject({ type: "belief", label: "PS" });
  });

  it("suggestions are opt-in and fetched only when enabled", async () => {
    await openTwoTurnDialogue();
    await store.addEvent({
      id: "e1",
      text: "B fixed the sink",
      source_utterance: 1,
      kind: "asserted",
      negates: null,
    });
    await store.selectEvent("e1");
    expect(store.getState().suggestion).toBeNull();
    const before = server.requests.filter((r) => r.includes("/suggest/")).length;
    expect(before).toBe(0);
    await store.toggleSuggestions();
    expect(store.getState().suggestion).toMatchObject({ decision: "RT", advisory: true });
    store.dismissSuggestion();
    expect(store.getState().suggestion).toBeNull();
  });

  it("cursor-indexed snapshots drive the CG panels per speaker", async () => {
    await openTwoTurnDialogue();
    await store.addEvent({
      id: "e1",
      text: "B fixed the sink",
      source_utterance: 1,
      kind: "asserted",
      negates: null,
    });
    await store.setCG({ event: "e1", speaker: "A", label: "RT", degree: null, at: 2 });
    // Cursor sits at utterance 1: the RT recorded at t=2 must not show yet.
    let snapshot = store.getState().snapshot!;
    expect(store.getState().cursor).toBe(1);
    expect(snapshot.cg.A).toEqual({});
    await store.stepCursor(+1); // advance to t=2
    snapshot = store.getState().snapshot!;
    expect(snapshot.cg.A.e1).toEqual({ label: "RT", degree: null });
    expect(snapshot.cg.B).toEqual({}); // B's model is independent
  });
});
