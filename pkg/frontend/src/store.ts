// View state and actions for one annotation session.
//
// All label inference stays on the server; the store only displays what
// the API returns (including /suggest results, which are advisory).
// Mutations are optimistic: the edit is rendered as pending immediately,
// then confirmed by a snapshot refetch, or rolled back when the server
// answers 409 (stale revision) or 422 (precondition failure).

import { ApiClient, ApiError } from "./api";
import type {
  BeliefDraft,
  CGDraft,
  Diagnostic,
  EventDraft,
  RecordInfo,
  Snapshot,
  SpeakerId,
  Suggestion,
  UtteranceInfo,
} from "./types";

export type PendingEdit =
  | { kind: "utterance"; speaker: SpeakerId; text: string }
  | { kind: "event"; draft: EventDraft }
  | { kind: "belief"; draft: BeliefDraft }
  | { kind: "cg"; draft: CGDraft };

export interface ViewState {
  dialogueId: string | null;
  snapshot: Snapshot | null;
  /** Focus position: the utterance currently being annotated. */
  cursor: number;
  /** How many utterances past the cursor the reading pane reveals. */
  lookAhead: number;
  selectedEvent: string | null;
  pendingEdits: PendingEdit[];
  suggestionsEnabled: boolean;
  suggestion: Suggestion | null;
  history: RecordInfo[] | null;
  diagnostics: Diagnostic[];
  lastError: string | null;
}

export type Listener = (state: ViewState) => void;

export class AnnotationStore {
  private state: ViewState = {
    dialogueId: null,
    snapshot: null,
    cursor: 0,
    lookAhead: 1,
    selectedEvent: null,
    pendingEdits: [],
    suggestionsEnabled: false,
    suggestion: null,
    history: null,
    diagnostics: [],
    lastError: null,
  };
  private listeners: Listener[] = [];

  constructor(private readonly api: ApiClient) {}

  getState(): ViewState {
    return this.state;
  }

  subscribe(listener: Listener): () => void {
    this.listeners.push(listener);
    return () => {
      this.listeners = this.listeners.filter((l) => l !== listener);
    };
  }

  private set(patch: Partial<ViewState>): void {
    this.state = { ...this.state, ...patch };
    for (const listener of this.listeners) listener(this.state);
  }

  get revision(): number {
    return this.state.snapshot?.revision ?? 0;
  }

  /** Utterances the reading pane shows at the current cursor. */
  visibleUtterances(): UtteranceInfo[] {
    const snapshot = this.state.snapshot;
    if (!snapshot) return [];
    const limit = this.state.cursor + this.state.lookAhead;
    return snapshot.utterances.filter((u) => u.index <= limit);
  }

  async open(dialogueId: string): Promise<void> {
    const snapshot = await this.api.getDialogue(dialogueId);
    this.set({
      dialogueId,
      snapshot,
      cursor: snapshot.utterances.length ? 1 : 0,
      selectedEvent: null,
      suggestion: null,
      history: null,
      pendingEdits: [],
      lastError: null,
    });
    await this.refreshAtCursor();
  }

  async create(
    dialogueId: string,
    utterances: { speaker: SpeakerId; text: string }[] = [],
  ): Promise<void> {
    await this.api.createDialogue(dialogueId, utterances);
    await this.open(dialogueId);
  }

  /** Refetch the snapshot evaluated at the cursor (authoritative state). */
  async refreshAtCursor(): Promise<void> {
    const id = this.state.dialogueId;
    if (!id) return;
    const snapshot = await this.api.getDialogue(id, this.state.cursor);
    const diagnostics = await this.api.diagnostics(id);
    this.set({ snapshot, diagnostics });
  }

  async stepCursor(delta: number): Promise<void> {
    const snapshot = this.state.snapshot;
    if (!snapshot) return;
    const max = snapshot.utterances.length;
    const cursor = Math.max(0, Math.min(max, this.state.cursor + delta));
    if (cursor === this.state.cursor) return;
    this.set({ cursor });
    await this.refreshAtCursor();
  }

  async selectEvent(eventId: string | null): Promise<void> {
    this.set({ selectedEvent: eventId, suggestion: null, history: null });
    const id = this.state.dialogueId;
    if (!id || !eventId) return;
    const history = await this.api.history(id, eventId);
    this.set({ history });
    if (this.state.suggestionsEnabled) await this.fetchSuggestion();
  }

  /** Suggestion display is opt-in per session, to avoid anchoring. */
  async toggleSuggestions(): Promise<void> {
    const enabled = !this.state.suggestionsEnabled;
    this.set({ suggestionsEnabled: enabled, suggestion: null });
    if (enabled && this.state.selectedEvent) await this.fetchSuggestion();
  }

  async fetchSuggestion(threshold?: number): Promise<void> {
    const { dialogueId, selectedEvent } = this.state;
    if (!dialogueId || !selectedEvent) return;
    const suggestion = await this.api.suggest(dialogueId, selectedEvent, threshold);
    this.set({ suggestion });
  }

  dismissSuggestion(): void {
    this.set({ suggestion: null });
  }

  private async submit(edit: PendingEdit, send: (revision: number) => Promise<unknown>) {
    const id = this.state.dialogueId;
    if (!id) throw new Error("no dialogue open");
    this.set({ pendingEdits: [...this.state.pendingEdits, edit], lastError: null });
    try {
      await send(this.revision);
      await this.refreshAtCursor();
    } catch (error) {
      if (error instanceof ApiError && (error.isConflict || error.isPreconditionFailure)) {
        // Roll back the optimistic edit and resync with the server.
        await this.refreshAtCursor();
        this.set({ lastError: error.message });
        return;
      }
      throw error;
    } finally {
      this.set({ pendingEdits: this.state.pendingEdits.filter((e) => e !== edit) });
    }
    if (this.state.selectedEvent) {
      const history = await this.api.history(id, this.state.selectedEvent);
      this.set({ history });
    }
  }

  async addUtterance(speaker: SpeakerId, text: string): Promise<void> {
    const id = this.state.dialogueId!;
    await this.submit({ kind: "utterance", speaker, text }, (revision) =>
      this.api.addUtterance(id, speaker, text, revision),
    );
  }

  async addEvent(draft: EventDraft): Promise<void> {
    const id = this.state.dialogueId!;
    await this.submit({ kind: "event", draft }, (revision) =>
      this.api.addEvent(id, draft, revision),
    );
  }

  async setBelief(draft: BeliefDraft): Promise<void> {
    const id = this.state.dialogueId!;
    await this.submit({ kind: "belief", draft }, (revision) =>
      this.api.recordBelief(id, draft, revision),
    );
  }

  async setCG(draft: CGDraft): Promise<void> {
    const id = this.state.dialogueId!;
    await this.submit({ kind: "cg", draft }, (revision) =>
      this.api.recordCG(id, draft, revision),
    );
  }

  exportDialogue(): Promise<string> {
    return this.api.exportDialogue(this.state.dialogueId!);
  }
}
