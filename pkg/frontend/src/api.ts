// Typed client for the annotation service. Every mutation quotes the
// revision it was computed against; the server answers 409 when that
// revision is stale and 422 when a domain precondition fails.

import type {
  BeliefDraft,
  CGDraft,
  DialogueListEntry,
  Diagnostic,
  EventDraft,
  RecordInfo,
  Snapshot,
  SpeakerId,
  Suggestion,
} from "./types";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    readonly payload: unknown,
    message: string,
  ) {
    super(message);
  }

  get isConflict(): boolean {
    return this.status === 409;
  }

  get isPreconditionFailure(): boolean {
    return this.status === 422;
  }
}

function describe(status: number, payload: unknown): string {
  if (payload && typeof payload === "object") {
    const p = payload as Record<string, unknown>;
    if (typeof p.message === "string") return p.message;
    if (typeof p.error === "string") return p.error;
  }
  return `request failed with status ${status}`;
}

export class ApiClient {
  constructor(
    readonly baseUrl: string,
    private readonly fetchFn: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await this.fetchFn(`${this.baseUrl}${path}`, init);
    const text = await response.text();
    const payload = text ? JSON.parse(text) : null;
    if (!response.ok) {
      throw new ApiError(response.status, payload, describe(response.status, payload));
    }
    return payload as T;
  }

  private post<T>(path: string, body: unknown): Promise<T> {
    return this.request<T>(path, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(body),
    });
  }

  listDialogues(): Promise<DialogueListEntry[]> {
    return this.request<DialogueListEntry[]>("/dialogues");
  }

  createDialogue(
    id: string,
    utterances: { speaker: SpeakerId; text: string }[] = [],
  ): Promise<{ id: string; revision: number }> {
    return this.post("/dialogues", { id, utterances });
  }

  getDialogue(id: string, at?: number): Promise<Snapshot> {
    const query = at === undefined ? "" : `?at=${at}`;
    return this.request<Snapshot>(`/dialogues/${id}${query}`);
  }

  addUtterance(
    id: string,
    speaker: SpeakerId,
    text: string,
    revision: number,
  ): Promise<{ revision: number }> {
    return this.post(`/dialogues/${id}/utterances`, { speaker, text, revision });
  }

  addEvent(id: string, draft: EventDraft, revision: number): Promise<{ revision: number }> {
    return this.post(`/dialogues/${id}/events`, { ...draft, revision });
  }

  recordBelief(id: string, draft: BeliefDraft, revision: number): Promise<{ revision: number }> {
    return this.post(`/dialogues/${id}/beliefs`, { ...draft, revision });
  }

  recordCG(id: string, draft: CGDraft, revision: number): Promise<{ revision: number }> {
    return this.post(`/dialogues/${id}/cg`, { ...draft, revision });
  }

  history(id: string, eventId: string): Promise<RecordInfo[]> {
    return this.request<RecordInfo[]>(`/dialogues/${id}/history/${eventId}`);
  }

  diagnostics(id: string): Promise<Diagnostic[]> {
    return this.request<Diagnostic[]>(`/dialogues/${id}/diagnostics`);
  }

  suggest(id: string, eventId: string, threshold?: number): Promise<Suggestion> {
    const query = threshold === undefined ? "" : `?threshold=${threshold}`;
    return this.request<Suggestion>(`/dialogues/${id}/suggest/${eventId}${query}`);
  }

  /** Canonical JSON bytes of the dialogue, exactly as persisted. */
  async exportDialogue(id: string): Promise<string> {
    const response = await this.fetchFn(`${this.baseUrl}/dialogues/${id}/export`);
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, text, describe(response.status, null));
    }
    return text;
  }
}
