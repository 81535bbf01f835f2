// Payload shapes of the annotation HTTP API.

export type SpeakerId = "A" | "B";
export type BeliefToken = "CT+" | "CT-" | "PS" | "NB";
export type CGToken = "JA" | "IN" | "RT";
export type DegreeToken = "CT+" | "PS";
export type EventKind = "asserted" | "speech_act" | "derived_negation";

export interface UtteranceInfo {
  index: number;
  speaker: SpeakerId;
  text: string;
}

export interface EventInfo {
  id: string;
  text: string;
  source_utterance: number;
  kind: EventKind;
  negates: string | null;
}

export interface CGCell {
  label: CGToken;
  degree: DegreeToken | null;
}

/** Server snapshot of one dialogue, evaluated at utterance index `at`. */
export interface Snapshot {
  id: string;
  revision: number;
  at: number;
  utterances: UtteranceInfo[];
  events: EventInfo[];
  beliefs: Record<SpeakerId, Record<string, string>>;
  cg: Record<SpeakerId, Record<string, CGCell>>;
}

export interface DialogueListEntry {
  id: string;
  utterances: number;
  events: number;
  revision: number;
}

export type RecordInfo =
  | {
      type: "belief";
      event: string;
      speaker: SpeakerId;
      label: string;
      effective_from: number;
      evidence_at: number;
    }
  | {
      type: "cg";
      event: string;
      speaker: SpeakerId;
      label: CGToken;
      degree: DegreeToken | null;
      at: number;
    };

export interface Diagnostic {
  severity: "error" | "warning";
  code: string;
  event: string;
  message: string;
}

export interface Suggestion {
  advisory: true;
  decision: "RT" | "JA" | "IN" | "NULL";
  degree: DegreeToken | null;
  rule: string;
  beliefs: Record<SpeakerId, string>;
  max_similarity: number | null;
  threshold: number;
}

export interface EventDraft {
  id: string;
  text: string;
  source_utterance: number;
  kind: EventKind;
  negates: string | null;
}

export interface BeliefDraft {
  event: string;
  speaker: SpeakerId;
  label: BeliefToken;
  effective_from: number;
  evidence_at: number;
}

export interface CGDraft {
  event: string;
  speaker: SpeakerId;
  label: CGToken;
  degree: DegreeToken | null;
  at: number;
}
