// DOM rendering. Pure functions from view state to elements; all data
// comes from the API snapshot, never from client-side inference.

import type { AnnotationStore, ViewState } from "./store";
import type { BeliefToken, CGToken, DegreeToken, SpeakerId } from "./types";

const BELIEF_TOKENS: BeliefToken[] = ["CT+", "CT-", "PS", "NB"];
const CG_TOKENS: CGToken[] = ["JA", "IN", "RT"];
const DEGREES: (DegreeToken | "")[] = ["", "CT+", "PS"];
const SPEAKERS: SpeakerId[] = ["A", "B"];

function el<K extends keyof HTMLElementTagNameMap>(
  tag: K,
  className?: string,
  text?: string,
): HTMLElementTagNameMap[K] {
  const node = document.createElement(tag);
  if (className) node.className = className;
  if (text !== undefined) node.textContent = text;
  return node;
}

function select(options: string[], value: string): HTMLSelectElement {
  const node = el("select");
  for (const option of options) {
    const opt = el("option", undefined, option === "" ? "(none)" : option);
    opt.value = option;
    node.appendChild(opt);
  }
  node.value = value;
  return node;
}

function numberInput(value: number, min: number, max: number): HTMLInputElement {
  const node = el("input");
  node.type = "number";
  node.min = String(min);
  node.max = String(max);
  node.value = String(value);
  return node;
}

function renderReadingPane(store: AnnotationStore, state: ViewState): HTMLElement {
  const pane = el("section", "reading-pane");
  pane.appendChild(el("h2", undefined, "Dialogue"));
  const controls = el("div", "cursor-controls");
  const back = el("button", undefined, "◀ back");
  back.onclick = () => void store.stepCursor(-1);
  const forward = el("button", undefined, "forward ▶");
  forward.onclick = () => void store.stepCursor(+1);
  controls.append(
    back,
    el("span", "cursor-label", ` utterance ${state.cursor} `),
    forward,
    el("span", "hint", " (look-ahead shows one utterance beyond the cursor)"),
  );
  pane.appendChild(controls);
  const list = el("ol", "utterances");
  for (const utterance of store.visibleUtterances()) {
    const item = el(
      "li",
      utterance.index === state.cursor ? "utterance current" : "utterance",
      `${utterance.speaker}: ${utterance.text}`,
    );
    if (utterance.index > state.cursor) item.classList.add("lookahead");
    list.appendChild(item);
  }
  pane.appendChild(list);
  return pane;
}

function renderEventEditor(store: AnnotationStore, state: ViewState): HTMLElement {
  const snapshot = state.snapshot!;
  const panel = el("section", "event-editor");
  panel.appendChild(el("h2", undefined, "Events"));

  const list = el("ul", "event-list");
  for (const event of snapshot.events) {
    const item = el("li", event.id === state.selectedEvent ? "event selected" : "event");
    const button = el("button", "event-select", `${event.id}: ${event.text}`);
    button.onclick = () => void store.selectEvent(event.id);
    item.appendChild(button);
    if (event.kind !== "asserted") {
      item.appendChild(
        el("span", "event-kind", event.negates ? ` [negates ${event.negates}]` : ` [${event.kind}]`),
      );
    }
    list.appendChild(item);
  }
  panel.appendChild(list);

  const form = el("div", "event-form");
  const idInput = el("input");
  idInput.placeholder = "event id";
  const textInput = el("input");
  textInput.placeholder = "anaphora-resolved proposition";
  const sourceInput = numberInput(Math.max(1, state.cursor), 1, snapshot.utterances.length);
  const kindSelect = select(["asserted", "speech_act", "derived_negation"], "asserted");
  const negatesSelect = select(["", ...snapshot.events.map((e) => e.id)], "");
  const add = el("button", undefined, "add event");
  add.onclick = () =>
    void store.addEvent({
      id: idInput.value,
      text: textInput.value,
      source_utterance: Number(sourceInput.value),
      kind: kindSelect.value as never,
      negates: negatesSelect.value || null,
    });
  form.append(idInput, textInput, sourceInput, kindSelect, negatesSelect, add);
  panel.appendChild(form);
  return panel;
}

function renderJudgmentControls(store: AnnotationStore, state: ViewState): HTMLElement {
  const snapshot = state.snapshot!;
  const panel = el("section", "judgments");
  panel.appendChild(el("h2", undefined, `Judgments for ${state.selectedEvent ?? "…"}`));
  if (!state.selectedEvent) return panel;
  const eventId = state.selectedEvent;
  const max = snapshot.utterances.length;

  for (const speaker of SPEAKERS) {
    const row = el("div", "belief-row");
    row.appendChild(el("span", "row-label", `Bel(${speaker})`));
    const label = select(BELIEF_TOKENS, "CT+");
    const effectiveFrom = numberInput(state.cursor || 1, 1, max);
    const evidenceAt = numberInput(state.cursor || 1, 1, max);
    const apply = el("button", undefined, "record");
    apply.onclick = () =>
      void store.setBelief({
        event: eventId,
        speaker,
        label: label.value as BeliefToken,
        effective_from: Number(effectiveFrom.value),
        evidence_at: Number(evidenceAt.value),
      });
    row.append(
      label,
      el("span", "field-label", " effective from "),
      effectiveFrom,
      el("span", "field-label", " evidence at "),
      evidenceAt,
      apply,
    );
    panel.appendChild(row);
  }

  for (const speaker of SPEAKERS) {
    const row = el("div", "cg-row");
    row.appendChild(el("span", "row-label", `CG(${speaker})`));
    const label = select(CG_TOKENS, "JA");
    const degree = select(DEGREES as string[], "");
    const at = numberInput(state.cursor || 1, 1, max);
    const apply = el("button", undefined, "record");
    apply.onclick = () =>
      void store.setCG({
        event: eventId,
        speaker,
        label: label.value as CGToken,
        degree: (degree.value || null) as DegreeToken | null,
        at: Number(at.value),
      });
    row.append(label, degree, el("span", "field-label", " at "), at, apply);
    panel.appendChild(row);
  }

  const chipRow = el("div", "suggestion-row");
  const toggle = el("button", undefined, state.suggestionsEnabled ? "suggestions: on" : "suggestions: off");
  toggle.onclick = () => void store.toggleSuggestions();
  chipRow.appendChild(toggle);
  if (state.suggestion) {
    const chip = el(
      "span",
      "suggestion-chip",
      `suggestion: ${state.suggestion.decision}` +
        (state.suggestion.degree ? `(${state.suggestion.degree})` : "") +
        ` — rule ${state.suggestion.rule}, non-binding`,
    );
    const dismiss = el("button", undefined, "dismiss");
    dismiss.onclick = () => store.dismissSuggestion();
    chipRow.append(chip, dismiss);
  }
  panel.appendChild(chipRow);
  return panel;
}

function renderCGPanels(state: ViewState): HTMLElement {
  const snapshot = state.snapshot!;
  const wrap = el("section", "cg-panels");
  // One panel per speaker: the two CG models are independent and may
  // diverge, so they are never merged into a single view.
  for (const speaker of SPEAKERS) {
    const panel = el("div", "cg-panel");
    panel.appendChild(el("h3", undefined, `CG(${speaker}) at t=${snapshot.at}`));
    const list = el("ul");
    for (const [eventId, cell] of Object.entries(snapshot.cg[speaker])) {
      const token = cell.degree ? `${cell.label}(${cell.degree})` : cell.label;
      list.appendChild(el("li", `cg-entry cg-${cell.label.toLowerCase()}`, `${eventId}: ${token}`));
    }
    panel.appendChild(list);
    wrap.appendChild(panel);
  }
  return wrap;
}

function renderHistory(state: ViewState): HTMLElement {
  const panel = el("section", "history");
  panel.appendChild(el("h2", undefined, "History"));
  if (!state.history) return panel;
  const list = el("ol");
  for (const record of state.history) {
    const text =
      record.type === "belief"
        ? `Bel(${record.speaker}) = ${record.label}, holds from ${record.effective_from}, ` +
          `evidenced at ${record.evidence_at}`
        : `CG(${record.speaker}) = ${record.label}${record.degree ? `(${record.degree})` : ""} ` +
          `at ${record.at}`;
    list.appendChild(el("li", `record record-${record.type}`, text));
  }
  panel.appendChild(list);
  return panel;
}

function renderDiagnostics(state: ViewState): HTMLElement {
  const panel = el("section", "diagnostics");
  panel.appendChild(el("h2", undefined, "Diagnostics"));
  const list = el("ul");
  for (const diagnostic of state.diagnostics) {
    list.appendChild(
      el(
        "li",
        `diagnostic ${diagnostic.severity}`,
        `${diagnostic.severity} ${diagnostic.code} ${diagnostic.event}: ${diagnostic.message}`,
      ),
    );
  }
  if (!state.diagnostics.length) list.appendChild(el("li", "diagnostic ok", "no findings"));
  panel.appendChild(list);
  return panel;
}

export function render(root: HTMLElement, store: AnnotationStore): void {
  const state = store.getState();
  root.textContent = "";
  if (!state.snapshot) {
    root.appendChild(el("p", "empty", "no dialogue loaded"));
    return;
  }
  if (state.lastError) {
    const banner = el("div", "error-banner", `rejected: ${state.lastError} (state refreshed)`);
    root.appendChild(banner);
  }
  if (state.pendingEdits.length) {
    root.appendChild(el("div", "pending", `${state.pendingEdits.length} edit(s) in flight…`));
  }
  root.appendChild(renderReadingPane(store, state));
  root.appendChild(renderEventEditor(store, state));
  root.appendChild(renderJudgmentControls(store, state));
  root.appendChild(renderCGPanels(state));
  root.appendChild(renderHistory(state));
  root.appendChild(renderDiagnostics(state));
}
