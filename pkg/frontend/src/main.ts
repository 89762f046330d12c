/** DOM wiring: events dispatch state transitions, the page re-renders.
 *
 * Feedback is posted only from explicit user actions (the override and
 * save-edit buttons). Overrides update the view optimistically and roll
 * back if the server rejects them.
 */

import { ApiFailure, makeClient } from "./api.js";
import { buildEditPayload, buildOverridePayload } from "./feedback.js";
import { renderApp } from "./render.js";
import {
  AppState,
  askFailed,
  askSucceeded,
  editAccepted,
  editCancelled,
  editDraftChanged,
  editRejected,
  editStarted,
  editSubmitted,
  initialState,
  overrideAccepted,
  overrideQueued,
  overrideRejected,
  startAsk,
} from "./state.js";
import type { NliLabel } from "./types.js";

const api = makeClient();
const root = document.getElementById("app") as HTMLElement;

let state: AppState = initialState;

function update(next: AppState): void {
  state = next;
  root.innerHTML = renderApp(state);
}

function failureMessage(err: unknown): string {
  if (err instanceof ApiFailure) return `${err.stage}: ${err.message}`;
  return err instanceof Error ? err.message : String(err);
}

async function submitQuestion(question: string): Promise<void> {
  update(startAsk(state, question));
  try {
    const response = await api.ask(question);
    update(askSucceeded(state, response));
  } catch (err) {
    update(askFailed(state, failureMessage(err)));
  }
}

async function applyOverride(claimId: number, newLabel: NliLabel): Promise<void> {
  if (!state.response) return;
  const payload = buildOverridePayload(state.response, claimId, newLabel);
  update(overrideQueued(state, claimId, newLabel));
  try {
    const ack = await api.feedback(payload);
    update(overrideAccepted(state, claimId, ack.event_id));
  } catch (err) {
    update(overrideRejected(state, claimId, failureMessage(err)));
  }
}

async function saveEdit(): Promise<void> {
  if (!state.response || !state.edit) return;
  const payload = buildEditPayload(state.response, state.edit.draft);
  update(editSubmitted(state));
  try {
    const ack = await api.feedback(payload);
    update(editAccepted(state, ack.event_id));
  } catch (err) {
    update(editRejected(state, failureMessage(err)));
  }
}

root.addEventListener("submit", (event) => {
  const form = event.target as HTMLElement;
  if (form.id !== "ask-form") return;
  event.preventDefault();
  const input = root.querySelector<HTMLInputElement>("#question");
  const question = input?.value.trim() ?? "";
  if (question) void submitQuestion(question);
});

root.addEventListener("click", (event) => {
  const target = event.target as HTMLElement;
  if (target.classList.contains("override-apply")) {
    const claimId = Number(target.dataset.claimId);
    const select = target
      .closest(".override-controls")
      ?.querySelector<HTMLSelectElement>(".override-select");
    if (select) void applyOverride(claimId, select.value as NliLabel);
  } else if (target.id === "edit-answer") {
    update(editStarted(state));
  } else if (target.id === "edit-save") {
    void saveEdit();
  } else if (target.id === "edit-cancel") {
    update(editCancelled(state));
  }
});

root.addEventListener("input", (event) => {
  const target = event.target as HTMLElement;
  if (target.id === "edit-draft") {
    state = editDraftChanged(state, (target as HTMLTextAreaElement).value);
  }
});

update(initialState);
