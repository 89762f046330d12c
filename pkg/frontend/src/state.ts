/** UI state and its pure transitions.
 *
 * State is a pure function of server responses plus the local
 * pending-feedback bookkeeping: every transition returns a fresh state
 * object, which makes the whole UI snapshot-testable. Overrides layer on
 * top of the engine's verdicts; the original verdict is never mutated.
 */

import type { Aggregate, AskResponse, NliLabel } from "./types.js";

export type OverrideStatus = "pending" | "accepted";

export interface OverrideEntry {
  newLabel: NliLabel;
  status: OverrideStatus;
  eventId: number | null;
}

export interface EditState {
  draft: string;
  status: "editing" | "pending" | "accepted";
  eventId: number | null;
}

export type Phase = "idle" | "loading" | "answered" | "error";

export interface AppState {
  phase: Phase;
  question: string;
  response: AskResponse | null;
  error: string | null;
  notice: string | null;
  overrides: Record<number, OverrideEntry>;
  edit: EditState | null;
}

export const initialState: AppState = {
  phase: "idle",
  question: "",
  response: null,
  error: null,
  notice: null,
  overrides: {},
  edit: null,
};

export function startAsk(state: AppState, question: string): AppState {
  return { ...initialState, phase: "loading", question };
}

export function askSucceeded(state: AppState, response: AskResponse): AppState {
  return {
    ...initialState,
    phase: "answered",
    question: response.question,
    response,
  };
}

/** A failed /ask shows an error banner and no partial answer. */
export function askFailed(state: AppState, message: string): AppState {
  return { ...initialState, phase: "error", question: state.question, error: message };
}

/** Optimistic override: applied to the view immediately, pending server ack. */
export function overrideQueued(
  state: AppState,
  claimId: number,
  newLabel: NliLabel,
): AppState {
  return {
    ...state,
    notice: null,
    overrides: {
      ...state.overrides,
      [claimId]: { newLabel, status: "pending", eventId: null },
    },
  };
}

export function overrideAccepted(
  state: AppState,
  claimId: number,
  eventId: number,
): AppState {
  const entry = state.overrides[claimId];
  if (!entry) return state;
  return {
    ...state,
    overrides: {
      ...state.overrides,
      [claimId]: { ...entry, status: "accepted", eventId },
    },
  };
}

/** Server rejection rolls the optimistic override back entirely. */
export function overrideRejected(
  state: AppState,
  claimId: number,
  message: string,
): AppState {
  const overrides = { ...state.overrides };
  delete overrides[claimId];
  return { ...state, overrides, notice: `override rejected: ${message}` };
}

export function editStarted(state: AppState): AppState {
  const current = state.response ? state.response.answer : "";
  return { ...state, notice: null, edit: { draft: current, status: "editing", eventId: null } };
}

export function editDraftChanged(state: AppState, draft: string): AppState {
  if (!state.edit) return state;
  return { ...state, edit: { ...state.edit, draft } };
}

export function editSubmitted(state: AppState): AppState {
  if (!state.edit) return state;
  return { ...state, edit: { ...state.edit, status: "pending" } };
}

export function editAccepted(state: AppState, eventId: number): AppState {
  if (!state.edit) return state;
  return { ...state, edit: { ...state.edit, status: "accepted", eventId } };
}

export function editRejected(state: AppState, message: string): AppState {
  if (!state.edit) return state;
  return {
    ...state,
    edit: { ...state.edit, status: "editing" },
    notice: `edit rejected: ${message}`,
  };
}

export function editCancelled(state: AppState): AppState {
  return { ...state, edit: null };
}

/** The engine aggregate expressed in the NLI label space, used as the
 *  override's old_value. */
export function aggregateToNliLabel(aggregate: Aggregate): NliLabel {
  switch (aggregate) {
    case "SUPPORTED":
      return "SUPPORT";
    case "CONTRADICTED":
      return "CONTRADICT";
    default:
      return "NO_EVIDENCE";
  }
}
