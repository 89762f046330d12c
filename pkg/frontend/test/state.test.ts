import { describe, expect, it } from "vitest";

import {
  askFailed,
  askSucceeded,
  editAccepted,
  editDraftChanged,
  editRejected,
  editStarted,
  editSubmitted,
  initialState,
  overrideAccepted,
  overrideQueued,
  overrideRejected,
  startAsk,
} from "../src/state.js";
import { mockAskResponse } from "./fixtures.js";

describe("ask lifecycle", () => {
  it("loading -> answered clears stale overrides and errors", () => {
    let state = askSucceeded(initialState, mockAskResponse());
    state = overrideQueued(state, 0, "CONTRADICT");
    state = startAsk(state, "new question");
    expect(state.phase).toBe("loading");
    expect(state.overrides).toEqual({});
    state = askSucceeded(state, mockAskResponse());
    expect(state.phase).toBe("answered");
    expect(state.error).toBeNull();
    expect(state.overrides).toEqual({});
  });

  it("failure keeps no partial response", () => {
    let state = askSucceeded(initialState, mockAskResponse());
    state = askFailed(state, "backend down");
    expect(state.phase).toBe("error");
    expect(state.response).toBeNull();
    expect(state.error).toBe("backend down");
  });
});

describe("optimistic overrides", () => {
  const base = askSucceeded(initialState, mockAskResponse());

  it("queue -> accept records the event id", () => {
    let state = overrideQueued(base, 1, "SUPPORT");
    expect(state.overrides[1]).toEqual({
      newLabel: "SUPPORT",
      status: "pending",
      eventId: null,
    });
    state = overrideAccepted(state, 1, 42);
    expect(state.overrides[1]).toEqual({
      newLabel: "SUPPORT",
      status: "accepted",
      eventId: 42,
    });
  });

  it("rejection rolls the override back and surfaces a notice", () => {
    let state = overrideQueued(base, 1, "SUPPORT");
    state = overrideRejected(state, 1, "label must be one of ...");
    expect(state.overrides).toEqual(base.overrides);
    expect(state.notice).toContain("override rejected");
  });

  it("transitions never mutate their input", () => {
    const frozen = Object.freeze({
      ...base,
      overrides: Object.freeze({}) as never,
    });
    expect(() => overrideQueued(frozen, 0, "SUPPORT")).not.toThrow();
    expect(frozen.overrides).toEqual({});
  });
});

describe("answer edits", () => {
  const base = askSucceeded(initialState, mockAskResponse());

  it("start -> draft -> submit -> accept", () => {
    let state = editStarted(base);
    expect(state.edit?.draft).toBe(mockAskResponse().answer);
    state = editDraftChanged(state, "better answer");
    state = editSubmitted(state);
    expect(state.edit?.status).toBe("pending");
    state = editAccepted(state, 7);
    expect(state.edit).toEqual({ draft: "better answer", status: "accepted", eventId: 7 });
  });

  it("rejection returns to editing with a notice", () => {
    let state = editStarted(base);
    state = editDraftChanged(state, "x");
    state = editSubmitted(state);
    state = editRejected(state, "empty new_value");
    expect(state.edit?.status).toBe("editing");
    expect(state.notice).toContain("edit rejected");
  });
});
