/** Builders for the exact /feedback POST payloads. */

import { aggregateToNliLabel } from "./state.js";
import type { AskResponse, FeedbackRequest, NliLabel } from "./types.js";

export const CLIENT_ID = "veriqa-ui";

export function buildOverridePayload(
  response: AskResponse,
  claimId: number,
  newLabel: NliLabel,
): FeedbackRequest {
  const claim = response.claims.find((c) => c.claim_id === claimId);
  if (!claim) throw new Error(`unknown claim_id ${claimId}`);
  return {
    kind: "LABEL_OVERRIDE",
    question: response.question,
    old_value: aggregateToNliLabel(claim.verdict.aggregate),
    new_value: newLabel,
    claim_id: claim.claim_id,
    claim_text: claim.text,
    claim_refs: [...claim.refs],
    bundle_ref: response.bundle.map((d) => [d.index, d.doc_id]),
    client_id: CLIENT_ID,
  };
}

export function buildEditPayload(
  response: AskResponse,
  newText: string,
): FeedbackRequest {
  return {
    kind: "ANSWER_EDIT",
    question: response.question,
    old_value: response.answer,
    new_value: newText,
    claim_id: null,
    claim_text: "",
    claim_refs: [],
    bundle_ref: response.bundle.map((d) => [d.index, d.doc_id]),
    client_id: CLIENT_ID,
  };
}
