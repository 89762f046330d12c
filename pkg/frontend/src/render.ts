/** Pure HTML renderers: the page is a function of AppState, nothing else.
 *
 * Rendering derives solely from the AskResponse and the local override
 * queue; no verdict is recomputed client-side. When the user overrides a
 * label, the engine's original verdict stays visible next to the override.
 */

import type { AppState, OverrideEntry } from "./state.js";
import type {
  Aggregate,
  AskResponse,
  BundleDoc,
  ClaimView,
  NliLabel,
} from "./types.js";

export function escapeHtml(text: string): string {
  return text
    .replace(/&/g, "&amp;")
    .replace(/</g, "&lt;")
    .replace(/>/g, "&gt;")
    .replace(/"/g, "&quot;")
    .replace(/'/g, "&#39;");
}

export const FLAGS: Record<Aggregate, { cls: string; glyph: string; label: string }> = {
  SUPPORTED: { cls: "flag--supported", glyph: "✓", label: "supported" },
  CONTRADICTED: { cls: "flag--contradicted", glyph: "✗", label: "contradicted" },
  UNSUPPORTED: { cls: "flag--unsupported", glyph: "?", label: "unsupported" },
  UNREFERENCED: { cls: "flag--unreferenced", glyph: "∅", label: "unreferenced" },
};

const NLI_LABELS: NliLabel[] = ["SUPPORT", "CONTRADICT", "NO_EVIDENCE"];

export function renderApp(state: AppState): string {
  return [
    '<header class="masthead"><h1>veriqa</h1>',
    "<p>referenced answers, automatically verified</p></header>",
    renderQuestionForm(state),
    state.notice ? `<div class="notice" role="status">${escapeHtml(state.notice)}</div>` : "",
    renderBody(state),
  ].join("\n");
}

function renderQuestionForm(state: AppState): string {
  const busy = state.phase === "loading" ? " disabled" : "";
  return [
    '<form id="ask-form" class="ask-form">',
    `<input id="question" name="question" type="text" placeholder="Ask a question over the corpus"`,
    ` value="${escapeHtml(state.question)}"${busy}>`,
    `<button type="submit"${busy}>Ask</button>`,
    "</form>",
  ].join("");
}

function renderBody(state: AppState): string {
  switch (state.phase) {
    case "idle":
      return '<p class="hint">Answers cite sources as [n]; every claim is checked against its references.</p>';
    case "loading":
      return '<p class="loading">Retrieving, generating and verifying…</p>';
    case "error":
      return `<div class="error-banner" role="alert">${escapeHtml(state.error ?? "request failed")}</div>`;
    case "answered":
      return renderAnswer(state.response as AskResponse, state.overrides, state);
  }
}

function renderAnswer(
  response: AskResponse,
  overrides: Record<number, OverrideEntry>,
  state: AppState,
): string {
  const byId = new Map(response.bundle.map((d) => [d.doc_id, d]));
  const parts = [
    '<section class="answer">',
    "<h2>Answer</h2>",
    response.truncated
      ? '<p class="truncated">generation hit the token limit; the answer may be cut short</p>'
      : "",
    '<div class="claims">',
    ...response.claims.map((c) => renderClaim(c, byId, overrides[c.claim_id])),
    "</div>",
    renderDangling(response),
    renderEditControls(state),
    "</section>",
    renderReferences(response.bundle),
  ];
  return parts.filter(Boolean).join("\n");
}

export function renderClaim(
  claim: ClaimView,
  bundleById: Map<string, BundleDoc>,
  override?: OverrideEntry,
): string {
  const flag = FLAGS[claim.verdict.aggregate];
  const refs = claim.refs
    .map((docId) => renderRefChip(docId, claim, bundleById.get(docId)))
    .join("");
  const overrideNote = override
    ? `<span class="override-note">engine: ${flag.label} → you: ` +
      `${escapeHtml(override.newLabel)}${override.status === "pending" ? " (saving…)" : ""}</span>`
    : "";
  return [
    `<span class="claim" data-claim-id="${claim.claim_id}">`,
    `<span class="flag ${flag.cls}" title="${flag.label}">${flag.glyph}</span>`,
    `<span class="claim-text">${escapeHtml(claim.text)}</span>`,
    refs,
    overrideNote,
    renderOverrideControls(claim, override),
    "</span>",
  ].join("");
}

function renderRefChip(
  docId: string,
  claim: ClaimView,
  doc: BundleDoc | undefined,
): string {
  const perRef = claim.verdict.per_ref.find((r) => r.doc_id === docId);
  const label = perRef?.label ?? (perRef?.error ? "ERROR" : "NO_EVIDENCE");
  if (!doc) {
    return `<span class="ref ref--unknown">${escapeHtml(docId)} (${escapeHtml(label)})</span>`;
  }
  const evidence = claim.verdict.evidence.find((e) => e.doc_id === docId);
  let abstractHtml = escapeHtml(doc.abstract);
  if (evidence) {
    const target = escapeHtml(evidence.sentence);
    abstractHtml = abstractHtml.replace(target, `<mark>${target}</mark>`);
  }
  return [
    `<span class="ref" tabindex="0">[${doc.index}] <span class="ref-label ref-label--${label.toLowerCase()}">${escapeHtml(label)}</span>`,
    `<span class="popover"><strong>${escapeHtml(doc.title)}</strong> ` +
      `<em>${escapeHtml(doc.doc_id)}</em><br>${abstractHtml}</span>`,
    "</span>",
  ].join("");
}

function renderOverrideControls(claim: ClaimView, override?: OverrideEntry): string {
  if (override?.status === "accepted") {
    return `<span class="override-saved">feedback recorded (#${override.eventId})</span>`;
  }
  const options = NLI_LABELS.map(
    (label) => `<option value="${label}">${label}</option>`,
  ).join("");
  return [
    `<span class="override-controls" data-claim-id="${claim.claim_id}">`,
    `<select class="override-select" aria-label="override label for claim ${claim.claim_id}">`,
    options,
    "</select>",
    `<button type="button" class="override-apply" data-claim-id="${claim.claim_id}">override</button>`,
    "</span>",
  ].join("");
}

function renderDangling(response: AskResponse): string {
  if (!response.dangling.length) return "";
  const items = response.dangling
    .map((d) => `[${d.local_index}] in claim ${d.claim_id}`)
    .join(", ");
  return `<p class="dangling">unresolved references: ${escapeHtml(items)}</p>`;
}

function renderEditControls(state: AppState): string {
  const edit = state.edit;
  if (!edit) {
    return '<button type="button" id="edit-answer" class="edit-answer">edit answer</button>';
  }
  if (edit.status === "accepted") {
    return `<p class="edit-saved">edited answer recorded (#${edit.eventId})</p>`;
  }
  const busy = edit.status === "pending" ? " disabled" : "";
  return [
    '<div class="edit-box">',
    `<textarea id="edit-draft" rows="4"${busy}>${escapeHtml(edit.draft)}</textarea>`,
    `<button type="button" id="edit-save"${busy}>save edit</button>`,
    `<button type="button" id="edit-cancel"${busy}>cancel</button>`,
    "</div>",
  ].join("");
}

function renderReferences(bundle: BundleDoc[]): string {
  const items = bundle
    .map(
      (d) =>
        `<li value="${d.index}"><strong>${escapeHtml(d.title)}</strong> ` +
        `<em>${escapeHtml(d.doc_id)}</em><br>${escapeHtml(d.abstract)}</li>`,
    )
    .join("\n");
  return `<section class="references"><h2>References</h2><ol>\n${items}\n</ol></section>`;
}
