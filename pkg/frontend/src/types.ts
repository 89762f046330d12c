/** Payload shapes for the engine's REST API (see ../schemas/api-schema.json). */

export type NliLabel = "SUPPORT" | "CONTRADICT" | "NO_EVIDENCE";

export type Aggregate =
  | "SUPPORTED"
  | "CONTRADICTED"
  | "UNSUPPORTED"
  | "UNREFERENCED";

export interface BundleDoc {
  index: number;
  doc_id: string;
  title: string;
  abstract: string;
}

export interface PerRefVerdict {
  doc_id: string;
  label: NliLabel | null;
  confidence: number | null;
  error: string | null;
}

export interface EvidenceSentence {
  doc_id: string;
  sentence: string;
  score: number;
}

export interface ClaimVerdict {
  aggregate: Aggregate;
  per_ref: PerRefVerdict[];
  evidence: EvidenceSentence[];
}

export interface ClaimView {
  claim_id: number;
  text: string;
  char_span: [number, number];
  refs: string[];
  verdict: ClaimVerdict;
}

export interface DanglingRef {
  claim_id: number;
  local_index: number;
}

export interface AskResponse {
  question: string;
  answer: string;
  truncated: boolean;
  bundle: BundleDoc[];
  claims: ClaimView[];
  dangling: DanglingRef[];
  timings: Record<string, number>;
}

export interface SearchResult {
  doc_id: string;
  fused: number;
  lex_norm: number;
  sem_norm: number;
  best_segment: number | null;
}

export interface SearchResponse {
  results: SearchResult[];
}

export interface FeedbackRequest {
  kind: "LABEL_OVERRIDE" | "ANSWER_EDIT";
  question: string;
  old_value: string;
  new_value: string;
  claim_id: number | null;
  claim_text: string;
  claim_refs: string[];
  bundle_ref: [number, string][];
  client_id: string;
}

export interface FeedbackResponse {
  event_id: number;
}

export interface ApiError {
  error: { stage: string; message: string };
}

export interface HealthResponse {
  status: "ok" | "degraded";
  components: Record<string, unknown>;
}
