/** Thin fetch client for the engine API.
 *
 * The base URL is configurable at build time (pass it to makeClient) and at
 * runtime (set window.VERIQA_API_BASE before the app loads); it defaults to
 * same-origin requests.
 */

import type {
  ApiError,
  AskResponse,
  FeedbackRequest,
  FeedbackResponse,
  HealthResponse,
  SearchResponse,
} from "./types.js";

declare global {
  interface Window {
    VERIQA_API_BASE?: string;
  }
}

export class ApiFailure extends Error {
  constructor(
    readonly stage: string,
    message: string,
    readonly status: number,
  ) {
    super(message);
  }
}

export function resolveBaseUrl(explicit?: string): string {
  if (explicit !== undefined) return explicit.replace(/\/$/, "");
  if (typeof window !== "undefined" && window.VERIQA_API_BASE) {
    return window.VERIQA_API_BASE.replace(/\/$/, "");
  }
  return "";
}

async function parseFailure(resp: Response): Promise<ApiFailure> {
  let stage = "transport";
  let message = `${resp.status} ${resp.statusText}`;
  try {
    const body = (await resp.json()) as ApiError;
    if (body && body.error) {
      stage = body.error.stage;
      message = body.error.message;
    }
  } catch {
    // non-JSON error body; keep the HTTP status text
  }
  return new ApiFailure(stage, message, resp.status);
}

export interface ApiClient {
  ask(question: string, k?: number): Promise<AskResponse>;
  search(query: string, k?: number): Promise<SearchResponse>;
  feedback(payload: FeedbackRequest): Promise<FeedbackResponse>;
  health(): Promise<HealthResponse>;
}

export function makeClient(
  baseUrl?: string,
  fetchImpl: typeof fetch = fetch,
): ApiClient {
  const base = resolveBaseUrl(baseUrl);

  async function getJson<T>(path: string): Promise<T> {
    const resp = await fetchImpl(`${base}${path}`);
    if (!resp.ok) throw await parseFailure(resp);
    return (await resp.json()) as T;
  }

  async function postJson<T>(path: string, payload: unknown): Promise<T> {
    const resp = await fetchImpl(`${base}${path}`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(payload),
    });
    if (!resp.ok) throw await parseFailure(resp);
    return (await resp.json()) as T;
  }

  return {
    ask: (question, k) =>
      postJson<AskResponse>("/ask", k === undefined ? { question } : { question, k }),
    search: (query, k = 10) =>
      getJson<SearchResponse>(
        `/search?q=${encodeURIComponent(query)}&k=${k}`,
      ),
    feedback: (payload) => postJson<FeedbackResponse>("/feedback", payload),
    health: () => getJson<HealthResponse>("/health"),
  };
}
