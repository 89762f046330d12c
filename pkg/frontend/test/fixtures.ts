import type { AskResponse } from "../src/types.js";

/** Mocked /ask response with one claim per aggregate category. */
export function mockAskResponse(): AskResponse {
  return {
    question: "does aspirin reduce fever",
    answer:
      "Aspirin reduces fever [1]. Aspirin never helps [2]. " +
      "Dosage is unclear [3]. Hydration matters.",
    truncated: false,
    bundle: [
      {
        index: 1,
        doc_id: "PM0001",
        title: "Aspirin trial",
        abstract: "Aspirin reduces fever. Side effects were mild.",
      },
      {
        index: 2,
        doc_id: "PM0002",
        title: "Antipyretic review",
        abstract: "Aspirin helps with fever in most adults.",
      },
      {
        index: 3,
        doc_id: "PM0003",
        title: "Dosing study",
        abstract: "Optimal dosing remains an open question.",
      },
    ],
    claims: [
      {
        claim_id: 0,
        text: "Aspirin reduces fever.",
        char_span: [0, 26],
        refs: ["PM0001"],
        verdict: {
          aggregate: "SUPPORTED",
          per_ref: [
            { doc_id: "PM0001", label: "SUPPORT", confidence: 1.0, error: null },
          ],
          evidence: [
            { doc_id: "PM0001", sentence: "Aspirin reduces fever.", score: 0.93 },
          ],
        },
      },
      {
        claim_id: 1,
        text: "Aspirin never helps.",
        char_span: [27, 51],
        refs: ["PM0002"],
        verdict: {
          aggregate: "CONTRADICTED",
          per_ref: [
            { doc_id: "PM0002", label: "CONTRADICT", confidence: 0.9, error: null },
          ],
          evidence: [
            {
              doc_id: "PM0002",
              sentence: "Aspirin helps with fever in most adults.",
              score: 0.71,
            },
          ],
        },
      },
      {
        claim_id: 2,
        text: "Dosage is unclear.",
        char_span: [52, 74],
        refs: ["PM0003"],
        verdict: {
          aggregate: "UNSUPPORTED",
          per_ref: [
            { doc_id: "PM0003", label: "NO_EVIDENCE", confidence: 1.0, error: null },
          ],
          evidence: [
            {
              doc_id: "PM0003",
              sentence: "Optimal dosing remains an open question.",
              score: 0.42,
            },
          ],
        },
      },
      {
        claim_id: 3,
        text: "Hydration matters.",
        char_span: [75, 93],
        refs: [],
        verdict: { aggregate: "UNREFERENCED", per_ref: [], evidence: [] },
      },
    ],
    dangling: [],
    timings: {
      retrieval: 0.01,
      generation: 0.02,
      parsing: 0.001,
      verification: 0.03,
      total: 0.061,
    },
  };
}
