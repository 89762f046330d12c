"""REST facade over the engine: /search, /ask, /feedback, /health.

Responses are canonical JSON: keys sorted, compact separators, scores
rounded to 9 significant digits, so a fixed question against a fixed index
yields a byte-stable body (wall-clock timings are the documented
exception). /feedback is the only mutating endpoint.
"""

import json

from fastapi import FastAPI, Response
from pydantic import BaseModel, Field

from .answering import AnswerError
from .backends import BackendError, ReferenceEmbedder, ReferenceGenerator, ReferenceNli
from .engine import AskOutcome, Engine, StageError
from .feedback import FeedbackLog, FeedbackValidationError


def sig9(x: float) -> float:
    """Round to 9 significant digits for reproducible serialization."""
    return float(f"{x:.9g}")


def canonical_json(payload) -> bytes:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"),
                      ensure_ascii=False).encode("utf-8")


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(content=canonical_json(payload), status_code=status_code,
                    media_type="application/json")


def _error(status: int, stage: str, message: str) -> Response:
    return _json_response({"error": {"stage": stage, "message": message}}, status)


class AskRequest(BaseModel):
    question: str
    k: int = Field(default=10, ge=1)


class FeedbackRequest(BaseModel):
    kind: str
    question: str
    old_value: str = ""
    new_value: str = ""
    claim_id: int | None = None
    claim_text: str = ""
    claim_refs: list[str] = Field(default_factory=list)
    bundle_ref: list[tuple[int, str]] = Field(default_factory=list)
    client_id: str = ""


def ask_payload(outcome: AskOutcome) -> dict:
    """Assemble the AskResponse document from a pipeline outcome."""
    verdict_by_claim = {v.claim_id: v for v in outcome.verdicts}
    claims = []
    for claim in outcome.parsed.claims:
        verdict = verdict_by_claim[claim.claim_id]
        claims.append({
            "claim_id": claim.claim_id,
            "text": claim.text,
            "char_span": list(claim.char_span),
            "refs": list(claim.refs),
            "verdict": {
                "aggregate": verdict.aggregate,
                "per_ref": [
                    {"doc_id": rv.doc_id,
                     "label": rv.label.value if rv.label else None,
                     "confidence": sig9(rv.label.confidence) if rv.label else None,
                     "error": rv.error}
                    for rv in verdict.per_ref
                ],
                "evidence": [
                    {"doc_id": ev.doc_id, "sentence": ev.sentence,
                     "score": sig9(ev.score)}
                    for ev in verdict.evidence_sentences
                ],
            },
        })
    return {
        "question": outcome.question,
        "answer": outcome.answer.text,
        "truncated": outcome.answer.truncated,
        "bundle": [
            {"index": d.local_index, "doc_id": d.doc_id,
             "title": d.title, "abstract": d.abstract}
            for d in outcome.answer.bundle.docs
        ],
        "claims": claims,
        "dangling": [
            {"claim_id": d.claim_id, "local_index": d.local_index}
            for d in outcome.parsed.dangling
        ],
        "timings": {k: sig9(v) for k, v in outcome.timings.items()},
    }


def _backend_health(backends) -> dict:
    def probe(role: str, backend) -> dict:
        kind = "reference" if isinstance(
            backend, (ReferenceEmbedder, ReferenceGenerator, ReferenceNli)) else "http"
        info: dict = {"kind": kind}
        if kind == "http":
            info["endpoint"] = backend.endpoint
            try:
                if role == "embed":
                    backend.embed("health probe")
                elif role == "generate":
                    backend.generate("Instruction: health probe\n\nAnswer:")
                else:
                    backend.classify("health probe", "", "health probe")
                info["ok"] = True
            except Exception as exc:
                info["ok"] = False
                info["error"] = str(exc)
        else:
            info["ok"] = True
        return info

    return {
        "embed": probe("embed", backends.embedder),
        "generate": probe("generate", backends.generator),
        "nli": probe("nli", backends.nli),
    }


def create_app(engine: Engine, feedback_log: FeedbackLog,
               cors_origins: tuple[str, ...] = ()) -> FastAPI:
    app = FastAPI(title="veriqa", docs_url=None, redoc_url=None)
    if cors_origins:
        from fastapi.middleware.cors import CORSMiddleware
        app.add_middleware(CORSMiddleware, allow_origins=list(cors_origins),
                           allow_methods=["*"], allow_headers=["*"])

    @app.get("/search")
    def search(q: str = "", k: int = 10) -> Response:
        if not q.strip():
            return _error(400, "validation", "query must be non-empty")
        if k < 1:
            return _error(400, "validation", "k must be >= 1")
        try:
            results = engine.search(q, k=k)
        except BackendError as exc:
            return _error(502, "retrieval", str(exc))
        return _json_response({"results": [
            {"doc_id": r.doc_id, "fused": sig9(r.fused),
             "lex_norm": sig9(r.lex_norm), "sem_norm": sig9(r.sem_norm),
             "best_segment": r.best_segment}
            for r in results
        ]})

    @app.post("/ask")
    def ask(req: AskRequest) -> Response:
        if not req.question.strip():
            return _error(400, "validation", "question must be non-empty")
        try:
            outcome = engine.ask(req.question, k=req.k)
        except AnswerError as exc:
            return _error(404, "retrieval", str(exc))
        except StageError as exc:
            return _error(502, exc.stage, str(exc.cause))
        return _json_response(ask_payload(outcome))

    @app.post("/feedback")
    def feedback(req: FeedbackRequest) -> Response:
        try:
            event_id = feedback_log.record(
                kind=req.kind, question=req.question,
                old_value=req.old_value, new_value=req.new_value,
                claim_id=req.claim_id, claim_text=req.claim_text,
                claim_refs=req.claim_refs, bundle_ref=req.bundle_ref,
                client_id=req.client_id)
        except FeedbackValidationError as exc:
            return _error(400, "validation", str(exc))
        return _json_response({"event_id": event_id})

    @app.get("/health")
    def health() -> Response:
        components = {
            "corpus": {"ok": True, "documents": len(engine.corpus)},
            "lexical": {"ok": True, "documents": engine.lexical.doc_count},
            "vector": {"ok": True, "segments": engine.vector.count,
                       "quantized": engine.vector.quantized},
            "backends": _backend_health(engine.backends),
        }
        ok = all(b["ok"] for b in components["backends"].values())
        return _json_response({"status": "ok" if ok else "degraded",
                               "components": components})

    return app


def serve(engine: Engine, feedback_log: FeedbackLog, host: str, port: int,
          cors_origins: tuple[str, ...] = ()) -> None:
    import uvicorn
    app = create_app(engine, feedback_log, cors_origins=cors_origins)
    uvicorn.run(app, host=host, port=port, log_level="info")
