"""Append-only feedback log: verdict label overrides and answer edits.

One JSON object per line, each carrying a crc32 checksum of its canonical
event payload. Events are immutable once written and never rewrite past
verdicts; overrides are layered at read time by consumers. The log is the
training-data source: label overrides export as NLI examples, answer edits
as (prompt, edited answer) pairs.
"""

import json
import os
import threading
import zlib
from dataclasses import asdict, dataclass
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable

from .answering import BundleDoc, build_prompt
from .backends import NLI_LABELS
from .corpus import Corpus, DocumentRecord
from .fusion import FusedResult
from .scifact import EvidenceDoc, NliExample

KIND_LABEL_OVERRIDE = "LABEL_OVERRIDE"
KIND_ANSWER_EDIT = "ANSWER_EDIT"
KINDS = (KIND_LABEL_OVERRIDE, KIND_ANSWER_EDIT)

LOG_FILE = "feedback.log"


class FeedbackValidationError(ValueError):
    pass


class FeedbackCorruptionError(RuntimeError):
    pass


@dataclass(frozen=True)
class FeedbackEvent:
    event_id: int
    timestamp: str               # ISO 8601, UTC
    kind: str
    question: str
    old_value: str
    new_value: str
    claim_id: int | None = None
    claim_text: str = ""
    claim_refs: tuple[str, ...] = ()
    bundle_ref: tuple[tuple[int, str], ...] = ()   # (local_index, doc_id) snapshot
    client_id: str = ""

    def as_dict(self) -> dict:
        d = asdict(self)
        d["claim_refs"] = list(self.claim_refs)
        d["bundle_ref"] = [[i, doc] for i, doc in self.bundle_ref]
        return d


def _canonical(payload: dict) -> str:
    return json.dumps(payload, sort_keys=True, separators=(",", ":"), ensure_ascii=False)


def _validate(kind: str, question: str, old_value: str, new_value: str,
              claim_id: int | None) -> None:
    if kind not in KINDS:
        raise FeedbackValidationError(f"kind must be one of {KINDS}, got {kind!r}")
    if not question.strip():
        raise FeedbackValidationError("question must be non-empty")
    if kind == KIND_LABEL_OVERRIDE:
        if claim_id is None:
            raise FeedbackValidationError("LABEL_OVERRIDE requires claim_id")
        if new_value not in NLI_LABELS:
            raise FeedbackValidationError(
                f"LABEL_OVERRIDE new_value must be one of {NLI_LABELS}, got {new_value!r}")
    elif kind == KIND_ANSWER_EDIT:
        if not new_value.strip():
            raise FeedbackValidationError("ANSWER_EDIT requires a non-empty new_value")


class FeedbackLog:
    """Durable single-writer append log with monotone event ids."""

    def __init__(self, path: Path):
        self.path = Path(path)
        self._lock = threading.Lock()
        self._events: list[FeedbackEvent] = []
        if self.path.exists():
            self._events = list(_read_log(self.path))
        self._next_id = (self._events[-1].event_id + 1) if self._events else 1

    def __len__(self) -> int:
        return len(self._events)

    def events(self, kind: str | None = None) -> list[FeedbackEvent]:
        if kind is None:
            return list(self._events)
        return [ev for ev in self._events if ev.kind == kind]

    def record(self, *, kind: str, question: str, old_value: str, new_value: str,
               claim_id: int | None = None, claim_text: str = "",
               claim_refs: Iterable[str] = (), bundle_ref: Iterable[tuple[int, str]] = (),
               client_id: str = "") -> int:
        """Validate, append and fsync one event; returns its id."""
        _validate(kind, question, old_value, new_value, claim_id)
        with self._lock:
            event = FeedbackEvent(
                event_id=self._next_id,
                timestamp=datetime.now(timezone.utc).isoformat(),
                kind=kind, question=question,
                old_value=old_value, new_value=new_value,
                claim_id=claim_id, claim_text=claim_text,
                claim_refs=tuple(claim_refs),
                bundle_ref=tuple((int(i), str(d)) for i, d in bundle_ref),
                client_id=client_id)
            payload = event.as_dict()
            line = json.dumps({"event": payload, "crc32": zlib.crc32(_canonical(payload).encode("utf-8"))},
                              sort_keys=True, ensure_ascii=False)
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a", encoding="utf-8") as fh:
                fh.write(line + "\n")
                fh.flush()
                os.fsync(fh.fileno())
            self._events.append(event)
            self._next_id += 1
            return event.event_id

    # -- exports ----------------------------------------------------------

    def export_label_overrides(self, corpus: Corpus) -> tuple[list[NliExample], int]:
        """Corrected-label NLI examples, one per (claim, referenced doc).

        Events missing claim text/refs or citing unknown documents are
        skipped; the second return value counts skipped events.
        """
        out: list[NliExample] = []
        skipped = 0
        for ev in self.events(KIND_LABEL_OVERRIDE):
            if not ev.claim_text.strip() or not ev.claim_refs:
                skipped += 1
                continue
            produced = False
            for doc_id in ev.claim_refs:
                doc = corpus.get(doc_id)
                if doc is None:
                    continue
                out.append(NliExample(claim=ev.claim_text,
                                      doc=EvidenceDoc(title=doc.title, abstract=doc.abstract),
                                      label=ev.new_value))
                produced = True
            if not produced:
                skipped += 1
        return out, skipped

    def export_answer_edits(self, corpus: Corpus) -> tuple[list[dict], int]:
        """(prompt, edited answer) pairs with prompts rebuilt from the bundle snapshot."""
        out: list[dict] = []
        skipped = 0
        for ev in self.events(KIND_ANSWER_EDIT):
            docs = []
            for local_index, doc_id in sorted(ev.bundle_ref):
                doc = corpus.get(doc_id)
                if doc is None:
                    docs = []
                    break
                docs.append(BundleDoc(local_index=local_index, doc_id=doc_id,
                                      title=doc.title, abstract=doc.abstract))
            if not docs:
                skipped += 1
                continue
            results = [FusedResult(doc_id=d.doc_id, lex_norm=0.0, sem_norm=0.0,
                                   fused=0.0, best_segment=None) for d in docs]
            bundle = build_prompt(ev.question, results, _BundleCorpus(docs))
            out.append({"prompt": bundle.rendered, "answer": ev.new_value})
        return out, skipped


class _BundleCorpus:
    """Corpus facade over a bundle snapshot's documents."""

    def __init__(self, docs: list[BundleDoc]):
        self._by_id = {d.doc_id: DocumentRecord.build(d.doc_id, d.title, d.abstract)
                       for d in docs}

    def get(self, doc_id: str):
        return self._by_id.get(doc_id)


def _read_log(path: Path) -> Iterable[FeedbackEvent]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
                payload = obj["event"]
                crc = obj["crc32"]
            except (json.JSONDecodeError, KeyError, TypeError) as exc:
                raise FeedbackCorruptionError(f"{path}:{lineno}: unreadable event") from exc
            if zlib.crc32(_canonical(payload).encode("utf-8")) != crc:
                raise FeedbackCorruptionError(f"{path}:{lineno}: checksum mismatch")
            yield FeedbackEvent(
                event_id=int(payload["event_id"]),
                timestamp=payload["timestamp"],
                kind=payload["kind"],
                question=payload["question"],
                old_value=payload["old_value"],
                new_value=payload["new_value"],
                claim_id=payload.get("claim_id"),
                claim_text=payload.get("claim_text", ""),
                claim_refs=tuple(payload.get("claim_refs", ())),
                bundle_ref=tuple((int(i), str(d)) for i, d in payload.get("bundle_ref", ())),
                client_id=payload.get("client_id", ""))
