"""Corpus ingestion: load, validate, filter and normalize article records.

Wire format is one JSON object per line with fields ``doc_id``, ``title``
and ``abstract``. Records without a usable (non-whitespace) abstract are
excluded; the canonical ``text`` field is the title and abstract joined by
a single space.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Mapping


class IngestError(ValueError):
    """Malformed input or a duplicate doc_id during ingestion."""


@dataclass(frozen=True)
class DocumentRecord:
    doc_id: str
    title: str
    abstract: str
    text: str

    @classmethod
    def build(cls, doc_id: str, title: str, abstract: str) -> "DocumentRecord":
        return cls(doc_id=doc_id, title=title, abstract=abstract,
                   text=f"{title} {abstract}")


@dataclass(frozen=True)
class CorpusStats:
    total_seen: int
    kept: int
    excluded_no_abstract: int

    @property
    def kept_fraction(self) -> float:
        if self.total_seen == 0:
            return 0.0
        return self.kept / self.total_seen

    def as_dict(self) -> dict:
        return {
            "total_seen": self.total_seen,
            "kept": self.kept,
            "excluded_no_abstract": self.excluded_no_abstract,
            "kept_fraction": self.kept_fraction,
        }


def ingest_records(records: Iterable[Mapping], *,
                   where: str = "record") -> tuple[list[DocumentRecord], CorpusStats]:
    """Normalize a stream of raw record mappings.

    Keeps input order for retained records. A missing title counts as empty
    text; a missing, empty or whitespace-only abstract excludes the record.
    Raises IngestError on a duplicate doc_id or a malformed record.
    """
    docs: list[DocumentRecord] = []
    seen: set[str] = set()
    total = 0
    excluded = 0
    for offset, rec in enumerate(records, start=1):
        total += 1
        if not isinstance(rec, Mapping):
            raise IngestError(f"{where} {offset}: expected an object, got {type(rec).__name__}")
        doc_id = rec.get("doc_id")
        if not isinstance(doc_id, str) or not doc_id.strip():
            raise IngestError(f"{where} {offset}: missing or empty doc_id")
        doc_id = doc_id.strip()
        if doc_id in seen:
            raise IngestError(f"{where} {offset}: duplicate doc_id {doc_id!r}")
        seen.add(doc_id)
        title = rec.get("title") or ""
        if not isinstance(title, str):
            raise IngestError(f"{where} {offset}: title must be text for doc_id {doc_id!r}")
        abstract = rec.get("abstract") or ""
        if not isinstance(abstract, str):
            raise IngestError(f"{where} {offset}: abstract must be text for doc_id {doc_id!r}")
        if not abstract.strip():
            excluded += 1
            continue
        docs.append(DocumentRecord.build(doc_id, title, abstract))
    return docs, CorpusStats(total_seen=total, kept=len(docs),
                             excluded_no_abstract=excluded)


def iter_jsonl(path: Path) -> Iterator[Mapping]:
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise IngestError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(rec, dict):
                raise IngestError(f"{path}:{lineno}: expected a JSON object")
            yield rec


def ingest_paths(paths: Iterable[Path]) -> tuple[list[DocumentRecord], CorpusStats]:
    """Ingest one or more JSONL files, checking doc_id uniqueness across all."""
    def stream() -> Iterator[Mapping]:
        for p in paths:
            yield from iter_jsonl(Path(p))
    return ingest_records(stream(), where="line")


class Corpus:
    """An in-memory corpus with doc_id lookup, loaded from a corpus directory."""

    def __init__(self, docs: list[DocumentRecord], stats: CorpusStats | None = None):
        self.docs = docs
        self.stats = stats
        self._by_id = {d.doc_id: d for d in docs}

    def __len__(self) -> int:
        return len(self.docs)

    def __iter__(self) -> Iterator[DocumentRecord]:
        return iter(self.docs)

    def get(self, doc_id: str) -> DocumentRecord | None:
        return self._by_id.get(doc_id)

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id


CORPUS_FILE = "corpus.jsonl"
STATS_FILE = "stats.json"


def write_corpus(out_dir: Path, docs: list[DocumentRecord], stats: CorpusStats) -> None:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(out_dir / CORPUS_FILE, "w", encoding="utf-8") as fh:
        for d in docs:
            fh.write(json.dumps(
                {"doc_id": d.doc_id, "title": d.title, "abstract": d.abstract},
                ensure_ascii=False) + "\n")
    with open(out_dir / STATS_FILE, "w", encoding="utf-8") as fh:
        json.dump(stats.as_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def load_corpus(corpus_dir: Path) -> Corpus:
    corpus_dir = Path(corpus_dir)
    path = corpus_dir / CORPUS_FILE
    if not path.exists():
        raise IngestError(f"no corpus at {path}")
    docs, stats = ingest_paths([path])
    return Corpus(docs, stats)
