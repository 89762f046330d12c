"""Split document text into overlapping token windows for semantic indexing.

Windows advance by ``max_tokens - overlap`` until the final window's end
reaches the document's token count; the final window keeps its natural
stride start even when shorter than ``max_tokens``. The tokenizer is
pluggable; the reference tokenizer splits on unicode whitespace and
re-joins window text with single spaces.
"""

from dataclasses import dataclass
from typing import Iterable, Protocol

from .corpus import DocumentRecord


class EmptyDocumentError(ValueError):
    pass


@dataclass(frozen=True)
class SegmenterConfig:
    max_tokens: int = 512
    overlap: int = 100

    def __post_init__(self) -> None:
        if self.max_tokens < 1:
            raise ValueError(f"max_tokens must be positive, got {self.max_tokens}")
        if self.overlap < 0:
            raise ValueError(f"overlap must be non-negative, got {self.overlap}")
        if self.overlap >= self.max_tokens:
            raise ValueError(
                f"overlap ({self.overlap}) must be smaller than max_tokens ({self.max_tokens})")

    @property
    def stride(self) -> int:
        return self.max_tokens - self.overlap


@dataclass(frozen=True)
class Segment:
    doc_id: str
    seg_index: int
    token_start: int
    token_end: int
    text: str


class Tokenizer(Protocol):
    def tokenize(self, text: str) -> list[str]: ...

    def join(self, tokens: list[str]) -> str: ...


class WhitespaceTokenizer:
    """Reference tokenizer: unicode whitespace split, single-space join."""

    def tokenize(self, text: str) -> list[str]:
        return text.split()

    def join(self, tokens: list[str]) -> str:
        return " ".join(tokens)


def window_bounds(token_count: int, cfg: SegmenterConfig) -> list[tuple[int, int]]:
    """Token windows [start, end) covering [0, token_count)."""
    if token_count <= 0:
        raise EmptyDocumentError("empty document text")
    bounds = []
    start = 0
    while True:
        end = min(start + cfg.max_tokens, token_count)
        bounds.append((start, end))
        if end >= token_count:
            return bounds
        start += cfg.stride


def segment_document(doc: DocumentRecord, cfg: SegmenterConfig,
                     tokenizer: Tokenizer | None = None) -> list[Segment]:
    tokenizer = tokenizer or WhitespaceTokenizer()
    tokens = tokenizer.tokenize(doc.text)
    if not tokens:
        raise EmptyDocumentError(f"empty document text for doc_id {doc.doc_id!r}")
    return [
        Segment(doc_id=doc.doc_id, seg_index=i, token_start=s, token_end=e,
                text=tokenizer.join(tokens[s:e]))
        for i, (s, e) in enumerate(window_bounds(len(tokens), cfg))
    ]


def segment_corpus(docs: Iterable[DocumentRecord], cfg: SegmenterConfig,
                   tokenizer: Tokenizer | None = None) -> list[Segment]:
    tokenizer = tokenizer or WhitespaceTokenizer()
    out: list[Segment] = []
    for doc in docs:
        out.extend(segment_document(doc, cfg, tokenizer))
    return out
