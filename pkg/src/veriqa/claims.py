"""Parse a generated answer into claims with resolved document references.

An answer is split into sentences; each bracketed citation group "[n]"
(optionally chained, "[1][2]") attaches to the sentence it is embedded in.
A trailing group that ends up alone after sentence splitting ("Fever drops.
[1]") attaches to the sentence it terminates, i.e. the previous claim.
Local indices resolve to doc_ids through the answer bundle's bijection;
indices outside the bundle are reported as dangling, never dropped.
"""

import re
from dataclasses import dataclass
from typing import Mapping

from .analysis import normalize_ws, sentence_spans
from .answering import GeneratedAnswer

_CITATION_RE = re.compile(r"\[(\d+)\]")
_GAP_BEFORE_PUNCT_RE = re.compile(r"\s+([.!?,;:])")


def strip_citations(text: str) -> str:
    """Remove citation groups and tidy the whitespace they leave behind."""
    cleaned = normalize_ws(_CITATION_RE.sub(" ", text))
    return _GAP_BEFORE_PUNCT_RE.sub(r"\1", cleaned)


@dataclass(frozen=True)
class CitationGroup:
    local_index: int
    start: int  # offsets into the raw answer
    end: int


@dataclass(frozen=True)
class Claim:
    claim_id: int
    text: str                      # citation brackets removed, whitespace normalized
    refs: tuple[str, ...]          # resolved doc_ids, first-appearance order, deduped
    char_span: tuple[int, int]     # [start, end) into the raw answer
    citations: tuple[CitationGroup, ...]


@dataclass(frozen=True)
class DanglingRef:
    claim_id: int
    local_index: int
    span: tuple[int, int]


@dataclass(frozen=True)
class ParsedAnswer:
    claims: tuple[Claim, ...]
    dangling: tuple[DanglingRef, ...]


def parse_claims(ans: GeneratedAnswer) -> ParsedAnswer:
    return parse_answer_text(ans.text, ans.bundle.index_to_doc())


def parse_answer_text(text: str, index_to_doc: Mapping[int, str]) -> ParsedAnswer:
    """Split ``text`` into claims and resolve citation groups via the bundle map."""
    raw_claims: list[dict] = []
    for start, end in sentence_spans(text):
        groups = [CitationGroup(local_index=int(m.group(1)),
                                start=start + m.start(), end=start + m.end())
                  for m in _CITATION_RE.finditer(text[start:end])]
        stripped = strip_citations(text[start:end])
        if not stripped and raw_claims:
            # a bare citation run terminates the previous sentence
            prev = raw_claims[-1]
            prev["citations"].extend(groups)
            prev["span"] = (prev["span"][0], end)
            continue
        raw_claims.append({"text": stripped, "span": (start, end), "citations": groups})

    claims: list[Claim] = []
    dangling: list[DanglingRef] = []
    for claim_id, rc in enumerate(raw_claims):
        refs: list[str] = []
        for group in rc["citations"]:
            doc_id = index_to_doc.get(group.local_index)
            if doc_id is None:
                dangling.append(DanglingRef(claim_id=claim_id,
                                            local_index=group.local_index,
                                            span=(group.start, group.end)))
            elif doc_id not in refs:
                refs.append(doc_id)
        claims.append(Claim(claim_id=claim_id, text=rc["text"], refs=tuple(refs),
                            char_span=rc["span"], citations=tuple(rc["citations"])))
    return ParsedAnswer(claims=tuple(claims), dangling=tuple(dangling))
