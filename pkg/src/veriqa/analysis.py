"""Shared text analysis: the lexical analyzer and the sentence splitter.

Both are deliberately small, deterministic rule sets. The analyzer
(lowercase + split on non-alphanumeric runs, no stemming) is shared by the
lexical index, the reference embedder and the reference generator so that
all arms see the same vocabulary. The sentence splitter is shared by the
claim parser, the verifier and the reference NLI rules.
"""

import re

_WORD_RE = re.compile(r"[^\W_]+")

# Periods ending these abbreviations do not terminate a sentence.
_ABBREVIATIONS = ("e.g.", "i.e.", "et al.", "etc.", "vs.", "cf.", "ca.")

_BOUNDARY_RE = re.compile(r"[.!?]+(?=\s|$)")


def tokenize(text: str) -> list[str]:
    """Lowercase and split into alphanumeric runs (unicode-aware, no stemming)."""
    return _WORD_RE.findall(text.lower())


def normalize_ws(text: str) -> str:
    """Collapse whitespace runs to single spaces and strip the ends."""
    return " ".join(text.split())


def sentence_spans(text: str) -> list[tuple[int, int]]:
    """Return [start, end) character spans of sentences in ``text``.

    A sentence ends at a run of '.', '!' or '?' followed by whitespace or
    end-of-text, unless the run closes a guarded abbreviation. Leading and
    trailing whitespace is excluded from each span; text without a terminal
    boundary forms a final sentence.
    """
    spans = []
    start = 0
    for m in _BOUNDARY_RE.finditer(text):
        end = m.end()
        head = text[:end].lower()
        if any(head.endswith(abbr) for abbr in _ABBREVIATIONS):
            continue
        span = _trim(text, start, end)
        if span is not None:
            spans.append(span)
        start = end
    span = _trim(text, start, len(text))
    if span is not None:
        spans.append(span)
    return spans


def split_sentences(text: str) -> list[str]:
    return [text[s:e] for s, e in sentence_spans(text)]


def _trim(text: str, start: int, end: int) -> tuple[int, int] | None:
    while start < end and text[start].isspace():
        start += 1
    while end > start and text[end - 1].isspace():
        end -= 1
    if start == end:
        return None
    return (start, end)
