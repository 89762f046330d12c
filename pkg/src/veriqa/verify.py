"""Verify claims against their referenced documents with the NLI backend.

Each (claim, reference) pair gets exactly one NLI call over the document's
title+abstract. Claim-level aggregation: any CONTRADICT wins (a single
contradicting source must surface), else any SUPPORT, else UNSUPPORTED;
claims without references are UNREFERENCED and trigger no calls. Per-ref
backend failures degrade to NO_EVIDENCE but stay visible on the verdict.
"""

from dataclasses import dataclass

import numpy as np

from .analysis import split_sentences
from .answering import GeneratedAnswer
from .backends import NliLabel
from .claims import Claim, ParsedAnswer, parse_claims
from .corpus import Corpus, DocumentRecord

AGGREGATE_SUPPORTED = "SUPPORTED"
AGGREGATE_CONTRADICTED = "CONTRADICTED"
AGGREGATE_UNSUPPORTED = "UNSUPPORTED"
AGGREGATE_UNREFERENCED = "UNREFERENCED"


@dataclass(frozen=True)
class RefVerdict:
    doc_id: str
    label: NliLabel | None   # None when the call failed
    error: str | None = None


@dataclass(frozen=True)
class EvidenceSentence:
    doc_id: str
    sentence: str
    score: float


@dataclass(frozen=True)
class Verdict:
    claim_id: int
    per_ref: tuple[RefVerdict, ...]
    aggregate: str
    evidence_sentences: tuple[EvidenceSentence, ...]


def aggregate_labels(labels: list[str], has_refs: bool) -> str:
    """Fixed aggregation rule over per-reference labels."""
    if not has_refs:
        return AGGREGATE_UNREFERENCED
    if any(lab == "CONTRADICT" for lab in labels):
        return AGGREGATE_CONTRADICTED
    if any(lab == "SUPPORT" for lab in labels):
        return AGGREGATE_SUPPORTED
    return AGGREGATE_UNSUPPORTED


def most_similar_sentences(claim_text: str, doc: DocumentRecord, embedder,
                           n: int = 1) -> list[tuple[str, float]]:
    """Abstract sentences ranked by embedding dot product with the claim.

    Ties keep sentence order. n larger than the sentence count returns all.
    """
    sentences = split_sentences(doc.abstract)
    if not sentences or not claim_text.strip():
        return []
    claim_vec = np.asarray(embedder.embed(claim_text), dtype=np.float64)
    scored = []
    for sentence in sentences:
        vec = np.asarray(embedder.embed(sentence), dtype=np.float64)
        scored.append((sentence, float(np.sum(claim_vec * vec))))
    scored.sort(key=lambda it: -it[1])  # stable: ties keep sentence order
    return scored[:n]


def verify_claim(claim: Claim, corpus: Corpus, nli, embedder,
                 evidence_n: int = 1) -> Verdict:
    if not claim.refs:
        return Verdict(claim_id=claim.claim_id, per_ref=(),
                       aggregate=AGGREGATE_UNREFERENCED, evidence_sentences=())
    per_ref: list[RefVerdict] = []
    labels: list[str] = []
    evidence: list[EvidenceSentence] = []
    for doc_id in claim.refs:
        doc = corpus.get(doc_id)
        if doc is None:
            per_ref.append(RefVerdict(doc_id=doc_id, label=None,
                                      error=f"document {doc_id!r} not in corpus"))
            labels.append("NO_EVIDENCE")
            continue
        try:
            label = nli.classify(claim.text, doc.title, doc.abstract)
        except Exception as exc:
            per_ref.append(RefVerdict(doc_id=doc_id, label=None, error=str(exc)))
            labels.append("NO_EVIDENCE")
        else:
            per_ref.append(RefVerdict(doc_id=doc_id, label=label))
            labels.append(label.value)
        for sentence, score in most_similar_sentences(claim.text, doc, embedder,
                                                      n=evidence_n):
            evidence.append(EvidenceSentence(doc_id=doc_id, sentence=sentence,
                                             score=score))
    return Verdict(claim_id=claim.claim_id, per_ref=tuple(per_ref),
                   aggregate=aggregate_labels(labels, has_refs=True),
                   evidence_sentences=tuple(evidence))


def verify_answer(ans: GeneratedAnswer, corpus: Corpus, nli, embedder,
                  evidence_n: int = 1) -> tuple[ParsedAnswer, list[Verdict]]:
    parsed = parse_claims(ans)
    verdicts = [verify_claim(c, corpus, nli, embedder, evidence_n=evidence_n)
                for c in parsed.claims]
    return parsed, verdicts
