"""Normalize and fuse lexical and semantic arm results into one ranking.

Each arm's raw scores are min-max normalized over its own candidate set to
[0, 1]; when all candidate scores are equal (including a single candidate)
they all map to 1.0, since those are still the arm's best hits. Semantic
segment hits are first reduced to per-document scores by taking the best
segment. A document absent from one arm contributes 0 for that arm. The
fused score is the weighted sum of the two normalized scores.
"""

from dataclasses import dataclass
from typing import Sequence

from .lexical import LexicalHit
from .vector import SemanticHit


@dataclass(frozen=True)
class FusionConfig:
    w_lex: float = 0.5
    w_sem: float = 0.5
    arm_k: int = 100
    final_k: int = 10

    def __post_init__(self) -> None:
        for name, w in (("w_lex", self.w_lex), ("w_sem", self.w_sem)):
            if not 0.0 <= w <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {w}")
        if abs(self.w_lex + self.w_sem - 1.0) > 1e-9:
            raise ValueError(f"weights must sum to 1, got {self.w_lex} + {self.w_sem}")
        if self.arm_k < 1 or self.final_k < 1:
            raise ValueError("arm_k and final_k must be positive")


@dataclass(frozen=True)
class FusedResult:
    doc_id: str
    lex_norm: float
    sem_norm: float
    fused: float
    best_segment: int | None


def normalize_scores(scores: Sequence[float]) -> list[float]:
    """Min-max normalize to [0, 1]; all-equal candidates map to 1.0."""
    if not scores:
        return []
    lo = min(scores)
    hi = max(scores)
    if hi == lo:
        return [1.0] * len(scores)
    return [(s - lo) / (hi - lo) for s in scores]


def fuse(lex: Sequence[LexicalHit], sem: Sequence[SemanticHit],
         cfg: FusionConfig) -> list[FusedResult]:
    """Fuse arm results (already truncated to arm_k) into the final ranking."""
    # reduce segment hits to one (best) score per document
    sem_best: dict[str, tuple[float, int]] = {}
    for hit in sem:
        cur = sem_best.get(hit.doc_id)
        if (cur is None or hit.raw_score > cur[0]
                or (hit.raw_score == cur[0] and hit.seg_index < cur[1])):
            sem_best[hit.doc_id] = (hit.raw_score, hit.seg_index)

    lex_docs = [h.doc_id for h in lex]
    lex_norm = dict(zip(lex_docs, normalize_scores([h.raw_score for h in lex])))
    sem_docs = list(sem_best)
    sem_norm = dict(zip(sem_docs, normalize_scores([sem_best[d][0] for d in sem_docs])))

    results = []
    for doc_id in sorted(set(lex_docs) | set(sem_docs)):
        ln = lex_norm.get(doc_id, 0.0)
        sn = sem_norm.get(doc_id, 0.0)
        best = sem_best[doc_id][1] if doc_id in sem_best else None
        results.append(FusedResult(
            doc_id=doc_id, lex_norm=ln, sem_norm=sn,
            fused=cfg.w_lex * ln + cfg.w_sem * sn, best_segment=best))
    results.sort(key=lambda r: (-r.fused, r.doc_id))
    return results[:cfg.final_k]
