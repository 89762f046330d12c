"""Pipeline orchestration: retrieval -> generation -> parsing -> verification.

The engine owns the opened corpus, both indexes and the three backends.
Indexes are immutable after build, backends stateless per call, so one
engine serves unlimited concurrent questions.
"""

import time
from dataclasses import dataclass
from pathlib import Path

from .answering import AnswerError, GeneratedAnswer, generate_answer
from .backends import Backends, backends_from_env
from .claims import ParsedAnswer, parse_claims
from .config import EngineConfig
from .corpus import Corpus, load_corpus
from .fusion import FusedResult, FusionConfig, fuse
from .lexical import LexicalIndex
from .segmenter import segment_corpus
from .vector import VectorIndex, build_vector
from .verify import Verdict, verify_claim


class StageError(RuntimeError):
    """A pipeline stage failed; carries the stage name for error reporting."""

    def __init__(self, stage: str, cause: Exception):
        super().__init__(f"{stage} stage failed: {cause}")
        self.stage = stage
        self.cause = cause


@dataclass(frozen=True)
class AskOutcome:
    question: str
    answer: GeneratedAnswer
    parsed: ParsedAnswer
    verdicts: tuple[Verdict, ...]
    results: tuple[FusedResult, ...]
    timings: dict[str, float]


def build_indexes(corpus: Corpus, index_dir: Path, config: EngineConfig,
                  embedder=None, threads: int = 1) -> tuple[int, int]:
    """Build both retrieval arms; returns (document count, segment count)."""
    embedder = embedder or backends_from_env(embed_dim=config.embed_dim).embedder
    lex = LexicalIndex.build(list(corpus))
    lex.save(index_dir)
    segments = segment_corpus(corpus, config.segment)
    build_vector(segments, embedder, index_dir, quantize=config.quantize,
                 threads=threads)
    return len(corpus), len(segments)


class Engine:
    def __init__(self, corpus: Corpus, lexical: LexicalIndex, vector: VectorIndex,
                 backends: Backends, config: EngineConfig):
        self.corpus = corpus
        self.lexical = lexical
        self.vector = vector
        self.backends = backends
        self.config = config

    @classmethod
    def open(cls, index_dir: Path, corpus_dir: Path,
             config: EngineConfig | None = None,
             backends: Backends | None = None) -> "Engine":
        config = config or EngineConfig()
        corpus = load_corpus(corpus_dir)
        lexical = LexicalIndex.open(index_dir)
        vector = VectorIndex.open(index_dir)
        backends = backends or backends_from_env(embed_dim=config.embed_dim,
                                                 config=config.backend)
        return cls(corpus, lexical, vector, backends, config)

    def search(self, query: str, k: int | None = None,
               arm_k: int | None = None) -> list[FusedResult]:
        """Hybrid search: both arms queried, normalized and fused."""
        fcfg = self.config.fusion
        arm_k = arm_k or fcfg.arm_k
        final_k = k or fcfg.final_k
        lex_hits = self.lexical.search(query, arm_k)
        qvec = self.backends.embedder.embed(query)
        sem_hits = self.vector.search(qvec, arm_k)
        cfg = FusionConfig(w_lex=fcfg.w_lex, w_sem=fcfg.w_sem,
                           arm_k=arm_k, final_k=final_k)
        return fuse(lex_hits, sem_hits, cfg)

    def ask(self, question: str, k: int = 10) -> AskOutcome:
        """Full pipeline for one question, with per-stage wall-clock timings."""
        if not question.strip():
            raise ValueError("question must be non-empty")
        timings: dict[str, float] = {}
        t0 = time.perf_counter()
        try:
            results = self.search(question, k=k)
        except Exception as exc:
            raise StageError("retrieval", exc) from exc
        timings["retrieval"] = time.perf_counter() - t0

        if not results:
            raise AnswerError("no retrieval results")

        t0 = time.perf_counter()
        try:
            answer = generate_answer(question, results, self.corpus,
                                     self.backends.generator)
        except AnswerError:
            raise
        except Exception as exc:
            raise StageError("generation", exc) from exc
        timings["generation"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        try:
            parsed = parse_claims(answer)
        except Exception as exc:
            raise StageError("parsing", exc) from exc
        timings["parsing"] = time.perf_counter() - t0

        t0 = time.perf_counter()
        try:
            verdicts = [verify_claim(c, self.corpus, self.backends.nli,
                                     self.backends.embedder,
                                     evidence_n=self.config.evidence_n)
                        for c in parsed.claims]
        except Exception as exc:
            raise StageError("verification", exc) from exc
        timings["verification"] = time.perf_counter() - t0
        timings["total"] = sum(timings.values())

        return AskOutcome(question=question, answer=answer, parsed=parsed,
                          verdicts=tuple(verdicts), results=tuple(results),
                          timings=timings)
