"""Pluggable model backends: embedder, generator and NLI classifier.

Each role has a deterministic reference implementation (pure functions of
input and config, so end-to-end runs are bit-reproducible) and an HTTP
client that fronts a real inference server. Wire format, all JSON over
POST:

  /embed     {"text": ...}                         -> {"values": [...]}
  /generate  {"prompt": ..., "max_new_tokens": .., "repetition_penalty": ..}
                                                   -> {"text": ..., "truncated"?: bool}
  /nli       {"claim": ..., "evidence": ...}       -> {"label": ..., "confidence": ...}

The VERIFAI_EMBED_URL / VERIFAI_GEN_URL / VERIFAI_NLI_URL environment
variables select the HTTP backends (the value is the full endpoint URL);
when unset the reference backends are used.
"""

import os
import re
import zlib
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import requests

from .analysis import normalize_ws, split_sentences, tokenize

NLI_LABELS = ("SUPPORT", "CONTRADICT", "NO_EVIDENCE")

ENV_EMBED_URL = "VERIFAI_EMBED_URL"
ENV_GEN_URL = "VERIFAI_GEN_URL"
ENV_NLI_URL = "VERIFAI_NLI_URL"

DEFAULT_EMBED_DIM = 64
NO_EVIDENCE_ANSWER = "No relevant evidence was found in the provided abstracts."


class BackendError(RuntimeError):
    """Transport or server failure of a model backend."""


class ProtocolError(BackendError):
    """The backend answered, but not in the agreed wire format."""


@dataclass(frozen=True)
class BackendConfig:
    kind: str = "reference"          # "reference" or "http"
    endpoint: str | None = None
    timeout: float = 30.0
    max_new_tokens: int = 1000
    repetition_penalty: float = 1.1

    def __post_init__(self) -> None:
        if self.kind not in ("reference", "http"):
            raise ValueError(f"unknown backend kind {self.kind!r}")
        if self.kind == "http" and not self.endpoint:
            raise ValueError("http backend requires an endpoint")
        if self.kind == "reference" and self.endpoint:
            raise ValueError("reference backend takes no endpoint")


@dataclass(frozen=True)
class NliLabel:
    value: str
    confidence: float

    def __post_init__(self) -> None:
        if self.value not in NLI_LABELS:
            raise ValueError(f"label must be one of {NLI_LABELS}, got {self.value!r}")
        if not 0.0 <= self.confidence <= 1.0:
            raise ValueError(f"confidence must lie in [0, 1], got {self.confidence}")


@dataclass(frozen=True)
class GenerationResult:
    text: str
    truncated: bool = False


# ---------------------------------------------------------------------------
# reference backends
# ---------------------------------------------------------------------------

class ReferenceEmbedder:
    """Hashed bag-of-words embedder: crc32 token buckets, L2-normalized.

    Deterministic across runs and platforms. A non-empty text that yields
    zero tokens (punctuation only) embeds to the zero vector.
    """

    def __init__(self, dim: int = DEFAULT_EMBED_DIM):
        if dim < 1:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed empty text")
        vec = np.zeros(self.dim, dtype=np.float64)
        for token in tokenize(text):
            vec[zlib.crc32(token.encode("utf-8")) % self.dim] += 1.0
        norm = float(np.sqrt(np.sum(vec * vec)))
        if norm > 0.0:
            vec /= norm
        return vec.astype(np.float32)


_PAPER_LINE_RE = re.compile(r"^\[(\d+)\] ?(.*)$")


class ReferenceGenerator:
    """Deterministic template generator used for tests and offline runs.

    Reads the question and numbered papers back out of the rendered prompt,
    judges a paper relevant when it shares at least ``min_overlap`` distinct
    tokens with the question, and answers with one sentence per relevant
    paper: the paper sentence sharing the most tokens with the question,
    cited as [n].
    """

    def __init__(self, config: BackendConfig | None = None, min_overlap: int = 1):
        self.config = config or BackendConfig()
        self.min_overlap = min_overlap

    def generate(self, prompt: str) -> GenerationResult:
        question, papers = _parse_prompt(prompt)
        q_tokens = set(tokenize(question))
        parts = []
        for local_index, body in papers:
            body_tokens = set(tokenize(body))
            if len(q_tokens & body_tokens) < self.min_overlap:
                continue
            sentence = _best_sentence(body, q_tokens)
            parts.append(f"{sentence.rstrip('.!?')} [{local_index}].")
        text = " ".join(parts) if parts else NO_EVIDENCE_ANSWER
        return _truncate(text, self.config.max_new_tokens)


def _parse_prompt(prompt: str) -> tuple[str, list[tuple[int, str]]]:
    question = ""
    papers = []
    for line in prompt.splitlines():
        if line.startswith("Instruction: "):
            question = line[len("Instruction: "):]
            continue
        m = _PAPER_LINE_RE.match(line)
        if m:
            papers.append((int(m.group(1)), m.group(2)))
    return question, papers


def _best_sentence(body: str, q_tokens: set[str]) -> str:
    best = None
    best_overlap = -1
    for sentence in split_sentences(body):
        overlap = len(q_tokens & set(tokenize(sentence)))
        if overlap > best_overlap:
            best, best_overlap = sentence, overlap
    return best if best is not None else body


def _truncate(text: str, max_new_tokens: int) -> GenerationResult:
    tokens = text.split()
    if len(tokens) <= max_new_tokens:
        return GenerationResult(text=text, truncated=False)
    return GenerationResult(text=" ".join(tokens[:max_new_tokens]), truncated=True)


_NEGATION_TOKENS = {"not", "no"}
_AUXILIARY_TOKENS = {"do", "does", "did"}


class ReferenceNli:
    """Rule-based three-way NLI used for tests and offline runs.

    Priority order: explicit override table; claim (lowercased, punctuation
    stripped) contained verbatim in the evidence -> SUPPORT; claim equal to
    an evidence sentence with an inserted negation ("not"/"no") ->
    CONTRADICT; otherwise NO_EVIDENCE. Confidence is fixed at 1.0.
    """

    def __init__(self, overrides: Mapping[str, str] | None = None):
        self.overrides = {normalize_ws(k): v for k, v in (overrides or {}).items()}
        for label in self.overrides.values():
            if label not in NLI_LABELS:
                raise ValueError(f"override label must be one of {NLI_LABELS}, got {label!r}")

    def classify(self, claim: str, evidence_title: str, evidence_abstract: str) -> NliLabel:
        if not claim.strip():
            raise ValueError("cannot classify an empty claim")
        override = self.overrides.get(normalize_ws(claim))
        if override is not None:
            return NliLabel(value=override, confidence=1.0)
        evidence = f"{evidence_title} {evidence_abstract}"
        claim_norm = " ".join(tokenize(claim))
        evidence_norm = " ".join(tokenize(evidence))
        if claim_norm and claim_norm in evidence_norm:
            return NliLabel(value="SUPPORT", confidence=1.0)
        claim_tokens = tokenize(claim)
        if _NEGATION_TOKENS & set(claim_tokens):
            stripped_claim = _strip_negation(claim_tokens)
            for sentence in [evidence_title, *split_sentences(evidence_abstract)]:
                sent_tokens = tokenize(sentence)
                if _NEGATION_TOKENS & set(sent_tokens):
                    continue
                if stripped_claim == _strip_negation(sent_tokens):
                    return NliLabel(value="CONTRADICT", confidence=1.0)
        return NliLabel(value="NO_EVIDENCE", confidence=1.0)


def _strip_negation(tokens: list[str]) -> tuple[str, ...]:
    """Drop negation markers and do-support auxiliaries, fold plural/3rd-person 's'."""
    kept = []
    for t in tokens:
        if t in _NEGATION_TOKENS or t in _AUXILIARY_TOKENS:
            continue
        if len(t) > 3 and t.endswith("s"):
            t = t[:-1]
        kept.append(t)
    return tuple(kept)


# ---------------------------------------------------------------------------
# HTTP backends
# ---------------------------------------------------------------------------

def _post(endpoint: str, payload: dict, timeout: float, role: str) -> dict:
    try:
        resp = requests.post(endpoint, json=payload, timeout=timeout)
        resp.raise_for_status()
        body = resp.json()
    except (requests.RequestException, ValueError) as exc:
        raise BackendError(f"{role} backend at {endpoint}: {exc}") from exc
    if not isinstance(body, dict):
        raise ProtocolError(f"{role} backend at {endpoint}: expected a JSON object")
    return body


class HttpEmbedder:
    def __init__(self, endpoint: str, timeout: float = 30.0, dim: int | None = None):
        self.endpoint = endpoint
        self.timeout = timeout
        self.dim = dim

    def embed(self, text: str) -> np.ndarray:
        if not text:
            raise ValueError("cannot embed empty text")
        body = _post(self.endpoint, {"text": text}, self.timeout, "embed")
        values = body.get("values")
        if not isinstance(values, list) or not values:
            raise ProtocolError(f"embed backend at {self.endpoint}: missing values[]")
        vec = np.asarray(values, dtype=np.float32)
        if vec.ndim != 1 or not np.all(np.isfinite(vec)):
            raise ProtocolError(f"embed backend at {self.endpoint}: malformed vector")
        if self.dim is None:
            self.dim = int(vec.shape[0])
        elif vec.shape[0] != self.dim:
            raise ProtocolError(
                f"embed backend at {self.endpoint}: dimension changed "
                f"from {self.dim} to {vec.shape[0]}")
        return vec


class HttpGenerator:
    def __init__(self, endpoint: str, config: BackendConfig | None = None):
        self.endpoint = endpoint
        self.config = config or BackendConfig(kind="http", endpoint=endpoint)

    def generate(self, prompt: str) -> GenerationResult:
        body = _post(self.endpoint, {
            "prompt": prompt,
            "max_new_tokens": self.config.max_new_tokens,
            "repetition_penalty": self.config.repetition_penalty,
        }, self.config.timeout, "generate")
        text = body.get("text")
        if not isinstance(text, str):
            raise ProtocolError(f"generate backend at {self.endpoint}: missing text")
        return GenerationResult(text=text, truncated=bool(body.get("truncated", False)))


class HttpNli:
    def __init__(self, endpoint: str, timeout: float = 30.0):
        self.endpoint = endpoint
        self.timeout = timeout

    def classify(self, claim: str, evidence_title: str, evidence_abstract: str) -> NliLabel:
        if not claim.strip():
            raise ValueError("cannot classify an empty claim")
        evidence = f"{evidence_title} {evidence_abstract}"
        body = _post(self.endpoint, {"claim": claim, "evidence": evidence},
                     self.timeout, "nli")
        label = body.get("label")
        if label not in NLI_LABELS:
            raise ProtocolError(
                f"nli backend at {self.endpoint}: label must be one of {NLI_LABELS}, "
                f"got {label!r}")
        confidence = body.get("confidence", 1.0)
        if not isinstance(confidence, (int, float)):
            raise ProtocolError(f"nli backend at {self.endpoint}: malformed confidence")
        return NliLabel(value=label, confidence=min(max(float(confidence), 0.0), 1.0))


# ---------------------------------------------------------------------------
# selection
# ---------------------------------------------------------------------------

@dataclass
class Backends:
    embedder: object
    generator: object
    nli: object


def backends_from_env(embed_dim: int = DEFAULT_EMBED_DIM,
                      config: BackendConfig | None = None,
                      env: Mapping[str, str] | None = None) -> Backends:
    """Select HTTP backends per VERIFAI_*_URL env vars, reference otherwise."""
    env = os.environ if env is None else env
    config = config or BackendConfig()
    embed_url = env.get(ENV_EMBED_URL)
    gen_url = env.get(ENV_GEN_URL)
    nli_url = env.get(ENV_NLI_URL)
    embedder = (HttpEmbedder(embed_url, timeout=config.timeout)
                if embed_url else ReferenceEmbedder(dim=embed_dim))
    if gen_url:
        gen_cfg = BackendConfig(kind="http", endpoint=gen_url, timeout=config.timeout,
                                max_new_tokens=config.max_new_tokens,
                                repetition_penalty=config.repetition_penalty)
        generator = HttpGenerator(gen_url, gen_cfg)
    else:
        generator = ReferenceGenerator(config)
    nli = HttpNli(nli_url, timeout=config.timeout) if nli_url else ReferenceNli()
    return Backends(embedder=embedder, generator=generator, nli=nli)
