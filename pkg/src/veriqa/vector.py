"""Disk-resident semantic index: segment embeddings, 8-bit scalar quantization,
memory-mapped exhaustive dot-product search.

Quantization maps each dimension independently through an affine grid:
code = clamp(round((v - lo)/(hi - lo) * 255), 0, 255), rounding half away
from zero; lo/hi are the per-dimension min/max over the indexed vectors.
Search is asymmetric: the query stays in float while stored codes are
dequantized on the fly, block by block over a memory map, so the full
vector region is never loaded eagerly.

On-disk layout under ``<index>/vec/``:
  meta    JSON header (magic, version, dim, count, metric, quantization params)
  codes   raw row-major value region: count*dim bytes (u8) or count*dim*4 (f32le)
  idmap   one ``doc_id<TAB>seg_index`` line per row
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .segmenter import Segment

VEC_DIR = "vec"
MAGIC = "VQVEC"
FORMAT_VERSION = 1

DEFAULT_BLOCK_ROWS = 8192


class VectorBuildError(ValueError):
    pass


class IndexFormatError(RuntimeError):
    pass


@dataclass(frozen=True)
class QuantizationParams:
    lo: np.ndarray  # (dim,) float32
    hi: np.ndarray  # (dim,) float32

    def __post_init__(self) -> None:
        if self.lo.shape != self.hi.shape:
            raise ValueError("lo/hi shape mismatch")
        if np.any(self.hi < self.lo):
            raise ValueError("hi must be >= lo per dimension")

    @property
    def dim(self) -> int:
        return int(self.lo.shape[0])

    @classmethod
    def fit(cls, vectors: np.ndarray) -> "QuantizationParams":
        return cls(lo=vectors.min(axis=0).astype(np.float32),
                   hi=vectors.max(axis=0).astype(np.float32))


@dataclass(frozen=True)
class SemanticHit:
    doc_id: str
    seg_index: int
    raw_score: float


def _round_half_away(x: np.ndarray) -> np.ndarray:
    return np.where(x >= 0.0, np.floor(x + 0.5), np.ceil(x - 0.5))


def quantize_vector(values: np.ndarray, params: QuantizationParams) -> np.ndarray:
    """Quantize one float vector to uint8 codes (1 byte per dimension)."""
    values = np.asarray(values, dtype=np.float64)
    if values.shape != (params.dim,):
        raise ValueError(f"expected shape ({params.dim},), got {values.shape}")
    if not np.all(np.isfinite(values)):
        raise ValueError("cannot quantize non-finite values")
    lo = params.lo.astype(np.float64)
    span = params.hi.astype(np.float64) - lo
    with np.errstate(divide="ignore", invalid="ignore"):
        scaled = np.where(span > 0.0, (values - lo) / span * 255.0, 0.0)
    return np.clip(_round_half_away(scaled), 0.0, 255.0).astype(np.uint8)


def dequantize_vector(codes: np.ndarray, params: QuantizationParams) -> np.ndarray:
    """Reconstruct a float32 vector from uint8 codes."""
    codes = np.asarray(codes)
    if codes.shape != (params.dim,):
        raise ValueError(f"expected shape ({params.dim},), got {codes.shape}")
    lo = params.lo.astype(np.float64)
    span = params.hi.astype(np.float64) - lo
    return (lo + codes.astype(np.float64) / 255.0 * span).astype(np.float32)


def build_vector(segments: Sequence[Segment],
                 embedder,
                 index_dir: Path,
                 quantize: bool = True,
                 threads: int = 1) -> "VectorIndex":
    """Embed all segments and persist the store in a memory-mappable layout.

    Embeddings are computed in segment order (fanned out over ``threads``
    workers with order preserved) and written by a single committer, so the
    resulting files are byte-stable across rebuilds and thread counts.
    """
    if not segments:
        raise VectorBuildError("cannot build a vector index from zero segments")
    texts = [s.text for s in segments]
    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(embedder.embed, texts))
    else:
        rows = [embedder.embed(t) for t in texts]
    dim = None
    for seg, row in zip(segments, rows):
        row = np.asarray(row)
        if row.ndim != 1:
            raise VectorBuildError(
                f"embedding for segment {seg.doc_id}#{seg.seg_index} is not a vector")
        if dim is None:
            dim = int(row.shape[0])
        elif row.shape[0] != dim:
            raise VectorBuildError(
                f"dimension mismatch for segment {seg.doc_id}#{seg.seg_index}: "
                f"got {row.shape[0]}, expected {dim}")
        if not np.all(np.isfinite(row)):
            raise VectorBuildError(
                f"non-finite embedding for segment {seg.doc_id}#{seg.seg_index}")
    matrix = np.stack(rows).astype(np.float32)

    vec = Path(index_dir) / VEC_DIR
    vec.mkdir(parents=True, exist_ok=True)
    meta = {
        "magic": MAGIC,
        "version": FORMAT_VERSION,
        "dim": dim,
        "count": len(segments),
        "metric": "dot",
        "quantized": bool(quantize),
    }
    if quantize:
        params = QuantizationParams.fit(matrix)
        lo = params.lo.astype(np.float64)
        span = params.hi.astype(np.float64) - lo
        with np.errstate(divide="ignore", invalid="ignore"):
            scaled = np.where(span > 0.0,
                              (matrix.astype(np.float64) - lo) / span * 255.0, 0.0)
        codes = np.clip(_round_half_away(scaled), 0.0, 255.0).astype(np.uint8)
        with open(vec / "codes", "wb") as fh:
            fh.write(np.ascontiguousarray(codes, dtype=np.uint8).tobytes())
        meta["lo"] = [float(x) for x in params.lo]
        meta["hi"] = [float(x) for x in params.hi]
    else:
        with open(vec / "codes", "wb") as fh:
            fh.write(np.ascontiguousarray(matrix, dtype="<f4").tobytes())
    with open(vec / "idmap", "w", encoding="utf-8") as fh:
        for s in segments:
            fh.write(f"{s.doc_id}\t{s.seg_index}\n")
    with open(vec / "meta", "w", encoding="utf-8") as fh:
        json.dump(meta, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return VectorIndex.open(index_dir)


class VectorIndex:
    """Read-only view over the persisted store; safe for concurrent readers."""

    def __init__(self, vec_dir: Path, meta: dict, ids: list[tuple[str, int]],
                 block_rows: int = DEFAULT_BLOCK_ROWS):
        self.vec_dir = vec_dir
        self.dim = int(meta["dim"])
        self.count = int(meta["count"])
        self.quantized = bool(meta["quantized"])
        self.metric = meta["metric"]
        self.ids = ids
        self.block_rows = block_rows
        if self.quantized:
            self.params = QuantizationParams(
                lo=np.asarray(meta["lo"], dtype=np.float32),
                hi=np.asarray(meta["hi"], dtype=np.float32))
            self._codes = np.memmap(vec_dir / "codes", dtype=np.uint8, mode="r",
                                    shape=(self.count, self.dim))
        else:
            self.params = None
            self._codes = np.memmap(vec_dir / "codes", dtype="<f4", mode="r",
                                    shape=(self.count, self.dim))

    @classmethod
    def open(cls, index_dir: Path, block_rows: int = DEFAULT_BLOCK_ROWS) -> "VectorIndex":
        vec = Path(index_dir) / VEC_DIR
        try:
            with open(vec / "meta", encoding="utf-8") as fh:
                meta = json.load(fh)
        except FileNotFoundError:
            raise IndexFormatError(f"no vector index at {vec}") from None
        if meta.get("magic") != MAGIC or meta.get("version") != FORMAT_VERSION:
            raise IndexFormatError(f"unsupported vector index format in {vec}")
        ids = []
        with open(vec / "idmap", encoding="utf-8") as fh:
            for line in fh:
                doc_id, seg_s = line.rstrip("\n").split("\t")
                ids.append((doc_id, int(seg_s)))
        if len(ids) != int(meta["count"]):
            raise IndexFormatError(f"idmap row count mismatch in {vec}")
        return cls(vec, meta, ids, block_rows=block_rows)

    def _block_scores(self, query64: np.ndarray) -> np.ndarray:
        """Dot products of the query against every stored row.

        Streams the mapped value region in blocks; reductions are plain
        numpy sums (no BLAS) so scores are bitwise reproducible.
        """
        scores = np.empty(self.count, dtype=np.float64)
        if self.quantized:
            lo = self.params.lo.astype(np.float64)
            span = self.params.hi.astype(np.float64) - lo
            scale = span / 255.0
        for start in range(0, self.count, self.block_rows):
            stop = min(start + self.block_rows, self.count)
            block = np.asarray(self._codes[start:stop], dtype=np.float64)
            if self.quantized:
                block = lo + block * scale
            scores[start:stop] = np.sum(block * query64, axis=1)
        return scores

    def search(self, query: np.ndarray, k: int) -> list[SemanticHit]:
        """Top-k segments by dot product, ties broken by (doc_id, seg_index)."""
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        query = np.asarray(query)
        if query.shape != (self.dim,):
            raise ValueError(f"query dimension {query.shape} does not match index dim {self.dim}")
        scores = self._block_scores(query.astype(np.float64))
        k = min(k, self.count)
        order = np.argsort(-scores, kind="stable")
        # keep every row tied with the k-th score, then apply the full tie rule
        threshold = scores[order[k - 1]]
        cut = k
        while cut < self.count and scores[order[cut]] == threshold:
            cut += 1
        candidates = sorted(
            (int(i) for i in order[:cut]),
            key=lambda i: (-scores[i], self.ids[i][0], self.ids[i][1]))
        return [
            SemanticHit(doc_id=self.ids[i][0], seg_index=self.ids[i][1],
                        raw_score=float(scores[i]))
            for i in candidates[:k]
        ]
