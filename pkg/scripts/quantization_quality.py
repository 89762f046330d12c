"""Measure quantized-search quality and storage against full precision.

Builds a quantized and an unquantized index over standard-normal vectors,
runs top-k queries through both, and reports the mean top-k overlap plus
the storage footprint of each value region.

Usage: python scripts/quantization_quality.py [--n 10000] [--dim 64]
       [--queries 100] [--k 10] [--seed 7]
"""

import argparse
import os
import tempfile
import time
from pathlib import Path

import numpy as np

from veriqa.segmenter import Segment
from veriqa.vector import build_vector


class RowEmbedder:
    def __init__(self, matrix):
        self.matrix = matrix
        self.dim = matrix.shape[1]

    def embed(self, text):
        return self.matrix[int(text)]


def main() -> None:
    parser = argparse.ArgumentParser()
    parser.add_argument("--n", type=int, default=10_000)
    parser.add_argument("--dim", type=int, default=64)
    parser.add_argument("--queries", type=int, default=100)
    parser.add_argument("--k", type=int, default=10)
    parser.add_argument("--seed", type=int, default=7)
    args = parser.parse_args()

    rng = np.random.default_rng(args.seed)
    matrix = rng.standard_normal((args.n, args.dim)).astype(np.float32)
    segments = [Segment(doc_id=f"V{i:06d}", seg_index=0, token_start=0,
                        token_end=1, text=str(i)) for i in range(args.n)]
    embedder = RowEmbedder(matrix)

    with tempfile.TemporaryDirectory() as td:
        t0 = time.perf_counter()
        quant = build_vector(segments, embedder, Path(td) / "q", quantize=True)
        exact = build_vector(segments, embedder, Path(td) / "f", quantize=False)
        build_s = time.perf_counter() - t0

        q_bytes = os.path.getsize(Path(td) / "q" / "vec" / "codes")
        f_bytes = os.path.getsize(Path(td) / "f" / "vec" / "codes")

        queries = rng.standard_normal((args.queries, args.dim)).astype(np.float32)
        overlaps = []
        t0 = time.perf_counter()
        for q in queries:
            top_q = {h.doc_id for h in quant.search(q, k=args.k)}
            top_f = {h.doc_id for h in exact.search(q, k=args.k)}
            overlaps.append(len(top_q & top_f) / args.k)
        search_s = time.perf_counter() - t0

    print(f"vectors            {args.n} x dim {args.dim}")
    print(f"value region       quantized {q_bytes:,} B, float {f_bytes:,} B "
          f"({f_bytes / q_bytes:.1f}x)")
    print(f"mean top-{args.k} overlap  "
          f"{sum(overlaps) / len(overlaps):.4f} over {args.queries} queries")
    print(f"timing             build {build_s:.2f}s, search {search_s:.2f}s")


if __name__ == "__main__":
    main()
