"""veriqa: verifiable retrieval-augmented question answering over
scientific abstracts.

Hybrid BM25 + quantized-vector retrieval, citation-numbered answer
generation through pluggable backends, and per-claim three-way NLI
verification with a feedback loop.
"""

__version__ = "0.1.0"
