"""Inverted-index lexical retrieval over whole-document text with BM25.

Scores use the non-negative IDF form idf(t) = ln(1 + (N - df + 0.5)/(df + 0.5))
and the usual length-normalized term frequency with k1/b. Query terms are
scored per occurrence. The index is immutable once built; the on-disk layout
under ``<index>/lex/`` is a meta header plus term dictionary, postings,
document-length table and doc_id table, all little-endian fixed-width.
"""

import json
import math
import struct
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from .analysis import tokenize
from .corpus import DocumentRecord

LEX_DIR = "lex"
MAGIC_POSTINGS = b"VQPS"
MAGIC_DOCLENS = b"VQDL"
FORMAT_VERSION = 1

DEFAULT_K1 = 1.2
DEFAULT_B = 0.75


class LexicalBuildError(ValueError):
    pass


class IndexFormatError(RuntimeError):
    pass


@dataclass(frozen=True)
class LexicalHit:
    doc_id: str
    raw_score: float


class LexicalIndex:
    """In-memory searchable form; build from a corpus or open from disk."""

    def __init__(self, doc_ids: list[str], doc_lens: list[int],
                 postings: dict[str, list[tuple[int, int]]],
                 k1: float = DEFAULT_K1, b: float = DEFAULT_B):
        self.doc_ids = doc_ids
        self.doc_lens = doc_lens
        self.postings = postings
        self.k1 = k1
        self.b = b
        self.doc_count = len(doc_ids)
        total = sum(doc_lens)
        self.avgdl = total / self.doc_count if self.doc_count else 0.0

    # -- construction ---------------------------------------------------

    @classmethod
    def build(cls, corpus: Sequence[DocumentRecord],
              k1: float = DEFAULT_K1, b: float = DEFAULT_B) -> "LexicalIndex":
        if not corpus:
            raise LexicalBuildError("cannot build a lexical index from an empty corpus")
        doc_ids = []
        doc_lens = []
        postings: dict[str, list[tuple[int, int]]] = {}
        for ordinal, doc in enumerate(corpus):
            tokens = tokenize(doc.text)
            doc_ids.append(doc.doc_id)
            doc_lens.append(len(tokens))
            freqs: dict[str, int] = {}
            for t in tokens:
                freqs[t] = freqs.get(t, 0) + 1
            for term, tf in freqs.items():
                postings.setdefault(term, []).append((ordinal, tf))
        return cls(doc_ids, doc_lens, postings, k1=k1, b=b)

    # -- scoring ---------------------------------------------------------

    def idf(self, term: str) -> float:
        df = len(self.postings.get(term, ()))
        return math.log(1.0 + (self.doc_count - df + 0.5) / (df + 0.5))

    def search(self, query: str, k: int) -> list[LexicalHit]:
        """Top-k documents by BM25, ties broken by doc_id ascending.

        A query that tokenizes to zero terms yields an empty result. Only
        documents containing at least one query term are returned.
        """
        if k < 1:
            raise ValueError(f"k must be >= 1, got {k}")
        terms = tokenize(query)
        if not terms:
            return []
        scores: dict[int, float] = {}
        for term in terms:
            plist = self.postings.get(term)
            if not plist:
                continue
            idf = self.idf(term)
            for ordinal, tf in plist:
                dl = self.doc_lens[ordinal]
                denom = tf + self.k1 * (1.0 - self.b + self.b * dl / self.avgdl)
                scores[ordinal] = scores.get(ordinal, 0.0) + idf * tf * (self.k1 + 1.0) / denom
        ranked = sorted(scores.items(), key=lambda it: (-it[1], self.doc_ids[it[0]]))
        return [LexicalHit(doc_id=self.doc_ids[o], raw_score=s) for o, s in ranked[:k]]

    # -- persistence -----------------------------------------------------

    def save(self, index_dir: Path) -> None:
        lex = Path(index_dir) / LEX_DIR
        lex.mkdir(parents=True, exist_ok=True)
        with open(lex / "ids.txt", "w", encoding="utf-8") as fh:
            for doc_id in self.doc_ids:
                fh.write(doc_id + "\n")
        with open(lex / "doclens.bin", "wb") as fh:
            fh.write(MAGIC_DOCLENS)
            fh.write(struct.pack("<II", FORMAT_VERSION, self.doc_count))
            fh.write(struct.pack(f"<{self.doc_count}I", *self.doc_lens))
        offset = 0
        with open(lex / "postings.bin", "wb") as pfh, \
                open(lex / "terms.tsv", "w", encoding="utf-8") as tfh:
            pfh.write(MAGIC_POSTINGS)
            pfh.write(struct.pack("<I", FORMAT_VERSION))
            for term in sorted(self.postings):
                plist = self.postings[term]
                tfh.write(f"{term}\t{len(plist)}\t{offset}\n")
                for ordinal, tf in plist:
                    pfh.write(struct.pack("<II", ordinal, tf))
                offset += len(plist)
        meta = {
            "magic": "VQLEX",
            "version": FORMAT_VERSION,
            "doc_count": self.doc_count,
            "avgdl": self.avgdl,
            "k1": self.k1,
            "b": self.b,
            "analyzer": "unicode_word_lower",
        }
        with open(lex / "meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def open(cls, index_dir: Path) -> "LexicalIndex":
        lex = Path(index_dir) / LEX_DIR
        try:
            with open(lex / "meta.json", encoding="utf-8") as fh:
                meta = json.load(fh)
        except FileNotFoundError:
            raise IndexFormatError(f"no lexical index at {lex}") from None
        if meta.get("magic") != "VQLEX" or meta.get("version") != FORMAT_VERSION:
            raise IndexFormatError(f"unsupported lexical index format in {lex}")
        with open(lex / "ids.txt", encoding="utf-8") as fh:
            doc_ids = [line.rstrip("\n") for line in fh]
        with open(lex / "doclens.bin", "rb") as fh:
            if fh.read(4) != MAGIC_DOCLENS:
                raise IndexFormatError(f"bad magic in {lex / 'doclens.bin'}")
            version, count = struct.unpack("<II", fh.read(8))
            if version != FORMAT_VERSION or count != len(doc_ids):
                raise IndexFormatError(f"inconsistent doclens table in {lex}")
            doc_lens = list(struct.unpack(f"<{count}I", fh.read(4 * count)))
        with open(lex / "postings.bin", "rb") as fh:
            if fh.read(4) != MAGIC_POSTINGS:
                raise IndexFormatError(f"bad magic in {lex / 'postings.bin'}")
            (version,) = struct.unpack("<I", fh.read(4))
            if version != FORMAT_VERSION:
                raise IndexFormatError(f"unsupported postings version in {lex}")
            raw = fh.read()
        postings: dict[str, list[tuple[int, int]]] = {}
        with open(lex / "terms.tsv", encoding="utf-8") as fh:
            for line in fh:
                term, df_s, offset_s = line.rstrip("\n").split("\t")
                df, offset = int(df_s), int(offset_s)
                plist = []
                for i in range(df):
                    pos = (offset + i) * 8
                    ordinal, tf = struct.unpack_from("<II", raw, pos)
                    plist.append((ordinal, tf))
                postings[term] = plist
        return cls(doc_ids, doc_lens, postings,
                   k1=float(meta["k1"]), b=float(meta["b"]))
