"""Dataset preparation for NLI backends: cleaning, stratified splits, metrics.

Raw entries arrive as JSONL objects {"claim", "label", "docs": [{"title",
"abstract"}, ...]}. Cleaning removes exact duplicate (claim, doc, label)
triples after whitespace normalization and splits entries citing several
documents into one single-document example each; entries with zero
citations are dropped (counted). A loader for the native SciFact layout
(claims + corpus files) is included so real copies can be prepared the
same way.
"""

import json
import random
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from .analysis import normalize_ws
from .backends import NLI_LABELS

SPLIT_NAMES = ("train", "validation", "test")
DEFAULT_SPLIT_SEED = 13


class SciFactFormatError(ValueError):
    pass


@dataclass(frozen=True)
class EvidenceDoc:
    title: str
    abstract: str


@dataclass(frozen=True)
class NliExample:
    claim: str
    doc: EvidenceDoc
    label: str

    def __post_init__(self) -> None:
        if self.label not in NLI_LABELS:
            raise ValueError(f"label must be one of {NLI_LABELS}, got {self.label!r}")

    def as_dict(self) -> dict:
        return {"claim": self.claim, "title": self.doc.title,
                "abstract": self.doc.abstract, "label": self.label}

    @classmethod
    def from_dict(cls, obj: Mapping) -> "NliExample":
        return cls(claim=obj["claim"],
                   doc=EvidenceDoc(title=obj.get("title", ""), abstract=obj["abstract"]),
                   label=obj["label"])


@dataclass
class CleanStats:
    entries_in: int = 0
    dropped_no_citation: int = 0
    duplicates_removed: int = 0
    examples_out: int = 0

    def as_dict(self) -> dict:
        return dict(self.__dict__)


def clean(raw_entries: Iterable[Mapping]) -> tuple[list[NliExample], CleanStats]:
    """Dedup and split multi-citation entries into single-document examples."""
    stats = CleanStats()
    seen: set[tuple[str, str, str, str]] = set()
    out: list[NliExample] = []
    for entry in raw_entries:
        stats.entries_in += 1
        claim = normalize_ws(str(entry.get("claim", "")))
        label = entry.get("label")
        if label not in NLI_LABELS:
            raise SciFactFormatError(
                f"entry {stats.entries_in}: label must be one of {NLI_LABELS}, got {label!r}")
        docs = entry.get("docs") or []
        if not docs:
            stats.dropped_no_citation += 1
            continue
        for doc in docs:
            title = normalize_ws(str(doc.get("title", "")))
            abstract = normalize_ws(str(doc.get("abstract", "")))
            key = (claim, title, abstract, label)
            if key in seen:
                stats.duplicates_removed += 1
                continue
            seen.add(key)
            out.append(NliExample(claim=claim,
                                  doc=EvidenceDoc(title=title, abstract=abstract),
                                  label=label))
    stats.examples_out = len(out)
    return out, stats


def _hamilton(counts: dict[str, int], total: int) -> dict[str, int]:
    """Largest-remainder allocation of ``total`` over groups, proportional to counts."""
    grand = sum(counts.values())
    if grand == 0 or total == 0:
        return {label: 0 for label in counts}
    quotas = {label: counts[label] * total / grand for label in counts}
    alloc = {label: int(quotas[label]) for label in counts}
    remainder = total - sum(alloc.values())
    by_fraction = sorted(counts, key=lambda lab: (-(quotas[lab] - alloc[lab]), lab))
    for label in by_fraction[:remainder]:
        alloc[label] += 1
    return alloc


def split_examples(examples: Sequence[NliExample], seed: int = DEFAULT_SPLIT_SEED,
                   val_frac: float = 0.1, test_frac: float = 0.1,
                   ) -> dict[str, list[NliExample]]:
    """Seeded, label-stratified 80/10/10 partition of the examples.

    Validation/test sizes are round(frac * N) overall, allocated across
    labels by largest remainder so every split's label counts stay within
    one example of the global ratios.
    """
    by_label: dict[str, list[NliExample]] = {}
    for ex in examples:
        by_label.setdefault(ex.label, []).append(ex)
    rng = random.Random(seed)
    for group in by_label.values():
        rng.shuffle(group)
    counts = {label: len(group) for label, group in by_label.items()}
    n = len(examples)
    test_alloc = _hamilton(counts, round(n * test_frac))
    val_alloc = _hamilton(counts, round(n * val_frac))
    splits: dict[str, list[NliExample]] = {name: [] for name in SPLIT_NAMES}
    for label in sorted(by_label):
        group = by_label[label]
        n_test = min(test_alloc[label], len(group))
        n_val = min(val_alloc[label], len(group) - n_test)
        splits["test"].extend(group[:n_test])
        splits["validation"].extend(group[n_test:n_test + n_val])
        splits["train"].extend(group[n_test + n_val:])
    return splits


def label_counts(examples: Iterable[NliExample]) -> dict[str, int]:
    counts = {label: 0 for label in NLI_LABELS}
    for ex in examples:
        counts[ex.label] += 1
    return counts


def ratio_report(splits: Mapping[str, Sequence[NliExample]]) -> str:
    """Human-readable per-split label counts and ratios."""
    lines = [f"{'split':<12} {'size':>6}  " + "  ".join(f"{lab:>12}" for lab in NLI_LABELS)]
    for name in SPLIT_NAMES:
        examples = splits.get(name, [])
        counts = label_counts(examples)
        n = len(examples)
        cells = []
        for lab in NLI_LABELS:
            pct = 100.0 * counts[lab] / n if n else 0.0
            cells.append(f"{counts[lab]:>5} {pct:5.1f}%")
        lines.append(f"{name:<12} {n:>6}  " + "  ".join(cells))
    return "\n".join(lines)


# ---------------------------------------------------------------------------
# evaluation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LabelMetrics:
    precision: float
    recall: float
    f1: float
    support: int


@dataclass(frozen=True)
class EvalReport:
    per_label: dict[str, LabelMetrics]
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    accuracy: float
    total: int

    def table(self) -> str:
        lines = [f"{'label':<14} {'precision':>9} {'recall':>9} {'f1':>9} {'support':>8}"]
        for label in NLI_LABELS:
            m = self.per_label[label]
            lines.append(f"{label:<14} {m.precision:>9.3f} {m.recall:>9.3f} "
                         f"{m.f1:>9.3f} {m.support:>8}")
        lines.append(f"{'weighted avg':<14} {self.weighted_precision:>9.3f} "
                     f"{self.weighted_recall:>9.3f} {self.weighted_f1:>9.3f} "
                     f"{self.total:>8}")
        return "\n".join(lines)


def evaluate_nli(nli, examples: Sequence[NliExample]) -> EvalReport:
    """Per-label precision/recall/F1 plus support-weighted averages."""
    confusion: dict[tuple[str, str], int] = {}
    for ex in examples:
        predicted = nli.classify(ex.claim, ex.doc.title, ex.doc.abstract).value
        confusion[(ex.label, predicted)] = confusion.get((ex.label, predicted), 0) + 1
    per_label: dict[str, LabelMetrics] = {}
    total = len(examples)
    correct = sum(confusion.get((lab, lab), 0) for lab in NLI_LABELS)
    for label in NLI_LABELS:
        tp = confusion.get((label, label), 0)
        fp = sum(confusion.get((other, label), 0) for other in NLI_LABELS if other != label)
        fn = sum(confusion.get((label, other), 0) for other in NLI_LABELS if other != label)
        support = tp + fn
        precision = tp / (tp + fp) if tp + fp else 0.0
        recall = tp / support if support else 0.0
        f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
        per_label[label] = LabelMetrics(precision=precision, recall=recall,
                                        f1=f1, support=support)
    def weighted(metric: str) -> float:
        if total == 0:
            return 0.0
        return sum(getattr(per_label[lab], metric) * per_label[lab].support
                   for lab in NLI_LABELS) / total
    return EvalReport(per_label=per_label,
                      weighted_precision=weighted("precision"),
                      weighted_recall=weighted("recall"),
                      weighted_f1=weighted("f1"),
                      accuracy=correct / total if total else 0.0,
                      total=total)


# ---------------------------------------------------------------------------
# I/O helpers
# ---------------------------------------------------------------------------

def read_examples(path: Path) -> list[NliExample]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                out.append(NliExample.from_dict(json.loads(line)))
            except (json.JSONDecodeError, KeyError, ValueError) as exc:
                raise SciFactFormatError(f"{path}:{lineno}: {exc}") from exc
    return out


def write_examples(path: Path, examples: Iterable[NliExample]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ex in examples:
            fh.write(json.dumps(ex.as_dict(), ensure_ascii=False) + "\n")


def read_raw_entries(path: Path) -> list[dict]:
    out = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise SciFactFormatError(f"{path}:{lineno}: invalid JSON ({exc.msg})") from exc
            if not isinstance(obj, dict):
                raise SciFactFormatError(f"{path}:{lineno}: expected a JSON object")
            out.append(obj)
    return out


def load_scifact_native(claims_path: Path, corpus_path: Path) -> list[dict]:
    """Convert the native SciFact claims+corpus layout into raw entries.

    Per-document evidence labels map directly; cited documents without an
    evidence set become NO_EVIDENCE citations of the same claim.
    """
    corpus: dict[str, dict] = {}
    with open(corpus_path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            abstract = rec.get("abstract", "")
            if isinstance(abstract, list):
                abstract = " ".join(abstract)
            corpus[str(rec["doc_id"])] = {"title": rec.get("title", ""),
                                          "abstract": abstract}
    label_map = {"SUPPORT": "SUPPORT", "CONTRADICT": "CONTRADICT"}
    entries: list[dict] = []
    with open(claims_path, encoding="utf-8") as fh:
        for line in fh:
            if not line.strip():
                continue
            rec = json.loads(line)
            claim = rec["claim"]
            evidence = rec.get("evidence") or {}
            cited = [str(d) for d in rec.get("cited_doc_ids", [])]
            by_label: dict[str, list[dict]] = {}
            for doc_id, sets in evidence.items():
                doc = corpus.get(str(doc_id))
                if doc is None or not sets:
                    continue
                label = label_map.get(sets[0].get("label"))
                if label is None:
                    continue
                by_label.setdefault(label, []).append(doc)
            no_evidence_docs = [corpus[d] for d in cited
                                if d not in evidence and d in corpus]
            for label, docs in sorted(by_label.items()):
                entries.append({"claim": claim, "label": label, "docs": docs})
            if no_evidence_docs:
                entries.append({"claim": claim, "label": "NO_EVIDENCE",
                                "docs": no_evidence_docs})
    return entries
