"""Assemble citation-numbered prompts and obtain answers from the generator.

Prompts always use small 1-based local indices in square brackets and the
bundle keeps the local-index -> doc_id bijection, because generation
degrades when raw corpus identifiers are used as citation labels; external
IDs are mapped back only after parsing. Two templates ship: the serving
template used by the pipeline and a dataset-building template for creating
training examples.
"""

from dataclasses import dataclass
from typing import Sequence

from .analysis import normalize_ws
from .corpus import Corpus
from .fusion import FusedResult

SERVE_PROMPT_HEADER = (
    "Respond to the Instruction using only the information provided in the "
    "relevant abstracts in ```Papers``` below."
)

DATASET_PROMPT_HEADER = (
    "Please carefully read the question and use the provided research papers to "
    "support your answers. When making a statement, indicate the corresponding "
    "abstract number in square brackets (e.g., [1][2]). Note that some abstracts "
    "may appear to be strictly related to the instructions, while others may not "
    "be relevant at all."
)

MAX_PROMPT_DOCS = 10


class AnswerError(RuntimeError):
    pass


@dataclass(frozen=True)
class BundleDoc:
    local_index: int  # 1-based position in the prompt
    doc_id: str
    title: str
    abstract: str


@dataclass(frozen=True)
class PromptBundle:
    question: str
    docs: tuple[BundleDoc, ...]
    rendered: str

    def index_to_doc(self) -> dict[int, str]:
        return {d.local_index: d.doc_id for d in self.docs}


@dataclass(frozen=True)
class GeneratedAnswer:
    text: str
    bundle: PromptBundle
    truncated: bool = False


def build_prompt(question: str, results: Sequence[FusedResult],
                 corpus: Corpus) -> PromptBundle:
    """Render the serving prompt for the top retrieval results.

    Numbering follows fused rank order; at most MAX_PROMPT_DOCS documents
    are included. Titles, abstracts and the question are collapsed to
    single lines so every paper renders as exactly one "[i] ..." line.
    """
    if not results:
        raise AnswerError("no retrieval results")
    docs = []
    for rank, result in enumerate(results[:MAX_PROMPT_DOCS], start=1):
        record = corpus.get(result.doc_id)
        if record is None:
            raise AnswerError(f"retrieval result {result.doc_id!r} is not in the corpus")
        docs.append(BundleDoc(local_index=rank, doc_id=record.doc_id,
                              title=record.title, abstract=record.abstract))
    lines = [SERVE_PROMPT_HEADER, "", f"Instruction: {normalize_ws(question)}", ""]
    for d in docs:
        lines.append(f"[{d.local_index}] {normalize_ws(d.title)} {normalize_ws(d.abstract)}".rstrip())
        lines.append("")
    lines.append("Answer:")
    return PromptBundle(question=question, docs=tuple(docs), rendered="\n".join(lines))


def build_dataset_prompt(question: str, docs: Sequence[BundleDoc]) -> str:
    """Dataset-building variant of the prompt (not used in serving)."""
    lines = [DATASET_PROMPT_HEADER, "", f"Question: {normalize_ws(question)}", ""]
    for d in docs:
        lines.append(f"[{d.local_index}] {normalize_ws(d.title)} {normalize_ws(d.abstract)}".rstrip())
        lines.append("")
    lines.append("Answer:")
    return "\n".join(lines)


def generate_answer(question: str, results: Sequence[FusedResult],
                    corpus: Corpus, generator) -> GeneratedAnswer:
    bundle = build_prompt(question, results, corpus)
    result = generator.generate(bundle.rendered)
    return GeneratedAnswer(text=result.text, bundle=bundle, truncated=result.truncated)
