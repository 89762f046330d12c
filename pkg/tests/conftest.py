import pytest

from veriqa.backends import Backends, ReferenceEmbedder, ReferenceGenerator, ReferenceNli
from veriqa.config import EngineConfig
from veriqa.corpus import CorpusStats, DocumentRecord, Corpus, ingest_records, write_corpus
from veriqa.engine import Engine, build_indexes
from veriqa.fusion import FusionConfig
from veriqa.segmenter import SegmenterConfig


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): acceptance criterion; prints a pass/fail line")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker and report.when == "call":
        name = marker.args[0] if marker.args else item.name
        status = "PASS" if report.passed else "SKIP" if report.skipped else "FAIL"
        capman = item.config.pluginmanager.getplugin("capturemanager")
        with capman.global_and_fixture_disabled():
            print(f"\nACCEPTANCE {name}: {status}")


def make_doc(doc_id: str, title: str, abstract: str) -> DocumentRecord:
    return DocumentRecord.build(doc_id, title, abstract)


@pytest.fixture
def small_corpus() -> Corpus:
    docs = [
        make_doc("D1", "Aspirin and fever", "Aspirin reduces fever in adults. "
                 "The effect appears within one hour."),
        make_doc("D2", "Ibuprofen dosing", "Ibuprofen dosage varies with body weight. "
                 "High doses can irritate the stomach."),
        make_doc("D3", "Sleep and memory", "Sleep consolidates memory. "
                 "Deep sleep phases matter most."),
    ]
    return Corpus(docs, CorpusStats(total_seen=3, kept=3, excluded_no_abstract=0))


TOPICS = ["aspirin fever", "ibuprofen pain", "sleep memory", "statins cholesterol",
          "insulin glucose", "caffeine alertness", "vitamin bone", "exercise mood",
          "antibiotic infection", "vaccine immunity"]


def fixture_records(n: int) -> list[dict]:
    """Deterministic, topically varied abstract records."""
    records = []
    for i in range(n):
        a, b = TOPICS[i % len(TOPICS)].split()
        records.append({
            "doc_id": f"PM{i:04d}",
            "title": f"Study {i} on {a}",
            "abstract": (f"{a.capitalize()} affects {b} in trial {i}. "
                         f"Higher {a} exposure changed {b} outcomes. "
                         f"Cohort number {i} was observed for months."),
        })
    return records


def reference_backends(dim: int = 64) -> Backends:
    return Backends(embedder=ReferenceEmbedder(dim=dim),
                    generator=ReferenceGenerator(),
                    nli=ReferenceNli())


def build_engine(tmp_path, n_docs: int = 20,
                 config: EngineConfig | None = None) -> Engine:
    """Write a fixture corpus, build both indexes and open an engine on them."""
    config = config or EngineConfig(
        segment=SegmenterConfig(max_tokens=16, overlap=4),
        fusion=FusionConfig(w_lex=0.5, w_sem=0.5, arm_k=50, final_k=10))
    corpus_dir = tmp_path / "corpus"
    index_dir = tmp_path / "index"
    docs, stats = ingest_records(fixture_records(n_docs))
    write_corpus(corpus_dir, docs, stats)
    backends = reference_backends(config.embed_dim)
    from veriqa.corpus import load_corpus
    corpus = load_corpus(corpus_dir)
    build_indexes(corpus, index_dir, config, embedder=backends.embedder)
    return Engine.open(index_dir, corpus_dir, config=config, backends=backends)
