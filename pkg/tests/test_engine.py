import pytest

from veriqa.answering import AnswerError
from veriqa.engine import StageError

from conftest import build_engine


@pytest.fixture
def engine(tmp_path):
    return build_engine(tmp_path, n_docs=12)


def test_search_fuses_both_arms(engine):
    results = engine.search("aspirin fever", k=5)
    assert results
    top = results[0]
    assert "aspirin" in engine.corpus.get(top.doc_id).text.lower()
    assert top.lex_norm == 1.0  # best lexical hit normalizes to 1
    assert 0.0 <= top.fused <= 1.0


def test_ask_outcome_is_complete(engine):
    outcome = engine.ask("does aspirin affect fever", k=4)
    assert outcome.answer.text
    assert len(outcome.verdicts) == len(outcome.parsed.claims)
    assert [v.claim_id for v in outcome.verdicts] == \
        [c.claim_id for c in outcome.parsed.claims]
    assert set(outcome.timings) == {"retrieval", "generation", "parsing",
        "verification", "total"}
    assert len(outcome.answer.bundle.docs) <= 4


def test_ask_rejects_empty_question(engine):
    with pytest.raises(ValueError):
        engine.ask("   ")


def test_embedder_failure_is_a_retrieval_stage_error(engine):
    class Broken:
        dim = 64

        def embed(self, text):
            raise RuntimeError("no embeddings today")

    engine.backends.embedder = Broken()
    with pytest.raises(StageError) as err:
        engine.ask("anything at all")
    assert err.value.stage == "retrieval"


def test_ask_deterministic_across_fresh_engines(tmp_path):
    outcome_a = build_engine(tmp_path / "a", n_docs=12).ask("does aspirin affect fever")
    outcome_b = build_engine(tmp_path / "b", n_docs=12).ask("does aspirin affect fever")
    assert outcome_a.answer.text == outcome_b.answer.text
    assert outcome_a.parsed == outcome_b.parsed
    assert outcome_a.verdicts == outcome_b.verdicts


def test_no_results_raises_answer_error(engine):
    engine.search = lambda query, k=None, arm_k=None: []
    with pytest.raises(AnswerError, match="no retrieval results"):
        engine.ask("question")
