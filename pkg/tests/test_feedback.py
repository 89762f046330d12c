import json
import threading

import pytest

from veriqa.corpus import Corpus, CorpusStats, DocumentRecord
from veriqa.feedback import (
    FeedbackCorruptionError,
    FeedbackLog,
    FeedbackValidationError,
)
from veriqa.scifact import NliExample


@pytest.fixture
def log(tmp_path):
    return FeedbackLog(tmp_path / "feedback.log")


@pytest.fixture
def corpus():
    docs = [DocumentRecord.build("D1", "Aspirin", "Aspirin reduces fever."),
            DocumentRecord.build("D2", "Sleep", "Sleep consolidates memory.")]
    return Corpus(docs, CorpusStats(2, 2, 0))


def override_kwargs(**extra):
    base = dict(kind="LABEL_OVERRIDE", question="does aspirin reduce fever",
                old_value="NO_EVIDENCE", new_value="SUPPORT", claim_id=2,
                claim_text="Aspirin reduces fever.", claim_refs=["D1"],
                bundle_ref=[(1, "D1"), (2, "D2")])
    base.update(extra)
    return base


def test_override_stored_and_read_back_verbatim(log):
    event_id = log.record(**override_kwargs())
    assert event_id == 1
    ev = log.events()[0]
    assert ev.kind == "LABEL_OVERRIDE"
    assert ev.old_value == "NO_EVIDENCE"
    assert ev.new_value == "SUPPORT"
    assert ev.claim_id == 2
    assert ev.claim_refs == ("D1",)
    assert ev.bundle_ref == ((1, "D1"), (2, "D2"))


def test_empty_answer_edit_rejected(log):
    with pytest.raises(FeedbackValidationError):
        log.record(kind="ANSWER_EDIT", question="q", old_value="old", new_value="  ")
    assert len(log) == 0


def test_invalid_override_label_lists_allowed(log):
    with pytest.raises(FeedbackValidationError, match="SUPPORT.*CONTRADICT.*NO_EVIDENCE"):
        log.record(**override_kwargs(new_value="MAYBE"))


def test_override_requires_claim_id(log):
    with pytest.raises(FeedbackValidationError, match="claim_id"):
        log.record(**override_kwargs(claim_id=None))


def test_unknown_kind_rejected(log):
    with pytest.raises(FeedbackValidationError, match="kind"):
        log.record(kind="OTHER", question="q", old_value="", new_value="x")


def test_concurrent_records_get_distinct_increasing_ids(log):
    ids = []
    lock = threading.Lock()

    def worker():
        for _ in range(50):
            event_id = log.record(kind="ANSWER_EDIT", question="q",
                                  old_value="a", new_value="b")
            with lock:
                ids.append(event_id)

    threads = [threading.Thread(target=worker) for _ in range(20)]
    for t in threads:
        t.start()
    for t in threads:
        t.join()
    assert len(ids) == 1000
    assert len(set(ids)) == 1000
    stored = [ev.event_id for ev in log.events()]
    assert stored == sorted(stored)
    assert len(stored) == 1000


def test_replay_reconstructs_identical_state(log, tmp_path):
    log.record(**override_kwargs())
    log.record(kind="ANSWER_EDIT", question="q2", old_value="before",
               new_value="after", bundle_ref=[(1, "D2")])
    reopened = FeedbackLog(log.path)
    assert reopened.events() == log.events()
    next_id = reopened.record(kind="ANSWER_EDIT", question="q3",
                              old_value="", new_value="x")
    assert next_id == 3


def test_checksum_corruption_detected(log):
    log.record(**override_kwargs())
    raw = log.path.read_text()
    tampered = raw.replace("SUPPORT", "CONTRADICT", 1)
    log.path.write_text(tampered)
    with pytest.raises(FeedbackCorruptionError, match="checksum"):
        FeedbackLog(log.path)


def test_export_label_overrides_as_nli_examples(log, corpus):
    log.record(**override_kwargs())
    log.record(**override_kwargs(claim_text="", claim_refs=[]))  # not exportable
    examples, skipped = log.export_label_overrides(corpus)
    assert skipped == 1
    assert examples == [NliExample.from_dict({
        "claim": "Aspirin reduces fever.", "title": "Aspirin",
        "abstract": "Aspirin reduces fever.", "label": "SUPPORT"})]


def test_export_answer_edits_rebuilds_prompt(log, corpus):
    log.record(kind="ANSWER_EDIT", question="does aspirin reduce fever",
               old_value="machine answer", new_value="edited human answer",
               bundle_ref=[(1, "D1"), (2, "D2")])
    pairs, skipped = log.export_answer_edits(corpus)
    assert skipped == 0
    assert pairs[0]["answer"] == "edited human answer"
    prompt = pairs[0]["prompt"]
    assert "Instruction: does aspirin reduce fever" in prompt
    assert "[1] Aspirin Aspirin reduces fever." in prompt
    assert "[2] Sleep Sleep consolidates memory." in prompt


def test_export_answer_edit_with_unknown_doc_skipped(log, corpus):
    log.record(kind="ANSWER_EDIT", question="q", old_value="a", new_value="b",
               bundle_ref=[(1, "GHOST")])
    pairs, skipped = log.export_answer_edits(corpus)
    assert pairs == []
    assert skipped == 1


def test_log_lines_carry_checksums(log):
    log.record(**override_kwargs())
    line = json.loads(log.path.read_text().splitlines()[0])
    assert set(line) == {"event", "crc32"}
    assert isinstance(line["crc32"], int)
