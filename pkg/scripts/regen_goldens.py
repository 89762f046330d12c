"""Regenerate the frozen golden files under tests/golden/.

Run only when the prompt template or response schema deliberately changes,
then re-review the outputs by hand before committing.
"""

import json
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(ROOT / "tests"))

from fastapi.testclient import TestClient  # noqa: E402

from veriqa.answering import build_prompt  # noqa: E402
from veriqa.corpus import Corpus, DocumentRecord  # noqa: E402
from veriqa.feedback import FeedbackLog  # noqa: E402
from veriqa.fusion import FusedResult  # noqa: E402
from veriqa.service import canonical_json, create_app  # noqa: E402

from conftest import build_engine  # noqa: E402

GOLDEN = ROOT / "tests" / "golden"


def regen_prompt() -> None:
    docs = [
        DocumentRecord.build("PM101", "Aspirin and fever",
                             "Aspirin reduces fever in adults. "
                             "The effect appears within one hour."),
        DocumentRecord.build("PM202", "Ibuprofen dosing",
                             "Ibuprofen dosage varies with body weight."),
        DocumentRecord.build("PM303", "Sleep and memory",
                             "Sleep consolidates memory. Deep sleep phases matter most."),
    ]
    corpus = Corpus(docs)
    results = [FusedResult(doc_id=d.doc_id, lex_norm=1.0, sem_norm=1.0,
                           fused=1.0, best_segment=None) for d in docs]
    bundle = build_prompt("Does aspirin reduce fever?", results, corpus)
    (GOLDEN / "prompt_3docs.txt").write_bytes(bundle.rendered.encode("utf-8"))
    print(f"wrote {GOLDEN / 'prompt_3docs.txt'}")


def regen_ask_response() -> None:
    with tempfile.TemporaryDirectory() as td:
        engine = build_engine(Path(td), n_docs=20)
        client = TestClient(create_app(engine, FeedbackLog(Path(td) / "fb.log")))
        resp = client.post("/ask", json={"question": "does aspirin affect fever"})
        resp.raise_for_status()
        payload = json.loads(resp.content)
        payload.pop("timings")  # wall-clock; excluded from byte comparison
        (GOLDEN / "ask_response.json").write_bytes(canonical_json(payload))
    print(f"wrote {GOLDEN / 'ask_response.json'}")


if __name__ == "__main__":
    GOLDEN.mkdir(exist_ok=True)
    regen_prompt()
    regen_ask_response()
