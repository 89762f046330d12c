"""End-to-end walkthrough on a synthetic corpus using the reference backends.

Builds a corpus and both indexes under a scratch directory, then runs
hybrid search, referenced answer generation and per-claim verification for
a demo question, printing each stage's output.

Usage: python scripts/run_demo.py [workdir]
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent


def run(args: list[str]) -> str:
    proc = subprocess.run([sys.executable, "-m", "veriqa.cli", *args],
                          capture_output=True, text=True, check=False)
    if proc.returncode not in (0, 2):
        sys.stderr.write(proc.stderr)
        raise SystemExit(proc.returncode)
    return proc.stdout


def main() -> None:
    workdir = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(tempfile.mkdtemp())
    workdir.mkdir(parents=True, exist_ok=True)
    raw = workdir / "raw.jsonl"
    corpus_dir = workdir / "corpus"
    index_dir = workdir / "index"

    corpus_text = subprocess.run(
        [sys.executable, str(ROOT / "scripts" / "make_demo_corpus.py"), "60"],
        capture_output=True, text=True, check=True).stdout
    raw.write_text(corpus_text, encoding="utf-8")

    print("== ingest ==")
    print(run(["ingest", "--input", str(raw), "--out", str(corpus_dir)]).strip())

    print("\n== index ==")
    print(run(["index", "--corpus", str(corpus_dir), "--out", str(index_dir)]).strip())

    question = "does aspirin reduce fever"
    print(f"\n== search: {question!r} ==")
    print(run(["search", "--query", question, "--k", "5",
               "--index", str(index_dir), "--corpus", str(corpus_dir)]).strip())

    print(f"\n== ask: {question!r} ==")
    bundle_path = workdir / "bundle.json"
    out = run(["ask", "--question", question, "--k", "5",
               "--index", str(index_dir), "--corpus", str(corpus_dir),
               "--bundle-out", str(bundle_path), "--json"])
    payload = json.loads(out)
    print(payload["answer"])
    answer_path = workdir / "answer.txt"
    answer_path.write_text(payload["answer"], encoding="utf-8")

    print("\n== verify ==")
    out = run(["verify", "--answer", str(answer_path),
               "--bundle", str(bundle_path), "--json"])
    for claim in json.loads(out)["claims"]:
        refs = ",".join(claim["refs"]) or "-"
        print(f"  [{claim['aggregate']:<12}] {claim['text']}  (refs: {refs})")

    print(f"\nartifacts left in {workdir}")


if __name__ == "__main__":
    main()
