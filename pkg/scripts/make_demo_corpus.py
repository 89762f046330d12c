"""Generate a small synthetic abstracts corpus as JSONL on stdout.

Usage: python scripts/make_demo_corpus.py [N] > corpus.jsonl
"""

import json
import random
import sys

TOPICS = [
    ("aspirin", "fever", "reduces"),
    ("ibuprofen", "inflammation", "lowers"),
    ("metformin", "glucose", "controls"),
    ("statins", "cholesterol", "decrease"),
    ("caffeine", "alertness", "raises"),
    ("melatonin", "sleep onset", "shortens"),
    ("exercise", "mood", "improves"),
    ("fiber", "digestion", "supports"),
]

FILLER = ["The cohort was followed for twelve months.",
          "Randomization was stratified by site.",
          "Adverse events were mild and transient.",
          "Dropout rates stayed below five percent.",
          "Baseline characteristics were balanced."]


def main() -> None:
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 40
    rng = random.Random(2024)
    for i in range(n):
        drug, outcome, verb = TOPICS[i % len(TOPICS)]
        missing_abstract = rng.random() < 0.1  # some records get filtered
        sentences = [
            f"{drug.capitalize()} {verb} {outcome} in trial {i}.",
            rng.choice(FILLER),
            f"Effect size grew with {drug} dose in arm {i % 3}.",
        ]
        record = {
            "doc_id": f"PM{100000 + i}",
            "title": f"Trial {i}: {drug} and {outcome}",
            "abstract": "" if missing_abstract else " ".join(sentences),
        }
        print(json.dumps(record, ensure_ascii=False))


if __name__ == "__main__":
    main()
