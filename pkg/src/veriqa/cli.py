"""Command-line entry point.

Subcommands: ingest, index, search, ask, parse, verify, scifact, feedback,
serve. Every subcommand supports --json for machine-readable output and
uses deterministic exit codes: 0 success, 1 error, 2 for `verify` when any
claim is not SUPPORTED. Option precedence is flags > environment > config
file > defaults.
"""

import argparse
import json
import os
import sys
from pathlib import Path

from . import scifact as scifact_mod
from .answering import BundleDoc, PromptBundle
from .backends import backends_from_env
from .claims import parse_answer_text
from .config import ConfigError, apply_overrides, load_config
from .corpus import Corpus, DocumentRecord, IngestError, ingest_paths, load_corpus, write_corpus
from .engine import Engine, build_indexes
from .feedback import KINDS, FeedbackLog
from .service import ask_payload, sig9
from .verify import AGGREGATE_SUPPORTED, verify_claim

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNSUPPORTED = 2


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (IngestError, ConfigError, scifact_mod.SciFactFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except FileNotFoundError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="veriqa")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="normalize a corpus from JSONL files")
    p.add_argument("--input", nargs="+", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("index", help="build lexical and vector indexes")
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--out", required=True, type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--no-quantize", action="store_true")
    p.add_argument("--max-tokens", type=int)
    p.add_argument("--overlap", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_index)

    p = sub.add_parser("search", help="hybrid search over built indexes")
    p.add_argument("--query", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--index", required=True, type=Path)
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("ask", help="answer a question with references and verdicts")
    p.add_argument("--question", required=True)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--index", required=True, type=Path)
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--bundle-out", type=Path,
                   help="write the prompt bundle snapshot for later parse/verify")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("parse", help="parse an answer file into claims")
    p.add_argument("--answer", required=True, type=Path)
    p.add_argument("--bundle", required=True, type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_parse)

    p = sub.add_parser("verify", help="verify claims of an answer file")
    p.add_argument("--answer", required=True, type=Path)
    p.add_argument("--bundle", required=True, type=Path)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("scifact", help="dataset preparation utilities")
    ssub = p.add_subparsers(dest="scifact_command", required=True)

    pc = ssub.add_parser("clean", help="dedup and split raw entries")
    pc.add_argument("--input", type=Path)
    pc.add_argument("--claims", type=Path, help="native SciFact claims file")
    pc.add_argument("--corpus", type=Path, help="native SciFact corpus file")
    pc.add_argument("--out", required=True, type=Path)
    pc.add_argument("--json", action="store_true")
    pc.set_defaults(func=cmd_scifact_clean)

    ps = ssub.add_parser("split", help="stratified 80/10/10 split")
    ps.add_argument("--input", required=True, type=Path)
    ps.add_argument("--out-dir", required=True, type=Path)
    ps.add_argument("--seed", type=int, default=scifact_mod.DEFAULT_SPLIT_SEED)
    ps.add_argument("--json", action="store_true")
    ps.set_defaults(func=cmd_scifact_split)

    pe = ssub.add_parser("eval", help="evaluate the NLI backend on examples")
    pe.add_argument("--input", required=True, type=Path)
    pe.add_argument("--json", action="store_true")
    pe.set_defaults(func=cmd_scifact_eval)

    p = sub.add_parser("feedback", help="feedback log utilities")
    fsub = p.add_subparsers(dest="feedback_command", required=True)
    pf = fsub.add_parser("export", help="export events as training data")
    pf.add_argument("--log", required=True, type=Path)
    pf.add_argument("--kind", required=True, choices=KINDS)
    pf.add_argument("--out", required=True, type=Path)
    pf.add_argument("--corpus", required=True, type=Path)
    pf.add_argument("--json", action="store_true")
    pf.set_defaults(func=cmd_feedback_export)

    p = sub.add_parser("serve", help="run the REST service")
    p.add_argument("--addr", default="127.0.0.1:8080")
    p.add_argument("--index", required=True, type=Path)
    p.add_argument("--corpus", required=True, type=Path)
    p.add_argument("--config", type=Path)
    p.add_argument("--feedback-log", type=Path)
    p.set_defaults(func=cmd_serve)

    return parser


def _engine(args) -> Engine:
    config = load_config(getattr(args, "config", None))
    return Engine.open(args.index, args.corpus, config=config)


def _emit(args, payload: dict, plain: str) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, sort_keys=True, ensure_ascii=False))
    else:
        print(plain)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------

def cmd_ingest(args) -> int:
    for path in args.input:
        if not path.exists():
            print(f"error: input file not found: {path}", file=sys.stderr)
            return EXIT_ERROR
    docs, stats = ingest_paths(args.input)
    write_corpus(args.out, docs, stats)
    print(json.dumps(stats.as_dict(), sort_keys=True))
    return EXIT_OK


def cmd_index(args) -> int:
    if not args.corpus.exists():
        print(f"error: corpus directory not found: {args.corpus}", file=sys.stderr)
        return EXIT_ERROR
    config = load_config(args.config)
    config = apply_overrides(config, max_tokens=args.max_tokens, overlap=args.overlap,
                             quantize=False if args.no_quantize else None)
    corpus = load_corpus(args.corpus)
    n_docs, n_segments = build_indexes(corpus, args.out, config,
                                       threads=max(args.threads, 1))
    payload = {"documents": n_docs, "segments": n_segments,
               "quantized": config.quantize, "index_dir": str(args.out)}
    _emit(args, payload,
          f"indexed {n_docs} documents as {n_segments} segments -> {args.out}")
    return EXIT_OK


def cmd_search(args) -> int:
    engine = _engine(args)
    results = engine.search(args.query, k=args.k)
    if args.json:
        print(json.dumps({"results": [
            {"doc_id": r.doc_id, "fused": sig9(r.fused), "lex_norm": sig9(r.lex_norm),
             "sem_norm": sig9(r.sem_norm), "best_segment": r.best_segment}
            for r in results]}, sort_keys=True))
    else:
        for r in results:
            print(f"{r.doc_id}\t{sig9(r.fused)}\t{sig9(r.lex_norm)}\t{sig9(r.sem_norm)}")
    return EXIT_OK


def cmd_ask(args) -> int:
    engine = _engine(args)
    outcome = engine.ask(args.question, k=args.k)
    if args.bundle_out:
        _write_bundle(args.bundle_out, outcome.answer.bundle)
    if args.json:
        print(json.dumps(ask_payload(outcome), sort_keys=True, ensure_ascii=False))
    else:
        print(outcome.answer.text)
        print()
        for d in outcome.answer.bundle.docs:
            print(f"[{d.local_index}] {d.doc_id}")
    return EXIT_OK


def _write_bundle(path: Path, bundle: PromptBundle) -> None:
    payload = {"question": bundle.question,
               "docs": [{"index": d.local_index, "doc_id": d.doc_id,
                         "title": d.title, "abstract": d.abstract}
                        for d in bundle.docs]}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True, ensure_ascii=False)
        fh.write("\n")


def _read_bundle(path: Path) -> tuple[str, list[BundleDoc]]:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    docs = [BundleDoc(local_index=int(d["index"]), doc_id=str(d["doc_id"]),
                      title=d.get("title", ""), abstract=d.get("abstract", ""))
            for d in payload.get("docs", [])]
    return payload.get("question", ""), docs


def cmd_parse(args) -> int:
    answer_text = args.answer.read_text(encoding="utf-8")
    _, docs = _read_bundle(args.bundle)
    parsed = parse_answer_text(answer_text, {d.local_index: d.doc_id for d in docs})
    payload = {
        "claims": [{"claim_id": c.claim_id, "text": c.text, "refs": list(c.refs),
                    "char_span": list(c.char_span)} for c in parsed.claims],
        "dangling": [{"claim_id": d.claim_id, "local_index": d.local_index}
                     for d in parsed.dangling],
    }
    print(json.dumps(payload, sort_keys=True, ensure_ascii=False,
                     indent=None if args.json else 2))
    return EXIT_OK


def cmd_verify(args) -> int:
    answer_text = args.answer.read_text(encoding="utf-8")
    question, docs = _read_bundle(args.bundle)
    corpus = Corpus([DocumentRecord.build(d.doc_id, d.title, d.abstract) for d in docs])
    parsed = parse_answer_text(answer_text, {d.local_index: d.doc_id for d in docs})
    backends = backends_from_env()
    verdicts = [verify_claim(c, corpus, backends.nli, backends.embedder)
                for c in parsed.claims]
    payload = {"claims": []}
    for claim, verdict in zip(parsed.claims, verdicts):
        payload["claims"].append({
            "claim_id": claim.claim_id, "text": claim.text, "refs": list(claim.refs),
            "aggregate": verdict.aggregate,
            "per_ref": [{"doc_id": rv.doc_id,
                         "label": rv.label.value if rv.label else None,
                         "error": rv.error} for rv in verdict.per_ref],
        })
    print(json.dumps(payload, sort_keys=True, ensure_ascii=False,
                     indent=None if args.json else 2))
    if all(v.aggregate == AGGREGATE_SUPPORTED for v in verdicts):
        return EXIT_OK
    return EXIT_UNSUPPORTED


def cmd_scifact_clean(args) -> int:
    if args.claims and args.corpus:
        raw = scifact_mod.load_scifact_native(args.claims, args.corpus)
    elif args.input:
        raw = scifact_mod.read_raw_entries(args.input)
    else:
        print("error: provide --input or both --claims and --corpus", file=sys.stderr)
        return EXIT_ERROR
    examples, stats = scifact_mod.clean(raw)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    scifact_mod.write_examples(args.out, examples)
    counts = scifact_mod.label_counts(examples)
    payload = {**stats.as_dict(), "label_counts": counts}
    _emit(args, payload,
          f"cleaned {stats.entries_in} entries -> {stats.examples_out} examples "
          f"({stats.duplicates_removed} duplicates removed, "
          f"{stats.dropped_no_citation} dropped without citations)")
    return EXIT_OK


def cmd_scifact_split(args) -> int:
    examples = scifact_mod.read_examples(args.input)
    splits = scifact_mod.split_examples(examples, seed=args.seed)
    args.out_dir.mkdir(parents=True, exist_ok=True)
    for name, subset in splits.items():
        scifact_mod.write_examples(args.out_dir / f"{name}.jsonl", subset)
    if args.json:
        payload = {name: scifact_mod.label_counts(subset)
                   for name, subset in splits.items()}
        print(json.dumps(payload, sort_keys=True))
    else:
        print(scifact_mod.ratio_report(splits))
    return EXIT_OK


def cmd_scifact_eval(args) -> int:
    examples = scifact_mod.read_examples(args.input)
    backends = backends_from_env()
    report = scifact_mod.evaluate_nli(backends.nli, examples)
    if args.json:
        payload = {
            "per_label": {lab: {"precision": m.precision, "recall": m.recall,
                                "f1": m.f1, "support": m.support}
                          for lab, m in report.per_label.items()},
            "weighted": {"precision": report.weighted_precision,
                         "recall": report.weighted_recall, "f1": report.weighted_f1},
            "accuracy": report.accuracy, "total": report.total,
        }
        print(json.dumps(payload, sort_keys=True))
    else:
        print(report.table())
    return EXIT_OK


def cmd_feedback_export(args) -> int:
    log = FeedbackLog(args.log)
    corpus = load_corpus(args.corpus)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    if args.kind == "LABEL_OVERRIDE":
        examples, skipped = log.export_label_overrides(corpus)
        scifact_mod.write_examples(args.out, examples)
        exported = len(examples)
    else:
        pairs, skipped = log.export_answer_edits(corpus)
        with open(args.out, "w", encoding="utf-8") as fh:
            for pair in pairs:
                fh.write(json.dumps(pair, ensure_ascii=False) + "\n")
        exported = len(pairs)
    payload = {"exported": exported, "skipped": skipped, "out": str(args.out)}
    _emit(args, payload, f"exported {exported} records to {args.out} ({skipped} skipped)")
    return EXIT_OK


def cmd_serve(args) -> int:
    from .service import serve

    host, _, port_s = args.addr.rpartition(":")
    if not host or not port_s.isdigit():
        print(f"error: --addr must be host:port, got {args.addr!r}", file=sys.stderr)
        return EXIT_ERROR
    config = load_config(args.config)
    engine = Engine.open(args.index, args.corpus, config=config)
    log_path = args.feedback_log or (Path(args.corpus) / "feedback.log")
    serve(engine, FeedbackLog(log_path), host, int(port_s),
          cors_origins=config.cors_origins)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
