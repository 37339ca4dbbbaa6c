"""Operator command line: ingest, query, benchmark, evaluate, and generate
instruction data without the service; `serve` launches the HTTP API.

Exit codes: 0 success, 1 data errors, 2 usage errors.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import List, Optional

from . import evalkit, iftgen, synth
from .corpus import CorpusStore
from .errors import SpectraQaError
from .gateway import CitationEchoGateway, GatewayConfig, HttpGateway
from .pipeline import PipelineConfig, QaPipeline
from .retrieval import RetrieverKind


def _load_store(corpus_path: Optional[str]) -> CorpusStore:
    store = CorpusStore()
    if corpus_path is None:
        store.add_papers(synth.demo_corpus())
        return store
    path = Path(corpus_path)
    if not path.exists():
        raise FileNotFoundError(f"corpus file not found: {corpus_path}")
    report = store.ingest_lines(path.read_text(encoding="utf-8").splitlines())
    if report.rejected:
        reasons = "; ".join(f"line {r.index}: {r.reason}" for r in report.rejected[:5])
        raise ValueError(f"corpus file has {len(report.rejected)} invalid record(s): {reasons}")
    return store


def _make_gateway(args: argparse.Namespace):
    if getattr(args, "mock", False):
        return CitationEchoGateway()
    config = (
        GatewayConfig.from_file(args.config)
        if getattr(args, "config", None)
        else GatewayConfig.from_file_or_env()
    )
    return HttpGateway(config)


def _pipeline(args: argparse.Namespace) -> QaPipeline:
    store = _load_store(getattr(args, "corpus", None))
    return QaPipeline(store, _make_gateway(args), config=PipelineConfig())


def _emit(args: argparse.Namespace, payload, human_lines: List[str]) -> None:
    if getattr(args, "json", False):
        print(json.dumps(payload, ensure_ascii=False, indent=2))
    else:
        for line in human_lines:
            print(line)


def _hit_rows(hits) -> List[dict]:
    return [{"paper_id": h.paper_id, "score": h.score, "rank": h.rank} for h in hits]


def cmd_ingest(args: argparse.Namespace) -> int:
    source = Path(args.jsonl)
    if not source.exists():
        raise FileNotFoundError(f"input file not found: {args.jsonl}")
    store = CorpusStore()
    target = Path(args.corpus)
    if target.exists():
        existing = store.ingest_lines(target.read_text(encoding="utf-8").splitlines())
        if existing.rejected:
            raise ValueError(f"existing corpus {args.corpus} has invalid records")
    report = store.ingest_lines(source.read_text(encoding="utf-8").splitlines())
    target.write_text(store.export_jsonl(), encoding="utf-8")
    payload = {
        "accepted": report.accepted,
        "rejected": [{"index": r.index, "reason": r.reason} for r in report.rejected],
        "corpus": str(target),
        "total_papers": len(store),
    }
    lines = [f"accepted {report.accepted} record(s) into {target} ({len(store)} total)"]
    lines += [f"rejected line {r.index}: {r.reason}" for r in report.rejected]
    _emit(args, payload, lines)
    return 0


def cmd_ask(args: argparse.Namespace) -> int:
    pipeline = _pipeline(args)
    kind = RetrieverKind(args.retriever)
    outcome = pipeline.ask(args.question, retriever=kind, k=args.k)
    payload = {
        "question": args.question,
        "answer": {
            "text": outcome.answer.text,
            "citations": outcome.answer.citations,
            "bundle_fingerprint": outcome.answer.bundle_fingerprint,
        },
        "parsed": {
            "research_object": outcome.parsed.research_object,
            "measured_property": outcome.parsed.measured_property,
            "spectral_method": outcome.parsed.spectral_method,
            "question_objective": (
                outcome.parsed.question_objective.value
                if outcome.parsed.question_objective
                else None
            ),
            "task": outcome.parsed.task.value,
        },
        "hits": _hit_rows(outcome.hits),
        "snippets": [
            {"paper_id": s.paper_id, "field_of_origin": s.field_of_origin, "text": s.text}
            for s in outcome.bundle.snippets
        ],
        "timing": outcome.timing,
    }
    lines = [outcome.answer.text, "", f"citations: {', '.join(outcome.answer.citations) or '(none)'}"]
    lines += [f"  [{h.rank}] {h.paper_id}  score={h.score:.4f}" for h in outcome.hits]
    _emit(args, payload, lines)
    return 0


def cmd_retrieve(args: argparse.Namespace) -> int:
    pipeline = _pipeline(args)
    hits = pipeline.retrieve(query_terms=args.terms, kind=RetrieverKind(args.retriever), k=args.k)
    payload = {"hits": _hit_rows(hits)}
    lines = [f"  [{h.rank}] {h.paper_id}  score={h.score:.4f}" for h in hits] or ["(no hits)"]
    _emit(args, payload, lines)
    return 0


def cmd_bench(args: argparse.Namespace) -> int:
    report = synth.run_benchmark(
        num_docs=args.docs, num_queries=args.queries, seed=args.seed, k=args.k
    )
    width = max(len(row["method"]) for row in report["methods"])
    lines = [
        f"seed={report['seed']} papers={report['num_papers']} queries={report['num_queries']} k={report['k']}",
        f"{'Methods'.ljust(width)}  Accuracy(%)",
    ]
    lines += [f"{row['method'].ljust(width)}  {row['accuracy_percent']}" for row in report["methods"]]
    _emit(args, report, lines)
    return 0


def cmd_eval_metrics(args: argparse.Namespace) -> int:
    path = Path(args.jsonl)
    if not path.exists():
        raise FileNotFoundError(f"input file not found: {args.jsonl}")
    items = []
    for i, line in enumerate(path.read_text(encoding="utf-8").splitlines()):
        if not line.strip():
            continue
        record = json.loads(line)
        if "candidate" not in record or "reference" not in record:
            raise ValueError(f"line {i}: needs candidate and reference fields")
        items.append({"candidate": record["candidate"], "reference": record["reference"]})
    report = evalkit.evaluate_items(items)
    agg = report["aggregate"]
    lines = [
        f"items: {len(items)}",
        f"bleu:     {agg['bleu']:.4f}",
        f"rouge1_f: {agg['rouge1_f']:.4f}",
        f"meteor:   {agg['meteor']:.4f}",
    ]
    _emit(args, report, lines)
    return 0


def cmd_ift_gen(args: argparse.Namespace) -> int:
    if args.corpus == "demo":
        papers = synth.demo_corpus()
    else:
        papers = _load_store(args.corpus).snapshot()
    items = iftgen.generate_items(papers)
    exported = iftgen.export_ift(items, {p.id: p for p in papers})
    if args.out:
        Path(args.out).write_text(exported, encoding="utf-8")
        _emit(
            args,
            {"items": len(items), "out": args.out},
            [f"wrote {len(items)} instruction item(s) to {args.out}"],
        )
    else:
        sys.stdout.write(exported)
    return 0


def cmd_demo_corpus(args: argparse.Namespace) -> int:
    store = CorpusStore()
    store.add_papers(synth.demo_corpus())
    Path(args.out).write_text(store.export_jsonl(), encoding="utf-8")
    _emit(
        args,
        {"papers": len(store), "out": args.out},
        [f"wrote {len(store)} demo paper(s) to {args.out}"],
    )
    return 0


def cmd_serve(args: argparse.Namespace) -> int:
    import uvicorn

    from .server import create_app

    store = _load_store(args.corpus)
    app = create_app(store=store, gateway=_make_gateway(args))
    uvicorn.run(app, host=args.host, port=args.port, log_level="warning")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spectraqa", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser, corpus: bool = True) -> None:
        p.add_argument("--json", action="store_true", help="machine-readable JSON on stdout")
        if corpus:
            p.add_argument("--corpus", help="corpus JSONL path (built-in demo corpus when omitted)")

    p = sub.add_parser("ingest", help="merge a JSONL file into a corpus file")
    p.add_argument("jsonl")
    p.add_argument("--corpus", default="corpus.jsonl")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("ask", help="answer a question over the corpus")
    p.add_argument("question")
    p.add_argument("--retriever", choices=[k.value for k in RetrieverKind], default="tfidf")
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--mock", action="store_true", help="use the deterministic offline gateway")
    p.add_argument("--config", help="gateway config JSON file")
    add_common(p)
    p.set_defaults(func=cmd_ask)

    p = sub.add_parser("retrieve", help="rank papers for raw query terms")
    p.add_argument("terms")
    p.add_argument("--retriever", choices=[k.value for k in RetrieverKind], default="tfidf")
    p.add_argument("--k", type=int, default=10)
    add_common(p)
    p.set_defaults(func=cmd_retrieve)

    p = sub.add_parser("bench-retrieval", help="synthetic recall@k benchmark for all methods")
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--docs", type=int, default=200)
    p.add_argument("--queries", type=int, default=100)
    p.add_argument("--k", type=int, default=10)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("eval-metrics", help="score candidate/reference pairs from JSONL")
    p.add_argument("jsonl")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_eval_metrics)

    p = sub.add_parser("ift-gen", help="generate instruction data from a corpus")
    p.add_argument("corpus", help="corpus JSONL path, or 'demo'")
    p.add_argument("--out", help="output JSONL path (stdout when omitted)")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_ift_gen)

    p = sub.add_parser("demo-corpus", help="write the built-in demo corpus to a file")
    p.add_argument("--out", default="demo_corpus.jsonl")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_demo_corpus)

    p = sub.add_parser("serve", help="run the HTTP API")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--mock", action="store_true")
    p.add_argument("--config")
    p.add_argument("--corpus")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (OSError, ValueError, json.JSONDecodeError, SpectraQaError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
