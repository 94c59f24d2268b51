"""Operator entry point: build indexes, run queries and diagnoses, serve the API.

Exit codes: 0 success, 1 usage, 2 data or build error, 3 model or transport error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional, Sequence

from .builder import build_index
from .config import PipelineConfig, load_config
from .diagnosis import DiagnosisEngine
from .errors import (
    ConfigurationError,
    EndpointError,
    EvaluationError,
    ExtractionError,
    InferenceError,
    RagTraceError,
    TransportError,
    UnscriptedCallError,
)
from .gateway import LLMGateway
from .models import Fact, Ref, TestPair
from .retrieval import Retriever
from .store import GraphStore, TraceNode

_LLM_ERRORS = (
    UnscriptedCallError,
    TransportError,
    EndpointError,
    InferenceError,
    EvaluationError,
    ExtractionError,
    ConfigurationError,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # argparse would sys.exit(2); we want exit 1
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="ragtrace", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: _Parser) -> None:
        p.add_argument("--config", help="YAML config file; flags override its keys")
        p.add_argument("--mock", help="mock script JSONL enabling deterministic mock mode")

    p_build = sub.add_parser("build", help="build a graph index from a corpus")
    common(p_build)
    p_build.add_argument("--corpus", required=True)
    p_build.add_argument("--format", default="jsonl", choices=["jsonl", "plain_dir"])
    p_build.add_argument("--out", required=True)
    p_build.add_argument("--chunk-size", type=int, dest="chunk_size")
    p_build.add_argument("--overlap", type=int)

    p_query = sub.add_parser("query", help="answer a question with a cited trace")
    common(p_query)
    p_query.add_argument("--index", required=True)
    p_query.add_argument("--question", required=True)

    p_diag = sub.add_parser("diagnose", help="run diagnosis for test pairs")
    common(p_diag)
    p_diag.add_argument("--index", required=True)
    p_diag.add_argument("--pairs", required=True, help="test-pair JSONL file")
    p_diag.add_argument("--pair-id", help="only diagnose this pair id")

    p_serve = sub.add_parser("serve", help="serve the HTTP API")
    common(p_serve)
    p_serve.add_argument("--index", required=True)
    p_serve.add_argument("--host", default="127.0.0.1")
    p_serve.add_argument("--port", type=int, default=8008)
    p_serve.add_argument("--cors-origin", default="*")
    p_serve.add_argument("--static", help="directory with a built web UI to serve at /")

    p_inspect = sub.add_parser("inspect", help="pretty-print the upstream trace of a ref")
    common(p_inspect)
    p_inspect.add_argument("--index", required=True)
    p_inspect.add_argument("--ref", required=True, help="reference as kind:id")
    p_inspect.add_argument("--depth", type=int, default=8)

    return parser


def _config_from_args(args: argparse.Namespace, extra: dict | None = None) -> PipelineConfig:
    overrides = dict(extra or {})
    if getattr(args, "mock", None):
        overrides["mock_script"] = args.mock
    for key in ("chunk_size", "overlap"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value
    return load_config(getattr(args, "config", None), overrides)


def _open_index(args: argparse.Namespace) -> tuple[GraphStore, LLMGateway, PipelineConfig]:
    store = GraphStore.load(args.index)
    config = store.config
    if getattr(args, "mock", None):
        config.mock_script = args.mock
    gateway = LLMGateway(config)
    gateway.resume_sequence(store.invocations)
    return store, gateway, config


def pair_from_record(record: dict) -> TestPair:
    """Accept both the domain shape and evidence-list test-pair records."""
    pair_id = record.get("id") or record.get("query_id") or "pair"
    ground_truth = record.get("ground_truth") or record.get("answer") or ""
    facts = []
    if "facts" in record:
        for i, f in enumerate(record["facts"], start=1):
            if isinstance(f, str):
                facts.append(Fact(id=f"{pair_id}/fact-{i}", text=f))
            else:
                facts.append(Fact(id=f.get("id") or f"{pair_id}/fact-{i}", text=f["text"]))
    elif "evidence" in record:
        for i, item in enumerate(record["evidence"], start=1):
            text = item["fact"] if isinstance(item, dict) else str(item)
            facts.append(Fact(id=f"{pair_id}/fact-{i}", text=text))
    return TestPair(
        id=pair_id, question=record["question"], ground_truth=ground_truth, facts=facts
    )


def _cmd_build(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    store = build_index(args.corpus, config, out_dir=args.out, corpus_format=args.format)
    counts = store.manifest["counts"]
    print(json.dumps({"out": str(args.out), "counts": counts}, indent=2))
    return 0


def _cmd_query(args: argparse.Namespace) -> int:
    store, gateway, config = _open_index(args)
    retriever = Retriever(store, gateway, config)
    answer, trace, recalls = retriever.answer_query(args.question)
    store.append_invocations(gateway.invocations)
    print(
        json.dumps(
            {
                "query_id": trace.query_id,
                "answer_text": answer,
                "trace": trace.to_dict(),
                "recalls": [r.to_dict() for r in recalls],
            },
            indent=2,
        )
    )
    return 0


def _cmd_diagnose(args: argparse.Namespace) -> int:
    store, gateway, config = _open_index(args)
    engine = DiagnosisEngine(store, gateway, config)
    pairs_path = Path(args.pairs)
    if not pairs_path.exists():
        raise RagTraceError(f"pairs file not found: {pairs_path}")
    exit_code = 0
    for line in pairs_path.read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        pair = pair_from_record(json.loads(line))
        if args.pair_id and pair.id != args.pair_id:
            continue
        report = engine.run_diagnosis(pair)
        if report.error:
            print(f"{pair.id}: error {report.error}")
            exit_code = 2
            continue
        verdict = report.evaluation.verdict if report.evaluation else "?"
        if report.suspicious is None:
            print(f"{pair.id}: {verdict} (evaluation only)")
        else:
            missing = sum(1 for s in report.suspicious if s.classification == "missing")
            unexpected = sum(1 for s in report.suspicious if s.classification == "unexpected")
            print(f"{pair.id}: {verdict} missing={missing} unexpected={unexpected}")
    return exit_code


def _cmd_serve(args: argparse.Namespace) -> int:
    from .api import create_app, serve, shutdown

    store, gateway, config = _open_index(args)
    app = create_app(
        store, gateway, config, cors_origin=args.cors_origin, static_dir=args.static
    )
    handle = serve(app, host=args.host, port=args.port)
    print(f"serving on http://{handle.host}:{handle.port} (Ctrl-C to stop)")
    try:
        handle.thread.join()
    except KeyboardInterrupt:
        shutdown(handle)
    return 0


def _print_trace(node: TraceNode, indent: int = 0) -> None:
    suffix = ""
    if node.stage:
        suffix = f"  [{node.stage}" + (f" via {node.via_invocation_id}" if node.via_invocation_id else "") + "]"
    print("  " * indent + str(node.ref) + suffix)
    for child in node.children:
        _print_trace(child, indent + 1)


def _cmd_inspect(args: argparse.Namespace) -> int:
    store, _, _ = _open_index(args)
    ref = Ref.parse(args.ref)
    _print_trace(store.trace_upstream(ref, max_depth=args.depth))
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        parser.print_usage(sys.stderr)
        return 1
    handlers = {
        "build": _cmd_build,
        "query": _cmd_query,
        "diagnose": _cmd_diagnose,
        "serve": _cmd_serve,
        "inspect": _cmd_inspect,
    }
    try:
        return handlers[args.command](args)
    except _LLM_ERRORS as exc:
        print(f"model/transport error: {exc}", file=sys.stderr)
        return 3
    except RagTraceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    raise SystemExit(main())


if __name__ == "__main__":
    entrypoint()
