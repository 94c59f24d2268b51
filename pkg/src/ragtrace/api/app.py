"""HTTP facade over the store, retriever, and diagnosis engine.

Every response is either a typed payload or an ApiError envelope with a machine
code; reads hit the immutable snapshot concurrently, while query/diagnose writes
are serialized by a single writer lock.
"""

from __future__ import annotations

import logging
import threading
from typing import Any, Optional

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..config import PipelineConfig
from ..diagnosis import DiagnosisEngine
from ..errors import (
    BuildError,
    CorruptIndexError,
    EndpointError,
    EvaluationError,
    ExtractionError,
    InferenceError,
    MissingEmbeddingsError,
    NotFoundError,
    ParameterError,
    RagTraceError,
    StaleIndexError,
    TransportError,
    UnscriptedCallError,
)
from ..gateway import LLMGateway
from ..models import Fact, Ref, TestPair
from ..retrieval import Retriever
from ..store import GraphStore
from .schemas import DiagnoseRequest, QueryRequest

logger = logging.getLogger(__name__)

_ERROR_MAP: list[tuple[type, int, str]] = [
    (NotFoundError, 404, "not_found"),
    (ParameterError, 400, "bad_request"),
    (StaleIndexError, 409, "stale_index"),
    (MissingEmbeddingsError, 409, "stale_index"),
    (CorruptIndexError, 500, "build_failed"),
    (BuildError, 500, "build_failed"),
    (UnscriptedCallError, 502, "llm_error"),
    (TransportError, 502, "llm_error"),
    (EndpointError, 502, "llm_error"),
    (InferenceError, 502, "llm_error"),
    (EvaluationError, 502, "llm_error"),
    (ExtractionError, 502, "llm_error"),
]


def _error_response(exc: Exception) -> JSONResponse:
    for exc_type, status, code in _ERROR_MAP:
        if isinstance(exc, exc_type):
            detail_ref = None
            if isinstance(exc, NotFoundError):
                detail_ref = f"{exc.kind}:{exc.ref_id}"
            return JSONResponse(
                status_code=status,
                content={"code": code, "message": str(exc), "detail_ref": detail_ref},
            )
    if isinstance(exc, RagTraceError):
        return JSONResponse(
            status_code=400,
            content={"code": "bad_request", "message": str(exc), "detail_ref": None},
        )
    logger.exception("unhandled error", exc_info=exc)
    return JSONResponse(
        status_code=500,
        content={"code": "build_failed", "message": "internal error", "detail_ref": None},
    )


def create_app(
    store: GraphStore,
    gateway: LLMGateway,
    config: PipelineConfig,
    cors_origin: str = "*",
    static_dir: str | None = None,
) -> FastAPI:
    app = FastAPI(title="ragtrace", docs_url="/api/docs", openapi_url="/api/openapi.json")
    app.add_middleware(
        CORSMiddleware,
        allow_origins=[cors_origin],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    retriever = Retriever(store, gateway, config)
    engine = DiagnosisEngine(store, gateway, config, retriever=retriever)
    writer_lock = threading.Lock()

    @app.exception_handler(RagTraceError)
    async def handle_domain_error(_req: Request, exc: RagTraceError) -> JSONResponse:
        return _error_response(exc)

    @app.exception_handler(Exception)
    async def handle_any_error(_req: Request, exc: Exception) -> JSONResponse:
        return _error_response(exc)

    # -- health -----------------------------------------------------------

    @app.get("/api/health")
    def health() -> dict[str, Any]:
        return {"status": "ok", "manifest": store.manifest}

    # -- topics -----------------------------------------------------------

    @app.get("/api/topics/tree")
    def topics_tree() -> dict[str, Any]:
        def node(topic_id: str) -> dict[str, Any]:
            topic = store.topic_by_id[topic_id]
            payload = topic.to_dict()
            payload["entity_count"] = len(topic.entity_ids)
            payload["children"] = [node(cid) for cid in topic.child_ids]
            return payload

        roots = [t.id for t in store.topics if t.parent_id is None]
        return {"roots": [node(tid) for tid in roots]}

    @app.get("/api/topics/{topic_id}/report")
    def topic_report(topic_id: str) -> dict[str, Any]:
        return store.resolve(Ref("report", topic_id)).to_dict()

    # -- entities -----------------------------------------------------------

    @app.get("/api/entities/{entity_id}")
    def entity(entity_id: str) -> dict[str, Any]:
        return store.resolve(Ref("entity", entity_id)).to_dict()

    @app.get("/api/entities/{entity_id}/neighborhood")
    def neighborhood(
        entity_id: str,
        hops: int = Query(default=1, ge=0),
        types: Optional[str] = Query(default=None),
    ) -> dict[str, Any]:
        type_filter = [t for t in types.split(",") if t] if types else None
        return store.neighborhood(entity_id, hops=hops, type_filter=type_filter)

    @app.get("/api/entities/{entity_a}/topic-distance/{entity_b}")
    def topic_distance(entity_a: str, entity_b: str) -> dict[str, Any]:
        return {
            "entity_a": entity_a,
            "entity_b": entity_b,
            "distance": store.topic_distance(entity_a, entity_b),
        }

    # -- provenance -----------------------------------------------------------

    @app.get("/api/trace/{kind}/{object_id}")
    def trace(kind: str, object_id: str, depth: int = Query(default=8, ge=0)) -> dict[str, Any]:
        ref = Ref(kind=kind, id=object_id)
        ref.validate()
        return store.trace_upstream(ref, max_depth=depth).to_dict()

    @app.get("/api/invocations/{invocation_id}")
    def invocation(invocation_id: str) -> dict[str, Any]:
        return store.resolve(Ref("invocation", invocation_id)).to_dict()

    @app.get("/api/invocations")
    def invocations_for(ref: str = Query(...)) -> dict[str, Any]:
        parsed = Ref.parse(ref)
        rows = store.invocations_for(parsed)
        return {"ref": str(parsed), "invocations": [inv.to_dict() for inv in rows]}

    # -- query & diagnosis -----------------------------------------------------------

    @app.post("/api/query")
    def query(payload: QueryRequest) -> dict[str, Any]:
        with writer_lock:
            answer, trace_obj, recalls = retriever.answer_query(payload.question)
            store.append_invocations(gateway.invocations)
        return {
            "query_id": trace_obj.query_id,
            "answer_text": answer,
            "trace": trace_obj.to_dict(),
            "recalls": [r.to_dict() for r in recalls],
        }

    @app.post("/api/diagnose")
    def diagnose(payload: DiagnoseRequest) -> dict[str, Any]:
        pair = TestPair(
            id=payload.id,
            question=payload.question,
            ground_truth=payload.ground_truth,
            facts=[
                Fact(id=f.id or f"{payload.id}/fact-{i}", text=f.text)
                for i, f in enumerate(payload.facts, start=1)
            ],
        )
        with writer_lock:
            report = engine.run_diagnosis(pair)
        return report.to_dict()

    @app.get("/api/reports/{pair_id}")
    def report(pair_id: str) -> dict[str, Any]:
        return store.load_report(pair_id)

    if static_dir:
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="webapp")

    return app
