"""Offline construction pipeline: load, split, extract, merge, partition, summarize.

Every stage either completes or aborts with the stage name; whatever was already
built is persisted for inspection when an output directory is given. Rebuilding
on identical inputs produces an identical index, because every stage iterates in
id order and the mock gateway is deterministic.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import Any, Optional

from .config import PipelineConfig
from .errors import BuildError, RagTraceError
from .extraction import extract_chunk
from .gateway import LLMGateway
from .ingest import load_corpus, split_document
from .merging import merge_graph
from .models import ChatRequest, Entity, InvocationContext, Relationship, Topic, TopicReport
from .store import GraphStore
from .topics import partition_topics

logger = logging.getLogger(__name__)

SUMMARY_SYSTEM_PROMPT = (
    "You write a concise report for a topic in a knowledge graph, covering the "
    "entities and relationships listed. Mention only what the listing supports."
)


def entity_embedding_text(entity: Entity) -> str:
    return f"{entity.name}: {entity.description}" if entity.description else entity.name


def summarize_topic(
    topic: Topic,
    entities_by_id: dict[str, Entity],
    relationships_by_id: dict[str, Relationship],
    gateway: LLMGateway,
    config: PipelineConfig,
) -> TopicReport:
    """One logged summarize call per topic; the prompt lists every member in id order."""
    lines = [f"Topic {topic.id}: {topic.title}", "Entities:"]
    for eid in sorted(topic.entity_ids):
        e = entities_by_id[eid]
        lines.append(f"- {e.name} ({e.entity_type or 'untyped'}): {e.description}")
    lines.append("Relationships:")
    for rid in sorted(topic.relationship_ids):
        r = relationships_by_id[rid]
        src = entities_by_id[r.source_entity_id].name
        tgt = entities_by_id[r.target_entity_id].name
        lines.append(f"- {src} -- {tgt}: {r.description}")
    request = ChatRequest(
        messages=[("system", SUMMARY_SYSTEM_PROMPT), ("user", "\n".join(lines))],
        temperature=config.temperature_for("summarize"),
        max_tokens=config.max_tokens,
    )
    context = InvocationContext(
        stage="summarize",
        target_refs=[topic.id] + sorted(topic.entity_ids) + sorted(topic.relationship_ids),
    )
    try:
        response, invocation_id = gateway.complete(request, context)
    except RagTraceError as exc:
        raise BuildError("summarize", f"topic {topic.id}: {exc}") from exc
    return TopicReport(
        topic_id=topic.id,
        title=topic.title,
        summary_text=response.strip(),
        referenced_entity_ids=sorted(topic.entity_ids),
        referenced_relationship_ids=sorted(topic.relationship_ids),
        summarize_invocation_id=invocation_id,
    )


def build_index(
    corpus_path: str | Path,
    config: PipelineConfig,
    out_dir: str | Path | None = None,
    corpus_format: str = "jsonl",
    gateway: Optional[LLMGateway] = None,
) -> GraphStore:
    """Run the whole construction pipeline and return the loaded store."""
    config.validate()
    gw = gateway or LLMGateway(config)
    stats: dict[str, Any] = {}
    state: dict[str, list] = {
        "documents": [],
        "chunks": [],
        "raw_entities": [],
        "raw_relationships": [],
        "entities": [],
        "relationships": [],
        "topics": [],
        "reports": [],
    }

    def fail(stage: str, message: str) -> BuildError:
        if out_dir is not None:
            _persist_partial(state, gw, config, out_dir, stats)
        return BuildError(stage, message)

    try:
        documents = load_corpus(corpus_path, corpus_format)
    except RagTraceError as exc:
        raise fail("load", str(exc)) from exc
    if not documents:
        raise fail("load", "no documents in corpus")
    state["documents"] = documents

    chunks = []
    for doc in documents:
        chunks.extend(split_document(doc, config.chunk_size, config.overlap))
    if not chunks:
        raise fail("split", "corpus produced no chunks")
    state["chunks"] = chunks

    raw_entities, raw_relationships = [], []
    skipped_records = 0
    try:
        for chunk in sorted(chunks, key=lambda c: c.id):
            ents, rels, skipped = extract_chunk(chunk, gw, config)
            raw_entities.extend(ents)
            raw_relationships.extend(rels)
            skipped_records += skipped
    except RagTraceError as exc:
        raise fail("extract", str(exc)) from exc
    state["raw_entities"] = raw_entities
    state["raw_relationships"] = raw_relationships
    stats["skipped_extraction_records"] = skipped_records
    if skipped_records:
        logger.warning("extraction skipped %d unparsable records", skipped_records)

    try:
        merged = merge_graph(raw_entities, raw_relationships, gw, config)
    except RagTraceError as exc:
        raise fail("merge", str(exc)) from exc
    state["entities"] = merged.entities
    state["relationships"] = merged.relationships
    stats["rejected_raw_entities"] = len(merged.rejected_raw_entity_ids)
    stats["dropped_raw_relationships"] = len(merged.dropped_raw_relationship_ids)

    try:
        topics = partition_topics(
            merged.entities,
            merged.relationships,
            max_levels=config.max_levels,
            min_split_size=config.min_split_size,
            gateway=gw,
            config=config,
        )
    except RagTraceError as exc:
        raise fail("partition", str(exc)) from exc
    state["topics"] = topics

    entities_by_id = {e.id: e for e in merged.entities}
    relationships_by_id = {r.id: r for r in merged.relationships}
    reports = []
    try:
        for topic in topics:
            reports.append(
                summarize_topic(topic, entities_by_id, relationships_by_id, gw, config)
            )
    except RagTraceError as exc:
        raise fail("summarize", str(exc)) from exc
    state["reports"] = reports

    try:
        embeddings = _build_embeddings(merged.entities, reports, gw)
    except RagTraceError as exc:
        raise fail("embed", str(exc)) from exc

    store = GraphStore(
        config=config,
        documents=documents,
        chunks=chunks,
        raw_entities=raw_entities,
        raw_relationships=raw_relationships,
        entities=merged.entities,
        relationships=merged.relationships,
        topics=topics,
        reports=reports,
        invocations=gw.invocations,
        embeddings=embeddings,
    )
    store.manifest = store.build_manifest(stats=stats)
    if out_dir is not None:
        store.persist(out_dir)
    logger.info(
        "built index: %s",
        {t: len(rows) for t, rows in store.table_dicts().items()},
    )
    return store


def _build_embeddings(
    entities: list[Entity], reports: list[TopicReport], gateway: LLMGateway
) -> dict[str, list[float]]:
    embeddings: dict[str, list[float]] = {}
    if entities:
        texts = [entity_embedding_text(e) for e in entities]
        for entity, vec in zip(entities, gateway.embed(texts)):
            embeddings[f"entity:{entity.id}"] = [float(x) for x in vec]
    report_texts = [r.summary_text for r in reports if r.summary_text.strip()]
    report_keys = [r.topic_id for r in reports if r.summary_text.strip()]
    if report_texts:
        for key, vec in zip(report_keys, gateway.embed(report_texts)):
            embeddings[f"report:{key}"] = [float(x) for x in vec]
    return embeddings


def _persist_partial(
    state: dict[str, list],
    gateway: LLMGateway,
    config: PipelineConfig,
    out_dir: str | Path,
    stats: dict[str, Any],
) -> None:
    """Best-effort dump of whatever stages completed before a failure."""
    try:
        store = GraphStore(
            config=config,
            documents=state["documents"],
            chunks=state["chunks"],
            raw_entities=state["raw_entities"],
            raw_relationships=state["raw_relationships"],
            entities=state["entities"],
            relationships=state["relationships"],
            topics=state["topics"],
            reports=state["reports"],
            invocations=gateway.invocations,
        )
        store.manifest = store.build_manifest(stats={**stats, "partial": True})
        store.persist(out_dir)
    except Exception:  # pragma: no cover - never mask the original failure
        logger.exception("could not persist partial artifacts")
