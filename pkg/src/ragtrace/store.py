"""Persistent, queryable home for the graph index and invocation log.

Storage is in-memory tables hydrated from a JSONL directory with full rewrite on
persist. Provenance edges are derived from object fields (derived -> source), so
the edge set can never drift from the data. Upstream traces, local neighborhoods,
topic distances, topic membership, and invocation lookups all run off immutable
snapshots and are safe for concurrent readers.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Optional

from .config import PipelineConfig
from .errors import CorruptIndexError, NotFoundError, ParameterError, StaleIndexError
from .models import (
    Chunk,
    Document,
    Entity,
    Fact,
    InferenceTrace,
    LLMInvocation,
    RawEntity,
    RawRelationship,
    Ref,
    Relationship,
    Topic,
    TopicReport,
)

INDEX_FILES = {
    "documents": "documents.jsonl",
    "chunks": "chunks.jsonl",
    "raw_entities": "raw_entities.jsonl",
    "raw_relationships": "raw_relationships.jsonl",
    "entities": "entities.jsonl",
    "relationships": "relationships.jsonl",
    "topics": "topics.jsonl",
    "reports": "reports.jsonl",
    "invocations": "invocations.jsonl",
}

EMBEDDINGS_FILE = "embeddings.jsonl"
MANIFEST_FILE = "manifest.json"


@dataclass
class TraceNode:
    """One node of an upstream provenance tree."""

    ref: Ref
    stage: Optional[str] = None
    via_invocation_id: Optional[str] = None
    children: list["TraceNode"] = field(default_factory=list)

    def to_dict(self) -> dict[str, Any]:
        return {
            "ref": {"kind": self.ref.kind, "id": self.ref.id},
            "stage": self.stage,
            "via_invocation_id": self.via_invocation_id,
            "children": [c.to_dict() for c in self.children],
        }


def _write_jsonl(path: Path, rows: Iterable[dict]) -> None:
    with path.open("w", encoding="utf-8") as fh:
        for row in rows:
            fh.write(json.dumps(row) + "\n")


def _read_jsonl(path: Path) -> list[dict]:
    rows = []
    for line in path.read_text(encoding="utf-8").splitlines():
        if line.strip():
            rows.append(json.loads(line))
    return rows


class GraphStore:
    """The built index plus every query the diagnosis views rely on."""

    def __init__(
        self,
        config: PipelineConfig,
        documents: list[Document],
        chunks: list[Chunk],
        raw_entities: list[RawEntity],
        raw_relationships: list[RawRelationship],
        entities: list[Entity],
        relationships: list[Relationship],
        topics: list[Topic],
        reports: list[TopicReport],
        invocations: list[LLMInvocation],
        embeddings: dict[str, list[float]] | None = None,
        manifest: dict[str, Any] | None = None,
        directory: Path | None = None,
    ):
        self.config = config
        self.documents = documents
        self.chunks = chunks
        self.raw_entities = raw_entities
        self.raw_relationships = raw_relationships
        self.entities = entities
        self.relationships = relationships
        self.topics = topics
        self.reports = reports
        self.invocations = invocations
        self.embeddings = embeddings or {}
        self.manifest = manifest or {}
        self.directory = directory

        # Diagnosis-side registrations (facts, traces, queries) live only in
        # memory; they make Stage-2 trace queries work after a diagnosis run.
        self.facts: dict[str, Fact] = {}
        self.traces: dict[str, InferenceTrace] = {}
        self.queries: dict[str, dict[str, str]] = {}

        self._reindex()

    # -- lookups ---------------------------------------------------------------

    def _reindex(self) -> None:
        self.document_by_id = {d.id: d for d in self.documents}
        self.chunk_by_id = {c.id: c for c in self.chunks}
        self.raw_entity_by_id = {r.id: r for r in self.raw_entities}
        self.raw_relationship_by_id = {r.id: r for r in self.raw_relationships}
        self.entity_by_id = {e.id: e for e in self.entities}
        self.relationship_by_id = {r.id: r for r in self.relationships}
        self.topic_by_id = {t.id: t for t in self.topics}
        self.report_by_topic_id = {r.topic_id: r for r in self.reports}
        self.invocation_by_id = {i.id: i for i in self.invocations}
        self.entity_by_normalized_name = {e.normalized_name: e for e in self.entities}
        self._adjacency: dict[str, list[Relationship]] = {}
        for rel in self.relationships:
            self._adjacency.setdefault(rel.source_entity_id, []).append(rel)
            self._adjacency.setdefault(rel.target_entity_id, []).append(rel)

    def register_trace(self, trace: InferenceTrace) -> None:
        self.traces[trace.query_id] = trace

    def register_query(self, query_id: str, question: str) -> None:
        self.queries[query_id] = {"query_id": query_id, "question": question}

    def register_facts(self, facts: list[Fact]) -> None:
        for fact in facts:
            self.facts[fact.id] = fact

    def append_invocations(self, invocations: list[LLMInvocation]) -> None:
        """Append new invocations in memory and to the persisted log, if any."""
        fresh = [inv for inv in invocations if inv.id not in self.invocation_by_id]
        if not fresh:
            return
        self.invocations.extend(fresh)
        for inv in fresh:
            self.invocation_by_id[inv.id] = inv
        if self.directory is not None:
            path = self.directory / INDEX_FILES["invocations"]
            with path.open("a", encoding="utf-8") as fh:
                for inv in fresh:
                    fh.write(json.dumps(inv.to_dict()) + "\n")

    # -- resolve ---------------------------------------------------------------

    def resolve(self, ref: Ref) -> Any:
        ref.validate()
        table: dict[str, Any] = {
            "document": self.document_by_id,
            "chunk": self.chunk_by_id,
            "raw_entity": self.raw_entity_by_id,
            "raw_relationship": self.raw_relationship_by_id,
            "entity": self.entity_by_id,
            "relationship": self.relationship_by_id,
            "topic": self.topic_by_id,
            "report": self.report_by_topic_id,
            "invocation": self.invocation_by_id,
            "query": self.queries,
            "trace": self.traces,
            "fact": self.facts,
        }[ref.kind]
        try:
            return table[ref.id]
        except KeyError:
            raise NotFoundError(ref.kind, ref.id) from None

    # -- provenance ------------------------------------------------------------

    def _edges_from(self, ref: Ref) -> list[tuple[Ref, str, Optional[str]]]:
        """Derived -> source edges leaving ``ref``, ordered by (stage, id)."""
        edges: list[tuple[Ref, str, Optional[str]]] = []
        if ref.kind == "chunk":
            chunk = self.chunk_by_id.get(ref.id)
            if chunk:
                edges.append((Ref("document", chunk.document_id), "split", None))
        elif ref.kind == "raw_entity":
            raw = self.raw_entity_by_id.get(ref.id)
            if raw:
                edges.append((Ref("chunk", raw.chunk_id), "extract", raw.extraction_invocation_id))
        elif ref.kind == "raw_relationship":
            raw = self.raw_relationship_by_id.get(ref.id)
            if raw:
                edges.append((Ref("chunk", raw.chunk_id), "extract", raw.extraction_invocation_id))
        elif ref.kind == "entity":
            entity = self.entity_by_id.get(ref.id)
            if entity:
                for raw_id in entity.raw_entity_ids:
                    edges.append((Ref("raw_entity", raw_id), "merge_entity", entity.merge_invocation_id))
        elif ref.kind == "relationship":
            rel = self.relationship_by_id.get(ref.id)
            if rel:
                for raw_id in rel.raw_relationship_ids:
                    edges.append(
                        (Ref("raw_relationship", raw_id), "merge_relationship", rel.merge_invocation_id)
                    )
        elif ref.kind == "topic":
            topic = self.topic_by_id.get(ref.id)
            if topic:
                for eid in topic.entity_ids:
                    edges.append((Ref("entity", eid), "summarize", None))
                for rid in topic.relationship_ids:
                    edges.append((Ref("relationship", rid), "summarize", None))
        elif ref.kind == "report":
            report = self.report_by_topic_id.get(ref.id)
            if report:
                edges.append((Ref("topic", report.topic_id), "summarize", report.summarize_invocation_id))
        elif ref.kind == "fact":
            fact = self.facts.get(ref.id)
            if fact:
                for cid in fact.matched_chunk_ids:
                    edges.append((Ref("chunk", cid), "expand_fact", fact.expand_invocation_id))
        return sorted(edges, key=lambda e: (e[1], e[0].kind, e[0].id))

    def trace_upstream(self, ref: Ref, max_depth: int = 8) -> TraceNode:
        """Breadth-limited upstream expansion from any resolvable reference."""
        self.resolve(ref)  # not-found propagates
        root = TraceNode(ref=ref)
        if ref.kind == "trace":
            trace = self.traces[ref.id]
            if max_depth >= 1:
                stage = "retrieve_infer" if trace.side == "actual" else "gt_infer"
                for step in trace.steps:
                    step_node = TraceNode(
                        ref=Ref("trace", f"{ref.id}#step-{step.ordinal}"),
                        stage=stage,
                        via_invocation_id=step.invocation_id or None,
                    )
                    if max_depth >= 2:
                        cited = [Ref(self._kind_of_id(c), c) for c in step.cited_recall_ids]
                        cited += [Ref("fact", f) for f in step.cited_fact_ids]
                        for child_ref in sorted(cited, key=lambda r: (r.kind, r.id)):
                            step_node.children.append(
                                self._expand(child_ref, None, None, max_depth - 2)
                            )
                    root.children.append(step_node)
            return root
        return self._expand(ref, None, None, max_depth)

    def _expand(
        self, ref: Ref, stage: Optional[str], via: Optional[str], depth_left: int
    ) -> TraceNode:
        node = TraceNode(ref=ref, stage=stage, via_invocation_id=via)
        if depth_left <= 0:
            return node
        for child_ref, child_stage, child_via in self._edges_from(ref):
            node.children.append(self._expand(child_ref, child_stage, child_via, depth_left - 1))
        return node

    def _kind_of_id(self, object_id: str) -> str:
        """Kind of a bare citation id, using the table the id actually lives in."""
        if object_id in self.entity_by_id:
            return "entity"
        if object_id in self.relationship_by_id:
            return "relationship"
        if object_id in self.report_by_topic_id or object_id in self.topic_by_id:
            return "report"
        if object_id in self.facts:
            return "fact"
        return "entity"

    # -- stage-2 relevance queries ----------------------------------------------

    def neighborhood(
        self, entity_id: str, hops: int, type_filter: Optional[list[str]] = None
    ) -> dict[str, Any]:
        if entity_id not in self.entity_by_id:
            raise NotFoundError("entity", entity_id)
        if hops < 0:
            raise ParameterError("hops must be non-negative")
        allowed = set(type_filter) if type_filter else None
        frontier = {entity_id}
        seen = {entity_id}
        for _ in range(hops):
            nxt: set[str] = set()
            for eid in frontier:
                for rel in self._adjacency.get(eid, []):
                    other = rel.target_entity_id if rel.source_entity_id == eid else rel.source_entity_id
                    if other in seen:
                        continue
                    if allowed is not None and self.entity_by_id[other].entity_type not in allowed:
                        continue
                    nxt.add(other)
            seen |= nxt
            frontier = nxt
            if not frontier:
                break
        node_ids = sorted(seen)
        inside = set(node_ids)
        rels = sorted(
            (r for r in self.relationships if r.source_entity_id in inside and r.target_entity_id in inside),
            key=lambda r: r.id,
        )
        nodes = [
            {
                "id": eid,
                "name": self.entity_by_id[eid].name,
                "entity_type": self.entity_by_id[eid].entity_type,
                "chunk_ref_count": len(self.entity_by_id[eid].chunk_refs),
            }
            for eid in node_ids
        ]
        return {
            "center": entity_id,
            "hops": hops,
            "entities": nodes,
            "relationships": [r.to_dict() for r in rels],
        }

    def deepest_topic_of(self, entity_id: str) -> Optional[Topic]:
        containing = [t for t in self.topics if entity_id in t.entity_ids]
        if not containing:
            return None
        return max(containing, key=lambda t: (t.level, t.id))

    def topic_distance(self, entity_a: str, entity_b: str) -> int:
        for eid in (entity_a, entity_b):
            if eid not in self.entity_by_id:
                raise NotFoundError("entity", eid)
        topic_a = self.deepest_topic_of(entity_a)
        topic_b = self.deepest_topic_of(entity_b)
        if topic_a is None or topic_b is None:
            # Entities outside every topic sit directly under the virtual super-root.
            depth_a = -1 if topic_a is None else topic_a.level
            depth_b = -1 if topic_b is None else topic_b.level
            return depth_a + depth_b + 2
        if topic_a.id == topic_b.id:
            return 0
        path_a = self._path_to_root(topic_a)
        path_b = self._path_to_root(topic_b)
        ancestors_a = {t.id: i for i, t in enumerate(path_a)}
        for j, t in enumerate(path_b):
            if t.id in ancestors_a:
                return ancestors_a[t.id] + j
        # Different roots: connect through a virtual super-root.
        return topic_a.level + topic_b.level + 2

    def _path_to_root(self, topic: Topic) -> list[Topic]:
        path = [topic]
        while path[-1].parent_id is not None:
            path.append(self.topic_by_id[path[-1].parent_id])
        return path

    def topics_referencing(self, entity_id: str) -> list[tuple[str, int]]:
        if entity_id not in self.entity_by_id:
            raise NotFoundError("entity", entity_id)
        rows = [(t.id, t.level) for t in self.topics if entity_id in t.entity_ids]
        return sorted(rows, key=lambda r: (r[1], r[0]))

    def invocations_for(self, ref: Ref) -> list[LLMInvocation]:
        self.resolve(ref)
        return [inv for inv in self.invocations if ref.id in inv.context.target_refs]

    # -- integrity ---------------------------------------------------------------

    def dangling_refs(self) -> list[str]:
        """Every stored identifier that fails to resolve; empty on a healthy index."""
        problems: list[str] = []

        def check(kind: str, object_id: str, owner: str) -> None:
            try:
                self.resolve(Ref(kind, object_id))
            except NotFoundError:
                problems.append(f"{owner} -> {kind}:{object_id}")

        for chunk in self.chunks:
            check("document", chunk.document_id, f"chunk:{chunk.id}")
        for raw in self.raw_entities:
            check("chunk", raw.chunk_id, f"raw_entity:{raw.id}")
            check("invocation", raw.extraction_invocation_id, f"raw_entity:{raw.id}")
        for raw_rel in self.raw_relationships:
            check("chunk", raw_rel.chunk_id, f"raw_relationship:{raw_rel.id}")
            check("invocation", raw_rel.extraction_invocation_id, f"raw_relationship:{raw_rel.id}")
        for entity in self.entities:
            for raw_id in entity.raw_entity_ids:
                check("raw_entity", raw_id, f"entity:{entity.id}")
            for chunk_id in entity.chunk_refs:
                check("chunk", chunk_id, f"entity:{entity.id}")
            if entity.merge_invocation_id:
                check("invocation", entity.merge_invocation_id, f"entity:{entity.id}")
        for rel in self.relationships:
            check("entity", rel.source_entity_id, f"relationship:{rel.id}")
            check("entity", rel.target_entity_id, f"relationship:{rel.id}")
            for raw_id in rel.raw_relationship_ids:
                check("raw_relationship", raw_id, f"relationship:{rel.id}")
            for chunk_id in rel.chunk_refs:
                check("chunk", chunk_id, f"relationship:{rel.id}")
            if rel.merge_invocation_id:
                check("invocation", rel.merge_invocation_id, f"relationship:{rel.id}")
        for topic in self.topics:
            if topic.parent_id:
                check("topic", topic.parent_id, f"topic:{topic.id}")
            for child_id in topic.child_ids:
                check("topic", child_id, f"topic:{topic.id}")
            for eid in topic.entity_ids:
                check("entity", eid, f"topic:{topic.id}")
            for rid in topic.relationship_ids:
                check("relationship", rid, f"topic:{topic.id}")
        for report in self.reports:
            check("topic", report.topic_id, f"report:{report.topic_id}")
            for eid in report.referenced_entity_ids:
                check("entity", eid, f"report:{report.topic_id}")
            for rid in report.referenced_relationship_ids:
                check("relationship", rid, f"report:{report.topic_id}")
            check("invocation", report.summarize_invocation_id, f"report:{report.topic_id}")
        return problems

    # -- persistence ---------------------------------------------------------------

    def table_dicts(self) -> dict[str, list[dict]]:
        return {
            "documents": [d.to_dict() for d in self.documents],
            "chunks": [c.to_dict() for c in self.chunks],
            "raw_entities": [r.to_dict() for r in self.raw_entities],
            "raw_relationships": [r.to_dict() for r in self.raw_relationships],
            "entities": [e.to_dict() for e in self.entities],
            "relationships": [r.to_dict() for r in self.relationships],
            "topics": [t.to_dict() for t in self.topics],
            "reports": [r.to_dict() for r in self.reports],
            "invocations": [i.to_dict() for i in self.invocations],
        }

    def persist(self, directory: str | Path) -> Path:
        out = Path(directory)
        out.mkdir(parents=True, exist_ok=True)
        tables = self.table_dicts()
        for table, filename in INDEX_FILES.items():
            _write_jsonl(out / filename, tables[table])
        _write_jsonl(
            out / EMBEDDINGS_FILE,
            ({"key": key, "vector": vec} for key, vec in sorted(self.embeddings.items())),
        )
        if not self.manifest:
            self.manifest = self.build_manifest()
        (out / MANIFEST_FILE).write_text(
            json.dumps(self.manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8"
        )
        (out / "traces").mkdir(exist_ok=True)
        (out / "reports").mkdir(exist_ok=True)
        self.directory = out
        return out

    def build_manifest(self, stats: dict[str, Any] | None = None) -> dict[str, Any]:
        config_dict = self.config.to_dict()
        return {
            "counts": {table: len(rows) for table, rows in self.table_dicts().items()},
            "config": config_dict,
            "config_hash": self.config.config_hash(),
            "built_at": datetime.now(timezone.utc).isoformat(),
            "stats": stats or {},
        }

    @classmethod
    def load(cls, directory: str | Path) -> "GraphStore":
        root = Path(directory)
        if not root.is_dir():
            raise CorruptIndexError(f"index directory not found: {root}")
        manifest_path = root / MANIFEST_FILE
        if not manifest_path.exists():
            raise CorruptIndexError(f"missing index file: {MANIFEST_FILE}")
        manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
        config = PipelineConfig.from_dict(manifest.get("config", {}))
        stored_hash = manifest.get("config_hash", "")
        if config.config_hash() != stored_hash:
            raise StaleIndexError(
                "manifest config hash does not match its stored config; rebuild the index"
            )
        rows: dict[str, list[dict]] = {}
        for table, filename in INDEX_FILES.items():
            path = root / filename
            if not path.exists():
                raise CorruptIndexError(f"missing index file: {filename}")
            rows[table] = _read_jsonl(path)
        embeddings: dict[str, list[float]] = {}
        emb_path = root / EMBEDDINGS_FILE
        if emb_path.exists():
            for row in _read_jsonl(emb_path):
                embeddings[row["key"]] = row["vector"]
        store = cls(
            config=config,
            documents=[Document.from_dict(r) for r in rows["documents"]],
            chunks=[Chunk.from_dict(r) for r in rows["chunks"]],
            raw_entities=[RawEntity.from_dict(r) for r in rows["raw_entities"]],
            raw_relationships=[RawRelationship.from_dict(r) for r in rows["raw_relationships"]],
            entities=[Entity.from_dict(r) for r in rows["entities"]],
            relationships=[Relationship.from_dict(r) for r in rows["relationships"]],
            topics=[Topic.from_dict(r) for r in rows["topics"]],
            reports=[TopicReport.from_dict(r) for r in rows["reports"]],
            invocations=[LLMInvocation.from_dict(r) for r in rows["invocations"]],
            embeddings=embeddings,
            manifest=manifest,
            directory=root,
        )
        return store

    # -- trace / report files -----------------------------------------------------

    def persist_trace(self, trace: InferenceTrace) -> None:
        self.register_trace(trace)
        if self.directory is not None:
            traces_dir = self.directory / "traces"
            traces_dir.mkdir(exist_ok=True)
            (traces_dir / f"{trace.query_id}.json").write_text(
                json.dumps(trace.to_dict(), indent=2) + "\n", encoding="utf-8"
            )

    def persist_report(self, pair_id: str, report_dict: dict[str, Any]) -> None:
        if self.directory is not None:
            reports_dir = self.directory / "reports"
            reports_dir.mkdir(exist_ok=True)
            (reports_dir / f"{pair_id}.json").write_text(
                json.dumps(report_dict, indent=2) + "\n", encoding="utf-8"
            )

    def load_report(self, pair_id: str) -> dict[str, Any]:
        if self.directory is None:
            raise NotFoundError("report", pair_id)
        path = self.directory / "reports" / f"{pair_id}.json"
        if not path.exists():
            raise NotFoundError("report", pair_id)
        return json.loads(path.read_text(encoding="utf-8"))
