"""Online retrieval: recall entities/relationships/reports, then infer with citations.

Ranking is a deterministic total order: similarity scores break ties by ref id,
question-mentioned entities are force-included ahead of similarity hits, and
relationship recalls come from graph incidence so their local relevance stays
inspectable. Citation handles ([E1], [R2], [T3]) are per-call aliases; persisted
citations always store ref ids.
"""

from __future__ import annotations

import hashlib
import re

import numpy as np

from .config import PipelineConfig
from .errors import InferenceError, MissingEmbeddingsError, ParameterError
from .gateway import LLMGateway
from .models import ChatRequest, InferenceStep, InferenceTrace, InvocationContext, Recall
from .store import GraphStore
from .textutil import find_token_sublist, match_tokens, normalize_text

INFER_SYSTEM_PROMPT = (
    "You answer a question using only the recalls listed. Reason in numbered steps "
    '("Step 1: ..."), citing the recall handles each step relies on in square '
    'brackets, and finish with a line "Answer: <answer>".'
)

_STEP_LINE = re.compile(r"^\s*step\s*(\d+)\s*[:.]\s*(.*)$", re.IGNORECASE)
_ANSWER_LINE = re.compile(r"^\s*answer\s*[:.]\s*(.*)$", re.IGNORECASE)
_HANDLE = re.compile(r"\[([ERTF]\d+)\]")


def query_id_for(question: str) -> str:
    digest = hashlib.sha256(normalize_text(question).encode("utf-8")).hexdigest()
    return f"q-{digest[:10]}"


class Retriever:
    """Read-only retrieval over one immutable index snapshot."""

    def __init__(self, store: GraphStore, gateway: LLMGateway, config: PipelineConfig):
        self.store = store
        self.gateway = gateway
        self.config = config

    # -- recall ------------------------------------------------------------

    def extract_query_entities(self, question: str) -> list[str]:
        """Entities whose name occurs in the question at token boundaries."""
        q_tokens = match_tokens(question)
        found: list[tuple[int, str]] = []
        for entity in sorted(self.store.entities, key=lambda e: e.id):
            name_tokens = match_tokens(entity.normalized_name)
            pos = find_token_sublist(q_tokens, name_tokens)
            if pos >= 0:
                found.append((pos, entity.id))
        return [eid for _, eid in sorted(found)]

    def _embedding(self, key: str) -> np.ndarray:
        try:
            return np.asarray(self.store.embeddings[key], dtype=float)
        except KeyError:
            raise MissingEmbeddingsError(
                f"index has no embedding for {key}; rebuild the index"
            ) from None

    def retrieve(
        self,
        question: str,
        k_entities: int | None = None,
        k_relationships: int | None = None,
        k_reports: int | None = None,
    ) -> list[Recall]:
        if not question.strip():
            raise ParameterError("question must be non-empty")
        k_e = self.config.k_entities if k_entities is None else k_entities
        k_r = self.config.k_relationships if k_relationships is None else k_relationships
        k_t = self.config.k_reports if k_reports is None else k_reports
        if min(k_e, k_r, k_t) < 0:
            raise ParameterError("recall budgets must be non-negative")
        if self.store.entities and not self.store.embeddings:
            raise MissingEmbeddingsError("index has no embeddings; rebuild the index")

        query_vec = self.gateway.embed([question])[0]
        qid = query_id_for(question)
        recalls: list[Recall] = []

        # Entity recalls: question-mentioned entities first, then top-k by cosine.
        forced = self.extract_query_entities(question)
        forced_set = set(forced)
        scores: dict[str, float] = {}
        for entity in self.store.entities:
            vec = self._embedding(f"entity:{entity.id}")
            scores[entity.id] = float(np.dot(query_vec, vec))
        similarity_pool = sorted(
            (e.id for e in self.store.entities if e.id not in forced_set),
            key=lambda eid: (-scores[eid], eid),
        )
        entity_ids = forced + similarity_pool[:k_e]
        for rank, eid in enumerate(entity_ids, start=1):
            recalls.append(
                Recall(id=f"{qid}/e{rank:02d}", kind="entity", ref_id=eid, score=scores[eid], rank=rank)
            )

        # Relationship recalls: edges incident to recalled entities, by weight.
        recalled_entities = set(entity_ids)
        incident = {
            rel.id: rel
            for rel in self.store.relationships
            if rel.source_entity_id in recalled_entities
            or rel.target_entity_id in recalled_entities
        }
        ranked_rels = sorted(incident.values(), key=lambda r: (-r.weight, r.id))[:k_r]
        for rank, rel in enumerate(ranked_rels, start=1):
            recalls.append(
                Recall(
                    id=f"{qid}/r{rank:02d}",
                    kind="relationship",
                    ref_id=rel.id,
                    score=rel.weight,
                    rank=rank,
                )
            )

        # Report recalls: cosine over summaries; reports holding a recalled
        # entity are boosted above pure-similarity hits.
        report_rows = []
        for report in self.store.reports:
            key = f"report:{report.topic_id}"
            if key not in self.store.embeddings:
                continue
            sim = float(np.dot(query_vec, self._embedding(key)))
            boosted = bool(recalled_entities & set(report.referenced_entity_ids))
            report_rows.append((not boosted, -sim, report.topic_id, sim))
        report_rows.sort()
        for rank, (_, _, topic_id, sim) in enumerate(report_rows[:k_t], start=1):
            recalls.append(
                Recall(id=f"{qid}/t{rank:02d}", kind="report", ref_id=topic_id, score=sim, rank=rank)
            )
        return recalls

    # -- infer ------------------------------------------------------------

    def _recall_lines(self, recalls: list[Recall]) -> tuple[list[str], dict[str, str]]:
        lines: list[str] = []
        handle_to_ref: dict[str, str] = {}
        prefix = {"entity": "E", "relationship": "R", "report": "T"}
        for recall in recalls:
            handle = f"{prefix[recall.kind]}{recall.rank}"
            handle_to_ref[handle] = recall.ref_id
            if recall.kind == "entity":
                entity = self.store.entity_by_id[recall.ref_id]
                lines.append(f"[{handle}] entity {entity.name}: {entity.description}")
            elif recall.kind == "relationship":
                rel = self.store.relationship_by_id[recall.ref_id]
                src = self.store.entity_by_id[rel.source_entity_id].name
                tgt = self.store.entity_by_id[rel.target_entity_id].name
                lines.append(f"[{handle}] relationship {src} -- {tgt}: {rel.description}")
            else:
                report = self.store.report_by_topic_id[recall.ref_id]
                lines.append(f"[{handle}] report {report.title}: {report.summary_text}")
        return lines, handle_to_ref

    def infer_actual(self, question: str, recalls: list[Recall], query_id: str) -> InferenceTrace:
        if not recalls:
            raise ParameterError("inference needs at least one recall")
        lines, handle_to_ref = self._recall_lines(recalls)
        request = ChatRequest(
            messages=[
                ("system", INFER_SYSTEM_PROMPT),
                ("user", f"Question: {question}\nRecalls:\n" + "\n".join(lines)),
            ],
            temperature=self.config.temperature_for("retrieve_infer"),
            max_tokens=self.config.max_tokens,
        )
        context = InvocationContext(
            stage="retrieve_infer", target_refs=[query_id] + [r.ref_id for r in recalls]
        )
        response, invocation_id = self.gateway.complete(request, context)
        steps, answer, warnings = parse_step_response(
            response, handle_to_ref, invocation_id, citation_field="recalls"
        )
        if not steps:
            raise InferenceError("inference response contains no parsable steps", invocation_id)
        return InferenceTrace(
            side="actual", query_id=query_id, steps=steps, answer_text=answer, warnings=warnings
        )

    def answer_query(self, question: str) -> tuple[str, InferenceTrace, list[Recall]]:
        if not question.strip():
            raise ParameterError("question must be non-empty")
        query_id = query_id_for(question)
        recalls = self.retrieve(question)
        trace = self.infer_actual(question, recalls, query_id)
        self.store.register_query(query_id, question)
        self.store.persist_trace(trace)
        return trace.answer_text, trace, recalls


def parse_step_response(
    response: str,
    handle_to_ref: dict[str, str],
    invocation_id: str,
    citation_field: str,
) -> tuple[list[InferenceStep], str, int]:
    """Parse numbered steps with bracketed citations and a final answer line.

    Steps are re-sorted by their stated ordinal and renumbered contiguously;
    citations of unknown handles are dropped and counted as warnings.
    """
    raw_steps: list[tuple[int, str, list[str]]] = []
    answer = ""
    warnings = 0
    for line in response.splitlines():
        m = _ANSWER_LINE.match(line)
        if m:
            answer = m.group(1).strip()
            continue
        m = _STEP_LINE.match(line)
        if not m:
            continue
        stated = int(m.group(1))
        text = m.group(2).strip()
        cited: list[str] = []
        for handle in _HANDLE.findall(text):
            if handle in handle_to_ref:
                ref = handle_to_ref[handle]
                if ref not in cited:
                    cited.append(ref)
            else:
                warnings += 1
        raw_steps.append((stated, text, cited))

    raw_steps.sort(key=lambda s: s[0])
    steps = []
    for ordinal, (_, text, cited) in enumerate(raw_steps, start=1):
        step = InferenceStep(ordinal=ordinal, text=text, invocation_id=invocation_id)
        if citation_field == "recalls":
            step.cited_recall_ids = cited
        else:
            step.cited_fact_ids = cited
        steps.append(step)
    return steps, answer, warnings
