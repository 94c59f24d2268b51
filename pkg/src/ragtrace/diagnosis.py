"""Two-stage diagnosis: judge the answer, rebuild the ground-truth inference, and
classify suspicious recalls by comparing what each side actually used.

The comparison itself is a pure set computation with no model call: the union of
entity/relationship ids over the ground-truth inference subgraphs against the
union of cited recall ref ids over the actual steps (cited reports dissolve into
their referenced members, since ground-truth recalls live at entity/relationship
granularity).
"""

from __future__ import annotations

import re
import time
from typing import Optional

import numpy as np

from .config import PipelineConfig
from .errors import EvaluationError, RagTraceError
from .gateway import LLMGateway
from .models import (
    AnswerEvaluation,
    ChatRequest,
    DiagnosisReport,
    Fact,
    FactSubgraph,
    InferenceStep,
    InferenceSubgraph,
    InferenceTrace,
    InvocationContext,
    Recall,
    SuspiciousRecall,
    TestPair,
)
from .retrieval import Retriever, parse_step_response
from .store import GraphStore
from .textutil import normalize_text

EVALUATE_SYSTEM_PROMPT = (
    "You judge whether an answer matches the ground truth, given numbered evidence "
    'facts. Reply with lines "VERDICT: correct|wrong", "SCORE: <0..1>", '
    '"JUSTIFICATION: ...", and zero or more "DISCREPANCY: <claim> (From Fact k)".'
)

EXPAND_SYSTEM_PROMPT = (
    "You expand an evidence fact with the context of the chunks it came from, so "
    "it can support step-by-step inference on its own. Answer with the expanded "
    "fact only."
)

GT_INFER_SYSTEM_PROMPT = (
    "You reconstruct the inference that leads from the expanded facts to the "
    'ground-truth answer. Reason in numbered steps ("Step 1: ..."), citing the '
    "fact handles each step uses in square brackets, and finish with "
    '"Answer: <ground truth>".'
)

FILTER_SYSTEM_PROMPT = (
    "You select which candidate entities and relationships are pertinent to one "
    "inference step. Answer with the handles to keep in square brackets."
)

_VERDICT = re.compile(r"^\s*verdict\s*[:.]\s*(correct|wrong)\s*$", re.IGNORECASE | re.MULTILINE)
_SCORE = re.compile(r"^\s*score\s*[:.]\s*([-+0-9.eE]+)\s*$", re.IGNORECASE | re.MULTILINE)
_JUSTIFICATION = re.compile(r"^\s*justification\s*[:.]\s*(.*)$", re.IGNORECASE | re.MULTILINE)
_DISCREPANCY = re.compile(r"^\s*discrepancy\s*[:.]\s*(.*)$", re.IGNORECASE | re.MULTILINE)
_FROM_FACT = re.compile(r"\(\s*from\s+fact\s+(\d+)\s*\)", re.IGNORECASE)
_CANDIDATE = re.compile(r"\[C(\d+)\]")


class DiagnosisEngine:
    """Runs Stage-1 identification for one test pair over a loaded index."""

    def __init__(
        self,
        store: GraphStore,
        gateway: LLMGateway,
        config: PipelineConfig,
        retriever: Optional[Retriever] = None,
    ):
        self.store = store
        self.gateway = gateway
        self.config = config
        self.retriever = retriever or Retriever(store, gateway, config)

    # -- answer evaluation ----------------------------------------------------

    def evaluate_answer(self, pair: TestPair, actual_answer: str) -> AnswerEvaluation:
        pair.validate()
        fact_lines = (
            "\n".join(f"Fact {i}: {f.text}" for i, f in enumerate(pair.facts, start=1))
            or "(no facts supplied)"
        )
        request = ChatRequest(
            messages=[
                ("system", EVALUATE_SYSTEM_PROMPT),
                (
                    "user",
                    f"Question: {pair.question}\nGround truth: {pair.ground_truth}\n"
                    f"Actual answer: {actual_answer}\n{fact_lines}",
                ),
            ],
            temperature=self.config.temperature_for("evaluate"),
            max_tokens=self.config.max_tokens,
        )
        context = InvocationContext(
            stage="evaluate", target_refs=[pair.id] + [f.id for f in pair.facts]
        )
        response, invocation_id = self.gateway.complete(request, context)

        verdict_m = _VERDICT.search(response)
        if not verdict_m:
            raise EvaluationError("judge response has no parsable verdict", invocation_id)
        verdict = verdict_m.group(1).lower()
        score_m = _SCORE.search(response)
        if not score_m:
            raise EvaluationError("judge response has no parsable score", invocation_id)
        score = float(score_m.group(1))
        if not 0.0 <= score <= 1.0:
            raise EvaluationError(
                f"relevance score {score} is outside [0, 1]; refusing to clamp", invocation_id
            )
        justification_m = _JUSTIFICATION.search(response)
        justification = justification_m.group(1).strip() if justification_m else ""

        discrepancies: list[dict[str, str]] = []
        for claim in _DISCREPANCY.findall(response):
            fact_m = _FROM_FACT.search(claim)
            fact_id = ""
            if fact_m:
                ordinal = int(fact_m.group(1))
                if 1 <= ordinal <= len(pair.facts):
                    fact_id = pair.facts[ordinal - 1].id
            discrepancies.append(
                {"claim": _FROM_FACT.sub("", claim).strip(), "contradicting_fact_id": fact_id}
            )
        if verdict == "correct" and discrepancies:
            raise EvaluationError(
                "judge declared the answer correct but listed discrepancies", invocation_id
            )
        return AnswerEvaluation(
            verdict=verdict,
            relevance_score=score,
            justification=justification,
            discrepancies=discrepancies,
            invocation_id=invocation_id,
        )

    # -- fact grounding ----------------------------------------------------------

    def match_fact_to_chunks(self, fact: Fact) -> list[str]:
        """Substring match on normalized text, then an embedding fallback, else flagged."""
        needle = normalize_text(fact.text)
        matched = [c.id for c in self.store.chunks if needle in normalize_text(c.text)]
        if matched:
            fact.matched_chunk_ids = sorted(matched)
            fact.unmatchable = False
            return fact.matched_chunk_ids
        if self.store.chunks:
            fact_vec = self.gateway.embed([fact.text])[0]
            chunk_vecs = self.gateway.embed([c.text for c in self.store.chunks])
            scored = sorted(
                (
                    (float(np.dot(fact_vec, vec)), chunk.id)
                    for chunk, vec in zip(self.store.chunks, chunk_vecs)
                ),
                key=lambda s: (-s[0], s[1]),
            )
            near = [
                cid
                for sim, cid in scored[: self.config.fact_fallback_top]
                if sim >= self.config.fact_similarity_threshold
            ]
            if near:
                fact.matched_chunk_ids = sorted(near)
                fact.unmatchable = False
                return fact.matched_chunk_ids
        fact.matched_chunk_ids = []
        fact.unmatchable = True
        return []

    def expand_fact(self, fact: Fact, pair: TestPair) -> Fact:
        """One expansion call per fact; unmatchable facts expand from their text alone."""
        chunk_texts = [self.store.chunk_by_id[cid].text for cid in fact.matched_chunk_ids]
        parts = [f"Fact: {fact.text}"]
        if chunk_texts:
            parts.append("Source chunks:")
            parts.extend(f"- {t}" for t in chunk_texts)
        parts.append(f"Question: {pair.question}")
        request = ChatRequest(
            messages=[("system", EXPAND_SYSTEM_PROMPT), ("user", "\n".join(parts))],
            temperature=self.config.temperature_for("expand_fact"),
            max_tokens=self.config.max_tokens,
        )
        context = InvocationContext(
            stage="expand_fact", target_refs=[fact.id] + list(fact.matched_chunk_ids)
        )
        response, invocation_id = self.gateway.complete(request, context)
        fact.expanded_text = response.strip()
        fact.expand_invocation_id = invocation_id
        return fact

    # -- ground-truth reconstruction ------------------------------------------------

    def reconstruct_gt_inference(self, pair: TestPair) -> InferenceTrace:
        handle_to_ref = {f"F{i}": fact.id for i, fact in enumerate(pair.facts, start=1)}
        fact_lines = [
            f"[F{i}] {fact.expanded_text or fact.text}" for i, fact in enumerate(pair.facts, start=1)
        ]
        request = ChatRequest(
            messages=[
                ("system", GT_INFER_SYSTEM_PROMPT),
                (
                    "user",
                    f"Question: {pair.question}\nGround truth: {pair.ground_truth}\n"
                    "Expanded facts:\n" + "\n".join(fact_lines),
                ),
            ],
            temperature=self.config.temperature_for("gt_infer"),
            max_tokens=self.config.max_tokens,
        )
        context = InvocationContext(
            stage="gt_infer", target_refs=[pair.id] + [f.id for f in pair.facts]
        )
        response, invocation_id = self.gateway.complete(request, context)
        steps, _, warnings = parse_step_response(
            response, handle_to_ref, invocation_id, citation_field="facts"
        )
        return InferenceTrace(
            side="ground_truth",
            query_id=pair.id,
            steps=steps,
            answer_text=pair.ground_truth,
            warnings=warnings,
        )

    # -- subgraphs ----------------------------------------------------------------

    def build_fact_subgraph(self, fact: Fact) -> FactSubgraph:
        matched = set(fact.matched_chunk_ids)
        entity_ids = sorted(
            e.id for e in self.store.entities if matched & set(e.chunk_refs)
        )
        inside = set(entity_ids)
        relationship_ids = sorted(
            r.id
            for r in self.store.relationships
            if matched & set(r.chunk_refs)
            and r.source_entity_id in inside
            and r.target_entity_id in inside
        )
        return FactSubgraph(
            fact_id=fact.id, entity_ids=entity_ids, relationship_ids=relationship_ids
        )

    def build_inference_subgraph(
        self, step: InferenceStep, fact_subgraphs: dict[str, FactSubgraph]
    ) -> InferenceSubgraph:
        cited = [fact_subgraphs[fid] for fid in step.cited_fact_ids if fid in fact_subgraphs]
        entity_candidates = sorted({eid for sg in cited for eid in sg.entity_ids})
        rel_candidates = sorted({rid for sg in cited for rid in sg.relationship_ids})
        candidates = entity_candidates + rel_candidates
        if not candidates:
            return InferenceSubgraph(
                step_ordinal=step.ordinal,
                entity_ids=[],
                relationship_ids=[],
                filter_invocation_id="",
            )
        lines = []
        for idx, object_id in enumerate(candidates, start=1):
            if object_id in self.store.entity_by_id:
                entity = self.store.entity_by_id[object_id]
                lines.append(f"[C{idx}] entity {entity.name}: {entity.description}")
            else:
                rel = self.store.relationship_by_id[object_id]
                src = self.store.entity_by_id[rel.source_entity_id].name
                tgt = self.store.entity_by_id[rel.target_entity_id].name
                lines.append(f"[C{idx}] relationship {src} -- {tgt}: {rel.description}")
        request = ChatRequest(
            messages=[
                ("system", FILTER_SYSTEM_PROMPT),
                ("user", f"Step: {step.text}\nCandidates:\n" + "\n".join(lines)),
            ],
            temperature=self.config.temperature_for("filter_subgraph"),
            max_tokens=self.config.max_tokens,
        )
        context = InvocationContext(stage="filter_subgraph", target_refs=list(candidates))
        response, invocation_id = self.gateway.complete(request, context)

        warnings = 0
        kept: list[str] = []
        indices = _CANDIDATE.findall(response)
        for raw_idx in indices:
            idx = int(raw_idx)
            if 1 <= idx <= len(candidates):
                if candidates[idx - 1] not in kept:
                    kept.append(candidates[idx - 1])
            else:
                warnings += 1  # named a non-candidate; dropped to keep the subset rule
        unfiltered = not indices
        if unfiltered:
            kept = list(candidates)
        entity_set = set(entity_candidates)
        return InferenceSubgraph(
            step_ordinal=step.ordinal,
            entity_ids=sorted(k for k in kept if k in entity_set),
            relationship_ids=sorted(k for k in kept if k not in entity_set),
            filter_invocation_id=invocation_id,
            unfiltered=unfiltered,
            warnings=warnings,
        )

    # -- suspicious recall identification ----------------------------------------------

    def identify_suspicious_recalls(
        self,
        actual_trace: InferenceTrace,
        gt_subgraphs: list[InferenceSubgraph],
        actual_recalls: list[Recall],
    ) -> list[SuspiciousRecall]:
        kind_by_ref = {r.ref_id: r.kind for r in actual_recalls}

        gt_used: dict[str, list[int]] = {}
        for sg in gt_subgraphs:
            for object_id in list(sg.entity_ids) + list(sg.relationship_ids):
                gt_used.setdefault(object_id, []).append(sg.step_ordinal)

        act_used: dict[str, list[int]] = {}

        def use(object_id: str, ordinal: int) -> None:
            ordinals = act_used.setdefault(object_id, [])
            if ordinal not in ordinals:
                ordinals.append(ordinal)

        for step in actual_trace.steps:
            for ref_id in step.cited_recall_ids:
                kind = kind_by_ref.get(ref_id) or self._kind_of(ref_id)
                if kind == "report":
                    report = self.store.report_by_topic_id.get(ref_id)
                    if report:
                        for eid in report.referenced_entity_ids:
                            use(eid, step.ordinal)
                        for rid in report.referenced_relationship_ids:
                            use(rid, step.ordinal)
                else:
                    use(ref_id, step.ordinal)

        suspicious = []
        for object_id in set(gt_used) - set(act_used):
            suspicious.append(
                SuspiciousRecall(
                    classification="missing",
                    kind=self._kind_of(object_id),
                    ref_id=object_id,
                    gt_step_ordinals=sorted(set(gt_used[object_id])),
                    actual_step_ordinals=[],
                )
            )
        for object_id in set(act_used) - set(gt_used):
            suspicious.append(
                SuspiciousRecall(
                    classification="unexpected",
                    kind=self._kind_of(object_id),
                    ref_id=object_id,
                    gt_step_ordinals=[],
                    actual_step_ordinals=sorted(set(act_used[object_id])),
                )
            )
        return sorted(suspicious, key=lambda s: (s.classification, s.kind, s.ref_id))

    def _kind_of(self, object_id: str) -> str:
        return "relationship" if object_id in self.store.relationship_by_id else "entity"

    # -- orchestration ----------------------------------------------------------------

    def run_diagnosis(self, pair: TestPair) -> DiagnosisReport:
        pair.validate()
        report = DiagnosisReport(
            test_pair_id=pair.id,
            evaluation=None,
            actual_trace=None,
            gt_trace=None,
            suspicious=None,
            facts=pair.facts,
        )
        timings = report.timings

        def timed(stage: str, fn):
            start = time.perf_counter()
            try:
                return fn()
            finally:
                timings[stage] = round(time.perf_counter() - start, 6)

        try:
            answer, actual_trace, recalls = timed(
                "answer_query", lambda: self.retriever.answer_query(pair.question)
            )
            report.actual_trace = actual_trace
            report.recalls = recalls

            report.evaluation = timed(
                "evaluate", lambda: self.evaluate_answer(pair, answer)
            )

            if not pair.facts:
                return self._finish(pair, report)

            def ground_facts():
                for fact in pair.facts:
                    self.match_fact_to_chunks(fact)
                    self.expand_fact(fact, pair)

            timed("facts", ground_facts)

            report.gt_trace = timed("gt_infer", lambda: self.reconstruct_gt_inference(pair))

            fact_subgraphs = {
                fact.id: self.build_fact_subgraph(fact) for fact in pair.facts
            }
            report.fact_subgraphs = [fact_subgraphs[f.id] for f in pair.facts]

            def build_subgraphs():
                subgraphs = []
                for step in report.gt_trace.steps:
                    sg = self.build_inference_subgraph(step, fact_subgraphs)
                    step.inference_subgraph_ref = f"{pair.id}/sg{sg.step_ordinal:02d}"
                    subgraphs.append(sg)
                return subgraphs

            report.inference_subgraphs = timed("subgraphs", build_subgraphs)

            report.suspicious = timed(
                "identify",
                lambda: self.identify_suspicious_recalls(
                    report.actual_trace, report.inference_subgraphs, report.recalls
                ),
            )
        except RagTraceError as exc:
            report.error = str(exc)
        return self._finish(pair, report)

    def _finish(self, pair: TestPair, report: DiagnosisReport) -> DiagnosisReport:
        self.store.register_facts(pair.facts)
        if report.gt_trace is not None:
            self.store.register_trace(report.gt_trace)
        self.store.append_invocations(self.gateway.invocations)
        self.store.persist_report(pair.id, report.to_dict())
        return report
