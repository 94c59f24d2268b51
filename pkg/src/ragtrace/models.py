"""Domain types for the graph index, retrieval traces, and diagnosis reports.

Every type round-trips through ``to_dict``/``from_dict`` with stable field names;
those names are the persisted JSONL schema and the API payload schema.
"""

from __future__ import annotations

from dataclasses import dataclass, field, fields
from typing import Any, Optional

# The nine model-call stages: four construction/retrieval stages plus the five
# diagnosis-side stages. Provenance edges additionally use "split" for the
# non-LLM chunk -> document derivation.
STAGES = (
    "extract",
    "merge_entity",
    "merge_relationship",
    "summarize",
    "retrieve_infer",
    "evaluate",
    "expand_fact",
    "gt_infer",
    "filter_subgraph",
)

REF_KINDS = (
    "document",
    "chunk",
    "raw_entity",
    "raw_relationship",
    "entity",
    "relationship",
    "topic",
    "report",
    "invocation",
    "query",
    "trace",
    "fact",
)


def _dict_of(obj: Any) -> dict[str, Any]:
    """Shallow dataclass -> dict preserving declared field order."""
    return {f.name: getattr(obj, f.name) for f in fields(obj)}


# ---------------------------------------------------------------------------
# Model-call plumbing
# ---------------------------------------------------------------------------


@dataclass
class ChatRequest:
    """One chat-completion request: ordered (role, text) messages."""

    messages: list[tuple[str, str]]
    temperature: float = 0.0
    max_tokens: int = 2048

    def validate(self) -> None:
        from .errors import ParameterError

        if not self.messages:
            raise ParameterError("messages must be non-empty")
        for role, _ in self.messages:
            if role not in ("system", "user", "assistant"):
                raise ParameterError(f"unknown message role {role!r}")
        if self.messages[0][0] not in ("system", "user"):
            raise ParameterError("first message role must be system or user")
        if self.temperature < 0:
            raise ParameterError("temperature must be >= 0")
        if self.max_tokens <= 0:
            raise ParameterError("max_tokens must be positive")

    def prompt_text(self) -> str:
        """All message texts concatenated; the surface mock matchers scan."""
        return "\n".join(text for _, text in self.messages)


@dataclass
class InvocationContext:
    """Stage tag plus the object ids a model call reads or produces."""

    stage: str
    target_refs: list[str] = field(default_factory=list)

    def validate(self) -> None:
        from .errors import ParameterError

        if self.stage not in STAGES:
            raise ParameterError(f"unknown stage {self.stage!r}")


@dataclass
class LLMInvocation:
    """One logged model call; append-only once written."""

    id: str
    context: InvocationContext
    request: ChatRequest
    response_text: str
    model_name: str
    timestamp: str
    prompt_tokens: int
    completion_tokens: int

    def to_dict(self) -> dict[str, Any]:
        # Flat wire schema; field names are fixed.
        return {
            "id": self.id,
            "stage": self.context.stage,
            "target_refs": list(self.context.target_refs),
            "messages": [[role, text] for role, text in self.request.messages],
            "response_text": self.response_text,
            "model_name": self.model_name,
            "timestamp": self.timestamp,
            "prompt_tokens": self.prompt_tokens,
            "completion_tokens": self.completion_tokens,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "LLMInvocation":
        return cls(
            id=d["id"],
            context=InvocationContext(stage=d["stage"], target_refs=list(d["target_refs"])),
            request=ChatRequest(messages=[(m[0], m[1]) for m in d["messages"]]),
            response_text=d["response_text"],
            model_name=d["model_name"],
            timestamp=d["timestamp"],
            prompt_tokens=d["prompt_tokens"],
            completion_tokens=d["completion_tokens"],
        )


# ---------------------------------------------------------------------------
# Corpus
# ---------------------------------------------------------------------------


@dataclass
class Document:
    id: str
    title: str
    text: str
    source_path: str = ""
    metadata: dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Document":
        return cls(**d)


@dataclass
class Chunk:
    id: str
    document_id: str
    ordinal: int
    text: str
    start_offset: int
    end_offset: int

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Chunk":
        return cls(**d)


# ---------------------------------------------------------------------------
# Graph objects
# ---------------------------------------------------------------------------


@dataclass
class RawEntity:
    id: str
    chunk_id: str
    name: str
    entity_type: str
    description: str
    extraction_invocation_id: str

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RawEntity":
        return cls(**d)


@dataclass
class RawRelationship:
    id: str
    chunk_id: str
    source_name: str
    target_name: str
    description: str
    strength: float
    extraction_invocation_id: str

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "RawRelationship":
        return cls(**d)


@dataclass
class Entity:
    id: str
    name: str
    normalized_name: str
    entity_type: str
    description: str
    raw_entity_ids: list[str]
    chunk_refs: list[str]
    merge_invocation_id: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Entity":
        return cls(**d)


@dataclass
class Relationship:
    id: str
    source_entity_id: str
    target_entity_id: str
    description: str
    weight: float
    raw_relationship_ids: list[str]
    chunk_refs: list[str]
    merge_invocation_id: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Relationship":
        return cls(**d)


@dataclass
class Topic:
    id: str
    level: int
    parent_id: Optional[str]
    child_ids: list[str]
    entity_ids: list[str]
    relationship_ids: list[str]
    title: str

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Topic":
        return cls(**d)


@dataclass
class TopicReport:
    topic_id: str
    title: str
    summary_text: str
    referenced_entity_ids: list[str]
    referenced_relationship_ids: list[str]
    summarize_invocation_id: str

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TopicReport":
        return cls(**d)


# ---------------------------------------------------------------------------
# Retrieval
# ---------------------------------------------------------------------------

RECALL_KINDS = ("entity", "relationship", "report")


@dataclass
class Recall:
    """One retrieved item handed to the answering model."""

    id: str
    kind: str
    ref_id: str
    score: float
    rank: int

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Recall":
        return cls(**d)


@dataclass
class InferenceStep:
    """One reasoning step; actual side cites recalls, ground-truth side cites facts."""

    ordinal: int
    text: str
    cited_recall_ids: list[str] = field(default_factory=list)
    cited_fact_ids: list[str] = field(default_factory=list)
    inference_subgraph_ref: Optional[str] = None
    invocation_id: str = ""

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "InferenceStep":
        return cls(**d)


@dataclass
class InferenceTrace:
    side: str  # "actual" | "ground_truth"
    query_id: str
    steps: list[InferenceStep]
    answer_text: str
    warnings: int = 0

    def to_dict(self) -> dict[str, Any]:
        d = _dict_of(self)
        d["steps"] = [s.to_dict() for s in self.steps]
        return d

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "InferenceTrace":
        d = dict(d)
        d["steps"] = [InferenceStep.from_dict(s) for s in d["steps"]]
        return cls(**d)


# ---------------------------------------------------------------------------
# Diagnosis
# ---------------------------------------------------------------------------


@dataclass
class Fact:
    id: str
    text: str
    matched_chunk_ids: list[str] = field(default_factory=list)
    expanded_text: Optional[str] = None
    expand_invocation_id: Optional[str] = None
    unmatchable: bool = False

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "Fact":
        return cls(**d)


@dataclass
class TestPair:
    __test__ = False  # evaluation data, not a pytest class

    id: str
    question: str
    ground_truth: str
    facts: list[Fact]

    def validate(self) -> None:
        from .errors import ParameterError

        if not self.question.strip():
            raise ParameterError("test pair question must be non-empty")
        if not self.ground_truth.strip():
            raise ParameterError("test pair ground truth must be non-empty")

    def to_dict(self) -> dict[str, Any]:
        return {
            "id": self.id,
            "question": self.question,
            "ground_truth": self.ground_truth,
            "facts": [f.to_dict() for f in self.facts],
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "TestPair":
        return cls(
            id=d["id"],
            question=d["question"],
            ground_truth=d["ground_truth"],
            facts=[Fact.from_dict(f) for f in d["facts"]],
        )


@dataclass
class FactSubgraph:
    fact_id: str
    entity_ids: list[str]
    relationship_ids: list[str]

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "FactSubgraph":
        return cls(**d)


@dataclass
class InferenceSubgraph:
    step_ordinal: int
    entity_ids: list[str]
    relationship_ids: list[str]
    filter_invocation_id: str
    unfiltered: bool = False
    warnings: int = 0

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "InferenceSubgraph":
        return cls(**d)


@dataclass
class AnswerEvaluation:
    verdict: str  # "correct" | "wrong"
    relevance_score: float
    justification: str
    discrepancies: list[dict[str, str]]  # {"claim": ..., "contradicting_fact_id": ...}
    invocation_id: str = ""

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "AnswerEvaluation":
        return cls(**d)


@dataclass
class SuspiciousRecall:
    classification: str  # "missing" | "unexpected"
    kind: str  # "entity" | "relationship"
    ref_id: str
    gt_step_ordinals: list[int]
    actual_step_ordinals: list[int]

    def to_dict(self) -> dict[str, Any]:
        return _dict_of(self)

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "SuspiciousRecall":
        return cls(**d)


@dataclass
class DiagnosisReport:
    test_pair_id: str
    evaluation: Optional[AnswerEvaluation]
    actual_trace: Optional[InferenceTrace]
    gt_trace: Optional[InferenceTrace]
    suspicious: Optional[list[SuspiciousRecall]]  # None = not computed
    recalls: list[Recall] = field(default_factory=list)
    facts: list[Fact] = field(default_factory=list)
    fact_subgraphs: list[FactSubgraph] = field(default_factory=list)
    inference_subgraphs: list[InferenceSubgraph] = field(default_factory=list)
    timings: dict[str, float] = field(default_factory=dict)
    error: Optional[str] = None

    def to_dict(self) -> dict[str, Any]:
        return {
            "test_pair_id": self.test_pair_id,
            "evaluation": self.evaluation.to_dict() if self.evaluation else None,
            "actual_trace": self.actual_trace.to_dict() if self.actual_trace else None,
            "gt_trace": self.gt_trace.to_dict() if self.gt_trace else None,
            "suspicious": [s.to_dict() for s in self.suspicious]
            if self.suspicious is not None
            else None,
            "recalls": [r.to_dict() for r in self.recalls],
            "facts": [f.to_dict() for f in self.facts],
            "fact_subgraphs": [g.to_dict() for g in self.fact_subgraphs],
            "inference_subgraphs": [g.to_dict() for g in self.inference_subgraphs],
            "timings": dict(self.timings),
            "error": self.error,
        }

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "DiagnosisReport":
        return cls(
            test_pair_id=d["test_pair_id"],
            evaluation=AnswerEvaluation.from_dict(d["evaluation"]) if d["evaluation"] else None,
            actual_trace=InferenceTrace.from_dict(d["actual_trace"]) if d["actual_trace"] else None,
            gt_trace=InferenceTrace.from_dict(d["gt_trace"]) if d["gt_trace"] else None,
            suspicious=[SuspiciousRecall.from_dict(s) for s in d["suspicious"]]
            if d["suspicious"] is not None
            else None,
            recalls=[Recall.from_dict(r) for r in d.get("recalls", [])],
            facts=[Fact.from_dict(f) for f in d.get("facts", [])],
            fact_subgraphs=[FactSubgraph.from_dict(g) for g in d.get("fact_subgraphs", [])],
            inference_subgraphs=[
                InferenceSubgraph.from_dict(g) for g in d.get("inference_subgraphs", [])
            ],
            timings=dict(d.get("timings", {})),
            error=d.get("error"),
        )


# ---------------------------------------------------------------------------
# References
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Ref:
    """A (kind, id) pointer that resolves in exactly one store table."""

    kind: str
    id: str

    def validate(self) -> None:
        from .errors import ParameterError

        if self.kind not in REF_KINDS:
            raise ParameterError(f"unknown ref kind {self.kind!r}")

    def __str__(self) -> str:
        return f"{self.kind}:{self.id}"

    @classmethod
    def parse(cls, token: str) -> "Ref":
        from .errors import ParameterError

        kind, sep, ref_id = token.partition(":")
        if not sep or not ref_id:
            raise ParameterError(f"ref must look like kind:id, got {token!r}")
        ref = cls(kind=kind, id=ref_id)
        ref.validate()
        return ref
