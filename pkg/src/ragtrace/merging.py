"""Consolidation of raw extractions into canonical entities and relationships.

Merge keys: normalized name for entities, unordered normalized endpoint pair for
relationships. Descriptions with a single distinct non-empty value are taken
verbatim with no model call; two or more distinct values are consolidated by one
logged merge-stage call per object.
"""

from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass, field

from .config import PipelineConfig
from .gateway import LLMGateway
from .models import ChatRequest, Entity, InvocationContext, RawEntity, RawRelationship, Relationship
from .textutil import normalize_name

MERGE_SYSTEM_PROMPT = (
    "You consolidate several descriptions of the same graph object into a single "
    "concise description. Answer with the consolidated description only."
)


@dataclass
class MergeResult:
    entities: list[Entity]
    relationships: list[Relationship]
    rejected_raw_entity_ids: list[str] = field(default_factory=list)
    dropped_raw_relationship_ids: list[str] = field(default_factory=list)


def _display_name(names: list[str]) -> str:
    """Most frequent raw spelling; ties resolved lexicographically."""
    counts = Counter(names)
    top = max(counts.values())
    return sorted(name for name, c in counts.items() if c == top)[0]


def _consolidate_description(
    descriptions: list[str],
    gateway: LLMGateway,
    config: PipelineConfig,
    stage: str,
    label: str,
    target_refs: list[str],
) -> tuple[str, str | None]:
    """Returns (description, invocation_id or None when no call was needed)."""
    distinct = sorted({d.strip() for d in descriptions if d.strip()})
    if not distinct:
        return "", None
    if len(distinct) == 1:
        return distinct[0], None
    listing = "\n".join(f"- {d}" for d in distinct)
    request = ChatRequest(
        messages=[
            ("system", MERGE_SYSTEM_PROMPT),
            ("user", f"Object: {label}\nDescriptions:\n{listing}"),
        ],
        temperature=config.temperature_for(stage),
        max_tokens=config.max_tokens,
    )
    response, invocation_id = gateway.complete(
        request, InvocationContext(stage=stage, target_refs=list(target_refs))
    )
    return response.strip(), invocation_id


def merge_graph(
    raw_entities: list[RawEntity],
    raw_relationships: list[RawRelationship],
    gateway: LLMGateway,
    config: PipelineConfig,
) -> MergeResult:
    """Group raws by merge key and consolidate into Entity/Relationship objects."""
    rejected: list[str] = []
    groups: dict[str, list[RawEntity]] = defaultdict(list)
    for raw in raw_entities:
        key = normalize_name(raw.name)
        if not key:
            rejected.append(raw.id)
            continue
        groups[key].append(raw)

    entities: list[Entity] = []
    key_to_entity_id: dict[str, str] = {}
    for index, key in enumerate(sorted(groups)):
        members = groups[key]
        entity_id = f"ent-{index:04d}"
        key_to_entity_id[key] = entity_id
        description, merge_inv = _consolidate_description(
            [m.description for m in members],
            gateway,
            config,
            stage="merge_entity",
            label=_display_name([m.name for m in members]),
            target_refs=[m.id for m in members],
        )
        types = sorted({m.entity_type.strip() for m in members if m.entity_type.strip()})
        chunk_refs = sorted({m.chunk_id for m in members})
        entities.append(
            Entity(
                id=entity_id,
                name=_display_name([m.name for m in members]),
                normalized_name=key,
                entity_type=types[0] if types else "",
                description=description,
                raw_entity_ids=[m.id for m in members],
                chunk_refs=chunk_refs,
                merge_invocation_id=merge_inv,
            )
        )

    dropped: list[str] = []
    rel_groups: dict[tuple[str, str], list[RawRelationship]] = defaultdict(list)
    for raw in raw_relationships:
        src = normalize_name(raw.source_name)
        tgt = normalize_name(raw.target_name)
        if src not in key_to_entity_id or tgt not in key_to_entity_id or src == tgt:
            dropped.append(raw.id)
            continue
        rel_groups[tuple(sorted((src, tgt)))].append(raw)

    relationships: list[Relationship] = []
    for index, pair in enumerate(sorted(rel_groups)):
        members = rel_groups[pair]
        rel_id = f"rel-{index:04d}"
        description, merge_inv = _consolidate_description(
            [m.description for m in members],
            gateway,
            config,
            stage="merge_relationship",
            label=f"{pair[0]} -- {pair[1]}",
            target_refs=[m.id for m in members],
        )
        relationships.append(
            Relationship(
                id=rel_id,
                source_entity_id=key_to_entity_id[pair[0]],
                target_entity_id=key_to_entity_id[pair[1]],
                description=description,
                weight=sum(m.strength for m in members),
                raw_relationship_ids=[m.id for m in members],
                chunk_refs=sorted({m.chunk_id for m in members}),
                merge_invocation_id=merge_inv,
            )
        )

    return MergeResult(
        entities=entities,
        relationships=relationships,
        rejected_raw_entity_ids=rejected,
        dropped_raw_relationship_ids=dropped,
    )
