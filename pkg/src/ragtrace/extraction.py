"""Per-chunk entity/relationship extraction via one logged model call per chunk.

Model responses use a tuple-delimited record format, one record per line:

    ("entity"|<name>|<type>|<description>)
    ("relationship"|<source>|<target>|<description>|<strength 0..1>)

Unparsable records are skipped individually (counted, not fatal); a response made
entirely of failed record attempts is a hard extraction error carrying the
invocation id so the failure itself stays traceable.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from .config import PipelineConfig
from .errors import ExtractionError
from .gateway import LLMGateway
from .models import ChatRequest, Chunk, InvocationContext, RawEntity, RawRelationship
from .textutil import normalize_name

EXTRACT_SYSTEM_PROMPT = (
    "You identify the entities and relationships stated in a text chunk. "
    'Answer with one record per line, using ("entity"|name|type|description) for '
    'entities and ("relationship"|source|target|description|strength) for '
    "relationships, where strength is a number between 0 and 1."
)

_RECORD = re.compile(r"^\s*\(\s*\"(entity|relationship)\"\s*\|(.*)\)\s*$")


@dataclass
class ParsedExtraction:
    entities: list[tuple[str, str, str]] = field(default_factory=list)
    relationships: list[tuple[str, str, str, float]] = field(default_factory=list)
    skipped: int = 0
    attempts: int = 0


def parse_extraction_response(text: str) -> ParsedExtraction:
    """Parse the record lines of one extraction response."""
    result = ParsedExtraction()
    for line in text.splitlines():
        stripped = line.strip()
        if not stripped.startswith("("):
            continue
        result.attempts += 1
        m = _RECORD.match(stripped)
        if not m:
            result.skipped += 1
            continue
        kind, rest = m.group(1), m.group(2)
        parts = [p.strip().strip('"') for p in rest.split("|")]
        if kind == "entity":
            if len(parts) != 3 or not parts[0]:
                result.skipped += 1
                continue
            result.entities.append((parts[0], parts[1], parts[2]))
        else:
            if len(parts) != 4:
                result.skipped += 1
                continue
            source, target, description, strength_text = parts
            try:
                strength = float(strength_text)
            except ValueError:
                result.skipped += 1
                continue
            if not (0.0 <= strength <= 1.0) or not source or not target:
                result.skipped += 1
                continue
            if normalize_name(source) == normalize_name(target):
                result.skipped += 1
                continue
            result.relationships.append((source, target, description, strength))
    return result


def extract_chunk(
    chunk: Chunk, gateway: LLMGateway, config: PipelineConfig
) -> tuple[list[RawEntity], list[RawRelationship], int]:
    """Extract raw entities/relationships from one chunk; returns (entities, rels, skipped)."""
    request = ChatRequest(
        messages=[
            ("system", EXTRACT_SYSTEM_PROMPT),
            ("user", f"Chunk {chunk.id}:\n{chunk.text}"),
        ],
        temperature=config.temperature_for("extract"),
        max_tokens=config.max_tokens,
    )
    context = InvocationContext(stage="extract", target_refs=[chunk.id])
    response, invocation_id = gateway.complete(request, context)

    parsed = parse_extraction_response(response)
    if parsed.attempts > 0 and not parsed.entities and not parsed.relationships:
        raise ExtractionError(
            f"wholly unparsable extraction response for chunk {chunk.id}", invocation_id
        )

    raw_entities: list[RawEntity] = []
    seen_names: set[str] = set()
    for idx, (name, entity_type, description) in enumerate(parsed.entities):
        raw_entities.append(
            RawEntity(
                id=f"{chunk.id}/e{idx:02d}",
                chunk_id=chunk.id,
                name=name,
                entity_type=entity_type,
                description=description,
                extraction_invocation_id=invocation_id,
            )
        )
        seen_names.add(normalize_name(name))

    raw_relationships: list[RawRelationship] = []
    placeholder_idx = len(parsed.entities)
    for idx, (source, target, description, strength) in enumerate(parsed.relationships):
        raw_relationships.append(
            RawRelationship(
                id=f"{chunk.id}/r{idx:02d}",
                chunk_id=chunk.id,
                source_name=source,
                target_name=target,
                description=description,
                strength=strength,
                extraction_invocation_id=invocation_id,
            )
        )
        # Endpoints the model named but never extracted as entities become
        # placeholder raw entities with empty type and description.
        for endpoint in (source, target):
            key = normalize_name(endpoint)
            if key and key not in seen_names:
                raw_entities.append(
                    RawEntity(
                        id=f"{chunk.id}/e{placeholder_idx:02d}",
                        chunk_id=chunk.id,
                        name=endpoint,
                        entity_type="",
                        description="",
                        extraction_invocation_id=invocation_id,
                    )
                )
                seen_names.add(key)
                placeholder_idx += 1

    return raw_entities, raw_relationships, parsed.skipped
