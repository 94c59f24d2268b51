"""Corpus loading and sliding-window chunking.

Tokens are whitespace-delimited words mapped back to character offsets, so every
chunk is an exact slice of its document and provenance offsets survive rebuilds.
"""

from __future__ import annotations

import json
from pathlib import Path

from .errors import CorpusError, ParameterError
from .models import Chunk, Document
from .textutil import token_spans

# Fields mapped onto Document attributes; everything else (including the
# optional id and published_at) is preserved as opaque metadata.
_MAPPED_RECORD_FIELDS = {"title", "body", "source"}


def load_corpus(path: str | Path, fmt: str = "jsonl") -> list[Document]:
    """Load documents from a JSONL file or a directory of plain-text files.

    Ids are assigned as doc-<index> in load order; load order is record order for
    JSONL and lexicographic file order for directories.
    """
    p = Path(path)
    if not p.exists():
        raise CorpusError(f"corpus path does not exist: {p}")
    if fmt == "jsonl":
        docs = _load_jsonl(p)
    elif fmt == "plain_dir":
        docs = _load_plain_dir(p)
    else:
        raise ParameterError(f"unknown corpus format {fmt!r}")
    return docs


def _load_jsonl(p: Path) -> list[Document]:
    if not p.is_file():
        raise CorpusError(f"not a readable file: {p}")
    docs: list[Document] = []
    index = 0
    for lineno, line in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        if not line.strip():
            continue
        try:
            record = json.loads(line)
        except json.JSONDecodeError as exc:
            raise CorpusError(f"{p}:{lineno}: invalid JSON: {exc.msg}") from exc
        body = record.get("body", "")
        if not isinstance(body, str) or not body.strip():
            raise CorpusError(f"{p}:{lineno}: record is missing a non-empty body")
        metadata = {k: v for k, v in record.items() if k not in _MAPPED_RECORD_FIELDS}
        docs.append(
            Document(
                id=f"doc-{index:04d}",
                title=str(record.get("title", "")),
                text=body,
                source_path=str(record.get("source", p)),
                metadata=metadata,
            )
        )
        index += 1
    return docs


def _load_plain_dir(p: Path) -> list[Document]:
    if not p.is_dir():
        raise CorpusError(f"not a directory: {p}")
    docs: list[Document] = []
    for index, file in enumerate(sorted(p.iterdir(), key=lambda f: f.name)):
        if not file.is_file():
            continue
        try:
            text = file.read_text(encoding="utf-8")
        except OSError as exc:
            raise CorpusError(f"unreadable file: {file}") from exc
        if not text.strip():
            raise CorpusError(f"empty document: {file}")
        docs.append(
            Document(
                id=f"doc-{index:04d}",
                title=file.stem,
                text=text,
                source_path=str(file),
            )
        )
    return docs


def split_document(doc: Document, chunk_size: int, overlap: int) -> list[Chunk]:
    """Sliding window of chunk_size tokens advancing by chunk_size - overlap."""
    if chunk_size <= 0:
        raise ParameterError("chunk_size must be positive")
    if overlap < 0 or overlap >= chunk_size:
        raise ParameterError("overlap must satisfy 0 <= overlap < chunk_size")
    spans = token_spans(doc.text)
    if not spans:
        return []
    advance = chunk_size - overlap
    starts = [0]
    while starts[-1] + chunk_size < len(spans):
        starts.append(starts[-1] + advance)
    chunks: list[Chunk] = []
    for ordinal, tok_start in enumerate(starts):
        window = spans[tok_start : tok_start + chunk_size]
        start_offset = window[0][0]
        end_offset = window[-1][1]
        chunks.append(
            Chunk(
                id=f"{doc.id}#{ordinal:03d}",
                document_id=doc.id,
                ordinal=ordinal,
                text=doc.text[start_offset:end_offset],
                start_offset=start_offset,
                end_offset=end_offset,
            )
        )
    return chunks
