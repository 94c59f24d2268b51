"""Pydantic request models for the HTTP facade.

Response payloads mirror the domain types' field names exactly, so they are
emitted as plain dicts produced by the domain objects' ``to_dict`` methods.
"""

from __future__ import annotations

from typing import Optional

from pydantic import BaseModel, Field


class QueryRequest(BaseModel):
    question: str


class FactPayload(BaseModel):
    id: Optional[str] = None
    text: str


class DiagnoseRequest(BaseModel):
    id: str
    question: str
    ground_truth: str
    facts: list[FactPayload] = Field(default_factory=list)


class ApiErrorBody(BaseModel):
    code: str
    message: str
    detail_ref: Optional[str] = None
