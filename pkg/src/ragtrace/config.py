"""Pipeline configuration: one hashable config object, YAML file + env + flag overrides."""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from .errors import ConfigurationError, ParameterError
from .models import STAGES

ENV_ENDPOINT_URL = "RAGTRACE_LLM_URL"
ENV_API_KEY = "RAGTRACE_LLM_API_KEY"
ENV_MODEL = "RAGTRACE_LLM_MODEL"
ENV_EMBED_MODEL = "RAGTRACE_EMBED_MODEL"


@dataclass
class PipelineConfig:
    """Everything a build or diagnosis run depends on; hashed into the index manifest."""

    chunk_size: int = 300
    overlap: int = 50
    k_entities: int = 10
    k_relationships: int = 10
    k_reports: int = 3
    max_levels: int = 2
    min_split_size: int = 5
    fact_similarity_threshold: float = 0.55
    fact_fallback_top: int = 2
    embed_dim: int = 256
    llm_titles: bool = False
    model_name: str = "mock-chat"
    embed_model_name: str = "mock-embed"
    endpoint_url: str = ""
    api_key: str = ""
    mock_script: str = ""
    temperatures: dict[str, float] = field(default_factory=dict)
    max_tokens: int = 2048
    retry_attempts: int = 3
    retry_base_seconds: float = 0.5

    def __post_init__(self) -> None:
        for stage in STAGES:
            self.temperatures.setdefault(stage, 0.0)

    def validate(self) -> None:
        if self.chunk_size <= 0:
            raise ParameterError("chunk_size must be positive")
        if not 0 <= self.overlap < self.chunk_size:
            raise ParameterError("overlap must satisfy 0 <= overlap < chunk_size")
        if self.embed_dim <= 0:
            raise ParameterError("embed_dim must be positive")
        if self.max_levels < 1:
            raise ParameterError("max_levels must be >= 1")
        if self.min_split_size < 2:
            raise ParameterError("min_split_size must be >= 2")
        unknown = set(self.temperatures) - set(STAGES)
        if unknown:
            raise ParameterError(f"temperatures for unknown stages: {sorted(unknown)}")

    @property
    def mock_mode(self) -> bool:
        return bool(self.mock_script) or not self.endpoint_url

    def temperature_for(self, stage: str) -> float:
        return self.temperatures.get(stage, 0.0)

    def to_dict(self) -> dict[str, Any]:
        d = {f.name: getattr(self, f.name) for f in fields(self)}
        d["temperatures"] = dict(sorted(self.temperatures.items()))
        # Secrets never enter the hashed/persisted form.
        d.pop("api_key")
        return d

    def config_hash(self) -> str:
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]

    @classmethod
    def from_dict(cls, d: dict[str, Any]) -> "PipelineConfig":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ConfigurationError(f"unknown config keys: {sorted(unknown)}")
        cfg = cls(**d)
        cfg.validate()
        return cfg


def load_config(
    path: str | Path | None = None, overrides: dict[str, Any] | None = None
) -> PipelineConfig:
    """Build a config from (lowest to highest precedence) defaults, file, env, overrides."""
    data: dict[str, Any] = {}
    if path is not None:
        p = Path(path)
        if not p.exists():
            raise ConfigurationError(f"config file not found: {p}")
        loaded = yaml.safe_load(p.read_text(encoding="utf-8")) or {}
        if not isinstance(loaded, dict):
            raise ConfigurationError(f"config file must hold a mapping: {p}")
        data.update(loaded)

    env_map = {
        "endpoint_url": os.environ.get(ENV_ENDPOINT_URL),
        "api_key": os.environ.get(ENV_API_KEY),
        "model_name": os.environ.get(ENV_MODEL),
        "embed_model_name": os.environ.get(ENV_EMBED_MODEL),
    }
    data.update({k: v for k, v in env_map.items() if v})

    if overrides:
        data.update({k: v for k, v in overrides.items() if v is not None})

    return PipelineConfig.from_dict(data)
