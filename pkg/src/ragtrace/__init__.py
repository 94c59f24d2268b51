"""Provenance-first GraphRAG engine with two-stage retrieval diagnosis.

Builds a fully traceable graph index from a text corpus (split, extract, merge,
partition, summarize), answers queries with per-step recall citations, and
diagnoses wrong answers by comparing the actual inference trace against a
reconstructed ground-truth trace to flag missing and unexpected recalls.
"""

from .builder import build_index
from .config import PipelineConfig, load_config
from .diagnosis import DiagnosisEngine
from .gateway import LLMGateway
from .models import Fact, Ref, TestPair
from .retrieval import Retriever
from .store import GraphStore

__version__ = "0.1.0"

__all__ = [
    "build_index",
    "PipelineConfig",
    "load_config",
    "DiagnosisEngine",
    "LLMGateway",
    "Fact",
    "Ref",
    "TestPair",
    "Retriever",
    "GraphStore",
    "__version__",
]
