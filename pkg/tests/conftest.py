from __future__ import annotations

import json
import shutil
from pathlib import Path

import pytest

from ragtrace.builder import build_index
from ragtrace.config import PipelineConfig
from ragtrace.gateway import LLMGateway
from ragtrace.store import GraphStore

FIXTURES = Path(__file__).resolve().parent / "fixtures"
CORPUS = FIXTURES / "docs.jsonl"
SCRIPT = FIXTURES / "script.jsonl"
PAIRS = FIXTURES / "pairs.jsonl"


@pytest.fixture(scope="session")
def manifest() -> dict:
    return json.loads((FIXTURES / "manifest.json").read_text(encoding="utf-8"))


@pytest.fixture(scope="session")
def fixture_config(manifest) -> PipelineConfig:
    return PipelineConfig.from_dict({**manifest["config"], "mock_script": str(SCRIPT)})


@pytest.fixture(scope="session")
def built_index_dir(tmp_path_factory, fixture_config) -> Path:
    """The fixture index, built once per session and loaded fresh per test."""
    out = tmp_path_factory.mktemp("fixture-index") / "idx"
    build_index(CORPUS, fixture_config, out_dir=out)
    return out


@pytest.fixture()
def store(built_index_dir, tmp_path) -> GraphStore:
    # Tests may append invocations or persist traces; give each its own copy
    # so the session-built index stays pristine.
    copy = tmp_path / "idx"
    shutil.copytree(built_index_dir, copy)
    return GraphStore.load(copy)


@pytest.fixture()
def gateway(store) -> LLMGateway:
    config = store.config
    config.mock_script = str(SCRIPT)
    gw = LLMGateway(config)
    gw.resume_sequence(store.invocations)
    return gw


@pytest.fixture()
def test_pair_record() -> dict:
    return json.loads(PAIRS.read_text(encoding="utf-8").splitlines()[0])
