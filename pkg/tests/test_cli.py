from __future__ import annotations

import json

import pytest

from ragtrace.cli import main

from conftest import CORPUS, PAIRS, SCRIPT


@pytest.fixture()
def index_dir(built_index_dir, tmp_path):
    import shutil

    copy = tmp_path / "idx"
    shutil.copytree(built_index_dir, copy)
    return copy


def test_build_writes_index_with_manifest_counts(tmp_path, capsys, manifest):
    out = tmp_path / "idx"
    code = main(
        [
            "build",
            "--corpus",
            str(CORPUS),
            "--mock",
            str(SCRIPT),
            "--out",
            str(out),
            "--chunk-size",
            str(manifest["config"]["chunk_size"]),
            "--overlap",
            str(manifest["config"]["overlap"]),
            "--config",
            str(_config_file(tmp_path, manifest)),
        ]
    )
    assert code == 0
    printed = json.loads(capsys.readouterr().out)
    assert printed["counts"]["entities"] == manifest["counts"]["entities"]
    assert printed["counts"]["chunks"] == manifest["counts"]["chunks"]
    persisted = json.loads((out / "manifest.json").read_text())
    assert persisted["counts"]["raw_entities"] == manifest["counts"]["raw_entities"]


def _config_file(tmp_path, manifest) -> str:
    import yaml

    path = tmp_path / "config.yaml"
    path.write_text(yaml.safe_dump(manifest["config"]))
    return str(path)


def test_diagnose_prints_summary_line(index_dir, capsys, manifest):
    code = main(
        [
            "diagnose",
            "--index",
            str(index_dir),
            "--pairs",
            str(PAIRS),
            "--mock",
            str(SCRIPT),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out == [manifest["diagnosis"]["cli_line"]]
    report_path = index_dir / "reports" / f"{manifest['diagnosis']['pair_id']}.json"
    assert report_path.exists()


def test_query_emits_answer_and_trace_json(index_dir, capsys, manifest):
    code = main(
        [
            "query",
            "--index",
            str(index_dir),
            "--question",
            manifest["query"]["question"],
            "--mock",
            str(SCRIPT),
        ]
    )
    assert code == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["answer_text"] == manifest["query"]["answer"]
    assert len(payload["trace"]["steps"]) == manifest["query"]["steps"]


def test_query_without_index_is_usage_error(capsys):
    code = main(["query", "--question", "anything"])
    assert code == 1
    err = capsys.readouterr().err
    assert "usage" in err.lower()


def test_unknown_subcommand_is_usage_error(capsys):
    assert main(["frobnicate"]) == 1


def test_missing_pairs_file_is_data_error(index_dir, capsys):
    code = main(
        ["diagnose", "--index", str(index_dir), "--pairs", "/nonexistent.jsonl", "--mock", str(SCRIPT)]
    )
    assert code == 2


def test_unscripted_call_maps_to_llm_exit_code(index_dir, tmp_path, capsys):
    empty_script = tmp_path / "empty.jsonl"
    empty_script.write_text("")
    code = main(
        [
            "query",
            "--index",
            str(index_dir),
            "--question",
            "anything at all",
            "--mock",
            str(empty_script),
        ]
    )
    assert code == 3


def test_inspect_prints_upstream_tree(index_dir, capsys, manifest):
    ec_id = manifest["entity_ids"]["EUROPEAN COMMISSION"]
    code = main(
        ["inspect", "--index", str(index_dir), "--ref", f"entity:{ec_id}", "--depth", "4"]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert f"entity:{ec_id}" in out
    assert "raw_entity:" in out
    assert "chunk:" in out
    assert "document:" in out


def test_cli_and_api_diagnose_reports_are_field_identical(
    index_dir, built_index_dir, tmp_path, capsys, manifest
):
    import shutil

    from fastapi.testclient import TestClient

    from ragtrace.api.app import create_app
    from ragtrace.cli import pair_from_record
    from ragtrace.gateway import LLMGateway
    from ragtrace.store import GraphStore

    # CLI path
    assert main(["diagnose", "--index", str(index_dir), "--pairs", str(PAIRS), "--mock", str(SCRIPT)]) == 0
    capsys.readouterr()
    cli_report = json.loads(
        (index_dir / "reports" / f"{manifest['diagnosis']['pair_id']}.json").read_text()
    )

    # API path on a pristine copy
    api_dir = tmp_path / "api-idx"
    shutil.copytree(built_index_dir, api_dir)
    store = GraphStore.load(api_dir)
    store.config.mock_script = str(SCRIPT)
    gateway = LLMGateway(store.config)
    gateway.resume_sequence(store.invocations)
    app = create_app(store, gateway, store.config)
    record = json.loads(PAIRS.read_text().splitlines()[0])
    pair = pair_from_record(record)
    with TestClient(app) as client:
        api_report = client.post(
            "/api/diagnose",
            json={
                "id": pair.id,
                "question": pair.question,
                "ground_truth": pair.ground_truth,
                "facts": [{"id": f.id, "text": f.text} for f in pair.facts],
            },
        ).json()

    cli_report.pop("timings")
    api_report.pop("timings")
    assert cli_report == api_report
