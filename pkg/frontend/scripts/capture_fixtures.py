#!/usr/bin/env python3
"""Capture API payloads for the web client's headless tests.

Builds the bundled fixture index, serves it through the HTTP facade in-process,
and records the endpoint responses the layout/highlight tests consume. The web
tests therefore exercise exactly what the API emits, never internal state.
"""

from __future__ import annotations

import json
import sys
import tempfile
from pathlib import Path

from fastapi.testclient import TestClient

REPO = Path(__file__).resolve().parents[2]
sys.path.insert(0, str(REPO / "tests"))

from ragtrace.api.app import create_app  # noqa: E402
from ragtrace.builder import build_index  # noqa: E402
from ragtrace.config import PipelineConfig  # noqa: E402
from ragtrace.gateway import LLMGateway  # noqa: E402

FIXTURES = REPO / "tests" / "fixtures"
OUT = Path(__file__).resolve().parents[1] / "tests" / "fixtures"


def main() -> None:
    manifest = json.loads((FIXTURES / "manifest.json").read_text())
    config = PipelineConfig.from_dict(
        {**manifest["config"], "mock_script": str(FIXTURES / "script.jsonl")}
    )
    with tempfile.TemporaryDirectory() as tmp:
        store = build_index(FIXTURES / "docs.jsonl", config, out_dir=Path(tmp) / "idx")
        gateway = LLMGateway(config)
        gateway.resume_sequence(store.invocations)
        app = create_app(store, gateway, config)
        client = TestClient(app)

        OUT.mkdir(parents=True, exist_ok=True)

        def save(name: str, payload) -> None:
            (OUT / name).write_text(json.dumps(payload, indent=1, sort_keys=True) + "\n")

        tree = client.get("/api/topics/tree").json()
        save("topics_tree.json", tree)

        topic_ids = []

        def walk(node):
            topic_ids.append(node["id"])
            for child in node["children"]:
                walk(child)

        for root in tree["roots"]:
            walk(root)
        save(
            "topic_reports.json",
            {tid: client.get(f"/api/topics/{tid}/report").json() for tid in topic_ids},
        )

        entity_ids = sorted(e.id for e in store.entities)
        save(
            "entities.json",
            {eid: client.get(f"/api/entities/{eid}").json() for eid in entity_ids},
        )

        pair_record = json.loads((FIXTURES / "pairs.jsonl").read_text().splitlines()[0])
        report = client.post(
            "/api/diagnose",
            json={
                "id": pair_record["id"],
                "question": pair_record["question"],
                "ground_truth": pair_record["answer"],
                "facts": [{"text": e["fact"]} for e in pair_record["evidence"]],
            },
        ).json()
        save("report.json", report)

        ec_id = manifest["entity_ids"]["EUROPEAN COMMISSION"]
        save("neighborhood_ec.json", client.get(f"/api/entities/{ec_id}/neighborhood?hops=1").json())

        traces = {}
        for sg in report["fact_subgraphs"]:
            for eid in sg["entity_ids"]:
                if eid not in traces:
                    traces[eid] = client.get(f"/api/trace/entity/{eid}?depth=2").json()
        save("entity_traces.json", traces)

        names = manifest["entity_ids"]
        distances = []
        for a_name, b_name, _ in manifest["topic_distances"]:
            a, b = names[a_name], names[b_name]
            d = client.get(f"/api/entities/{a}/topic-distance/{b}").json()["distance"]
            distances.append([a, b, d])
        save("distances.json", distances)

        save(
            "manifest_excerpt.json",
            {
                "entity_ids": manifest["entity_ids"],
                "relationship_ids": manifest["relationship_ids"],
                "meta_topic_members": manifest["meta_topic_members"],
                "diagnosis": manifest["diagnosis"],
                "fact_chunks": manifest["fact_chunks"],
                "query": manifest["query"],
            },
        )
    print(f"captured web fixtures into {OUT}")


if __name__ == "__main__":
    main()
