// Shared loading of the captured API payloads.

import { readFileSync } from "node:fs";
import { dirname, join } from "node:path";
import { fileURLToPath } from "node:url";

import type { HighlightContext } from "../src/highlight";
import { flattenTopics } from "../src/packing";
import type {
  DiagnosisReport,
  Entity,
  Neighborhood,
  TopicReport,
  TopicTreeNode,
  TraceNode,
} from "../src/types";

const here = dirname(fileURLToPath(import.meta.url));

function load<T>(name: string): T {
  return JSON.parse(readFileSync(join(here, "fixtures", name), "utf-8")) as T;
}

export const topicsTree = load<{ roots: TopicTreeNode[] }>("topics_tree.json");
export const topicReports = load<Record<string, TopicReport>>("topic_reports.json");
export const entities = load<Record<string, Entity>>("entities.json");
export const report = load<DiagnosisReport>("report.json");
export const neighborhoodEc = load<Neighborhood>("neighborhood_ec.json");
export const entityTraces = load<Record<string, TraceNode>>("entity_traces.json");
export const distances = load<[string, string, number][]>("distances.json");
export const manifest = load<{
  entity_ids: Record<string, string>;
  relationship_ids: Record<string, string>;
  meta_topic_members: string[];
  diagnosis: {
    gt_used: Record<string, number[]>;
    missing: string[];
    unexpected: string[];
  };
  fact_chunks: Record<string, string>;
  query: { act_used: Record<string, number[]> };
}>("manifest_excerpt.json");

export const flatTopics = flattenTopics(topicsTree.roots);

export function highlightContext(): HighlightContext {
  return {
    report,
    topics: flatTopics,
    topicReports,
    entityTraces,
  };
}

export function entityId(name: string): string {
  return manifest.entity_ids[name];
}

export function relationshipId(pair: string): string {
  return manifest.relationship_ids[pair];
}

/** The topic whose entity members are exactly the given normalized names. */
export function topicByMembers(names: string[]): TopicTreeNode {
  const wanted = [...names].sort().join("|");
  const inverse = new Map(Object.entries(manifest.entity_ids).map(([n, id]) => [id, n]));
  const found = flatTopics.find(
    (t) =>
      t.entity_ids
        .map((id) => inverse.get(id) ?? id)
        .sort()
        .join("|") === wanted,
  );
  if (!found) throw new Error(`no topic with members ${wanted}`);
  return found;
}
