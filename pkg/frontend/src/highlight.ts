// Linked-highlight closure: for any hovered ref, the set of elements to light
// up across every view is a pure function of (hovered ref, diagnosis report,
// index data). Views render from the returned set; nothing here touches the DOM.

import type {
  DiagnosisReport,
  FactSubgraph,
  HoverRef,
  TopicReport,
  TopicTreeNode,
  TraceNode,
} from "./types";

export interface HighlightSet {
  recallRefs: Set<string>; // recall chips on both trace columns, by ref id
  entities: Set<string>;
  relationships: Set<string>;
  topics: Set<string>;
  reports: Set<string>; // report recalls, by topic id
  actualSteps: Set<number>;
  gtSteps: Set<number>;
  facts: Set<string>;
  rawEntities: Set<string>; // merge/extraction view rows
}

export interface HighlightContext {
  report: DiagnosisReport;
  topics: TopicTreeNode[]; // flattened tree
  topicReports: Record<string, TopicReport>;
  // upstream traces for entities (depth 2: raws with their chunks), keyed by entity id
  entityTraces?: Record<string, TraceNode>;
}

export function emptyHighlights(): HighlightSet {
  return {
    recallRefs: new Set(),
    entities: new Set(),
    relationships: new Set(),
    topics: new Set(),
    reports: new Set(),
    actualSteps: new Set(),
    gtSteps: new Set(),
    facts: new Set(),
    rawEntities: new Set(),
  };
}

function recallKind(ctx: HighlightContext, refId: string): "entity" | "relationship" | "report" | null {
  const recall = ctx.report.recalls.find((r) => r.ref_id === refId);
  if (recall) return recall.kind;
  if (ctx.topicReports[refId]) return "report";
  return refId.startsWith("rel-") ? "relationship" : "entity";
}

function topicsContaining(ctx: HighlightContext, objectId: string): string[] {
  return ctx.topics
    .filter((t) => t.entity_ids.includes(objectId) || t.relationship_ids.includes(objectId))
    .map((t) => t.id);
}

function subgraphFor(ctx: HighlightContext, ordinal: number) {
  return ctx.report.inference_subgraphs.find((sg) => sg.step_ordinal === ordinal) ?? null;
}

function factSubgraph(ctx: HighlightContext, factId: string): FactSubgraph | null {
  return ctx.report.fact_subgraphs.find((sg) => sg.fact_id === factId) ?? null;
}

/** Raw entities of `entityId` extracted from any of the given chunks. */
function rawsFromChunks(ctx: HighlightContext, entityId: string, chunkIds: string[]): string[] {
  const trace = ctx.entityTraces?.[entityId];
  if (!trace) return [];
  const out: string[] = [];
  for (const rawNode of trace.children) {
    if (rawNode.ref.kind !== "raw_entity") continue;
    const hitsChunk = rawNode.children.some(
      (c) => c.ref.kind === "chunk" && chunkIds.includes(c.ref.id),
    );
    if (hitsChunk) out.push(rawNode.ref.id);
  }
  return out;
}

function addObject(h: HighlightSet, ctx: HighlightContext, objectId: string): void {
  const kind = recallKind(ctx, objectId);
  if (kind === "relationship") h.relationships.add(objectId);
  else if (kind === "report") {
    h.reports.add(objectId);
    h.topics.add(objectId);
  } else h.entities.add(objectId);
  for (const topicId of topicsContaining(ctx, objectId)) h.topics.add(topicId);
}

export function computeHighlights(hovered: HoverRef | null, ctx: HighlightContext): HighlightSet {
  const h = emptyHighlights();
  if (!hovered) return h;
  const { report } = ctx;

  switch (hovered.kind) {
    case "actual_step": {
      const ordinal = Number(hovered.id);
      h.actualSteps.add(ordinal);
      const step = report.actual_trace?.steps.find((s) => s.ordinal === ordinal);
      for (const refId of step?.cited_recall_ids ?? []) {
        h.recallRefs.add(refId);
        addObject(h, ctx, refId);
      }
      break;
    }

    case "gt_step": {
      const ordinal = Number(hovered.id);
      h.gtSteps.add(ordinal);
      const step = report.gt_trace?.steps.find((s) => s.ordinal === ordinal);
      for (const factId of step?.cited_fact_ids ?? []) h.facts.add(factId);
      const sg = subgraphFor(ctx, ordinal);
      for (const id of sg?.entity_ids ?? []) {
        h.recallRefs.add(id);
        addObject(h, ctx, id);
      }
      for (const id of sg?.relationship_ids ?? []) {
        h.recallRefs.add(id);
        addObject(h, ctx, id);
      }
      break;
    }

    case "entity":
    case "relationship": {
      const objectId = hovered.id;
      h.recallRefs.add(objectId);
      addObject(h, ctx, objectId);
      // actual steps using it, directly or through a cited report's members
      for (const step of report.actual_trace?.steps ?? []) {
        for (const refId of step.cited_recall_ids) {
          if (refId === objectId) h.actualSteps.add(step.ordinal);
          else if (recallKind(ctx, refId) === "report") {
            const tr = ctx.topicReports[refId];
            if (
              tr &&
              (tr.referenced_entity_ids.includes(objectId) ||
                tr.referenced_relationship_ids.includes(objectId))
            ) {
              h.actualSteps.add(step.ordinal);
              h.reports.add(refId);
            }
          }
        }
      }
      // ground-truth steps whose inference subgraph uses it
      for (const sg of report.inference_subgraphs) {
        if (sg.entity_ids.includes(objectId) || sg.relationship_ids.includes(objectId)) {
          h.gtSteps.add(sg.step_ordinal);
        }
      }
      // fact sources: facts whose subgraph contains it
      for (const sg of report.fact_subgraphs) {
        if (sg.entity_ids.includes(objectId) || sg.relationship_ids.includes(objectId)) {
          h.facts.add(sg.fact_id);
        }
      }
      break;
    }

    case "report": {
      const topicId = hovered.id;
      h.recallRefs.add(topicId);
      h.reports.add(topicId);
      h.topics.add(topicId);
      for (const step of report.actual_trace?.steps ?? []) {
        if (step.cited_recall_ids.includes(topicId)) h.actualSteps.add(step.ordinal);
      }
      // entities/relationships encompassed by the topic on the opposite side
      const tr = ctx.topicReports[topicId];
      if (tr) {
        for (const sg of report.inference_subgraphs) {
          const hitEntities = sg.entity_ids.filter((id) => tr.referenced_entity_ids.includes(id));
          const hitRels = sg.relationship_ids.filter((id) =>
            tr.referenced_relationship_ids.includes(id),
          );
          if (hitEntities.length || hitRels.length) h.gtSteps.add(sg.step_ordinal);
          hitEntities.forEach((id) => {
            h.entities.add(id);
            h.recallRefs.add(id);
          });
          hitRels.forEach((id) => {
            h.relationships.add(id);
            h.recallRefs.add(id);
          });
        }
      }
      break;
    }

    case "topic": {
      // hovering a topic circle lights the matching topic-type recall chip
      h.topics.add(hovered.id);
      h.reports.add(hovered.id);
      h.recallRefs.add(hovered.id);
      break;
    }

    case "fact": {
      const factId = hovered.id;
      h.facts.add(factId);
      for (const step of report.gt_trace?.steps ?? []) {
        if (step.cited_fact_ids.includes(factId)) h.gtSteps.add(step.ordinal);
      }
      const sg = factSubgraph(ctx, factId);
      for (const id of sg?.entity_ids ?? []) addObject(h, ctx, id);
      for (const id of sg?.relationship_ids ?? []) addObject(h, ctx, id);
      // raw entities extracted from the fact's matched chunks (merge-view rows)
      const fact = report.facts.find((f) => f.id === factId);
      if (fact && sg) {
        for (const entityId of sg.entity_ids) {
          for (const rawId of rawsFromChunks(ctx, entityId, fact.matched_chunk_ids)) {
            h.rawEntities.add(rawId);
          }
        }
      }
      break;
    }
  }
  return h;
}

/** Intersection of a highlight set with the subgraph a graph view displays. */
export function graphHighlights(
  h: HighlightSet,
  displayedNodes: string[],
  displayedEdges: { id: string; source: string; target: string }[],
): { nodes: Set<string>; edges: Set<string> } {
  const nodes = new Set(displayedNodes.filter((id) => h.entities.has(id)));
  const edges = new Set(
    displayedEdges.filter((e) => h.relationships.has(e.id)).map((e) => e.id),
  );
  return { nodes, edges };
}

/** Member rows of a topic's summarize view, filtered to the highlight set. */
export function filterTopicMembers(
  topicReport: TopicReport,
  h: HighlightSet,
): { entities: string[]; relationships: string[] } {
  return {
    entities: topicReport.referenced_entity_ids.filter((id) => h.entities.has(id)),
    relationships: topicReport.referenced_relationship_ids.filter((id) =>
      h.relationships.has(id),
    ),
  };
}
