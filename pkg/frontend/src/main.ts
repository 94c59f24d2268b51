// App wiring: load the index context, run or fetch a diagnosis, and keep the
// five views in sync through the selection store and the pure highlight set.

import "./style.css";
import { api } from "./api";
import { computeHighlights, emptyHighlights, type HighlightContext, type HighlightSet } from "./highlight";
import { flattenTopics } from "./packing";
import { SelectionStore } from "./state";
import type { DiagnosisReport, Entity, HoverRef, Relationship, TopicReport, TraceNode } from "./types";
import { EntitiesView } from "./views/entities";
import { InvocationView } from "./views/invocation";
import { QaView } from "./views/qa";
import { TopicsView } from "./views/topics";
import { TraceView } from "./views/trace";

const $ = (id: string) => document.getElementById(id)!;

const selection = new SelectionStore();

const entitiesById: Record<string, Entity> = {};
const relationshipsById: Record<string, Relationship> = {};
const topicReports: Record<string, TopicReport> = {};
const entityTraces: Record<string, TraceNode> = {};
let report: DiagnosisReport | null = null;
let queriedEntities: Entity[] = [];
let highlightContext: HighlightContext | null = null;

function toast(message: string): void {
  const el = $("toast");
  el.textContent = message;
  el.classList.add("show");
  setTimeout(() => el.classList.remove("show"), 4000);
}

const invocationView = new InvocationView($("invocation-view"), selection, {
  entitiesById,
  relationshipsById,
  topicReports,
});
const openInvocation = (ref: HoverRef) => invocationView.open(ref);

const qaView = new QaView($("qa-view"), selection);
const traceView = new TraceView($("trace-view"), selection, {
  entitiesById,
  relationshipsById,
  reportTitles: {},
  onOpenInvocation: openInvocation,
});
const topicsView = new TopicsView($("topics-view"), selection, (topicId) =>
  invocationView.open({ kind: "topic", id: topicId }),
);
const entitiesView = new EntitiesView($("entities-view"), selection, openInvocation, toast);

let lastHighlights: HighlightSet = emptyHighlights();

function rerender(): void {
  const hovered = selection.current.hoveredRef;
  lastHighlights = highlightContext
    ? computeHighlights(hovered, highlightContext)
    : emptyHighlights();
  traceView.render(lastHighlights);
  topicsView.render(lastHighlights);
  entitiesView.render(lastHighlights);
  void invocationView.render(hovered ? lastHighlights : null);
}

selection.subscribe(() => {
  rerender();
  void syncPins();
});

const pinned = new Set<string>();
async function syncPins(): Promise<void> {
  for (const ref of selection.current.pinnedRefs) {
    if (ref.kind === "entity" && !pinned.has(ref.id)) {
      pinned.add(ref.id);
      await entitiesView.addEntity(ref.id);
      rerender();
    }
  }
}

async function loadIndexContext(): Promise<void> {
  const tree = await api.topicsTree();
  const topics = flattenTopics(tree.roots);
  topicsView.setTree(tree.roots);
  for (const topic of topics) {
    try {
      const topicReport = await api.topicReport(topic.id);
      topicReports[topic.id] = topicReport;
    } catch {
      // topics without reports are legal (partial index)
    }
  }
  highlightContext = {
    report: report ?? emptyReport(),
    topics,
    topicReports,
    entityTraces,
  };
}

function emptyReport(): DiagnosisReport {
  return {
    test_pair_id: "",
    evaluation: null,
    actual_trace: null,
    gt_trace: null,
    suspicious: null,
    recalls: [],
    facts: [],
    fact_subgraphs: [],
    inference_subgraphs: [],
    timings: {},
    error: null,
  };
}

async function hydrateReport(newReport: DiagnosisReport): Promise<void> {
  report = newReport;
  selection.setActivePair(newReport.test_pair_id);

  const ids = new Set<string>();
  for (const recall of newReport.recalls) {
    if (recall.kind === "entity") ids.add(recall.ref_id);
    if (recall.kind === "relationship") ids.add(recall.ref_id);
  }
  for (const sg of [...newReport.fact_subgraphs, ...newReport.inference_subgraphs]) {
    sg.entity_ids.forEach((id) => ids.add(id));
    sg.relationship_ids.forEach((id) => ids.add(id));
  }
  for (const id of ids) {
    if (id.startsWith("rel-")) {
      if (!relationshipsById[id]) {
        // relationships arrive via neighborhoods; fall back to a light label
        continue;
      }
    } else if (!entitiesById[id]) {
      try {
        entitiesById[id] = await api.entity(id);
      } catch {
        continue;
      }
    }
  }
  // upstream traces for the fact-subgraph entities power the merge view and
  // the raw-entity highlight probes
  for (const sg of newReport.fact_subgraphs) {
    for (const entityId of sg.entity_ids) {
      if (!entityTraces[entityId]) {
        try {
          entityTraces[entityId] = await api.trace("entity", entityId, 2);
        } catch {
          continue;
        }
      }
    }
  }
  // relationship payloads for cited/suspicious edges via their endpoints
  for (const entityId of Object.keys(entitiesById)) {
    try {
      const hood = await api.neighborhood(entityId, 1);
      for (const rel of hood.relationships) relationshipsById[rel.id] = rel;
      for (const node of hood.entities) {
        if (!entitiesById[node.id]) entitiesById[node.id] = await api.entity(node.id);
      }
    } catch {
      continue;
    }
  }

  queriedEntities = [];
  const questionTokens = tokenize(($("question") as HTMLTextAreaElement).value);
  for (const entity of Object.values(entitiesById)) {
    const nameTokens = tokenize(entity.name);
    if (nameTokens.length && containsRun(questionTokens, nameTokens)) {
      queriedEntities.push(entity);
    }
  }

  if (highlightContext) highlightContext.report = newReport;
  traceView.setReport(newReport);
  invocationView.setReport(newReport);
  qaView.render(newReport, queriedEntities);
  rerender();
}

function tokenize(text: string): string[] {
  return text.toLowerCase().split(/[^0-9a-z]+/).filter(Boolean);
}

function containsRun(haystack: string[], needle: string[]): boolean {
  outer: for (let i = 0; i + needle.length <= haystack.length; i++) {
    for (let j = 0; j < needle.length; j++) {
      if (haystack[i + j] !== needle[j]) continue outer;
    }
    return true;
  }
  return false;
}

async function runDiagnosis(): Promise<void> {
  const question = ($("question") as HTMLTextAreaElement).value.trim();
  const groundTruth = ($("ground-truth") as HTMLInputElement).value.trim();
  const factsRaw = ($("facts") as HTMLTextAreaElement).value;
  const pairId = ($("pair-id") as HTMLInputElement).value.trim() || "pair-ui";
  if (!question || !groundTruth) {
    toast("question and ground truth are required");
    return;
  }
  const facts = factsRaw
    .split("\n")
    .map((line) => line.trim())
    .filter(Boolean)
    .map((text) => ({ text }));
  $("run").setAttribute("disabled", "true");
  try {
    const result = await api.diagnose({
      id: pairId,
      question,
      ground_truth: groundTruth,
      facts,
    });
    await hydrateReport(result);
  } catch (error) {
    toast((error as Error).message);
  } finally {
    $("run").removeAttribute("disabled");
  }
}

async function loadExisting(): Promise<void> {
  const pairId = ($("pair-id") as HTMLInputElement).value.trim();
  if (!pairId) {
    toast("enter a pair id to load its report");
    return;
  }
  try {
    await hydrateReport(await api.report(pairId));
  } catch (error) {
    toast((error as Error).message);
  }
}

async function boot(): Promise<void> {
  try {
    const health = await api.health();
    const counts = (health.manifest as { counts?: Record<string, number> }).counts ?? {};
    $("status").textContent = `index: ${counts.entities ?? "?"} entities, ${counts.topics ?? "?"} topics`;
    await loadIndexContext();
    qaView.render(null, []);
    rerender();
  } catch (error) {
    $("status").textContent = `API unreachable: ${(error as Error).message}`;
  }
  $("run").addEventListener("click", () => void runDiagnosis());
  $("load").addEventListener("click", () => void loadExisting());
}

void boot();
