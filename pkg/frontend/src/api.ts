// Thin typed client over the HTTP API. Every datum the UI shows arrives
// through these endpoints; the UI never reads index files.

import type {
  DiagnosisReport,
  Invocation,
  Neighborhood,
  TopicReport,
  TopicTreeNode,
  TraceNode,
  Entity,
} from "./types";

const BASE: string = import.meta.env?.VITE_API_BASE ?? "";

async function getJson<T>(path: string): Promise<T> {
  const response = await fetch(`${BASE}${path}`);
  if (!response.ok) {
    const body = await response.json().catch(() => ({ message: response.statusText }));
    throw new Error(`${body.code ?? response.status}: ${body.message ?? "request failed"}`);
  }
  return response.json() as Promise<T>;
}

export const api = {
  health: () => getJson<{ status: string; manifest: Record<string, unknown> }>("/api/health"),

  topicsTree: () => getJson<{ roots: TopicTreeNode[] }>("/api/topics/tree"),

  topicReport: (topicId: string) => getJson<TopicReport>(`/api/topics/${topicId}/report`),

  entity: (entityId: string) => getJson<Entity>(`/api/entities/${entityId}`),

  neighborhood: (entityId: string, hops = 1) =>
    getJson<Neighborhood>(`/api/entities/${entityId}/neighborhood?hops=${hops}`),

  topicDistance: (a: string, b: string) =>
    getJson<{ distance: number }>(`/api/entities/${a}/topic-distance/${b}`),

  trace: (kind: string, id: string, depth = 2) =>
    getJson<TraceNode>(`/api/trace/${kind}/${id}?depth=${depth}`),

  invocation: (id: string) => getJson<Invocation>(`/api/invocations/${id}`),

  invocationsFor: (kind: string, id: string) =>
    getJson<{ invocations: Invocation[] }>(`/api/invocations?ref=${kind}:${id}`),

  report: (pairId: string) => getJson<DiagnosisReport>(`/api/reports/${pairId}`),

  diagnose: async (pair: {
    id: string;
    question: string;
    ground_truth: string;
    facts: { text: string }[];
  }): Promise<DiagnosisReport> => {
    const response = await fetch(`${BASE}/api/diagnose`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(pair),
    });
    if (!response.ok) {
      const body = await response.json().catch(() => ({}));
      throw new Error(`${body.code ?? response.status}: ${body.message ?? "diagnosis failed"}`);
    }
    return response.json();
  },
};
