// Payload shapes mirroring the API's domain objects, plus UI-side state types.

export interface Entity {
  id: string;
  name: string;
  normalized_name: string;
  entity_type: string;
  description: string;
  raw_entity_ids: string[];
  chunk_refs: string[];
  merge_invocation_id: string | null;
}

export interface Relationship {
  id: string;
  source_entity_id: string;
  target_entity_id: string;
  description: string;
  weight: number;
  raw_relationship_ids: string[];
  chunk_refs: string[];
  merge_invocation_id: string | null;
}

export interface TopicTreeNode {
  id: string;
  level: number;
  parent_id: string | null;
  child_ids: string[];
  entity_ids: string[];
  relationship_ids: string[];
  title: string;
  entity_count: number;
  children: TopicTreeNode[];
}

export interface TopicReport {
  topic_id: string;
  title: string;
  summary_text: string;
  referenced_entity_ids: string[];
  referenced_relationship_ids: string[];
  summarize_invocation_id: string;
}

export interface Recall {
  id: string;
  kind: "entity" | "relationship" | "report";
  ref_id: string;
  score: number;
  rank: number;
}

export interface InferenceStep {
  ordinal: number;
  text: string;
  cited_recall_ids: string[];
  cited_fact_ids: string[];
  inference_subgraph_ref: string | null;
  invocation_id: string;
}

export interface InferenceTrace {
  side: "actual" | "ground_truth";
  query_id: string;
  steps: InferenceStep[];
  answer_text: string;
  warnings: number;
}

export interface Fact {
  id: string;
  text: string;
  matched_chunk_ids: string[];
  expanded_text: string | null;
  expand_invocation_id: string | null;
  unmatchable: boolean;
}

export interface FactSubgraph {
  fact_id: string;
  entity_ids: string[];
  relationship_ids: string[];
}

export interface InferenceSubgraph {
  step_ordinal: number;
  entity_ids: string[];
  relationship_ids: string[];
  filter_invocation_id: string;
  unfiltered: boolean;
  warnings: number;
}

export interface AnswerEvaluation {
  verdict: "correct" | "wrong";
  relevance_score: number;
  justification: string;
  discrepancies: { claim: string; contradicting_fact_id: string }[];
  invocation_id: string;
}

export interface SuspiciousRecall {
  classification: "missing" | "unexpected";
  kind: "entity" | "relationship";
  ref_id: string;
  gt_step_ordinals: number[];
  actual_step_ordinals: number[];
}

export interface DiagnosisReport {
  test_pair_id: string;
  evaluation: AnswerEvaluation | null;
  actual_trace: InferenceTrace | null;
  gt_trace: InferenceTrace | null;
  suspicious: SuspiciousRecall[] | null;
  recalls: Recall[];
  facts: Fact[];
  fact_subgraphs: FactSubgraph[];
  inference_subgraphs: InferenceSubgraph[];
  timings: Record<string, number>;
  error: string | null;
}

export interface TraceNode {
  ref: { kind: string; id: string };
  stage: string | null;
  via_invocation_id: string | null;
  children: TraceNode[];
}

export interface Invocation {
  id: string;
  stage: string;
  target_refs: string[];
  messages: [string, string][];
  response_text: string;
  model_name: string;
  timestamp: string;
  prompt_tokens: number;
  completion_tokens: number;
}

export interface NeighborhoodNode {
  id: string;
  name: string;
  entity_type: string;
  chunk_ref_count: number;
}

export interface Neighborhood {
  center: string;
  hops: number;
  entities: NeighborhoodNode[];
  relationships: Relationship[];
}

// -- UI-side types -----------------------------------------------------------

export type HoverKind =
  | "entity"
  | "relationship"
  | "report"
  | "topic"
  | "fact"
  | "actual_step"
  | "gt_step";

export interface HoverRef {
  kind: HoverKind;
  id: string; // step kinds use the ordinal as a string
}

export interface SelectionState {
  hoveredRef: HoverRef | null;
  pinnedRefs: HoverRef[];
  activePairId: string | null;
  expandedTopicIds: Set<string>;
}
