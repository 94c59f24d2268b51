// Model-invocation inspector with three variants: extraction (a fact or raw
// entity leads to the chunk's extraction call), merge (an entity or
// relationship shows its raw inputs and the consolidation call, if any), and
// summary (a topic shows members, prompt, and the generated report). Member
// lists filter live against the current highlight set.

import { api } from "../api";
import { filterTopicMembers, type HighlightSet } from "../highlight";
import type {
  DiagnosisReport,
  Entity,
  HoverRef,
  Invocation,
  Relationship,
  TopicReport,
  TraceNode,
} from "../types";
import type { SelectionStore } from "../state";

export interface InvocationContextData {
  entitiesById: Record<string, Entity>;
  relationshipsById: Record<string, Relationship>;
  topicReports: Record<string, TopicReport>;
}

type Variant =
  | { kind: "summary"; topicId: string }
  | { kind: "merge"; ref: HoverRef }
  | { kind: "extraction"; ref: HoverRef }
  | null;

export class InvocationView {
  private variant: Variant = null;
  private report: DiagnosisReport | null = null;

  constructor(
    private container: HTMLElement,
    private selection: SelectionStore,
    private data: InvocationContextData,
  ) {}

  setReport(report: DiagnosisReport | null): void {
    this.report = report;
  }

  open(ref: HoverRef): void {
    if (ref.kind === "report" || ref.kind === "topic") {
      this.variant = { kind: "summary", topicId: ref.id };
    } else if (ref.kind === "entity" || ref.kind === "relationship") {
      this.variant = { kind: "merge", ref };
    } else if (ref.kind === "fact") {
      this.variant = { kind: "extraction", ref };
    }
    void this.render(null);
  }

  async render(highlights: HighlightSet | null): Promise<void> {
    this.container.innerHTML = "";
    if (!this.variant) {
      this.container.innerHTML =
        '<p class="placeholder">Click a recall, fact, or topic to inspect the model call behind it.</p>';
      return;
    }
    try {
      if (this.variant.kind === "summary") {
        await this.renderSummary(this.variant.topicId, highlights);
      } else if (this.variant.kind === "merge") {
        await this.renderMerge(this.variant.ref, highlights);
      } else {
        await this.renderExtraction(this.variant.ref);
      }
    } catch (error) {
      const p = document.createElement("p");
      p.className = "error";
      p.textContent = (error as Error).message;
      this.container.append(p);
    }
  }

  private async renderSummary(topicId: string, highlights: HighlightSet | null): Promise<void> {
    const topicReport = this.data.topicReports[topicId] ?? (await api.topicReport(topicId));
    const invocation = await api.invocation(topicReport.summarize_invocation_id);
    this.container.append(heading(`Summary stage — ${topicReport.title}`));

    const memberBox = document.createElement("div");
    memberBox.className = "member-list";
    const filtered = highlights
      ? filterTopicMembers(topicReport, highlights)
      : { entities: [], relationships: [] };
    const filtering =
      highlights !== null && filtered.entities.length + filtered.relationships.length > 0;
    memberBox.append(
      subheading(
        filtering
          ? `Members related to the hovered item (${filtered.entities.length + filtered.relationships.length})`
          : `Members used in the summary (${topicReport.referenced_entity_ids.length} entities, ${topicReport.referenced_relationship_ids.length} relationships)`,
      ),
    );
    const entityIds = filtering ? filtered.entities : topicReport.referenced_entity_ids;
    for (const entityId of entityIds) {
      const name = this.data.entitiesById[entityId]?.name ?? entityId;
      memberBox.append(
        memberRow(name, highlights?.entities.has(entityId) ?? false, () =>
          this.selection.setHovered({ kind: "entity", id: entityId }),
          () => this.selection.setHovered(null),
        ),
      );
    }
    const relIds = filtering ? filtered.relationships : topicReport.referenced_relationship_ids;
    for (const relId of relIds) {
      const rel = this.data.relationshipsById[relId];
      const label = rel
        ? `${this.data.entitiesById[rel.source_entity_id]?.name} — ${this.data.entitiesById[rel.target_entity_id]?.name}`
        : relId;
      memberBox.append(
        memberRow(label, highlights?.relationships.has(relId) ?? false, () =>
          this.selection.setHovered({ kind: "relationship", id: relId }),
          () => this.selection.setHovered(null),
        ),
      );
    }
    this.container.append(memberBox);
    this.container.append(promptBlock(invocation));
    this.container.append(subheading("Generated report"));
    this.container.append(pre(topicReport.summary_text));
  }

  private async renderMerge(ref: HoverRef, highlights: HighlightSet | null): Promise<void> {
    const object =
      ref.kind === "entity"
        ? this.data.entitiesById[ref.id]
        : this.data.relationshipsById[ref.id];
    if (!object) throw new Error(`unknown ${ref.kind} ${ref.id}`);
    const title =
      ref.kind === "entity"
        ? (object as Entity).name
        : `${this.data.entitiesById[(object as Relationship).source_entity_id]?.name} — ${this.data.entitiesById[(object as Relationship).target_entity_id]?.name}`;
    this.container.append(heading(`Merge stage — ${title}`));

    const trace = await api.trace(ref.kind, ref.id, 2);
    const rawBox = document.createElement("div");
    rawBox.className = "member-list";
    rawBox.append(subheading(`Raw inputs (${trace.children.length})`));
    for (const rawNode of trace.children) {
      const chunkIds = rawNode.children.map((c) => c.ref.id).join(", ");
      const row = document.createElement("div");
      row.className = "member-row raw-row";
      row.dataset.rawId = rawNode.ref.id;
      if (highlights?.rawEntities.has(rawNode.ref.id)) row.classList.add("hl");
      row.textContent = `${rawNode.ref.id}  ←  ${chunkIds}`;
      row.onclick = () => void this.renderExtractionForChunks(rawNode);
      rawBox.append(row);
    }
    this.container.append(rawBox);

    const mergeInvocationId = object.merge_invocation_id;
    if (mergeInvocationId) {
      const invocation = await api.invocation(mergeInvocationId);
      this.container.append(promptBlock(invocation));
      this.container.append(subheading("Merged result"));
      this.container.append(pre(object.description));
    } else {
      const note = document.createElement("p");
      note.className = "muted";
      const source = trace.children[0]?.ref.id ?? "its single raw input";
      note.textContent = `No model call; the description was taken verbatim from ${source}.`;
      this.container.append(note);
    }
  }

  private async renderExtractionForChunks(rawNode: TraceNode): Promise<void> {
    const chunkNode = rawNode.children.find((c) => c.ref.kind === "chunk");
    if (!chunkNode?.via_invocation_id) return;
    const invocation = await api.invocation(chunkNode.via_invocation_id);
    this.container.innerHTML = "";
    this.container.append(heading(`Extraction stage — ${chunkNode.ref.id}`));
    this.container.append(promptBlock(invocation));
    this.container.append(subheading("Extraction records"));
    this.container.append(pre(invocation.response_text || "(no records emitted)"));
  }

  private async renderExtraction(ref: HoverRef): Promise<void> {
    const fact = this.report?.facts.find((f) => f.id === ref.id);
    if (!fact) throw new Error(`unknown fact ${ref.id}`);
    const ordinal = (this.report?.facts.findIndex((f) => f.id === ref.id) ?? 0) + 1;
    this.container.append(heading(`Extraction stage — Fact ${ordinal}`));
    if (!fact.matched_chunk_ids.length) {
      const p = document.createElement("p");
      p.className = "muted";
      p.textContent = "This fact matched no chunk; nothing was extracted for it.";
      this.container.append(p);
      return;
    }
    for (const chunkId of fact.matched_chunk_ids) {
      const { invocations } = await api.invocationsFor("chunk", chunkId);
      const extraction = invocations.find((inv) => inv.stage === "extract");
      if (!extraction) continue;
      this.container.append(subheading(`Chunk ${chunkId}`));
      this.container.append(promptBlock(extraction));
      this.container.append(subheading("Extraction records"));
      this.container.append(
        pre(extraction.response_text || "(no records emitted — nothing was extracted here)"),
      );
    }
  }
}

function heading(text: string): HTMLElement {
  const el = document.createElement("h3");
  el.textContent = text;
  return el;
}

function subheading(text: string): HTMLElement {
  const el = document.createElement("h4");
  el.textContent = text;
  return el;
}

function pre(text: string): HTMLElement {
  const el = document.createElement("pre");
  el.textContent = text;
  return el;
}

function promptBlock(invocation: Invocation): HTMLElement {
  const wrap = document.createElement("div");
  wrap.append(subheading(`Prompt (${invocation.id}, stage ${invocation.stage})`));
  const body = invocation.messages.map(([role, text]) => `[${role}]\n${text}`).join("\n\n");
  wrap.append(pre(body));
  return wrap;
}

function memberRow(
  label: string,
  highlighted: boolean,
  onEnter: () => void,
  onLeave: () => void,
): HTMLElement {
  const row = document.createElement("div");
  row.className = "member-row";
  if (highlighted) row.classList.add("hl");
  row.textContent = label;
  row.onmouseenter = onEnter;
  row.onmouseleave = onLeave;
  return row;
}
