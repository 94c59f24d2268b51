// Two-column inference trace comparison: actual steps with their recall chips
// on the left, ground-truth steps with facts and subgraph recalls on the
// right. Suspicious recalls carry missing/unexpected badges; hovering anything
// emits a hover ref, and highlighting comes back through the highlight set.

import type { HighlightSet } from "../highlight";
import type {
  DiagnosisReport,
  Entity,
  HoverRef,
  Relationship,
  SuspiciousRecall,
} from "../types";
import type { SelectionStore } from "../state";

export interface TraceContext {
  entitiesById: Record<string, Entity>;
  relationshipsById: Record<string, Relationship>;
  reportTitles: Record<string, string>;
  onOpenInvocation: (ref: HoverRef) => void;
}

export class TraceView {
  constructor(
    private container: HTMLElement,
    private selection: SelectionStore,
    private ctx: TraceContext,
  ) {}

  private report: DiagnosisReport | null = null;

  setReport(report: DiagnosisReport | null): void {
    this.report = report;
  }

  private suspiciousFor(refId: string): SuspiciousRecall | undefined {
    return this.report?.suspicious?.find((s) => s.ref_id === refId);
  }

  private chipLabel(refId: string): string {
    const entity = this.ctx.entitiesById[refId];
    if (entity) return entity.name;
    const rel = this.ctx.relationshipsById[refId];
    if (rel) {
      const src = this.ctx.entitiesById[rel.source_entity_id]?.name ?? rel.source_entity_id;
      const tgt = this.ctx.entitiesById[rel.target_entity_id]?.name ?? rel.target_entity_id;
      return `${src} — ${tgt}`;
    }
    return this.ctx.reportTitles[refId] ?? refId;
  }

  private chipKind(refId: string): HoverRef["kind"] {
    if (this.ctx.relationshipsById[refId]) return "relationship";
    if (this.ctx.entitiesById[refId]) return "entity";
    return "report";
  }

  private recallChip(refId: string, highlights: HighlightSet): HTMLElement {
    const kind = this.chipKind(refId);
    const chip = document.createElement("span");
    chip.className = `chip recall-chip kind-${kind}`;
    chip.dataset.refId = refId;
    chip.textContent = this.chipLabel(refId);
    if (highlights.recallRefs.has(refId)) chip.classList.add("hl");
    const suspicious = this.suspiciousFor(refId);
    if (suspicious) {
      const badge = document.createElement("sup");
      badge.className = `susp susp-${suspicious.classification}`;
      badge.textContent = suspicious.classification;
      chip.append(badge);
    }
    const ref: HoverRef = { kind, id: refId };
    chip.onmouseenter = () => this.selection.setHovered(ref);
    chip.onmouseleave = () => this.selection.setHovered(null);
    chip.onclick = () => this.ctx.onOpenInvocation(ref);
    if (kind === "entity") {
      chip.oncontextmenu = (event) => {
        event.preventDefault();
        this.selection.pin(ref);
      };
      chip.title = "right-click to pin into the entity graph";
    }
    return chip;
  }

  render(highlights: HighlightSet): void {
    this.container.innerHTML = "";
    const report = this.report;
    if (!report) {
      this.container.innerHTML = '<p class="placeholder">No trace yet.</p>';
      return;
    }
    const columns = document.createElement("div");
    columns.className = "trace-columns";
    columns.append(
      this.actualColumn(highlights),
      this.groundTruthColumn(highlights),
    );
    this.container.append(columns);
  }

  private actualColumn(highlights: HighlightSet): HTMLElement {
    const column = document.createElement("div");
    column.className = "trace-column";
    column.append(heading("Actual answer inference"));
    const report = this.report!;
    for (const step of report.actual_trace?.steps ?? []) {
      const row = document.createElement("div");
      row.className = "step";
      if (highlights.actualSteps.has(step.ordinal)) row.classList.add("hl");
      const ref: HoverRef = { kind: "actual_step", id: String(step.ordinal) };
      row.onmouseenter = () => this.selection.setHovered(ref);
      row.onmouseleave = () => this.selection.setHovered(null);
      row.append(stepText(step.ordinal, step.text));
      const chips = document.createElement("div");
      chips.className = "chips";
      for (const refId of step.cited_recall_ids) {
        chips.append(this.recallChip(refId, highlights));
      }
      row.append(chips);
      column.append(row);
    }
    return column;
  }

  private groundTruthColumn(highlights: HighlightSet): HTMLElement {
    const column = document.createElement("div");
    column.className = "trace-column";
    column.append(heading("Ground truth inference"));
    const report = this.report!;
    if (!report.gt_trace) {
      column.append(factsOnly(report, this.selection, highlights));
      return column;
    }
    for (const step of report.gt_trace.steps) {
      const row = document.createElement("div");
      row.className = "step";
      if (highlights.gtSteps.has(step.ordinal)) row.classList.add("hl");
      const ref: HoverRef = { kind: "gt_step", id: String(step.ordinal) };
      row.onmouseenter = () => this.selection.setHovered(ref);
      row.onmouseleave = () => this.selection.setHovered(null);
      row.append(stepText(step.ordinal, step.text));

      const chips = document.createElement("div");
      chips.className = "chips";
      for (const factId of step.cited_fact_ids) {
        chips.append(this.factChip(factId, highlights));
      }
      const subgraph = report.inference_subgraphs.find(
        (sg) => sg.step_ordinal === step.ordinal,
      );
      for (const refId of subgraph?.entity_ids ?? []) {
        chips.append(this.recallChip(refId, highlights));
      }
      for (const refId of subgraph?.relationship_ids ?? []) {
        chips.append(this.recallChip(refId, highlights));
      }
      row.append(chips);
      column.append(row);
    }
    return column;
  }

  private factChip(factId: string, highlights: HighlightSet): HTMLElement {
    const report = this.report!;
    const ordinal = report.facts.findIndex((f) => f.id === factId) + 1;
    const chip = document.createElement("span");
    chip.className = "chip fact-chip";
    chip.dataset.refId = factId;
    chip.textContent = ordinal > 0 ? `Fact ${ordinal}` : factId;
    if (highlights.facts.has(factId)) chip.classList.add("hl");
    const ref: HoverRef = { kind: "fact", id: factId };
    chip.onmouseenter = () => this.selection.setHovered(ref);
    chip.onmouseleave = () => this.selection.setHovered(null);
    chip.onclick = () => this.ctx.onOpenInvocation(ref);
    return chip;
  }
}

function heading(text: string): HTMLElement {
  const el = document.createElement("h3");
  el.textContent = text;
  return el;
}

function stepText(ordinal: number, text: string): HTMLElement {
  const el = document.createElement("p");
  el.className = "step-text";
  el.textContent = `Step ${ordinal}: ${text}`;
  return el;
}

function factsOnly(
  report: DiagnosisReport,
  selection: SelectionStore,
  highlights: HighlightSet,
): HTMLElement {
  const wrap = document.createElement("div");
  wrap.className = "facts-only";
  wrap.append(heading("Facts (reconstruction unavailable)"));
  report.facts.forEach((fact, index) => {
    const row = document.createElement("div");
    row.className = "step";
    if (highlights.facts.has(fact.id)) row.classList.add("hl");
    row.textContent = `Fact ${index + 1}: ${fact.text}`;
    const ref: HoverRef = { kind: "fact", id: fact.id };
    row.onmouseenter = () => selection.setHovered(ref);
    row.onmouseleave = () => selection.setHovered(null);
    wrap.append(row);
  });
  return wrap;
}
