// Question & answer panel: the test pair, verdict, relevance score,
// justification, and the per-fact discrepancy rows.

import type { DiagnosisReport, Entity, HoverRef } from "../types";
import type { SelectionStore } from "../state";

export class QaView {
  constructor(
    private container: HTMLElement,
    private selection: SelectionStore,
  ) {}

  render(report: DiagnosisReport | null, queriedEntities: Entity[]): void {
    this.container.innerHTML = "";
    if (!report) {
      this.container.innerHTML =
        '<p class="placeholder">Run a diagnosis to see the answer comparison.</p>';
      return;
    }
    const evaluation = report.evaluation;
    const facts = report.facts;

    const frag = document.createElement("div");
    frag.className = "qa-body";

    const entityRow = document.createElement("div");
    entityRow.className = "qa-row";
    entityRow.append(label("Queried entities"));
    if (!queriedEntities.length) {
      entityRow.append(textSpan("none detected", "muted"));
    }
    for (const entity of queriedEntities) {
      const chip = document.createElement("button");
      chip.className = "chip entity-chip";
      chip.dataset.refId = entity.id;
      chip.textContent = entity.name;
      chip.title = "click to pin into the entity graph";
      const ref: HoverRef = { kind: "entity", id: entity.id };
      chip.onmouseenter = () => this.selection.setHovered(ref);
      chip.onmouseleave = () => this.selection.setHovered(null);
      chip.onclick = () => this.selection.pin(ref);
      entityRow.append(chip);
    }
    frag.append(entityRow);

    const answers = document.createElement("div");
    answers.className = "qa-answers";
    answers.append(
      answerBox("Actual answer", report.actual_trace?.answer_text ?? "(no trace)"),
      answerBox("Ground truth", report.gt_trace?.answer_text ?? "(not reconstructed)"),
    );
    frag.append(answers);

    if (evaluation) {
      const verdict = document.createElement("div");
      verdict.className = "qa-row";
      const badge = document.createElement("span");
      badge.className = `badge badge-${evaluation.verdict}`;
      badge.textContent = evaluation.verdict;
      verdict.append(label("Verdict"), badge);
      const score = document.createElement("span");
      score.className = "score";
      score.textContent = `relevance ${evaluation.relevance_score.toFixed(2)}`;
      verdict.append(score);
      frag.append(verdict);

      const justification = document.createElement("p");
      justification.className = "justification";
      justification.textContent = evaluation.justification;
      frag.append(justification);

      for (const discrepancy of evaluation.discrepancies) {
        const row = document.createElement("div");
        row.className = "discrepancy";
        const factOrdinal =
          facts.findIndex((f) => f.id === discrepancy.contradicting_fact_id) + 1;
        const tag = document.createElement("span");
        tag.className = "chip fact-chip";
        tag.textContent = factOrdinal > 0 ? `Fact ${factOrdinal}` : "unmatched";
        if (factOrdinal > 0) {
          const ref: HoverRef = { kind: "fact", id: discrepancy.contradicting_fact_id };
          tag.onmouseenter = () => this.selection.setHovered(ref);
          tag.onmouseleave = () => this.selection.setHovered(null);
        }
        row.append(tag, textSpan(discrepancy.claim));
        frag.append(row);
      }
    }
    if (report.error) {
      const error = document.createElement("p");
      error.className = "error";
      error.textContent = `diagnosis error: ${report.error}`;
      frag.append(error);
    }
    this.container.append(frag);
  }
}

function label(text: string): HTMLElement {
  const el = document.createElement("span");
  el.className = "label";
  el.textContent = text;
  return el;
}

function textSpan(text: string, cls = ""): HTMLElement {
  const el = document.createElement("span");
  if (cls) el.className = cls;
  el.textContent = text;
  return el;
}

function answerBox(title: string, text: string): HTMLElement {
  const box = document.createElement("div");
  box.className = "answer-box";
  const heading = document.createElement("div");
  heading.className = "label";
  heading.textContent = title;
  const body = document.createElement("div");
  body.textContent = text;
  box.append(heading, body);
  return box;
}
