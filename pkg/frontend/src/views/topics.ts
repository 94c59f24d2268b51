// Topic explorer: packed circles over the nested topic tree. Click expands a
// topic to show its children; hovering highlights the matching topic-type
// recall, and recalls hovered elsewhere light their topics here.

import * as d3 from "d3";
import { packTopics, type TopicCircle } from "../packing";
import type { HighlightSet } from "../highlight";
import type { HoverRef, TopicTreeNode } from "../types";
import type { SelectionStore } from "../state";

export class TopicsView {
  private svg: d3.Selection<SVGSVGElement, unknown, null, undefined>;
  private width = 520;
  private height = 440;

  constructor(
    private container: HTMLElement,
    private selection: SelectionStore,
    private onOpenTopic: (topicId: string) => void,
  ) {
    this.svg = d3
      .select(container)
      .append("svg")
      .attr("viewBox", `0 0 ${this.width} ${this.height}`)
      .attr("width", "100%");
  }

  private roots: TopicTreeNode[] = [];

  setTree(roots: TopicTreeNode[]): void {
    this.roots = roots;
  }

  /** Children are drawn only for expanded topics. */
  private visibleTree(expanded: Set<string>): TopicTreeNode[] {
    const prune = (node: TopicTreeNode): TopicTreeNode => ({
      ...node,
      children: expanded.has(node.id) ? node.children.map(prune) : [],
    });
    return this.roots.map(prune);
  }

  render(highlights: HighlightSet): void {
    if (!this.roots.length) {
      this.container.querySelector(".placeholder")?.remove();
      const p = document.createElement("p");
      p.className = "placeholder";
      p.textContent = "No topics in the index.";
      this.container.append(p);
      return;
    }
    const expanded = this.selection.current.expandedTopicIds;
    const circles = packTopics(this.visibleTree(expanded), this.width, this.height);

    const nodes = this.svg
      .selectAll<SVGGElement, TopicCircle>("g.topic")
      .data(circles, (d) => d.id);
    nodes.exit().remove();
    const entered = nodes
      .enter()
      .append("g")
      .attr("class", "topic");
    entered.append("circle");
    entered.append("text").attr("class", "topic-label");
    entered.append("text").attr("class", "topic-count");

    const merged = entered.merge(nodes);
    merged.attr("transform", (d) => `translate(${d.cx},${d.cy})`);
    merged
      .select<SVGCircleElement>("circle")
      .attr("r", (d) => d.r)
      // deeper levels draw lighter so nesting reads at a glance
      .attr("fill", (d) => d3.hsl(210, 0.45, Math.min(0.92, 0.55 + 0.15 * (d.level + 1))).formatHsl())
      .attr("stroke", (d) => (highlights.topics.has(d.id) ? "#d9480f" : "#5577aa"))
      .attr("stroke-width", (d) => (highlights.topics.has(d.id) ? 3 : 1))
      .style("cursor", "pointer")
      .on("mouseenter", (_event, d) => {
        const ref: HoverRef = { kind: "topic", id: d.id };
        this.selection.setHovered(ref);
      })
      .on("mouseleave", () => this.selection.setHovered(null))
      .on("click", (event, d) => {
        event.stopPropagation();
        this.selection.toggleTopic(d.id);
      })
      .on("contextmenu", (event, d) => {
        event.preventDefault();
        this.onOpenTopic(d.id);
      });
    merged
      .select<SVGTextElement>("text.topic-label")
      .attr("text-anchor", "middle")
      .attr("dy", (d) => (d.leaf ? "0.1em" : -d.r + 14))
      .style("font-size", (d) => `${Math.max(8, Math.min(13, d.r / 4))}px`)
      .style("pointer-events", "none")
      .text((d) => (d.r > 24 ? d.title : ""));
    merged
      .select<SVGTextElement>("text.topic-count")
      .attr("text-anchor", "middle")
      .attr("dy", "1.2em")
      .style("font-size", "9px")
      .style("pointer-events", "none")
      .text((d) => (d.r > 16 ? `${d.entityCount} entities` : ""));
  }
}
