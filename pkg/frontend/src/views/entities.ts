// Entity explorer: force-directed local subgraph around pinned entities.
// Node size follows chunk appearances, edge thickness and attraction follow
// topic distance, node color follows entity type. Right-click expands a node
// by one hop through the neighborhood endpoint.

import * as d3 from "d3";
import { api } from "../api";
import { attractionStrength, edgeThickness, nodeRadius, typeColors } from "../encoding";
import { graphHighlights, type HighlightSet } from "../highlight";
import type { HoverRef, NeighborhoodNode, Relationship } from "../types";
import type { SelectionStore } from "../state";

interface GraphNode extends d3.SimulationNodeDatum {
  id: string;
  name: string;
  entityType: string;
  chunkRefCount: number;
}

interface GraphEdge extends d3.SimulationLinkDatum<GraphNode> {
  id: string;
  sourceId: string;
  targetId: string;
  distance: number;
}

export class EntitiesView {
  private svg: d3.Selection<SVGSVGElement, unknown, null, undefined>;
  private simulation: d3.Simulation<GraphNode, GraphEdge> | null = null;
  private nodes = new Map<string, GraphNode>();
  private edges = new Map<string, GraphEdge>();
  private width = 520;
  private height = 440;

  constructor(
    container: HTMLElement,
    private selection: SelectionStore,
    private onOpenInvocation: (ref: HoverRef) => void,
    private onToast: (message: string) => void,
  ) {
    this.svg = d3
      .select(container)
      .append("svg")
      .attr("viewBox", `0 0 ${this.width} ${this.height}`)
      .attr("width", "100%");
    this.svg.append("g").attr("class", "edges");
    this.svg.append("g").attr("class", "nodes");
  }

  clear(): void {
    this.nodes.clear();
    this.edges.clear();
  }

  async addEntity(entityId: string): Promise<void> {
    try {
      const hood = await api.neighborhood(entityId, 1);
      await this.merge(hood.entities, hood.relationships);
    } catch (error) {
      this.onToast(`could not expand ${entityId}: ${(error as Error).message}`);
    }
  }

  private async merge(
    nodes: NeighborhoodNode[],
    relationships: Relationship[],
  ): Promise<void> {
    for (const node of nodes) {
      if (!this.nodes.has(node.id)) {
        this.nodes.set(node.id, {
          id: node.id,
          name: node.name,
          entityType: node.entity_type || "untyped",
          chunkRefCount: node.chunk_ref_count,
        });
      }
    }
    for (const rel of relationships) {
      if (this.edges.has(rel.id)) continue;
      if (!this.nodes.has(rel.source_entity_id) || !this.nodes.has(rel.target_entity_id)) {
        continue;
      }
      let distance = 0;
      try {
        distance = (await api.topicDistance(rel.source_entity_id, rel.target_entity_id)).distance;
      } catch {
        distance = 0;
      }
      this.edges.set(rel.id, {
        id: rel.id,
        sourceId: rel.source_entity_id,
        targetId: rel.target_entity_id,
        source: rel.source_entity_id,
        target: rel.target_entity_id,
        distance,
      });
    }
  }

  displayed(): { nodes: string[]; edges: { id: string; source: string; target: string }[] } {
    return {
      nodes: [...this.nodes.keys()],
      edges: [...this.edges.values()].map((e) => ({
        id: e.id,
        source: e.sourceId,
        target: e.targetId,
      })),
    };
  }

  render(highlights: HighlightSet): void {
    const nodeList = [...this.nodes.values()];
    const edgeList = [...this.edges.values()];
    const colors = typeColors(nodeList.map((n) => n.entityType));
    const displayed = this.displayed();
    const lit = graphHighlights(highlights, displayed.nodes, displayed.edges);

    const edgeSel = this.svg
      .select("g.edges")
      .selectAll<SVGLineElement, GraphEdge>("line")
      .data(edgeList, (d) => d.id);
    edgeSel.exit().remove();
    const edgeMerged = edgeSel.enter().append("line").merge(edgeSel);
    edgeMerged
      .attr("stroke", (d) => (lit.edges.has(d.id) ? "#d9480f" : "#9aa7b5"))
      .attr("stroke-width", (d) =>
        lit.edges.has(d.id) ? edgeThickness(d.distance) + 1.5 : edgeThickness(d.distance),
      )
      .on("mouseenter", (_e, d) =>
        this.selection.setHovered({ kind: "relationship", id: d.id }),
      )
      .on("mouseleave", () => this.selection.setHovered(null))
      .on("click", (_e, d) => this.onOpenInvocation({ kind: "relationship", id: d.id }));

    const nodeSel = this.svg
      .select("g.nodes")
      .selectAll<SVGGElement, GraphNode>("g")
      .data(nodeList, (d) => d.id);
    nodeSel.exit().remove();
    const entered = nodeSel.enter().append("g");
    entered.append("circle");
    entered.append("text");
    const nodeMerged = entered.merge(nodeSel);
    nodeMerged
      .select<SVGCircleElement>("circle")
      .attr("r", (d) => nodeRadius(d.chunkRefCount))
      .attr("fill", (d) => colors.get(d.entityType) ?? "#b8c1ce")
      .attr("stroke", (d) => (lit.nodes.has(d.id) ? "#d9480f" : "#44556a"))
      .attr("stroke-width", (d) => (lit.nodes.has(d.id) ? 3 : 1))
      .style("cursor", "pointer")
      .on("mouseenter", (_e, d) => this.selection.setHovered({ kind: "entity", id: d.id }))
      .on("mouseleave", () => this.selection.setHovered(null))
      .on("click", (_e, d) => this.onOpenInvocation({ kind: "entity", id: d.id }))
      .on("contextmenu", (event, d) => {
        event.preventDefault();
        void this.addEntity(d.id).then(() => this.render(highlights));
      });
    nodeMerged
      .select<SVGTextElement>("text")
      .attr("dy", (d) => -nodeRadius(d.chunkRefCount) - 3)
      .attr("text-anchor", "middle")
      .style("font-size", "10px")
      .style("pointer-events", "none")
      .text((d) => d.name);

    this.simulation?.stop();
    this.simulation = d3
      .forceSimulation(nodeList)
      .force(
        "link",
        d3
          .forceLink<GraphNode, GraphEdge>(edgeList)
          .id((d) => d.id)
          .strength((d) => attractionStrength(d.distance))
          .distance((d) => 40 + 25 * d.distance),
      )
      .force("charge", d3.forceManyBody().strength(-140))
      .force("center", d3.forceCenter(this.width / 2, this.height / 2))
      .force("collide", d3.forceCollide<GraphNode>((d) => nodeRadius(d.chunkRefCount) + 4))
      .on("tick", () => {
        edgeMerged
          .attr("x1", (d) => (d.source as GraphNode).x ?? 0)
          .attr("y1", (d) => (d.source as GraphNode).y ?? 0)
          .attr("x2", (d) => (d.target as GraphNode).x ?? 0)
          .attr("y2", (d) => (d.target as GraphNode).y ?? 0);
        nodeMerged.attr("transform", (d) => `translate(${d.x ?? 0},${d.y ?? 0})`);
      });
  }
}
