// Circle-packing layout for the topic tree. Leaf diameter is linear in entity
// count (value = count squared, since packed radii scale with the square root
// of value under one global factor); parent radii come from enclosing their
// packed children plus padding.

import { hierarchy, pack } from "d3-hierarchy";
import type { TopicTreeNode } from "./types";

export interface TopicCircle {
  id: string;
  title: string;
  level: number;
  parentId: string | null;
  cx: number;
  cy: number;
  r: number;
  leaf: boolean;
  entityCount: number;
}

interface PackDatum {
  id: string;
  title: string;
  level: number;
  parentId: string | null;
  entityCount: number;
  children?: PackDatum[];
}

function toDatum(node: TopicTreeNode): PackDatum {
  return {
    id: node.id,
    title: node.title,
    level: node.level,
    parentId: node.parent_id,
    entityCount: node.entity_count ?? node.entity_ids.length,
    children: node.children.length ? node.children.map(toDatum) : undefined,
  };
}

export function packTopics(
  roots: TopicTreeNode[],
  width: number,
  height: number,
  padding = 6,
): TopicCircle[] {
  if (!roots.length) return [];
  const superRoot: PackDatum = {
    id: "__root__",
    title: "",
    level: -1,
    parentId: null,
    entityCount: 0,
    children: roots.map(toDatum),
  };
  const root = hierarchy<PackDatum>(superRoot)
    .sum((d) => (d.children?.length ? 0 : d.entityCount * d.entityCount))
    .sort((a, b) => (b.value ?? 0) - (a.value ?? 0));
  const packed = pack<PackDatum>().size([width, height]).padding(padding)(root);
  return packed
    .descendants()
    .filter((n) => n.data.id !== "__root__")
    .map((n) => ({
      id: n.data.id,
      title: n.data.title,
      level: n.data.level,
      parentId: n.data.parentId,
      cx: n.x,
      cy: n.y,
      r: n.r,
      leaf: !n.children,
      entityCount: n.data.entityCount,
    }));
}

/** Flatten the nested tree payload into a list (for highlight lookups). */
export function flattenTopics(roots: TopicTreeNode[]): TopicTreeNode[] {
  const out: TopicTreeNode[] = [];
  const walk = (node: TopicTreeNode) => {
    out.push(node);
    node.children.forEach(walk);
  };
  roots.forEach(walk);
  return out;
}
