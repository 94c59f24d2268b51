// Visual encodings for the entity graph: node size tracks how often an entity
// appears in distinct chunks, edge thickness falls off with topic-tree
// distance (which also sets force-layout attraction), and entity types get
// evenly spaced hues at moderate saturation and lightness.

export function nodeRadius(chunkRefCount: number, rMin = 6, scale = 3): number {
  return rMin + scale * Math.sqrt(Math.max(0, chunkRefCount));
}

export function edgeThickness(topicDistance: number, maxThickness = 6): number {
  return maxThickness / (1 + Math.max(0, topicDistance));
}

export function attractionStrength(topicDistance: number): number {
  return 1 / (1 + Math.max(0, topicDistance));
}

export const TYPE_SATURATION = 55;
export const TYPE_LIGHTNESS = 65;

/** Stable color per entity type: hues at i*360/n over the sorted type list. */
export function typeColors(types: string[]): Map<string, string> {
  const distinct = [...new Set(types)].sort();
  const colors = new Map<string, string>();
  distinct.forEach((type, i) => {
    const hue = (i * 360) / distinct.length;
    colors.set(type, `hsl(${hue}, ${TYPE_SATURATION}%, ${TYPE_LIGHTNESS}%)`);
  });
  return colors;
}

export function typeHues(types: string[]): Map<string, number> {
  const distinct = [...new Set(types)].sort();
  return new Map(distinct.map((type, i) => [type, (i * 360) / distinct.length]));
}
