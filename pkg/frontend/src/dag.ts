// Layered DAG layout for the network panel. Longest-path layering keeps
// every edge pointing downward; nodes in a layer spread evenly.

import type { NetworkSummary } from "./types.js";

export interface NodePosition {
  name: string;
  x: number;
  y: number;
  layer: number;
}

export interface DagLayout {
  nodes: NodePosition[];
  edges: { from: NodePosition; to: NodePosition }[];
  width: number;
  height: number;
}

export function layerOf(summary: NetworkSummary): Map<string, number> {
  const parents = new Map<string, string[]>();
  for (const cpt of summary.cpts) parents.set(cpt.variable, cpt.parents);
  const layers = new Map<string, number>();
  const visit = (name: string, seen: Set<string>): number => {
    const known = layers.get(name);
    if (known !== undefined) return known;
    if (seen.has(name)) throw new Error(`cycle through ${name}`);
    seen.add(name);
    const ps = parents.get(name) ?? [];
    const layer = ps.length ? 1 + Math.max(...ps.map((p) => visit(p, seen))) : 0;
    layers.set(name, layer);
    return layer;
  };
  for (const v of summary.variables) visit(v.name, new Set());
  return layers;
}

export function layoutDag(summary: NetworkSummary, width = 460, rowHeight = 80): DagLayout {
  const layers = layerOf(summary);
  const byLayer = new Map<number, string[]>();
  for (const v of summary.variables) {
    const l = layers.get(v.name)!;
    if (!byLayer.has(l)) byLayer.set(l, []);
    byLayer.get(l)!.push(v.name);
  }
  const nodes = new Map<string, NodePosition>();
  for (const [layer, names] of byLayer) {
    names.forEach((name, i) => {
      nodes.set(name, {
        name,
        layer,
        x: ((i + 1) * width) / (names.length + 1),
        y: rowHeight / 2 + layer * rowHeight,
      });
    });
  }
  const edges = summary.edges.map(([from, to]) => ({
    from: nodes.get(from)!,
    to: nodes.get(to)!,
  }));
  const depth = Math.max(...[...byLayer.keys()], 0) + 1;
  return { nodes: [...nodes.values()], edges, width, height: depth * rowHeight };
}
