/** Client-side graph layout.
 *
 * The interchange document carries no coordinates, so nodes are layered
 * left to right: column = breadth-first hop count from the source, with
 * the sink forced into its own final column so every route reads in the
 * travel direction. Nodes the source cannot reach land after the sink.
 */

import type { NetworkDoc } from "./types.js";

export interface NodePosition {
  x: number;
  y: number;
  layer: number;
}

export interface LinkSegment {
  id: string;
  a: string;
  b: string;
  x1: number;
  y1: number;
  x2: number;
  y2: number;
  midX: number;
  midY: number;
}

export interface Layout {
  width: number;
  height: number;
  nodes: Map<string, NodePosition>;
  links: LinkSegment[];
  columns: string[][];
}

const COLUMN_GAP = 110;
const ROW_GAP = 90;
const MARGIN = 55;

function naturalCompare(a: string, b: string): number {
  const na = Number(a);
  const nb = Number(b);
  if (Number.isFinite(na) && Number.isFinite(nb) && na !== nb) return na - nb;
  return a < b ? -1 : a > b ? 1 : 0;
}

export function layerNetwork(doc: NetworkDoc): Map<string, number> {
  const adjacency = new Map<string, string[]>();
  for (const node of doc.nodes) adjacency.set(node, []);
  for (const link of doc.links) {
    adjacency.get(link.a)?.push(link.b);
    adjacency.get(link.b)?.push(link.a);
  }
  const depth = new Map<string, number>([[doc.source, 0]]);
  const queue: string[] = [doc.source];
  for (let head = 0; head < queue.length; head++) {
    const node = queue[head];
    // the sink is pinned to the last column, so it cannot act as an
    // intermediate waypoint when measuring how far everything else is
    if (node === doc.sink && node !== doc.source) continue;
    const d = depth.get(node) ?? 0;
    for (const next of adjacency.get(node) ?? []) {
      if (!depth.has(next)) {
        depth.set(next, d + 1);
        queue.push(next);
      }
    }
  }
  let deepest = 0;
  for (const [node, d] of depth) {
    if (node !== doc.sink) deepest = Math.max(deepest, d);
  }
  if (doc.sink !== doc.source) depth.set(doc.sink, deepest + 1);
  for (const node of doc.nodes) {
    if (!depth.has(node)) depth.set(node, deepest + 2);
  }
  return depth;
}

export function layoutNetwork(doc: NetworkDoc): Layout {
  const depth = layerNetwork(doc);
  const byLayer = new Map<number, string[]>();
  for (const node of doc.nodes) {
    const layer = depth.get(node) ?? 0;
    const bucket = byLayer.get(layer);
    if (bucket) bucket.push(node);
    else byLayer.set(layer, [node]);
  }
  const layers = [...byLayer.keys()].sort((a, b) => a - b);
  const columns = layers.map((layer) => (byLayer.get(layer) ?? []).sort(naturalCompare));
  const tallest = Math.max(1, ...columns.map((c) => c.length));

  const nodes = new Map<string, NodePosition>();
  columns.forEach((column, columnIndex) => {
    // center each column vertically against the tallest one
    const offset = ((tallest - column.length) * ROW_GAP) / 2;
    column.forEach((node, rowIndex) => {
      nodes.set(node, {
        x: MARGIN + columnIndex * COLUMN_GAP,
        y: MARGIN + offset + rowIndex * ROW_GAP,
        layer: columnIndex,
      });
    });
  });

  const links: LinkSegment[] = doc.links.map((link) => {
    const pa = nodes.get(link.a);
    const pb = nodes.get(link.b);
    if (!pa || !pb) throw new Error(`link ${link.id} references an unknown node`);
    return {
      id: link.id,
      a: link.a,
      b: link.b,
      x1: pa.x,
      y1: pa.y,
      x2: pb.x,
      y2: pb.y,
      midX: (pa.x + pb.x) / 2,
      midY: (pa.y + pb.y) / 2,
    };
  });

  return {
    width: MARGIN * 2 + (columns.length - 1) * COLUMN_GAP,
    height: MARGIN * 2 + (tallest - 1) * ROW_GAP,
    nodes,
    links,
    columns,
  };
}
