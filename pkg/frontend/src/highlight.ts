import type { HighlightLayer, SpanOut } from "./types.js";

// Layering rule: earlier start gets the smaller depth; on equal starts the
// longer span does. A span takes the smallest depth not already used by an
// overlapping predecessor, so overlapping spans always land on distinct
// depths and disjoint spans can share depth 0.
export function assignDepths(spans: SpanOut[]): HighlightLayer[] {
  const ordered = [...spans].sort(
    (a, b) =>
      a.char_start - b.char_start ||
      (b.char_end - b.char_start) - (a.char_end - a.char_start) ||
      a.tag.localeCompare(b.tag),
  );
  const layers: HighlightLayer[] = [];
  for (const s of ordered) {
    const used = new Set<number>();
    for (const l of layers) {
      if (l.charStart < s.char_end && s.char_start < l.charEnd) used.add(l.depth);
    }
    let depth = 0;
    while (used.has(depth)) depth += 1;
    layers.push({ charStart: s.char_start, charEnd: s.char_end, tag: s.tag, prob: s.prob, depth });
  }
  return layers;
}

export interface Segment {
  text: string;
  layers: HighlightLayer[]; // layers covering this whole segment
}

/** Cut sentence text at every layer boundary. Each segment is covered by a
 * fixed set of layers, so it can be rendered as one element with one
 * underline bar per covering layer. `offset` is the sentence's char offset
 * in the submitted text (layer offsets are absolute). */
export function segmentText(text: string, offset: number, layers: HighlightLayer[]): Segment[] {
  const cuts = new Set<number>([0, text.length]);
  for (const l of layers) {
    const a = l.charStart - offset;
    const b = l.charEnd - offset;
    if (b <= 0 || a >= text.length) continue;
    cuts.add(Math.max(0, a));
    cuts.add(Math.min(text.length, b));
  }
  const points = [...cuts].sort((x, y) => x - y);
  const out: Segment[] = [];
  for (let i = 0; i + 1 < points.length; i++) {
    const [a, b] = [points[i], points[i + 1]];
    out.push({
      text: text.slice(a, b),
      layers: layers.filter((l) => l.charStart - offset <= a && b <= l.charEnd - offset),
    });
  }
  return out;
}

export function maxDepth(layers: HighlightLayer[]): number {
  return layers.reduce((m, l) => Math.max(m, l.depth), 0);
}

/** Stable tag -> hue so a GI keeps its color across sentences and views. */
export function tagHue(tag: string): number {
  let h = 0;
  for (let i = 0; i < tag.length; i++) h = (h * 31 + tag.charCodeAt(i)) >>> 0;
  return h % 360;
}
