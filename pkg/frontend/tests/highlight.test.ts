import { describe, expect, it } from "vitest";
import { assignDepths, maxDepth, segmentText, tagHue } from "../src/highlight.js";
import type { SpanOut } from "../src/types.js";

function span(cs: number, ce: number, tag: string, prob = 0.9): SpanOut {
  return { start: 0, end: 0, tag, prob, char_start: cs, char_end: ce };
}

function depthOf(layers: ReturnType<typeof assignDepths>, tag: string): number {
  const hit = layers.find((l) => l.tag === tag);
  if (!hit) throw new Error(`no layer for ${tag}`);
  return hit.depth;
}

describe("assignDepths", () => {
  it("gives two overlapping spans depths 0 and 1", () => {
    const layers = assignDepths([span(0, 2, "A"), span(1, 3, "B")]);
    expect(depthOf(layers, "A")).toBe(0);
    expect(depthOf(layers, "B")).toBe(1);
  });

  it("lets disjoint spans share depth 0", () => {
    const layers = assignDepths([span(0, 3, "A"), span(5, 8, "B"), span(10, 12, "C")]);
    expect(layers.map((l) => l.depth)).toEqual([0, 0, 0]);
  });

  it("stacks a nested span under its container", () => {
    // earlier start wins the smaller depth
    const layers = assignDepths([span(19, 29, "NP.DEF"), span(16, 29, "PP")]);
    expect(depthOf(layers, "PP")).toBe(0);
    expect(depthOf(layers, "NP.DEF")).toBe(1);
  });

  it("prefers the longer span on equal starts", () => {
    const layers = assignDepths([span(21, 24, "V.PAST"), span(21, 32, "V.PROG")]);
    expect(depthOf(layers, "V.PROG")).toBe(0);
    expect(depthOf(layers, "V.PAST")).toBe(1);
  });

  it("assigns pairwise-overlapping spans three distinct depths", () => {
    const layers = assignDepths([span(4, 6, "C"), span(0, 10, "A"), span(2, 8, "B")]);
    expect(depthOf(layers, "A")).toBe(0);
    expect(depthOf(layers, "B")).toBe(1);
    expect(depthOf(layers, "C")).toBe(2);
    expect(maxDepth(layers)).toBe(2);
  });

  it("reuses a freed depth once the earlier span has ended", () => {
    // B overlaps A; C overlaps B but not A, so C fits back at depth 0
    const layers = assignDepths([span(0, 4, "A"), span(2, 8, "B"), span(5, 9, "C")]);
    expect(depthOf(layers, "A")).toBe(0);
    expect(depthOf(layers, "B")).toBe(1);
    expect(depthOf(layers, "C")).toBe(0);
  });

  it("is independent of input order", () => {
    const spans = [span(0, 10, "A"), span(2, 8, "B"), span(4, 6, "C"), span(12, 15, "D")];
    const expected = assignDepths(spans).sort((a, b) => a.tag.localeCompare(b.tag));
    for (let rot = 1; rot < spans.length; rot++) {
      const shuffled = [...spans.slice(rot), ...spans.slice(0, rot)];
      const got = assignDepths(shuffled).sort((a, b) => a.tag.localeCompare(b.tag));
      expect(got).toEqual(expected);
    }
  });

  it("never gives overlapping layers the same depth (random fuzz)", () => {
    // deterministic LCG so failures reproduce
    let state = 12345;
    const rand = (n: number) => {
      state = (state * 1103515245 + 12345) & 0x7fffffff;
      return state % n;
    };
    for (let trial = 0; trial < 200; trial++) {
      const spans: SpanOut[] = [];
      const count = 1 + rand(8);
      for (let i = 0; i < count; i++) {
        const a = rand(30);
        spans.push(span(a, a + 1 + rand(10), `T${i}`));
      }
      const layers = assignDepths(spans);
      for (const x of layers) {
        for (const y of layers) {
          if (x === y) continue;
          const overlap = x.charStart < y.charEnd && y.charStart < x.charEnd;
          if (overlap) expect(x.depth).not.toBe(y.depth);
        }
      }
    }
  });
});

describe("segmentText", () => {
  const text = "she was reading in the garden now .";

  it("concatenates back to the original text", () => {
    const layers = assignDepths([span(16, 29, "PP"), span(19, 29, "NP.DEF"), span(0, 3, "PRON")]);
    const segs = segmentText(text, 0, layers);
    expect(segs.map((s) => s.text).join("")).toBe(text);
  });

  it("attaches every covering layer to a segment", () => {
    const layers = assignDepths([span(16, 29, "PP"), span(19, 29, "NP.DEF")]);
    const segs = segmentText(text, 0, layers);
    const inner = segs.find((s) => s.text === "the garden");
    expect(inner).toBeDefined();
    expect(inner!.layers.map((l) => l.tag).sort()).toEqual(["NP.DEF", "PP"]);
    const outer = segs.find((s) => s.text === "in ");
    expect(outer!.layers.map((l) => l.tag)).toEqual(["PP"]);
  });

  it("shifts absolute offsets by the sentence offset", () => {
    const layers = assignDepths([span(21, 32, "V.PROG")]);
    const segs = segmentText("she was reading now .", 17, layers);
    const covered = segs.filter((s) => s.layers.length > 0);
    expect(covered.map((s) => s.text).join("")).toBe("was reading");
  });

  it("handles a sentence with no spans", () => {
    const segs = segmentText("hi .", 0, []);
    expect(segs).toEqual([{ text: "hi .", layers: [] }]);
  });
});

describe("tagHue", () => {
  it("is stable and in range", () => {
    expect(tagHue("PP")).toBe(tagHue("PP"));
    for (const tag of ["PP", "NP.DEF", "V.PROG", "zh:DE.POSS"]) {
      const hue = tagHue(tag);
      expect(hue).toBeGreaterThanOrEqual(0);
      expect(hue).toBeLessThan(360);
    }
  });
});
