import { readFileSync } from "node:fs";
import { fileURLToPath } from "node:url";
import { describe, expect, it } from "vitest";

import {
  AXIS_TICKS,
  CLASS_COLORS,
  GLYPH_MAX_PX,
  GLYPH_MIN_PX,
  buildTimelineView,
  glyphSizePx,
} from "../src/timeline.js";
import type { ReportDoc, Side } from "../src/types.js";

const fixtureUrl = new URL("../fixtures/golden-report.json", import.meta.url);
const golden: ReportDoc = JSON.parse(readFileSync(fileURLToPath(fixtureUrl), "utf-8"));

describe("timeline view-model against the golden report", () => {
  const view = buildTimelineView(golden);
  const glyphs = [...view.lanes.left, ...view.lanes.neutral, ...view.lanes.right];

  it("renders one glyph per suggestion", () => {
    expect(glyphs.length).toBe(golden.suggestions.length);
    expect(view.empty).toBe(false);
  });

  it("glyph lane matches the report lane", () => {
    for (const s of golden.suggestions) {
      const lane: Side = s.lane;
      expect(view.lanes[lane].some((g) => g.id === s.id)).toBe(true);
    }
  });

  it("glyph color encodes the attribute class", () => {
    for (const g of glyphs) {
      const s = golden.suggestions.find((x) => x.id === g.id)!;
      expect(g.color).toBe(CLASS_COLORS[s.class]);
    }
    // the golden fixture exercises all three continuous classes
    const classes = new Set(golden.suggestions.map((s) => s.class));
    expect(classes).toEqual(new Set(["positional", "angular", "temporal"]));
  });

  it("glyph size is monotone in the report glyph weight", () => {
    const sorted = [...glyphs].sort((a, b) => a.weight - b.weight);
    for (let i = 1; i < sorted.length; i++) {
      if (sorted[i].weight > sorted[i - 1].weight) {
        expect(sorted[i].sizePx).toBeGreaterThan(sorted[i - 1].sizePx);
      } else {
        expect(sorted[i].sizePx).toBe(sorted[i - 1].sizePx);
      }
    }
    for (const g of glyphs) {
      expect(g.sizePx).toBe(GLYPH_MIN_PX + g.weight * (GLYPH_MAX_PX - GLYPH_MIN_PX));
    }
  });

  it("custom attributes are flagged for the distinct glyph shape", () => {
    const custom = glyphs.filter((g) => g.custom).map((g) => g.id);
    expect(custom).toEqual(["my-lean-check"]);
  });

  it("glyph phase positions stay inside one cycle", () => {
    for (const g of glyphs) {
      expect(g.phase).toBeGreaterThanOrEqual(0);
      expect(g.phase).toBeLessThanOrEqual(1);
    }
  });
});

describe("timeline layout rules", () => {
  it("empty report yields the axis with no glyphs", () => {
    const report = { ...golden, suggestions: [] };
    const view = buildTimelineView(report);
    expect(view.empty).toBe(true);
    expect(view.lanes.left.length + view.lanes.neutral.length + view.lanes.right.length).toBe(0);
  });

  it("missing report yields the empty state", () => {
    expect(buildTimelineView(null).empty).toBe(true);
  });

  it("axis spans one full cycle from right landing to right landing", () => {
    expect(AXIS_TICKS[0]).toEqual({ phase: 0, label: "RL" });
    expect(AXIS_TICKS[AXIS_TICKS.length - 1]).toEqual({ phase: 1, label: "RL" });
  });

  it("glyph size clamps out-of-range weights", () => {
    expect(glyphSizePx(-1)).toBe(GLYPH_MIN_PX);
    expect(glyphSizePx(2)).toBe(GLYPH_MAX_PX);
  });
});
