// Timeline view-model: pure mapping from a report document to glyphs on a
// single running cycle with three body-side lanes. Rendering lives in
// timeline-dom.ts so this mapping stays testable without a browser.

import type { AttributeClass, ReportDoc, Side, Suggestion } from "./types.js";

export const CLASS_COLORS: Record<AttributeClass, string> = {
  positional: "#3fa34d", // green
  temporal: "#d64550", // red
  angular: "#e3b505", // yellow
  categorical: "#8c8c9e", // profile-style neutral
};

export const GLYPH_MIN_PX = 16;
export const GLYPH_MAX_PX = 40;

export const LANE_ORDER: Side[] = ["left", "neutral", "right"];

// one full cycle: right landing -> left landing -> next right landing
export const AXIS_TICKS: { phase: number; label: string }[] = [
  { phase: 0.0, label: "RL" },
  { phase: 0.25, label: "RE" },
  { phase: 0.5, label: "LL" },
  { phase: 0.75, label: "LE" },
  { phase: 1.0, label: "RL" },
];

export interface Glyph {
  id: string;
  name: string;
  lane: Side;
  phase: number;
  weight: number;
  sizePx: number;
  color: string;
  cls: AttributeClass;
  custom: boolean;
  direction: string;
  label: string;
}

export interface TimelineView {
  lanes: Record<Side, Glyph[]>;
  empty: boolean;
}

export function glyphSizePx(weight: number): number {
  const w = Math.min(Math.max(weight, 0), 1);
  return GLYPH_MIN_PX + w * (GLYPH_MAX_PX - GLYPH_MIN_PX);
}

function glyphLabel(name: string): string {
  const words = name.replace(/\(.*\)/, "").trim().split(/[\s-]+/);
  return words
    .slice(0, 2)
    .map((w) => w.charAt(0).toUpperCase())
    .join("");
}

export function toGlyph(s: Suggestion): Glyph {
  return {
    id: s.id,
    name: s.name,
    lane: s.lane,
    phase: Math.min(Math.max(s.phaseHint, 0), 1),
    weight: s.glyphWeight,
    sizePx: glyphSizePx(s.glyphWeight),
    color: CLASS_COLORS[s.class],
    cls: s.class,
    custom: s.custom,
    direction: s.direction,
    label: glyphLabel(s.name),
  };
}

export function buildTimelineView(report: ReportDoc | null): TimelineView {
  const lanes: Record<Side, Glyph[]> = { left: [], neutral: [], right: [] };
  if (!report) {
    return { lanes, empty: true };
  }
  for (const s of report.suggestions) {
    lanes[s.lane].push(toGlyph(s));
  }
  for (const lane of LANE_ORDER) {
    lanes[lane].sort((a, b) => a.phase - b.phase || a.id.localeCompare(b.id));
  }
  return { lanes, empty: report.suggestions.length === 0 };
}
