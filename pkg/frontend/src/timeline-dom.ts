// SVG rendering of the timeline view-model.

import { AXIS_TICKS, LANE_ORDER, type Glyph, type TimelineView } from "./timeline.js";

const SVG_NS = "http://www.w3.org/2000/svg";
const WIDTH = 860;
const LANE_HEIGHT = 64;
const MARGIN_X = 70;
const AXIS_Y = 3 * LANE_HEIGHT + 28;
const HEIGHT = AXIS_Y + 34;

const LANE_LABELS: Record<string, string> = {
  left: "left side",
  neutral: "middle",
  right: "right side",
};

function el(tag: string, attrs: Record<string, string | number>): SVGElement {
  const node = document.createElementNS(SVG_NS, tag);
  for (const [k, v] of Object.entries(attrs)) node.setAttribute(k, String(v));
  return node;
}

function phaseX(phase: number): number {
  return MARGIN_X + phase * (WIDTH - 2 * MARGIN_X);
}

function laneY(lane: string): number {
  return LANE_ORDER.indexOf(lane as (typeof LANE_ORDER)[number]) * LANE_HEIGHT + LANE_HEIGHT / 2;
}

function drawGlyph(g: Glyph, onPick: (id: string) => void): SVGElement {
  const group = el("g", {
    class: "glyph",
    transform: `translate(${phaseX(g.phase)}, ${laneY(g.lane)})`,
  });
  const r = g.sizePx / 2;
  const shape = g.custom
    ? el("polygon", {
        points: `0,${-r} ${r},0 0,${r} ${-r},0`,
        fill: "#ffffff",
        stroke: g.color,
        "stroke-width": 3,
      })
    : el("circle", { r, fill: "#ffffff", stroke: g.color, "stroke-width": 3 });
  group.appendChild(shape);
  const label = el("text", {
    "text-anchor": "middle",
    dy: "0.35em",
    "font-size": Math.max(10, r * 0.8),
    fill: "#30343a",
  });
  label.textContent = g.label;
  group.appendChild(label);
  const title = document.createElementNS(SVG_NS, "title");
  title.textContent = `${g.name}: ${g.direction} (weight ${g.weight.toFixed(2)})`;
  group.appendChild(title);
  group.addEventListener("click", () => onPick(g.id));
  return group;
}

export function renderTimeline(
  container: HTMLElement,
  view: TimelineView,
  onPick: (id: string) => void
): void {
  container.replaceChildren();
  const svg = el("svg", {
    viewBox: `0 0 ${WIDTH} ${HEIGHT}`,
    class: "timeline-svg",
  });

  for (const lane of LANE_ORDER) {
    const y = laneY(lane);
    svg.appendChild(
      el("line", {
        x1: MARGIN_X,
        x2: WIDTH - MARGIN_X,
        y1: y,
        y2: y,
        stroke: "#e1e6ec",
        "stroke-width": 1,
      })
    );
    const label = el("text", { x: 8, y: y + 4, "font-size": 12, fill: "#6a7382" });
    label.textContent = LANE_LABELS[lane];
    svg.appendChild(label);
  }

  svg.appendChild(
    el("line", {
      x1: MARGIN_X,
      x2: WIDTH - MARGIN_X,
      y1: AXIS_Y,
      y2: AXIS_Y,
      stroke: "#4a5563",
      "stroke-width": 2,
    })
  );
  for (const tick of AXIS_TICKS) {
    const x = phaseX(tick.phase);
    svg.appendChild(
      el("circle", { cx: x, cy: AXIS_Y, r: 5, fill: "#4a5563" })
    );
    const label = el("text", {
      x,
      y: AXIS_Y + 22,
      "text-anchor": "middle",
      "font-size": 12,
      fill: "#4a5563",
    });
    label.textContent = tick.label;
    svg.appendChild(label);
  }

  for (const lane of LANE_ORDER) {
    for (const glyph of view.lanes[lane]) {
      svg.appendChild(drawGlyph(glyph, onPick));
    }
  }

  container.appendChild(svg);
  if (view.empty) {
    const note = document.createElement("p");
    note.className = "empty-note";
    note.textContent =
      "No significant differences: the sample tracks the exemplar on every attribute.";
    container.appendChild(note);
  }
}
