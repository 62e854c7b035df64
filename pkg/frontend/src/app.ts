// Studio page wiring: session loading, timeline, 3D preview, query editor.

import { ApiError, StudioApi } from "./api.js";
import {
  buildDocument,
  editorReducer,
  initialEditorState,
  type EditorAction,
  type EditorState,
} from "./editor.js";
import { buildTimelineView } from "./timeline.js";
import { renderTimeline } from "./timeline-dom.js";
import type { AnimationDoc, ReportDoc, SkeletonJoint } from "./types.js";
import { Viewer } from "./viewer.js";

const api = new StudioApi("..");

function byId<T extends HTMLElement>(id: string): T {
  const node = document.getElementById(id);
  if (!node) throw new Error(`missing element #${id}`);
  return node as T;
}

const state: {
  sessionId: string | null;
  report: ReportDoc | null;
  skeleton: SkeletonJoint[] | null;
  editor: EditorState;
} = {
  sessionId: null,
  report: null,
  skeleton: null,
  editor: initialEditorState(),
};

let previewViewer: Viewer | null = null;
let editorViewer: Viewer | null = null;

function setStatus(text: string, isError = false): void {
  const node = byId<HTMLParagraphElement>("status");
  node.textContent = text;
  node.classList.toggle("error", isError);
}

async function readJsonFile(input: HTMLInputElement): Promise<unknown> {
  const file = input.files?.[0];
  if (!file) throw new Error(`choose a file for ${input.id}`);
  return JSON.parse(await file.text());
}

function refreshTimeline(): void {
  const container = byId<HTMLDivElement>("timeline");
  renderTimeline(container, buildTimelineView(state.report), (id) => {
    void openPreview(id);
  });
}

function describeValue(v: number | string, cls: string): string {
  if (typeof v === "string") return v;
  if (cls === "angular") return `${((v * 180) / Math.PI).toFixed(1)} deg`;
  if (cls === "positional") return `${(v * 100).toFixed(1)} cm`;
  return `${(v * 100).toFixed(1)} % of cycle`;
}

function renderTemporalStrip(doc: AnimationDoc): void {
  const strip = byId<HTMLDivElement>("temporal-strip");
  strip.replaceChildren();
  if (doc.marker.kind !== "temporal") {
    strip.classList.add("hidden");
    return;
  }
  strip.classList.remove("hidden");
  const { sampleFraction, exemplarFraction } = doc.marker;
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  svg.setAttribute("viewBox", "0 0 400 46");
  const axis = document.createElementNS(svgNs, "line");
  for (const [k, v] of Object.entries({ x1: 20, x2: 380, y1: 24, y2: 24, stroke: "#4a5563", "stroke-width": 2 }))
    axis.setAttribute(k, String(v));
  svg.appendChild(axis);
  const x = (f: number) => 20 + f * 360;
  const seg = document.createElementNS(svgNs, "line");
  for (const [k, v] of Object.entries({
    x1: x(Math.min(sampleFraction, exemplarFraction)),
    x2: x(Math.max(sampleFraction, exemplarFraction)),
    y1: 24,
    y2: 24,
    stroke: "#d64550",
    "stroke-width": 6,
  }))
    seg.setAttribute(k, String(v));
  svg.appendChild(seg);
  for (const [frac, color, label] of [
    [exemplarFraction, "#3fa34d", "exemplar"],
    [sampleFraction, "#d64550", "sample"],
  ] as const) {
    const dot = document.createElementNS(svgNs, "circle");
    dot.setAttribute("cx", String(x(frac)));
    dot.setAttribute("cy", "24");
    dot.setAttribute("r", "5");
    dot.setAttribute("fill", color);
    svg.appendChild(dot);
    const text = document.createElementNS(svgNs, "text");
    text.setAttribute("x", String(x(frac)));
    text.setAttribute("y", frac === sampleFraction ? "12" : "42");
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("font-size", "10");
    text.textContent = label;
    svg.appendChild(text);
  }
  strip.appendChild(svg);
}

async function openPreview(suggestionId: string): Promise<void> {
  if (!state.sessionId) return;
  try {
    const doc = await api.getAnimation(state.sessionId, suggestionId);
    byId<HTMLElement>("preview-section").classList.remove("hidden");
    if (!previewViewer) {
      previewViewer = new Viewer(byId<HTMLCanvasElement>("preview-canvas"));
    }
    previewViewer.resize();
    previewViewer.playAnimation(doc);
    const cls = doc.attribute.class;
    byId<HTMLElement>("preview-title").textContent = doc.attribute.name;
    byId<HTMLElement>("preview-info").textContent =
      `cycle ${doc.cycle}: ${describeValue(doc.wrongValue, cls)} now, ` +
      `aim for ${describeValue(doc.targetValue, cls)}`;
    renderTemporalStrip(doc);
  } catch (err) {
    setStatus(`preview failed: ${(err as Error).message}`, true);
  }
}

async function createSession(): Promise<void> {
  try {
    setStatus("analyzing...");
    const sample = await readJsonFile(byId<HTMLInputElement>("sample-file"));
    const exemplar = await readJsonFile(byId<HTMLInputElement>("exemplar-file"));
    const threshold = Number(byId<HTMLInputElement>("threshold").value) || 0.25;
    const { id } = await api.createSession(sample, exemplar, threshold);
    state.sessionId = id;
    state.report = await api.getReport(id);
    setStatus(
      `session ${id}: ${state.report.suggestions.length} suggestion(s), ` +
        `${state.report.pairedCycles.length} paired cycle(s)`
    );
    refreshTimeline();
  } catch (err) {
    const message =
      err instanceof ApiError && err.stage ? `${err.stage}: ${err.message}` : (err as Error).message;
    setStatus(message, true);
  }
}

// ---- query editor ----------------------------------------------------------

function dispatch(action: EditorAction): void {
  state.editor = editorReducer(state.editor, action);
  syncEditorPanel();
}

function syncEditorPanel(): void {
  const s = state.editor;
  if (editorViewerRig) editorViewerRig.setHighlight(s.joints);
  byId<HTMLSpanElement>("picked-joints").textContent = s.joints.join(" , ") || "none";
  for (const mode of ["angle", "distance"] as const) {
    byId<HTMLInputElement>(`mode-${mode}`).checked = s.mode === mode;
  }
  byId<HTMLSelectElement>("axis-select").value = s.axis ?? "";
  byId<HTMLSelectElement>("side-select").value = s.side;
  drawCursorDiagram();
  const { document: doc, hint } = buildDocument(s);
  const submit = byId<HTMLButtonElement>("submit-attribute");
  submit.disabled = doc === null;
  byId<HTMLSpanElement>("editor-hint").textContent = hint ?? "ready to add";
}

let editorViewerRig: ReturnType<Viewer["showTPose"]> | null = null;

function setupEditorViewer(): void {
  if (!state.skeleton) return;
  if (!editorViewer) {
    editorViewer = new Viewer(byId<HTMLCanvasElement>("editor-canvas"));
    editorViewer.onJointPick = (joint) => dispatch({ type: "clickJoint", joint });
  }
  editorViewer.resize();
  editorViewerRig = editorViewer.showTPose(state.skeleton);
}

const CURSOR_SNAPS = [0, 0.25, 0.5, 0.75, 1];

function snapPhase(p: number): number {
  for (const snap of CURSOR_SNAPS) {
    if (Math.abs(p - snap) < 0.02) return snap;
  }
  return Math.round(p * 100) / 100;
}

function drawCursorDiagram(): void {
  const holder = byId<HTMLDivElement>("cycle-diagram");
  holder.replaceChildren();
  const svgNs = "http://www.w3.org/2000/svg";
  const svg = document.createElementNS(svgNs, "svg");
  svg.setAttribute("viewBox", "0 0 400 54");
  svg.setAttribute("class", "cycle-svg");
  const x = (f: number) => 20 + f * 360;
  const axis = document.createElementNS(svgNs, "line");
  for (const [k, v] of Object.entries({ x1: 20, x2: 380, y1: 30, y2: 30, stroke: "#4a5563", "stroke-width": 2 }))
    axis.setAttribute(k, String(v));
  svg.appendChild(axis);
  for (const [phase, label] of [
    [0, "RL"],
    [0.25, "RE"],
    [0.5, "LL"],
    [0.75, "LE"],
    [1, "RL"],
  ] as const) {
    const dot = document.createElementNS(svgNs, "circle");
    dot.setAttribute("cx", String(x(phase)));
    dot.setAttribute("cy", "30");
    dot.setAttribute("r", "4");
    dot.setAttribute("fill", "#4a5563");
    svg.appendChild(dot);
    const text = document.createElementNS(svgNs, "text");
    text.setAttribute("x", String(x(phase)));
    text.setAttribute("y", "48");
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("font-size", "10");
    text.textContent = label;
    svg.appendChild(text);
  }
  for (const [value, name] of [
    [state.editor.cursorA, "A"],
    [state.editor.cursorB, "B"],
  ] as const) {
    if (value === null) continue;
    const line = document.createElementNS(svgNs, "line");
    for (const [k, v] of Object.entries({
      x1: x(value),
      x2: x(value),
      y1: 8,
      y2: 40,
      stroke: "#d64550",
      "stroke-width": 2,
      "stroke-dasharray": name === "B" ? "4 3" : "",
    }))
      line.setAttribute(k, String(v));
    svg.appendChild(line);
    const text = document.createElementNS(svgNs, "text");
    text.setAttribute("x", String(x(value)));
    text.setAttribute("y", "7");
    text.setAttribute("text-anchor", "middle");
    text.setAttribute("font-size", "9");
    text.textContent = `${name} ${value.toFixed(2)}`;
    svg.appendChild(text);
  }
  svg.addEventListener("pointerdown", (e) => {
    const rect = svg.getBoundingClientRect();
    const frac = snapPhase(((e.clientX - rect.left) / rect.width) * (400 / 360) - 20 / 360);
    const which = e.shiftKey ? "setCursorB" : "setCursorA";
    dispatch({ type: which, phase: Math.min(Math.max(frac, 0), 1) });
  });
  holder.appendChild(svg);
}

async function submitAttribute(): Promise<void> {
  if (!state.sessionId) {
    setStatus("create a session first", true);
    return;
  }
  const { document: doc } = buildDocument(state.editor);
  if (!doc) return;
  const errorNode = byId<HTMLParagraphElement>("editor-errors");
  errorNode.textContent = "";
  try {
    state.report = await api.addAttribute(state.sessionId, doc);
    refreshTimeline();
    setStatus(`added "${doc.name}"`);
    dispatch({ type: "reset" });
    byId<HTMLInputElement>("attr-name").value = "";
  } catch (err) {
    if (err instanceof ApiError && err.issues.length) {
      errorNode.textContent = err.issues.map((i) => `${i.field}: ${i.message}`).join(" / ");
    } else {
      errorNode.textContent = (err as Error).message;
    }
  }
}

async function init(): Promise<void> {
  byId<HTMLButtonElement>("create-session").addEventListener("click", () => {
    void createSession();
  });
  byId<HTMLButtonElement>("submit-attribute").addEventListener("click", () => {
    void submitAttribute();
  });
  for (const mode of ["angle", "distance"] as const) {
    byId<HTMLInputElement>(`mode-${mode}`).addEventListener("change", () =>
      dispatch({ type: "setMode", mode })
    );
  }
  byId<HTMLSelectElement>("axis-select").addEventListener("change", (e) => {
    const v = (e.target as HTMLSelectElement).value;
    dispatch({ type: "setAxis", axis: v ? (v as "X" | "Y" | "Z") : null });
  });
  byId<HTMLSelectElement>("side-select").addEventListener("change", (e) =>
    dispatch({ type: "setSide", side: (e.target as HTMLSelectElement).value as EditorState["side"] })
  );
  byId<HTMLInputElement>("attr-name").addEventListener("input", (e) =>
    dispatch({ type: "setName", name: (e.target as HTMLInputElement).value })
  );
  byId<HTMLButtonElement>("clear-cursors").addEventListener("click", () => {
    dispatch({ type: "setCursorA", phase: null });
    dispatch({ type: "setCursorB", phase: null });
  });
  byId<HTMLButtonElement>("reset-editor").addEventListener("click", () => {
    dispatch({ type: "reset" });
    byId<HTMLInputElement>("attr-name").value = "";
  });

  refreshTimeline();
  try {
    state.skeleton = await api.getSkeleton();
    setupEditorViewer();
  } catch (err) {
    setStatus(`service unreachable: ${(err as Error).message}`, true);
  }
  syncEditorPanel();
}

void init();
