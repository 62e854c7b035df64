// Attribute query editor state machine. Pure functions: the DOM layer
// dispatches actions, this module decides what document they add up to.
// A document is only submittable once buildDocument returns no hint.

import type { AttributeDocument, Axis, Side, Subtype } from "./types.js";

export type EditorMode = "angle" | "distance" | null;

export interface EditorState {
  mode: EditorMode;
  joints: string[]; // click order, snapped to joint names
  axis: Axis | null;
  side: Side;
  cursorA: number | null; // phase moment / range start
  cursorB: number | null; // range end
  name: string;
}

export function initialEditorState(): EditorState {
  return {
    mode: null,
    joints: [],
    axis: null,
    side: "neutral",
    cursorA: null,
    cursorB: null,
    name: "",
  };
}

export type EditorAction =
  | { type: "setMode"; mode: EditorMode }
  | { type: "clickJoint"; joint: string }
  | { type: "setAxis"; axis: Axis | null }
  | { type: "setSide"; side: Side }
  | { type: "setCursorA"; phase: number | null }
  | { type: "setCursorB"; phase: number | null }
  | { type: "setName"; name: string }
  | { type: "reset" };

function jointCapacity(state: EditorState): number {
  if (state.mode === "angle") return state.axis ? 2 : 3;
  if (state.mode === "distance") return 2;
  return 0;
}

export function editorReducer(state: EditorState, action: EditorAction): EditorState {
  switch (action.type) {
    case "setMode": {
      // switching measurement kind restarts the joint selection
      return { ...state, mode: action.mode, joints: [] };
    }
    case "clickJoint": {
      if (!state.mode) return state;
      const joints = [...state.joints, action.joint].slice(-jointCapacity(state));
      return { ...state, joints };
    }
    case "setAxis": {
      const next = { ...state, axis: action.axis };
      return { ...next, joints: next.joints.slice(0, jointCapacity(next)) };
    }
    case "setSide":
      return { ...state, side: action.side };
    case "setCursorA":
      return { ...state, cursorA: action.phase === null ? null : clampPhase(action.phase) };
    case "setCursorB":
      return { ...state, cursorB: action.phase === null ? null : clampPhase(action.phase) };
    case "setName":
      return { ...state, name: action.name };
    case "reset":
      return initialEditorState();
  }
}

function clampPhase(p: number): number {
  return Math.min(Math.max(p, 0), 1);
}

export function deriveSubtype(state: EditorState): Subtype | null {
  if (state.mode === "distance") {
    if (state.joints.length < 2) return null;
    return state.axis ? "P2" : "P1";
  }
  if (state.mode === "angle") {
    if (state.axis) return state.joints.length >= 2 ? "A2" : null;
    return state.joints.length >= 3 ? "A1" : null;
  }
  if (state.cursorA !== null && state.cursorB !== null) return "T2";
  if (state.cursorA !== null) return "T1";
  return null;
}

export interface EditorResult {
  document: AttributeDocument | null;
  hint: string | null; // why the document is not submittable yet
}

export function buildDocument(state: EditorState): EditorResult {
  const incomplete = (hint: string): EditorResult => ({ document: null, hint });
  if (!state.name.trim()) return incomplete("name the attribute");
  const subtype = deriveSubtype(state);
  if (subtype === null) {
    if (state.mode === "distance") return incomplete("pick the tracked joint, then the base joint");
    if (state.mode === "angle")
      return incomplete(
        state.axis ? "pick the base joint, then the end joint" : "pick three joints in order"
      );
    return incomplete("choose angle or distance, or drag the temporal cursors");
  }

  const base: AttributeDocument = {
    name: state.name.trim(),
    class: "positional",
    subtype,
    jA: null,
    jO: null,
    jB: null,
    axis: null,
    side: state.side,
    phase: null,
  };

  switch (subtype) {
    case "P1":
    case "P2": {
      // first click tracks, second click is the base point
      base.class = "positional";
      base.jO = state.joints[0];
      base.jA = state.joints[1];
      base.axis = subtype === "P2" ? state.axis : null;
      base.phase = state.cursorA;
      break;
    }
    case "A1": {
      base.class = "angular";
      [base.jA, base.jO, base.jB] = state.joints;
      base.phase = state.cursorA;
      break;
    }
    case "A2": {
      // vector points from the first clicked joint to the second
      base.class = "angular";
      base.jO = state.joints[0];
      base.jA = state.joints[1];
      base.axis = state.axis;
      base.phase = state.cursorA;
      break;
    }
    case "T1": {
      base.class = "temporal";
      base.phase = state.cursorA;
      break;
    }
    case "T2": {
      base.class = "temporal";
      const a = state.cursorA as number;
      const b = state.cursorB as number;
      if (a === b) return incomplete("range cursors must not coincide");
      base.phase = [Math.min(a, b), Math.max(a, b)];
      break;
    }
    default:
      return incomplete("unsupported selection");
  }
  return { document: base, hint: null };
}
