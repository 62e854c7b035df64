// Document shapes served by the comparison service. The studio is a thin
// client: every number it shows comes from these documents.

export type AttributeClass = "positional" | "angular" | "temporal" | "categorical";
export type Subtype = "P1" | "P2" | "A1" | "A2" | "T1" | "T2" | "CAT";
export type Side = "left" | "neutral" | "right";
export type Axis = "X" | "Y" | "Z";

export interface AttributeDocument {
  name: string;
  class: AttributeClass;
  subtype: Subtype;
  jA: string | null;
  jO: string | null;
  jB: string | null;
  axis: Axis | null;
  side: Side;
  phase: number | [number, number] | null;
  extremum?: "max" | "min";
  classifier?: string;
}

export interface CycleRow {
  cycle: number;
  sampleValue: number | string;
  exemplarValue: number | string;
  sampleNorm: number | null;
  exemplarNorm: number | null;
  relError: number | null;
  significant: boolean;
  direction: string;
}

export interface AttributeRow {
  meta: AttributeDocument;
  name: string;
  kind: "numeric" | "categorical";
  lane: Side;
  custom: boolean;
  phaseHint: number;
  score: number;
  glyphWeight: number;
  suggested: boolean;
  suggestionId: string | null;
  direction: string;
  cycles: CycleRow[];
}

export interface Suggestion {
  id: string;
  name: string;
  kind: "numeric" | "categorical";
  class: AttributeClass;
  side: Side;
  lane: Side;
  custom: boolean;
  phaseHint: number;
  score: number;
  glyphWeight: number;
  direction: string;
}

export interface EventDoc {
  kind: "RL" | "RE" | "LL" | "LE";
  frame: number;
  phase: number;
}

export interface SequenceSummary {
  frames: number;
  fps: number;
  subjectHeight: number;
  cycles: [number, number][];
  events: EventDoc[];
  contacts: Record<string, [number, number][]>;
}

export interface ReportDoc {
  version: string;
  engine: string;
  config: { threshold: number; relErrorFloor: number };
  sample: SequenceSummary;
  exemplar: SequenceSummary;
  pairedCycles: [number, number][];
  alignmentCost: number;
  attributes: AttributeRow[];
  suggestions: Suggestion[];
  profiles: { sample: ProfileDoc; exemplar: ProfileDoc };
}

export interface ProfileDoc {
  wrists: Record<string, [number, number][]>;
  knees: Record<string, [number, number][]>;
  feet: Record<string, ([number, number] | null)[]>;
  strike: Record<string, (string | null)[]>;
  wristCrossing: Record<string, (string | null)[]>;
}

export interface SkeletonJoint {
  name: string;
  parent: number | null;
  offset: [number, number, number];
}

export interface FrameDoc {
  q: [number, number, number, number][]; // (w, x, y, z) per joint
  t: [number, number, number];
}

export interface ViewpointDoc {
  dir: [number, number, number]; // camera-to-subject
  up: [number, number, number];
  distance: number;
  azimuthDeg: number;
  elevationDeg: number;
}

export type MarkerDoc =
  | {
      kind: "angular";
      vertex: [number, number, number];
      armFixed: [number, number, number];
      armWrong: [number, number, number];
      armCorrect: [number, number, number];
    }
  | {
      kind: "positional";
      wrong: [number, number, number];
      correct: [number, number, number];
      base: [number, number, number];
    }
  | { kind: "temporal"; sampleFraction: number; exemplarFraction: number; direction: string }
  | { kind: "categorical"; sample: string; target: string };

export interface AnimationDoc {
  id: string;
  attribute: AttributeDocument;
  cycle: number;
  fps: number;
  durationFrames: number;
  holdFrames: number;
  frames: FrameDoc[];
  marker: MarkerDoc;
  viewpoint: ViewpointDoc;
  wrongValue: number | string;
  targetValue: number | string;
  skeleton: SkeletonJoint[];
}

export interface ValidationIssue {
  field: string;
  message: string;
}
