import type {
  AnimationDoc,
  AttributeDocument,
  ProfileDoc,
  ReportDoc,
  SkeletonJoint,
  ValidationIssue,
} from "./types.js";

export class ApiError extends Error {
  status: number;
  issues: ValidationIssue[];
  stage?: string;

  constructor(status: number, message: string, issues: ValidationIssue[] = [], stage?: string) {
    super(message);
    this.status = status;
    this.issues = issues;
    this.stage = stage;
  }
}

async function raiseFor(resp: Response): Promise<never> {
  let message = `${resp.status} ${resp.statusText}`;
  let issues: ValidationIssue[] = [];
  let stage: string | undefined;
  try {
    const body = await resp.json();
    if (Array.isArray(body.errors)) {
      issues = body.errors;
      message = issues.map((i) => `${i.field}: ${i.message}`).join("; ");
    } else if (typeof body.error === "string") {
      message = body.error;
      stage = body.stage;
    }
  } catch {
    // keep the status text
  }
  throw new ApiError(resp.status, message, issues, stage);
}

export class StudioApi {
  constructor(private base: string = "") {}

  private async get<T>(path: string): Promise<T> {
    const resp = await fetch(this.base + path);
    if (!resp.ok) await raiseFor(resp);
    return resp.json() as Promise<T>;
  }

  private async send<T>(method: string, path: string, payload?: unknown): Promise<T> {
    const resp = await fetch(this.base + path, {
      method,
      headers: { "Content-Type": "application/json" },
      body: payload === undefined ? undefined : JSON.stringify(payload),
    });
    if (!resp.ok) await raiseFor(resp);
    return resp.json() as Promise<T>;
  }

  createSession(sample: unknown, exemplar: unknown, threshold?: number): Promise<{ id: string }> {
    const body: Record<string, unknown> = { sample, exemplar };
    if (threshold !== undefined) body.config = { threshold };
    return this.send("POST", "/sessions", body);
  }

  getReport(sessionId: string): Promise<ReportDoc> {
    return this.get(`/sessions/${sessionId}/report`);
  }

  addAttribute(sessionId: string, doc: AttributeDocument): Promise<ReportDoc> {
    return this.send("POST", `/sessions/${sessionId}/attributes`, doc);
  }

  getAnimation(sessionId: string, suggestionId: string): Promise<AnimationDoc> {
    return this.get(`/sessions/${sessionId}/animations/${suggestionId}`);
  }

  getProfile(sessionId: string): Promise<{ sample: ProfileDoc; exemplar: ProfileDoc }> {
    return this.get(`/sessions/${sessionId}/profile`);
  }

  getSkeleton(): Promise<SkeletonJoint[]> {
    return this.get("/skeleton");
  }

  deleteSession(sessionId: string): Promise<{ deleted: boolean }> {
    return this.send("DELETE", `/sessions/${sessionId}`);
  }
}
