/** Thin typed client for the route assessment service. */

import type {
  AdvanceRequest,
  AssessRequest,
  AssessmentDoc,
  ErrorBody,
  PlanRequest,
  PlanResponse,
  SessionCreateRequest,
  SessionDoc,
} from "./types.js";

export class ServiceError extends Error {
  constructor(
    readonly status: number,
    readonly code: string,
    message: string,
    readonly detail: unknown = null,
  ) {
    super(message);
    this.name = "ServiceError";
  }
}

/** Stale-revision rejection; carries the revision the service is at now. */
export class ConflictError extends ServiceError {
  constructor(code: string, message: string, detail: unknown, readonly currentRevision: number) {
    super(409, code, message, detail);
    this.name = "ConflictError";
  }
}

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class Client {
  constructor(
    readonly baseUrl: string = "http://127.0.0.1:8000",
    private readonly fetchImpl: FetchLike = (url, init) => fetch(url, init),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const init: RequestInit = { method };
    if (body !== undefined) {
      init.headers = { "content-type": "application/json" };
      init.body = JSON.stringify(body);
    }
    const resp = await this.fetchImpl(this.baseUrl + path, init);
    if (!resp.ok) {
      let parsed: Partial<ErrorBody> = {};
      try {
        parsed = (await resp.json()) as ErrorBody;
      } catch {
        // non-JSON error body; fall back to the status line
      }
      const code = parsed.code ?? "http_error";
      const message = parsed.message ?? `service returned ${resp.status}`;
      const detail = parsed.detail ?? null;
      if (resp.status === 409) {
        const current = (detail as { currentRevision?: number } | null)?.currentRevision ?? -1;
        throw new ConflictError(code, message, detail, current);
      }
      throw new ServiceError(resp.status, code, message, detail);
    }
    return (await resp.json()) as T;
  }

  health(): Promise<{ status: string }> {
    return this.request("GET", "/healthz");
  }

  assess(req: AssessRequest): Promise<AssessmentDoc> {
    return this.request("POST", "/assess", req);
  }

  plan(req: PlanRequest): Promise<PlanResponse> {
    return this.request("POST", "/plan", req);
  }

  createSession(req: SessionCreateRequest): Promise<SessionDoc> {
    return this.request("POST", "/sessions", req);
  }

  getSession(sessionId: string): Promise<SessionDoc> {
    return this.request("GET", `/sessions/${encodeURIComponent(sessionId)}`);
  }

  advanceSession(sessionId: string, req: AdvanceRequest): Promise<SessionDoc> {
    return this.request("POST", `/sessions/${encodeURIComponent(sessionId)}/advance`, req);
  }
}
