// Thin typed client for the analysis service. Errors carry the service's
// diagnostic text verbatim so views can surface it unchanged.

import type {
  ApplyResponse,
  Assignment,
  BoundsCurvePayload,
  ConstraintPayload,
  DeltaPayload,
  MarginalsPayload,
  NetworkStatePayload,
  ParamRef,
  ParamSuggestResponse,
  QueryResult,
  RelevancePayload,
  SessionInfo,
  SoftevResponse,
  SolutionSpacePayload,
  SuggestResponse,
} from "./types.js";

export class ServiceError extends Error {
  constructor(message: string, readonly status: number) {
    super(message);
  }
}

export interface ConstraintRequest {
  target: Assignment;
  direction: "at_least" | "at_most";
  threshold: number;
  evidence?: Assignment;
}

export class ApiClient {
  constructor(private readonly base: string = "") {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const response = await fetch(this.base + path, {
      headers: { "Content-Type": "application/json" },
      ...init,
    });
    if (!response.ok) {
      let detail = response.statusText;
      try {
        const body = await response.json();
        if (typeof body.detail === "string") detail = body.detail;
        else if (body.detail) detail = JSON.stringify(body.detail);
      } catch {
        // keep statusText
      }
      throw new ServiceError(detail, response.status);
    }
    return response.json() as Promise<T>;
  }

  createSession(document: string): Promise<SessionInfo> {
    return this.request("/sessions", {
      method: "POST",
      body: JSON.stringify({ document }),
    });
  }

  networkState(sessionId: string): Promise<NetworkStatePayload> {
    return this.request(`/sessions/${sessionId}/network`);
  }

  setEvidence(sessionId: string, assignments: Assignment): Promise<{ evidence: Assignment }> {
    return this.request(`/sessions/${sessionId}/evidence`, {
      method: "PUT",
      body: JSON.stringify({ assignments }),
    });
  }

  clearEvidence(sessionId: string): Promise<{ evidence: Assignment }> {
    return this.request(`/sessions/${sessionId}/evidence`, { method: "DELETE" });
  }

  query(sessionId: string, target: Assignment, evidence?: Assignment): Promise<QueryResult> {
    return this.request(`/sessions/${sessionId}/query`, {
      method: "POST",
      body: JSON.stringify({ target, evidence }),
    });
  }

  marginals(sessionId: string): Promise<MarginalsPayload> {
    return this.request(`/sessions/${sessionId}/marginals`);
  }

  suggestParam(sessionId: string, constraint: ConstraintRequest): Promise<ParamSuggestResponse> {
    return this.request(`/sessions/${sessionId}/suggest/param`, {
      method: "POST",
      body: JSON.stringify(constraint),
    });
  }

  suggestCpt(sessionId: string, constraint: ConstraintRequest, variable: string): Promise<SuggestResponse> {
    return this.request(`/sessions/${sessionId}/suggest/cpt`, {
      method: "POST",
      body: JSON.stringify({ ...constraint, variable }),
    });
  }

  suggestTwoCpt(
    sessionId: string,
    constraint: ConstraintRequest,
    variableX: string,
    variableY: string,
  ): Promise<SuggestResponse> {
    return this.request(`/sessions/${sessionId}/suggest/two-cpt`, {
      method: "POST",
      body: JSON.stringify({ ...constraint, variable_x: variableX, variable_y: variableY }),
    });
  }

  relevance(sessionId: string, constraint: ConstraintRequest): Promise<RelevancePayload> {
    return this.request(`/sessions/${sessionId}/relevance`, {
      method: "POST",
      body: JSON.stringify(constraint),
    });
  }

  softev(
    sessionId: string,
    constraint: ConstraintRequest,
    hosts: string[],
    attach: boolean,
  ): Promise<SoftevResponse> {
    return this.request(`/sessions/${sessionId}/softev`, {
      method: "POST",
      body: JSON.stringify({ ...constraint, hosts, attach }),
    });
  }

  solutionSpace(
    sessionId: string,
    constraint: ConstraintRequest,
    cpts: string[],
    samples = 256,
  ): Promise<SolutionSpacePayload> {
    const body: Record<string, unknown> = { ...constraint, samples };
    if (cpts.length === 1) body.cpt = cpts[0];
    else body.two_cpt = cpts;
    return this.request(`/sessions/${sessionId}/solution-space`, {
      method: "POST",
      body: JSON.stringify(body),
    });
  }

  apply(sessionId: string, deltas: Pick<DeltaPayload, "param" | "delta">[]): Promise<ApplyResponse> {
    return this.request(`/sessions/${sessionId}/apply`, {
      method: "POST",
      body: JSON.stringify({ deltas }),
    });
  }

  undo(sessionId: string): Promise<ApplyResponse> {
    return this.request(`/sessions/${sessionId}/undo`, { method: "POST" });
  }

  setLock(sessionId: string, param: ParamRef, locked: boolean): Promise<{ param: ParamRef; locked: boolean }> {
    return this.request(`/sessions/${sessionId}/locks`, {
      method: "PUT",
      body: JSON.stringify({ param, locked }),
    });
  }

  bounds(d: number, points = 101): Promise<BoundsCurvePayload> {
    return this.request(`/bounds?d=${encodeURIComponent(d)}&points=${points}`);
  }
}

export type { ConstraintPayload };
