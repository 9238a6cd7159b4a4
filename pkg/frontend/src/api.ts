/** Typed client for the review service HTTP API. */

import type { CiRow, NextItem, SessionInfo, Verdict } from "./types.js";

/** fetch-compatible function; tests inject fakes or failure modes. */
export type Transport = (url: string, init?: RequestInit) => Promise<Response>;

/** Server answered with a non-2xx status (semantic rejection). */
export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
    this.name = "ApiError";
  }
}

async function parseError(resp: Response): Promise<ApiError> {
  let detail = resp.statusText;
  try {
    const body = (await resp.json()) as { detail?: string };
    if (body.detail) detail = body.detail;
  } catch {
    // non-JSON error body
  }
  return new ApiError(resp.status, detail);
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly transport: Transport,
  ) {}

  private async request<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.transport(this.baseUrl + path, init);
    if (!resp.ok) throw await parseError(resp);
    return (await resp.json()) as T;
  }

  createSession(keywords: string[], n: number, seed: number): Promise<SessionInfo> {
    return this.request<SessionInfo>("/sessions", {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify({ keywords, n, seed }),
    });
  }

  nextItem(sessionId: string, keyword: string): Promise<NextItem> {
    return this.request<NextItem>(
      `/sessions/${sessionId}/next?keyword=${encodeURIComponent(keyword)}`,
    );
  }

  submitVerdict(sessionId: string, verdict: Verdict): Promise<CiRow> {
    return this.request<CiRow>(`/sessions/${sessionId}/verdicts`, {
      method: "POST",
      headers: { "Content-Type": "application/json" },
      body: JSON.stringify(verdict),
    });
  }

  summary(sessionId: string): Promise<CiRow[]> {
    return this.request<CiRow[]>(`/sessions/${sessionId}/summary`);
  }
}
