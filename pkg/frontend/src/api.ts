import type {
  AdaptationResponse,
  FrameBatchRequest,
  PreferencesPayload,
  StatsResponse,
} from "./types.js";

export type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiError extends Error {
  constructor(
    public status: number,
    public body: unknown
  ) {
    super(`service responded ${status}`);
  }
}

export class ApiClient {
  constructor(
    private baseUrl: string,
    private fetchImpl: FetchLike = (...args) => fetch(...args)
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const resp = await this.fetchImpl(`${this.baseUrl}${path}`, {
      method,
      headers: body === undefined ? undefined : { "Content-Type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const data = await resp.json().catch(() => null);
    if (!resp.ok) throw new ApiError(resp.status, data);
    return data as T;
  }

  createSession(preferences?: PreferencesPayload): Promise<{ session_id: string }> {
    return this.request("POST", "/sessions", preferences ? { preferences } : {});
  }

  submitFrames(sessionId: string, batch: FrameBatchRequest): Promise<AdaptationResponse> {
    return this.request("POST", `/sessions/${sessionId}/frames`, batch);
  }

  getAdaptation(sessionId: string): Promise<AdaptationResponse> {
    return this.request("GET", `/sessions/${sessionId}/adaptation`);
  }

  updatePreferences(
    sessionId: string,
    prefs: PreferencesPayload
  ): Promise<AdaptationResponse> {
    return this.request("PUT", `/sessions/${sessionId}/preferences`, prefs);
  }

  getStats(sessionId: string, fromTs?: number, toTs?: number): Promise<StatsResponse> {
    const params = new URLSearchParams();
    if (fromTs !== undefined) params.set("from", String(fromTs));
    if (toTs !== undefined) params.set("to", String(toTs));
    const qs = params.toString();
    return this.request("GET", `/sessions/${sessionId}/stats${qs ? `?${qs}` : ""}`);
  }
}
