/** Thin typed client for the provisioning API. All numbers shown in the
 * console come from these responses; the console never computes physics. */

import type {
  AllocationDoc,
  PlanEnvelope,
  PlanRequest,
  PredictEnvelope,
  ScenarioDoc,
  ScenarioEnvelope,
} from "./types.js";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly detail: unknown,
  ) {
    super(`API error ${status}`);
  }
}

/** The scenario changed server-side since the caller last read it. */
export class ConflictError extends ApiError {
  constructor(detail: unknown, public readonly latest: number | null) {
    super(409, detail);
  }
}

type FetchLike = (url: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly baseUrl: string = "",
    private readonly fetchImpl: FetchLike = (...args) => fetch(...args),
  ) {}

  private async request<T>(method: string, path: string, body?: unknown): Promise<T> {
    const response = await this.fetchImpl(this.baseUrl + path, {
      method,
      headers: body === undefined ? undefined : { "content-type": "application/json" },
      body: body === undefined ? undefined : JSON.stringify(body),
    });
    const payload = await response.json();
    if (response.status === 409) {
      const latest =
        typeof payload?.detail?.latest === "number" ? payload.detail.latest : null;
      throw new ConflictError(payload.detail, latest);
    }
    if (!response.ok) {
      throw new ApiError(response.status, payload.detail ?? payload);
    }
    return payload as T;
  }

  getScenario(version?: number): Promise<ScenarioEnvelope> {
    const query = version === undefined ? "" : `?version=${version}`;
    return this.request("GET", `/scenario${query}`);
  }

  putScenario(baseVersion: number, scenario: ScenarioDoc): Promise<{ version: number }> {
    return this.request("PUT", "/scenario", { base_version: baseVersion, scenario });
  }

  plan(request: PlanRequest): Promise<PlanEnvelope> {
    return this.request("POST", "/plan", request);
  }

  predict(version: number, allocation: AllocationDoc): Promise<PredictEnvelope> {
    return this.request("POST", "/predict", { version, allocation });
  }
}
