/**
 * Thin typed client for the planning service. The fetch implementation is
 * injected so tests can run against a stubbed service.
 */

import type { CatalogResponse, ModelsResponse, RecommendDocument } from "./types.js";
import type { ScenarioState } from "./scenario.js";
import { toRequestBody } from "./scenario.js";

export type FetchLike = (
  url: string,
  init?: { method?: string; headers?: Record<string, string>; body?: string },
) => Promise<{ ok: boolean; status: number; json(): Promise<unknown> }>;

export class ApiError extends Error {
  constructor(
    readonly status: number,
    message: string,
  ) {
    super(message);
  }
}

export class ApiClient {
  constructor(
    private readonly baseUrl: string,
    private readonly fetchFn: FetchLike,
  ) {}

  private async get<T>(path: string): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path);
    if (!response.ok) {
      throw new ApiError(response.status, `GET ${path} failed (${response.status})`);
    }
    return (await response.json()) as T;
  }

  private async post<T>(path: string, body: unknown): Promise<T> {
    const response = await this.fetchFn(this.baseUrl + path, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(body),
    });
    if (!response.ok) {
      throw new ApiError(response.status, `POST ${path} failed (${response.status})`);
    }
    return (await response.json()) as T;
  }

  catalog(): Promise<CatalogResponse> {
    return this.get<CatalogResponse>("/api/v1/catalog");
  }

  models(): Promise<ModelsResponse> {
    return this.get<ModelsResponse>("/api/v1/models");
  }

  recommend(state: ScenarioState): Promise<RecommendDocument> {
    return this.post<RecommendDocument>("/api/v1/recommend", toRequestBody(state));
  }

  /** Re-run the same scenario at one alternative SLO point. */
  recommendAt(state: ScenarioState, slo: number): Promise<RecommendDocument> {
    return this.post<RecommendDocument>("/api/v1/recommend", {
      ...toRequestBody(state),
      slo_tps: slo,
    });
  }
}
