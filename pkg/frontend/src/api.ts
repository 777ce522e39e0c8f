// Thin typed client for the roomforge HTTP API.

import type {
  JobStatus,
  RirPreviewResponse,
  RoomConfig,
  ScenarioConfig,
  ValidationReport,
  Vec3,
} from "./types";

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: unknown,
  ) {
    super(`API error ${status}`);
  }
}

export type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class ApiClient {
  constructor(
    private readonly base = "",
    private readonly fetchImpl: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async json<T>(path: string, init?: RequestInit): Promise<T> {
    const resp = await this.fetchImpl(this.base + path, init);
    const body = await resp.json();
    if (!resp.ok) {
      throw new ApiError(resp.status, body);
    }
    return body as T;
  }

  getScenario(): Promise<ScenarioConfig> {
    return this.json("/api/scenario");
  }

  putScenario(scenario: ScenarioConfig): Promise<ValidationReport> {
    return this.json("/api/scenario", {
      method: "PUT",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(scenario),
    });
  }

  previewRir(room: RoomConfig, src: Vec3, mic: Vec3, maxOrder?: number): Promise<RirPreviewResponse> {
    return this.json("/api/preview/rir", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ room, src, mic, max_order: maxOrder ?? null }),
    });
  }

  startJob(request: {
    scenario: ScenarioConfig;
    clean_root: string;
    noise_root: string;
    out_dir: string;
    seed: number;
    workers?: number;
  }): Promise<{ job_id: string }> {
    return this.json("/api/jobs", {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify(request),
    });
  }

  jobStatus(id: string): Promise<JobStatus> {
    return this.json(`/api/jobs/${id}`);
  }

  cancelJob(id: string): Promise<JobStatus> {
    return this.json(`/api/jobs/${id}`, { method: "DELETE" });
  }
}
