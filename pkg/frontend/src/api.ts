/**
 * Thin typed client over the gateway HTTP API. Every call returns the parsed
 * body plus the raw response text so views can render numbers verbatim and
 * surface gateway error bodies unchanged.
 */

import { parseWithRaw, RawIndex } from "./jsonraw.js";

export interface ApiResponse<T> {
  status: number;
  text: string;
  data: T;
  raw: RawIndex;
}

export class ApiError extends Error {
  constructor(
    public readonly status: number,
    public readonly body: string,
  ) {
    super(`gateway returned ${status}: ${body}`);
  }
}

type FetchLike = (input: string, init?: RequestInit) => Promise<Response>;

export class WorkbenchClient {
  constructor(
    private readonly base: string = "",
    private readonly fetchFn: FetchLike = (input, init) => fetch(input, init),
  ) {}

  private async request<T>(
    method: string,
    path: string,
    body?: BodyInit | null,
    headers?: Record<string, string>,
  ): Promise<ApiResponse<T>> {
    const response = await this.fetchFn(`${this.base}${path}`, {
      method,
      body: body ?? undefined,
      headers,
    });
    const text = await response.text();
    if (!response.ok) {
      throw new ApiError(response.status, text);
    }
    const { data, raw } = parseWithRaw<T>(text);
    return { status: response.status, text, data, raw };
  }

  private postJson<T>(path: string, payload: unknown): Promise<ApiResponse<T>> {
    return this.request<T>("POST", path, JSON.stringify(payload), {
      "Content-Type": "application/json",
    });
  }

  uploadMicroservice<T>(form: FormData): Promise<ApiResponse<T>> {
    return this.request<T>("POST", "/microservices", form);
  }

  publishMicroservice<T>(id: string): Promise<ApiResponse<T>> {
    return this.request<T>("POST", `/microservices/${id}/publish`, null);
  }

  listMicroservices<T>(query = ""): Promise<ApiResponse<T>> {
    const suffix = query ? `?query=${encodeURIComponent(query)}` : "";
    return this.request<T>("GET", `/microservices${suffix}`);
  }

  getMicroservice<T>(id: string): Promise<ApiResponse<T>> {
    return this.request<T>("GET", `/microservices/${id}`);
  }

  uploadDataset<T>(form: FormData): Promise<ApiResponse<T>> {
    return this.request<T>("POST", "/datasets", form);
  }

  createPipeline<T>(payload: {
    dataset_id: string;
    goal: string;
    mode?: string;
    k?: number;
    user?: string;
  }): Promise<ApiResponse<T>> {
    return this.postJson<T>("/pipelines", payload);
  }

  submitSelections<T>(pipelineId: string, choices: Record<string, string>): Promise<ApiResponse<T>> {
    return this.postJson<T>(`/pipelines/${pipelineId}/selections`, { choices });
  }

  executePipeline<T>(pipelineId: string): Promise<ApiResponse<T>> {
    return this.postJson<T>(`/pipelines/${pipelineId}/execute`, {});
  }

  getPipeline<T>(pipelineId: string): Promise<ApiResponse<T>> {
    return this.request<T>("GET", `/pipelines/${pipelineId}`);
  }

  getRuns<T>(pipelineId: string): Promise<ApiResponse<T>> {
    return this.request<T>("GET", `/pipelines/${pipelineId}/runs`);
  }

  getJob<T>(jobId: string): Promise<ApiResponse<T>> {
    return this.request<T>("GET", `/jobs/${jobId}`);
  }

  artifactUrl(pipelineId: string): string {
    return `${this.base}/pipelines/${pipelineId}/artifact`;
  }
}
