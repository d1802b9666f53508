import { describe, expect, it } from "vitest";

import { ApiError, WorkbenchClient } from "../src/api.js";

interface Captured {
  url: string;
  method?: string;
  body?: unknown;
  headers?: Record<string, string>;
}

function mockFetch(status: number, body: string) {
  const calls: Captured[] = [];
  const fetchFn = async (url: string, init?: RequestInit): Promise<Response> => {
    calls.push({
      url,
      method: init?.method,
      body: init?.body,
      headers: init?.headers as Record<string, string>,
    });
    return {
      ok: status >= 200 && status < 300,
      status,
      text: async () => body,
    } as Response;
  };
  return { calls, fetchFn };
}

describe("WorkbenchClient", () => {
  it("posts selections as {choices} to the selections endpoint", async () => {
    const { calls, fetchFn } = mockFetch(200, '{"pipeline": {"id": "p1"}}');
    const client = new WorkbenchClient("", fetchFn);
    await client.submitSelections("p1", { evaluation: "svc-b" });
    expect(calls[0].url).toBe("/pipelines/p1/selections");
    expect(calls[0].method).toBe("POST");
    expect(JSON.parse(calls[0].body as string)).toEqual({
      choices: { evaluation: "svc-b" },
    });
    expect(calls[0].headers?.["Content-Type"]).toBe("application/json");
  });

  it("surfaces gateway error bodies verbatim as ApiError", async () => {
    const body = '{"code": "IllegalStateTransition", "message": "pipeline p1 is draft, not ready", "agent": "catalog"}';
    const { fetchFn } = mockFetch(409, body);
    const client = new WorkbenchClient("", fetchFn);
    await expect(client.executePipeline("p1")).rejects.toMatchObject({
      status: 409,
      body,
    });
  });

  it("encodes catalog search queries", async () => {
    const { calls, fetchFn } = mockFetch(200, "[]");
    const client = new WorkbenchClient("", fetchFn);
    await client.listMicroservices("clean missing values");
    expect(calls[0].url).toBe("/microservices?query=clean%20missing%20values");
  });

  it("keeps raw response text available for verbatim rendering", async () => {
    const { fetchFn } = mockFetch(200, '{"x": 1.0}');
    const client = new WorkbenchClient("", fetchFn);
    const resp = await client.getJob<{ x: number }>("j1");
    expect(resp.text).toBe('{"x": 1.0}');
    expect(resp.raw.get("x")).toBe("1.0");
    expect(resp.data.x).toBe(1);
  });

  it("prefixes a configured base url", async () => {
    const { calls, fetchFn } = mockFetch(200, "{}");
    const client = new WorkbenchClient("http://localhost:8000", fetchFn);
    await client.getPipeline("p1");
    expect(calls[0].url).toBe("http://localhost:8000/pipelines/p1");
    expect(client.artifactUrl("p1")).toBe("http://localhost:8000/pipelines/p1/artifact");
  });

  it("ApiError message names the status", () => {
    const err = new ApiError(404, "missing");
    expect(err.message).toContain("404");
  });
});
