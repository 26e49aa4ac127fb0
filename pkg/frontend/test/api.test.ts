import { describe, expect, it } from "vitest";
import { pngDataUrl, ServiceClient } from "../src/api.js";

function fakeFetch(routes: Record<string, { status: number; body: unknown }>) {
  const seen: { url: string; init?: RequestInit }[] = [];
  const fn = (async (url: string, init?: RequestInit) => {
    seen.push({ url, init });
    const route = routes[`${init?.method ?? "GET"} ${url}`];
    if (!route) throw new Error(`no route for ${url}`);
    return {
      ok: route.status >= 200 && route.status < 300,
      status: route.status,
      statusText: String(route.status),
      json: async () => route.body,
    } as Response;
  }) as unknown as typeof fetch;
  return { fn, seen };
}

describe("ServiceClient", () => {
  it("posts preview requests with config and count", async () => {
    const { fn, seen } = fakeFetch({
      "POST /api/preview": { status: 200, body: [{ png_base64: "QUJD", label: "x" }] },
    });
    const client = new ServiceClient("", fn);
    const samples = await client.preview({ seed: 42 }, 8);
    expect(samples).toHaveLength(1);
    const sent = JSON.parse(String(seen[0].init?.body));
    expect(sent).toEqual({ config: { seed: 42 }, count: 8 });
  });

  it("surfaces 422 field paths", async () => {
    const { fn } = fakeFetch({
      "POST /api/jobs": {
        status: 422,
        body: { errors: [{ path: "fonts[].percentage", message: "percentages sum to 110, expected 100" }] },
      },
    });
    const client = new ServiceClient("", fn);
    await expect(client.startJob({})).rejects.toMatchObject({
      status: 422,
      errors: [{ path: "fonts[].percentage", message: expect.stringContaining("110") }],
    });
  });

  it("maps job endpoints", async () => {
    const { fn, seen } = fakeFetch({
      "POST /api/jobs": { status: 200, body: { job_id: "j1" } },
      "GET /api/jobs/j1": {
        status: 200,
        body: { job_id: "j1", state: "running", produced: 5, total: 10, skips: 0, error: null },
      },
    });
    const client = new ServiceClient("", fn);
    const id = await client.startJob({ count: 10 });
    expect(id).toBe("j1");
    const status = await client.jobStatus(id);
    expect(status.state).toBe("running");
    expect(client.archiveUrl(id)).toBe("/api/jobs/j1/archive");
    expect(seen.map((s) => s.url)).toEqual(["/api/jobs", "/api/jobs/j1"]);
  });

  it("builds data urls for the preview grid", () => {
    expect(pngDataUrl({ png_base64: "QUJD", label: "x" })).toBe("data:image/png;base64,QUJD");
  });
});
