// Thin typed client over the preview service. The UI never computes
// pixels itself: every preview image comes back from these endpoints.

export interface PreviewSample {
  png_base64: string;
  label: string;
}

export interface JobStatus {
  job_id: string;
  state: "queued" | "running" | "done" | "failed";
  produced: number;
  total: number;
  skips: number;
  error: string | null;
}

export interface ApiError {
  status: number;
  errors: { path: string; message: string }[];
}

export class ServiceClient {
  constructor(
    private baseUrl: string = "",
    private fetchFn: typeof fetch = fetch.bind(globalThis),
  ) {}

  private async parseError(res: Response): Promise<ApiError> {
    let errors: ApiError["errors"] = [];
    try {
      const body = (await res.json()) as Record<string, unknown>;
      if (Array.isArray(body.errors)) {
        errors = body.errors as ApiError["errors"];
      } else if (typeof body.error === "string") {
        errors = [{ path: "", message: body.error }];
      }
    } catch {
      errors = [{ path: "", message: res.statusText }];
    }
    return { status: res.status, errors };
  }

  private async postMultipart(url: string, file: File | Blob, name: string) {
    const form = new FormData();
    form.append("file", file, name);
    const res = await this.fetchFn(`${this.baseUrl}${url}`, {
      method: "POST",
      body: form,
    });
    if (!res.ok) throw await this.parseError(res);
    return res.json();
  }

  async uploadFont(file: File | Blob, name: string): Promise<{ font_id: string; family_name: string }> {
    return this.postMultipart("/api/fonts", file, name);
  }

  async uploadCorpus(file: File | Blob, name: string): Promise<{ corpus_id: string; chars: number }> {
    return this.postMultipart("/api/corpus", file, name);
  }

  async preview(config: Record<string, unknown>, count: number): Promise<PreviewSample[]> {
    const res = await this.fetchFn(`${this.baseUrl}/api/preview`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ config, count }),
    });
    if (!res.ok) throw await this.parseError(res);
    return res.json();
  }

  async startJob(config: Record<string, unknown>): Promise<string> {
    const res = await this.fetchFn(`${this.baseUrl}/api/jobs`, {
      method: "POST",
      headers: { "content-type": "application/json" },
      body: JSON.stringify({ config }),
    });
    if (!res.ok) throw await this.parseError(res);
    const body = (await res.json()) as { job_id: string };
    return body.job_id;
  }

  async jobStatus(jobId: string): Promise<JobStatus> {
    const res = await this.fetchFn(`${this.baseUrl}/api/jobs/${jobId}`);
    if (!res.ok) throw await this.parseError(res);
    return res.json();
  }

  async cancelJob(jobId: string): Promise<void> {
    await this.fetchFn(`${this.baseUrl}/api/jobs/${jobId}`, { method: "DELETE" });
  }

  archiveUrl(jobId: string): string {
    return `${this.baseUrl}/api/jobs/${jobId}/archive`;
  }
}

export function pngDataUrl(sample: PreviewSample): string {
  return `data:image/png;base64,${sample.png_base64}`;
}
