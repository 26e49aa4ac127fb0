// Generate button, progress bar (1 s polling) and the download link that
// appears once the job's archive is ready.

import { JobStatus, ServiceClient } from "./api.js";
import { serializeConfig, UiConfigState, validate } from "./state.js";

export const POLL_INTERVAL_MS = 1000;

export class JobController {
  private jobId: string | null = null;
  private timer: ReturnType<typeof setTimeout> | null = null;
  private button: HTMLButtonElement;
  private bar: HTMLProgressElement;
  private status: HTMLElement;
  private download: HTMLAnchorElement;
  private errors: HTMLElement;

  constructor(
    root: HTMLElement,
    private client: ServiceClient,
    private getState: () => UiConfigState,
  ) {
    root.innerHTML = `
      <button id="generateBtn">Generate dataset</button>
      <progress id="jobProgress" value="0" max="1" hidden></progress>
      <span id="jobStatus" class="muted"></span>
      <a id="downloadLink" href="#" download="dataset.zip" hidden>Download dataset.zip</a>
      <div id="formErrors" class="errors"></div>
    `;
    this.button = root.querySelector("#generateBtn")!;
    this.bar = root.querySelector("#jobProgress")!;
    this.status = root.querySelector("#jobStatus")!;
    this.download = root.querySelector("#downloadLink")!;
    this.errors = root.querySelector("#formErrors")!;
    this.button.addEventListener("click", () => void this.launch());
  }

  // called on every config change: local validation gates the button
  refreshGate(): void {
    const problems = validate(this.getState());
    this.button.disabled = problems.length > 0 || this.jobId !== null;
    this.errors.innerHTML = "";
    for (const p of problems) {
      const line = document.createElement("div");
      line.className = "error-line";
      line.dataset.path = p.path;
      line.textContent = `${p.path}: ${p.message}`;
      this.errors.append(line);
    }
  }

  async launch(): Promise<void> {
    const state = this.getState();
    if (validate(state).length > 0) return;
    this.button.disabled = true;
    this.download.hidden = true;
    this.status.textContent = "starting…";
    try {
      this.jobId = await this.client.startJob(serializeConfig(state));
      this.bar.hidden = false;
      this.poll();
    } catch (err) {
      // surface the service's field-path errors inline
      const messages = (err as { errors?: { path: string; message: string }[] }).errors ?? [];
      this.errors.innerHTML = "";
      for (const m of messages) {
        const line = document.createElement("div");
        line.className = "error-line";
        line.dataset.path = m.path;
        line.textContent = `${m.path}: ${m.message}`;
        this.errors.append(line);
      }
      this.status.textContent = "rejected by service";
      this.jobId = null;
      this.refreshGate();
    }
  }

  private poll(): void {
    if (this.jobId === null) return;
    this.timer = setTimeout(async () => {
      if (this.jobId === null) return;
      let status: JobStatus;
      try {
        status = await this.client.jobStatus(this.jobId);
      } catch {
        this.status.textContent = "service unreachable";
        this.poll();
        return;
      }
      this.apply(status);
      if (status.state === "queued" || status.state === "running") this.poll();
    }, POLL_INTERVAL_MS);
  }

  apply(status: JobStatus): void {
    this.bar.max = Math.max(status.total, 1);
    this.bar.value = status.produced;
    if (status.state === "done") {
      this.status.textContent = `done · ${status.produced} samples`;
      this.download.href = this.client.archiveUrl(status.job_id);
      this.download.hidden = false;
      this.finish();
    } else if (status.state === "failed") {
      this.status.textContent = `failed: ${status.error ?? "unknown error"}`;
      this.finish();
    } else {
      this.status.textContent = `${status.produced}/${status.total}`;
    }
  }

  private finish(): void {
    this.jobId = null;
    this.bar.hidden = true;
    this.refreshGate();
  }

  dispose(): void {
    if (this.timer !== null) clearTimeout(this.timer);
    this.jobId = null;
  }
}
