// Preview grid: always the first 8 slots of the eventual dataset, fetched
// from the service 300 ms after the last config change (latest wins; at
// most one request in flight).

import { pngDataUrl, PreviewSample, ServiceClient } from "./api.js";
import { debounce, Debounced, PREVIEW_DEBOUNCE_MS } from "./debounce.js";
import { serializeConfig, UiConfigState, validate } from "./state.js";

export class PreviewGrid {
  private generation = 0;
  private refreshDebounced: Debounced<[]>;
  private statusEl: HTMLElement;
  private gridEl: HTMLElement;

  constructor(
    root: HTMLElement,
    private client: ServiceClient,
    private getState: () => UiConfigState,
  ) {
    root.innerHTML = `
      <div class="panel-title">Live preview
        <span id="previewStatus" class="muted"></span>
      </div>
      <div id="previewGrid" class="preview-grid"></div>
    `;
    this.statusEl = root.querySelector("#previewStatus")!;
    this.gridEl = root.querySelector("#previewGrid")!;
    this.refreshDebounced = debounce(() => void this.refresh(), PREVIEW_DEBOUNCE_MS);
  }

  schedule(): void {
    this.refreshDebounced();
  }

  async refresh(): Promise<void> {
    const state = this.getState();
    if (validate(state).length > 0) {
      this.statusEl.textContent = "— fix configuration to preview";
      return;
    }
    const mine = ++this.generation;
    this.statusEl.textContent = "rendering…";
    try {
      const samples = await this.client.preview(serializeConfig(state), state.previewCount);
      if (mine !== this.generation) return; // a newer request superseded us
      this.render(samples);
      this.statusEl.textContent = "";
    } catch (err) {
      if (mine !== this.generation) return;
      const messages = (err as { errors?: { path: string; message: string }[] }).errors ?? [];
      this.statusEl.textContent =
        "preview failed: " + (messages[0]?.message ?? "service unreachable");
    }
  }

  render(samples: PreviewSample[]): void {
    this.gridEl.innerHTML = "";
    for (const sample of samples) {
      const cell = document.createElement("figure");
      cell.className = "preview-cell";
      const img = document.createElement("img");
      img.src = pngDataUrl(sample);
      img.alt = sample.label;
      const caption = document.createElement("figcaption");
      caption.dir = "auto";
      caption.textContent = sample.label;
      cell.append(img, caption);
      this.gridEl.append(cell);
    }
  }
}
