import { ServiceClient } from "./api.js";
import { augmentationPanel, backgroundsPanel, fontsPanel, textPanel } from "./panels.js";
import { PreviewGrid } from "./preview.js";
import { JobController } from "./progress.js";
import { defaultState, exportState, importState, UiConfigState } from "./state.js";

const app = document.querySelector<HTMLDivElement>("#app")!;
app.innerHTML = `
  <header>
    <h1>Synthetic OCR dataset builder</h1>
    <div class="header-actions">
      <button id="exportCfg">Export config</button>
      <label class="import-label">Import config
        <input id="importCfg" type="file" accept=".json" hidden>
      </label>
    </div>
  </header>
  <main>
    <section id="panelText" class="panel"></section>
    <section id="panelFonts" class="panel"></section>
    <section id="panelBackgrounds" class="panel"></section>
    <section id="panelAugment" class="panel"></section>
    <section id="panelPreview" class="panel wide"></section>
    <section id="panelJob" class="panel wide"></section>
  </main>
`;

let state: UiConfigState = defaultState();
const client = new ServiceClient("");

const preview = new PreviewGrid(
  document.getElementById("panelPreview")!,
  client,
  () => state,
);
const job = new JobController(
  document.getElementById("panelJob")!,
  client,
  () => state,
);

function onChange(): void {
  state.dirty = true;
  job.refreshGate();
  preview.schedule();
}

function mountPanels(): void {
  textPanel(document.getElementById("panelText")!, state, client, onChange);
  fontsPanel(document.getElementById("panelFonts")!, state, client, onChange);
  backgroundsPanel(document.getElementById("panelBackgrounds")!, state, onChange);
  augmentationPanel(document.getElementById("panelAugment")!, state, onChange);
}

mountPanels();
job.refreshGate();

document.getElementById("exportCfg")!.addEventListener("click", () => {
  const blob = new Blob([exportState(state)], { type: "application/json" });
  const a = document.createElement("a");
  a.href = URL.createObjectURL(blob);
  a.download = "ocrforge-config.json";
  a.click();
  URL.revokeObjectURL(a.href);
});

document.getElementById("importCfg")!.addEventListener("change", async (ev) => {
  const input = ev.target as HTMLInputElement;
  const file = input.files?.[0];
  if (!file) return;
  state = importState(await file.text());
  mountPanels();
  onChange();
});
