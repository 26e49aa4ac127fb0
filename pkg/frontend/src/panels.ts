// The four settings panels.  Every control mutates the shared state and
// calls onChange(), which marks the config dirty and re-arms the preview.

import { ServiceClient } from "./api.js";
import {
  BACKGROUND_SWATCHES,
  BackgroundRow,
  fontPercentageSum,
  KASHMIRI_RANGES,
  TRANSFORMS,
  TransformKind,
  UiConfigState,
} from "./state.js";

type OnChange = () => void;

function labeled(label: string, control: HTMLElement): HTMLElement {
  const wrap = document.createElement("label");
  wrap.className = "field";
  const span = document.createElement("span");
  span.textContent = label;
  wrap.append(span, control);
  return wrap;
}

function numberInput(value: number, min: number, max: number, step: number,
                     onInput: (v: number) => void): HTMLInputElement {
  const el = document.createElement("input");
  el.type = "number";
  el.min = String(min);
  el.max = String(max);
  el.step = String(step);
  el.value = String(value);
  el.addEventListener("input", () => onInput(Number(el.value)));
  return el;
}

function select<T extends string>(options: readonly T[], value: T,
                                  onInput: (v: T) => void): HTMLSelectElement {
  const el = document.createElement("select");
  for (const opt of options) {
    const o = document.createElement("option");
    o.value = opt;
    o.textContent = opt;
    if (opt === value) o.selected = true;
    el.append(o);
  }
  el.addEventListener("input", () => onInput(el.value as T));
  return el;
}

export function textPanel(root: HTMLElement, state: UiConfigState,
                          client: ServiceClient, onChange: OnChange): void {
  root.innerHTML = `<div class="panel-title">Text</div>`;
  const upload = document.createElement("input");
  upload.type = "file";
  upload.accept = ".txt,text/plain";
  const info = document.createElement("span");
  info.className = "muted";
  info.id = "corpusInfo";
  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) return;
    try {
      const res = await client.uploadCorpus(file, file.name);
      state.corpusId = res.corpus_id;
      state.corpusChars = res.chars;
      info.textContent = `${file.name} · ${res.chars} chars`;
      onChange();
    } catch {
      info.textContent = "upload failed";
    }
  });
  root.append(labeled("Corpus file", upload), info);

  root.append(
    labeled("Segmentation", select(
      ["char", "word", "ngram", "sentence", "line"] as const, state.mode,
      (v) => { state.mode = v; onChange(); },
    )),
    labeled("Min graphemes", numberInput(state.minGraphemes, 1, 500, 1,
      (v) => { state.minGraphemes = v; onChange(); })),
    labeled("Max graphemes", numberInput(state.maxGraphemes, 1, 500, 1,
      (v) => { state.maxGraphemes = v; onChange(); })),
    labeled("Direction", select(["rtl", "ltr"] as const, state.direction,
      (v) => { state.direction = v; onChange(); })),
    labeled("Script ranges", select(["kashmiri", "latin"] as const,
      state.scriptRanges.length === 1 ? "latin" : "kashmiri",
      (v) => {
        state.scriptRanges = v === "latin" ? ["0020-007F"] : [...KASHMIRI_RANGES];
        onChange();
      })),
    labeled("Seed", numberInput(state.seed, 0, 2 ** 31 - 1, 1,
      (v) => { state.seed = v; onChange(); })),
    labeled("Samples", numberInput(state.count, 1, 1_000_000, 1,
      (v) => { state.count = v; onChange(); })),
  );
}

export function fontsPanel(root: HTMLElement, state: UiConfigState,
                           client: ServiceClient, onChange: OnChange): void {
  root.innerHTML = `<div class="panel-title">Fonts</div>`;
  const upload = document.createElement("input");
  upload.type = "file";
  upload.accept = ".ttf,.otf";
  const list = document.createElement("div");
  list.id = "fontList";
  const sumEl = document.createElement("div");
  sumEl.id = "fontSum";

  const renderList = () => {
    list.innerHTML = "";
    for (const row of state.fonts) {
      const line = document.createElement("div");
      line.className = "font-row";
      const name = document.createElement("span");
      name.textContent = row.familyName;
      const slider = document.createElement("input");
      slider.type = "range";
      slider.min = "1";
      slider.max = "100";
      slider.step = "0.5";
      slider.value = String(row.percentage);
      const pct = document.createElement("span");
      pct.textContent = `${row.percentage}%`;
      slider.addEventListener("input", () => {
        row.percentage = Number(slider.value);
        pct.textContent = `${row.percentage}%`;
        renderSum();
        onChange();
      });
      const remove = document.createElement("button");
      remove.textContent = "×";
      remove.addEventListener("click", () => {
        state.fonts = state.fonts.filter((f) => f !== row);
        renderList();
        renderSum();
        onChange();
      });
      line.append(name, slider, pct, remove);
      list.append(line);
    }
  };

  const renderSum = () => {
    const sum = fontPercentageSum(state);
    const ok = Math.abs(sum - 100) <= 0.01;
    sumEl.textContent = state.fonts.length
      ? `total ${Math.round(sum * 100) / 100}%` + (ok ? "" : " — must equal 100%")
      : "no fonts uploaded";
    sumEl.className = ok ? "sum-ok" : "sum-bad";
  };

  upload.addEventListener("change", async () => {
    const file = upload.files?.[0];
    if (!file) return;
    const res = await client.uploadFont(file, file.name);
    const share = state.fonts.length === 0 ? 100 : 0;
    state.fonts.push({ fontId: res.font_id, familyName: res.family_name, percentage: share });
    renderList();
    renderSum();
    onChange();
  });

  root.append(labeled("Add font (.ttf/.otf)", upload), list, sumEl);
  root.append(
    labeled("Size min", numberInput(state.sizeMin, 1, 200, 1,
      (v) => { state.sizeMin = v; onChange(); })),
    labeled("Size max", numberInput(state.sizeMax, 1, 200, 1,
      (v) => { state.sizeMax = v; onChange(); })),
    labeled("Size distribution", select(["normal", "uniform"] as const,
      state.sizeDistribution, (v) => { state.sizeDistribution = v; onChange(); })),
  );
  renderSum();
}

export function backgroundsPanel(root: HTMLElement, state: UiConfigState,
                                 onChange: OnChange): void {
  root.innerHTML = `<div class="panel-title">Backgrounds</div>`;
  const list = document.createElement("div");

  const renderRows = () => {
    list.innerHTML = "";
    state.backgrounds.forEach((row, i) => {
      const line = document.createElement("div");
      line.className = "bg-row";
      const color = document.createElement("input");
      color.type = "color";
      color.value = row.color;
      color.addEventListener("input", () => {
        row.color = color.value.toUpperCase();
        onChange();
      });
      const pct = document.createElement("input");
      pct.type = "number";
      pct.min = "1";
      pct.max = "100";
      pct.value = String(row.percentage);
      pct.addEventListener("input", () => {
        row.percentage = Number(pct.value);
        onChange();
      });
      const remove = document.createElement("button");
      remove.textContent = "×";
      remove.disabled = state.backgrounds.length === 1;
      remove.addEventListener("click", () => {
        state.backgrounds.splice(i, 1);
        renderRows();
        onChange();
      });
      line.append(color, pct, remove);
      list.append(line);
    });
  };

  const swatches = document.createElement("div");
  swatches.className = "swatches";
  for (const [name, hex] of Object.entries(BACKGROUND_SWATCHES)) {
    const b = document.createElement("button");
    b.className = "swatch";
    b.title = name;
    b.style.background = hex;
    b.addEventListener("click", () => {
      const row: BackgroundRow = { kind: "color", color: hex, imageId: null, percentage: 0 };
      state.backgrounds.push(row);
      renderRows();
      onChange();
    });
    swatches.append(b);
  }

  root.append(swatches, list);
  renderRows();
}

export function augmentationPanel(root: HTMLElement, state: UiConfigState,
                                  onChange: OnChange): void {
  root.innerHTML = `<div class="panel-title">Augmentation</div>`;
  const prob = document.createElement("input");
  prob.type = "range";
  prob.min = "0";
  prob.max = "1";
  prob.step = "0.05";
  prob.value = String(state.augProbability);
  const probLabel = document.createElement("span");
  probLabel.textContent = `${Math.round(state.augProbability * 100)}%`;
  prob.addEventListener("input", () => {
    state.augProbability = Number(prob.value);
    probLabel.textContent = `${Math.round(state.augProbability * 100)}%`;
    onChange();
  });
  const probWrap = labeled("Augmented share", prob);
  probWrap.append(probLabel);
  root.append(
    probWrap,
    labeled("Max transforms", numberInput(state.augMaxTransforms, 1, 10, 1,
      (v) => { state.augMaxTransforms = v; onChange(); })),
  );

  const toggles = document.createElement("div");
  toggles.className = "transform-toggles";
  for (const kind of TRANSFORMS) {
    const wrap = document.createElement("label");
    const box = document.createElement("input");
    box.type = "checkbox";
    box.checked = state.augEnabled[kind];
    box.addEventListener("input", () => {
      state.augEnabled[kind as TransformKind] = box.checked;
      onChange();
    });
    const span = document.createElement("span");
    span.textContent = kind.split("_").join(" ");
    wrap.append(box, span);
    toggles.append(wrap);
  }
  root.append(toggles);
}
