// UI configuration state: mirrors the service's JSON config schema
// field-for-field, plus UI-only bookkeeping (dirty flag, preview count).
// serializeConfig() must emit exactly the schema the service validates,
// so previews and launched jobs always see the same document.

export type SegmentationMode = "char" | "word" | "ngram" | "sentence" | "line";
export type Direction = "rtl" | "ltr";
export type OutputFormat = "crnn" | "trocr" | "csv" | "huggingface";

export const TRANSFORMS = [
  "rotation",
  "skew",
  "gaussian_blur",
  "motion_blur",
  "gaussian_noise",
  "salt_pepper",
  "jpeg",
  "resolution",
  "brightness",
  "contrast",
] as const;
export type TransformKind = (typeof TRANSFORMS)[number];

export interface FontRow {
  fontId: string;
  familyName: string;
  percentage: number;
}

export interface BackgroundRow {
  kind: "color" | "image";
  color: string; // #RRGGBB
  imageId: string | null;
  percentage: number;
}

export interface UiConfigState {
  corpusId: string | null;
  corpusChars: number;
  mode: SegmentationMode;
  minGraphemes: number;
  maxGraphemes: number;
  direction: Direction;
  scriptRanges: string[]; // "0600-06FF" strings
  fonts: FontRow[];
  sizeMin: number;
  sizeMax: number;
  sizeDistribution: "normal" | "uniform";
  backgrounds: BackgroundRow[];
  augProbability: number;
  augMaxTransforms: number;
  augEnabled: Record<TransformKind, boolean>;
  seed: number;
  count: number;
  width: number;
  height: number;
  format: OutputFormat;
  splitRatio: number;
  // UI-only
  previewCount: number;
  dirty: boolean;
}

export const KASHMIRI_RANGES = [
  "0020-007F",
  "0600-06FF",
  "0750-077F",
  "08A0-08FF",
  "2000-206F",
];

export const BACKGROUND_SWATCHES: Record<string, string> = {
  white: "#FFFFFF",
  aged: "#F5E8C8",
  book: "#F0EAD6",
  news: "#E8E4D8",
  parchment: "#F0E2C0",
};

export function defaultState(): UiConfigState {
  const enabled = {} as Record<TransformKind, boolean>;
  for (const t of TRANSFORMS) enabled[t] = true;
  return {
    corpusId: null,
    corpusChars: 0,
    mode: "word",
    minGraphemes: 1,
    maxGraphemes: 50,
    direction: "rtl",
    scriptRanges: [...KASHMIRI_RANGES],
    fonts: [],
    sizeMin: 28,
    sizeMax: 42,
    sizeDistribution: "normal",
    backgrounds: [{ kind: "color", color: "#FFFFFF", imageId: null, percentage: 100 }],
    augProbability: 0.7,
    augMaxTransforms: 4,
    augEnabled: enabled,
    seed: 42,
    count: 1000,
    width: 256,
    height: 64,
    format: "crnn",
    splitRatio: 0.9,
    previewCount: 8,
    dirty: false,
  };
}

export function fontPercentageSum(state: UiConfigState): number {
  return state.fonts.reduce((acc, f) => acc + f.percentage, 0);
}

export function backgroundPercentageSum(state: UiConfigState): number {
  return state.backgrounds.reduce((acc, b) => acc + b.percentage, 0);
}

export interface FieldError {
  path: string;
  message: string;
}

// Mirror of the service-side semantic checks the UI can catch before a
// round trip.  The Generate button stays disabled while this is non-empty.
export function validate(state: UiConfigState): FieldError[] {
  const errors: FieldError[] = [];
  if (!state.corpusId) {
    errors.push({ path: "corpus", message: "upload a corpus file first" });
  }
  if (state.fonts.length === 0) {
    errors.push({ path: "fonts", message: "upload at least one font" });
  } else {
    const sum = fontPercentageSum(state);
    if (Math.abs(sum - 100) > 0.01) {
      errors.push({
        path: "fonts[].percentage",
        message: `percentages sum to ${round2(sum)}, expected 100`,
      });
    }
  }
  if (state.backgrounds.length > 1) {
    const sum = backgroundPercentageSum(state);
    if (Math.abs(sum - 100) > 0.01) {
      errors.push({
        path: "background.options[].percentage",
        message: `mix percentages sum to ${round2(sum)}, expected 100`,
      });
    }
  }
  if (state.count < 1) errors.push({ path: "count", message: "count must be >= 1" });
  if (state.minGraphemes < 1 || state.minGraphemes > state.maxGraphemes) {
    errors.push({ path: "segmentation.min_graphemes", message: "need 1 <= min <= max" });
  }
  if (state.sizeMin < 1 || state.sizeMin > state.sizeMax) {
    errors.push({ path: "size.min", message: "need 1 <= min <= max" });
  }
  if (state.splitRatio <= 0 || state.splitRatio >= 1) {
    errors.push({ path: "split_ratio", message: "must be between 0 and 1" });
  }
  if (!TRANSFORMS.some((t) => state.augEnabled[t]) && state.augProbability > 0) {
    errors.push({ path: "augmentation.enabled", message: "enable at least one transform or set probability to 0" });
  }
  return errors;
}

function round2(v: number): number {
  return Math.round(v * 100) / 100;
}

// The exact document POSTed to /api/preview and /api/jobs.
export function serializeConfig(state: UiConfigState): Record<string, unknown> {
  const background =
    state.backgrounds.length === 1
      ? serializeBackground(state.backgrounds[0])
      : {
          mode: "mix",
          options: state.backgrounds.map((b) => ({
            ...serializeBackground(b),
            percentage: b.percentage,
          })),
        };
  return {
    corpus: state.corpusId ? `upload:${state.corpusId}` : "",
    fonts: state.fonts.map((f) => ({
      path: `upload:${f.fontId}`,
      percentage: f.percentage,
    })),
    count: state.count,
    seed: state.seed,
    width: state.width,
    height: state.height,
    segmentation: {
      mode: state.mode,
      min_graphemes: state.minGraphemes,
      max_graphemes: state.maxGraphemes,
    },
    script_ranges: [...state.scriptRanges],
    size: {
      min: state.sizeMin,
      max: state.sizeMax,
      distribution: state.sizeDistribution,
    },
    background,
    augmentation: {
      probability: state.augProbability,
      max_transforms: state.augMaxTransforms,
      enabled: TRANSFORMS.filter((t) => state.augEnabled[t]),
    },
    direction: state.direction,
    split_ratio: state.splitRatio,
    format: state.format,
    storage: { mode: "zip", batch_size: 10000 },
  };
}

function serializeBackground(row: BackgroundRow): Record<string, unknown> {
  if (row.kind === "image" && row.imageId) {
    return { mode: "image", path: `upload:${row.imageId}` };
  }
  return { mode: "color", color: row.color };
}

// Round trip used by the export/import-config buttons: importing an
// exported document must restore identical UI state.
export function exportState(state: UiConfigState): string {
  const { dirty, ...rest } = state;
  return JSON.stringify(rest, null, 2);
}

export function importState(text: string): UiConfigState {
  const parsed = JSON.parse(text) as Omit<UiConfigState, "dirty">;
  const base = defaultState();
  return { ...base, ...parsed, dirty: false };
}
