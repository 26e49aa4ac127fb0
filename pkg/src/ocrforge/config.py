"""Generator configuration: one dataclass covering the whole run.

The canonical JSON document round-trips losslessly (from_dict(to_dict(c))
== c) and is echoed verbatim into the dataset manifest, so a manifest is
always enough to reproduce its dataset.  Validation collects
(field_path, message) pairs instead of failing fast, which the HTTP service
surfaces as a 422 body.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace

from .augment import TRANSFORM_ORDER, AugmentationConfig
from .errors import ConfigValidationError
from .fonts import SizePolicy
from .renderer import ALIGNMENTS, DIRECTIONS, BackgroundSpec
from .textprep import MODES, KASHMIRI_DIACRITICS, KASHMIRI_RANGES, ScriptPolicy

OUTPUT_FORMATS = ("crnn", "trocr", "csv", "huggingface")
STORAGE_MODES = ("zip", "chunked", "files")

DEFAULT_MEMORY_BUDGET = 512 * 1024 * 1024

# Documented hex presets for common paper tones.
COLOR_PRESETS = {
    "white": (255, 255, 255),
    "aged": (245, 232, 200),
    "book": (240, 234, 214),
    "news": (232, 228, 216),
    "parchment": (240, 226, 192),
    "black": (0, 0, 0),
}


def parse_color(value: str) -> tuple[int, int, int]:
    """Accept '#RRGGBB' or a preset name."""
    if value in COLOR_PRESETS:
        return COLOR_PRESETS[value]
    if value.startswith("#") and len(value) == 7:
        try:
            return tuple(int(value[i : i + 2], 16) for i in (1, 3, 5))
        except ValueError:
            pass
    raise ValueError(f"invalid color {value!r}: use #RRGGBB or one of {sorted(COLOR_PRESETS)}")


def color_to_hex(color: tuple[int, int, int]) -> str:
    return "#%02X%02X%02X" % tuple(color)


def parse_range(value: str) -> tuple[int, int]:
    """Parse a 'HEXLO-HEXHI' code point interval."""
    lo, sep, hi = value.partition("-")
    if not sep:
        raise ValueError(f"invalid range {value!r}: expected HEXLO-HEXHI")
    return int(lo, 16), int(hi, 16)


def range_to_str(interval: tuple[int, int]) -> str:
    return f"{interval[0]:04X}-{interval[1]:04X}"


@dataclass(frozen=True)
class FontConfig:
    path: str
    percentage: float


@dataclass(frozen=True)
class GeneratorConfig:
    corpus_path: str
    fonts: tuple[FontConfig, ...]
    count: int
    seed: int = 42
    width: int = 256
    height: int = 64
    mode: str = "word"
    min_graphemes: int = 1
    max_graphemes: int = 50
    script_ranges: tuple[tuple[int, int], ...] = KASHMIRI_RANGES
    size_min: int = 28
    size_max: int = 42
    size_distribution: str = "normal"
    background: BackgroundSpec = field(default_factory=BackgroundSpec)
    augmentation: AugmentationConfig = field(default_factory=AugmentationConfig)
    text_color: tuple[int, int, int] = (0, 0, 0)
    direction: str = "rtl"
    alignment: str = "center"
    padding_left: int = 10
    padding_right: int = 10
    split_ratio: float = 0.9
    output_format: str = "crnn"
    storage_mode: str = "zip"
    batch_size: int = 10000
    memory_budget: int = DEFAULT_MEMORY_BUDGET
    workers: int = 1
    antialias: bool = True
    timestamp: bool = False

    def __post_init__(self) -> None:
        errors = validate_fields(self)
        if errors:
            raise ConfigValidationError(errors)

    # -- derived views ------------------------------------------------------

    def segmentation_config(self):
        from .textprep import SegmentationConfig

        return SegmentationConfig(
            mode=self.mode,
            min_graphemes=self.min_graphemes,
            max_graphemes=self.max_graphemes,
        )

    def script_policy(self) -> ScriptPolicy:
        preserved = frozenset(
            cp for cp in KASHMIRI_DIACRITICS
            if any(lo <= cp <= hi for lo, hi in self.script_ranges)
        )
        return ScriptPolicy(allowed_ranges=self.script_ranges, preserved_diacritics=preserved)

    def size_policy(self) -> SizePolicy:
        return SizePolicy(self.size_min, self.size_max, self.size_distribution)

    def with_(self, **kw) -> "GeneratorConfig":
        return replace(self, **kw)

    # -- canonical JSON -------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "corpus": self.corpus_path,
            "fonts": [
                {"path": f.path, "percentage": f.percentage} for f in self.fonts
            ],
            "count": self.count,
            "seed": self.seed,
            "width": self.width,
            "height": self.height,
            "segmentation": {
                "mode": self.mode,
                "min_graphemes": self.min_graphemes,
                "max_graphemes": self.max_graphemes,
            },
            "script_ranges": [range_to_str(r) for r in self.script_ranges],
            "size": {
                "min": self.size_min,
                "max": self.size_max,
                "distribution": self.size_distribution,
            },
            "background": _background_to_dict(self.background),
            "augmentation": {
                "probability": self.augmentation.probability,
                "max_transforms": self.augmentation.max_transforms,
                "enabled": list(self.augmentation.enabled),
                "rotation_max_degrees": self.augmentation.rotation_max_degrees,
                "skew_max": self.augmentation.skew_max,
                "blur_sigma": list(self.augmentation.blur_sigma),
                "motion_kernel": list(self.augmentation.motion_kernel),
                "noise_sigma": list(self.augmentation.noise_sigma),
                "salt_pepper_prob": list(self.augmentation.salt_pepper_prob),
                "jpeg_quality": list(self.augmentation.jpeg_quality),
                "resolution_scale": list(self.augmentation.resolution_scale),
                "brightness_delta": list(self.augmentation.brightness_delta),
                "contrast_gamma": list(self.augmentation.contrast_gamma),
            },
            "text_color": color_to_hex(self.text_color),
            "direction": self.direction,
            "alignment": self.alignment,
            "padding": {"left": self.padding_left, "right": self.padding_right},
            "split_ratio": self.split_ratio,
            "format": self.output_format,
            "storage": {"mode": self.storage_mode, "batch_size": self.batch_size},
            "memory_budget": self.memory_budget,
            "workers": self.workers,
            "antialias": self.antialias,
            "timestamp": self.timestamp,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n"

    @classmethod
    def from_dict(cls, data: dict) -> "GeneratorConfig":
        errors: list[tuple[str, str]] = []
        if not isinstance(data, dict):
            raise ConfigValidationError([("", "config must be a JSON object")])

        def take(path, default=None, expect=None):
            cur = data
            for part in path.split("."):
                if not isinstance(cur, dict) or part not in cur:
                    return default
                cur = cur[part]
            if expect is not None and not isinstance(cur, expect):
                errors.append((path, f"expected {expect.__name__}, got {type(cur).__name__}"))
                return default
            return cur

        fonts = []
        for i, f in enumerate(take("fonts", [], list) or []):
            if not isinstance(f, dict) or "path" not in f:
                errors.append((f"fonts[{i}]", "expected an object with a 'path'"))
                continue
            fonts.append(FontConfig(path=str(f["path"]), percentage=float(f.get("percentage", 0) or 0)))

        ranges = []
        for i, r in enumerate(take("script_ranges", None) or []):
            try:
                ranges.append(parse_range(r))
            except (ValueError, TypeError) as exc:
                errors.append((f"script_ranges[{i}]", str(exc)))
        if not ranges:
            ranges = list(KASHMIRI_RANGES)

        try:
            text_color = parse_color(take("text_color", "#000000"))
        except ValueError as exc:
            errors.append(("text_color", str(exc)))
            text_color = (0, 0, 0)

        try:
            background = _background_from_dict(take("background", None), "background", errors)
        except ValueError as exc:
            errors.append(("background", str(exc)))
            background = BackgroundSpec()

        aug_data = take("augmentation", {}, dict) or {}
        aug_kwargs = {}
        for key, attr in [
            ("probability", "probability"),
            ("max_transforms", "max_transforms"),
            ("rotation_max_degrees", "rotation_max_degrees"),
            ("skew_max", "skew_max"),
        ]:
            if key in aug_data:
                aug_kwargs[attr] = aug_data[key]
        if "enabled" in aug_data:
            aug_kwargs["enabled"] = tuple(aug_data["enabled"])
        for key in (
            "blur_sigma",
            "motion_kernel",
            "noise_sigma",
            "salt_pepper_prob",
            "jpeg_quality",
            "resolution_scale",
            "brightness_delta",
            "contrast_gamma",
        ):
            if key in aug_data:
                aug_kwargs[key] = tuple(aug_data[key])
        try:
            augmentation = AugmentationConfig(**aug_kwargs)
        except (ValueError, TypeError) as exc:
            errors.append(("augmentation", str(exc)))
            augmentation = AugmentationConfig()

        def as_int(path, default):
            v = take(path, default)
            try:
                return int(v)
            except (TypeError, ValueError):
                errors.append((path, f"expected an integer, got {v!r}"))
                return default

        def as_float(path, default):
            v = take(path, default)
            try:
                return float(v)
            except (TypeError, ValueError):
                errors.append((path, f"expected a number, got {v!r}"))
                return default

        kwargs = dict(
            corpus_path=str(take("corpus", "")),
            fonts=tuple(fonts),
            count=as_int("count", 1),
            seed=as_int("seed", 42),
            width=as_int("width", 256),
            height=as_int("height", 64),
            mode=take("segmentation.mode", "word"),
            min_graphemes=as_int("segmentation.min_graphemes", 1),
            max_graphemes=as_int("segmentation.max_graphemes", 50),
            script_ranges=tuple(ranges),
            size_min=as_int("size.min", 28),
            size_max=as_int("size.max", 42),
            size_distribution=take("size.distribution", "normal"),
            background=background,
            augmentation=augmentation,
            text_color=text_color,
            direction=take("direction", "rtl"),
            alignment=take("alignment", "center"),
            padding_left=as_int("padding.left", 10),
            padding_right=as_int("padding.right", 10),
            split_ratio=as_float("split_ratio", 0.9),
            output_format=take("format", "crnn"),
            storage_mode=take("storage.mode", "zip"),
            batch_size=as_int("storage.batch_size", 10000),
            memory_budget=as_int("memory_budget", DEFAULT_MEMORY_BUDGET),
            workers=as_int("workers", 1),
            antialias=bool(take("antialias", True)),
            timestamp=bool(take("timestamp", False)),
        )
        if errors:
            raise ConfigValidationError(errors)
        return cls(**kwargs)

    @classmethod
    def from_json(cls, text: str) -> "GeneratorConfig":
        return cls.from_dict(json.loads(text))


def _background_to_dict(spec: BackgroundSpec) -> dict:
    if spec.mode == "color":
        return {"mode": "color", "color": color_to_hex(spec.color)}
    if spec.mode == "image":
        return {"mode": "image", "path": spec.image_path}
    return {
        "mode": "mix",
        "options": [
            {**_background_to_dict(opt), "percentage": weight}
            for opt, weight in spec.mix_options
        ],
    }


def _background_from_dict(data, path, errors) -> BackgroundSpec:
    if data is None:
        return BackgroundSpec()
    if not isinstance(data, dict):
        errors.append((path, "expected an object"))
        return BackgroundSpec()
    mode = data.get("mode", "color")
    if mode == "color":
        return BackgroundSpec(mode="color", color=parse_color(data.get("color", "#FFFFFF")))
    if mode == "image":
        return BackgroundSpec(mode="image", image_path=data.get("path"))
    if mode == "mix":
        options = []
        for i, opt in enumerate(data.get("options", [])):
            spec = _background_from_dict(opt, f"{path}.options[{i}]", errors)
            options.append((spec, float(opt.get("percentage", 0))))
        return BackgroundSpec(mode="mix", mix_options=tuple(options))
    errors.append((path + ".mode", f"unknown background mode {mode!r}"))
    return BackgroundSpec()


def validate_fields(cfg: GeneratorConfig) -> list[tuple[str, str]]:
    """Semantic validation; returns (field_path, message) pairs."""
    errors: list[tuple[str, str]] = []
    if not cfg.corpus_path:
        errors.append(("corpus", "corpus path is required"))
    if not cfg.fonts:
        errors.append(("fonts", "at least one font is required"))
    else:
        total = sum(f.percentage for f in cfg.fonts)
        if any(f.percentage <= 0 for f in cfg.fonts):
            errors.append(("fonts[].percentage", "every percentage must be > 0"))
        elif abs(total - 100.0) > 0.01:
            errors.append(("fonts[].percentage", f"percentages sum to {total:g}, expected 100"))
    if cfg.count < 1:
        errors.append(("count", f"count must be >= 1, got {cfg.count}"))
    if cfg.width < 8 or cfg.height < 8:
        errors.append(("width" if cfg.width < 8 else "height", "image dimensions must be >= 8"))
    if cfg.mode not in MODES:
        errors.append(("segmentation.mode", f"unknown mode {cfg.mode!r}"))
    if not 1 <= cfg.min_graphemes <= cfg.max_graphemes:
        errors.append(("segmentation.min_graphemes", "need 1 <= min <= max"))
    for lo, hi in cfg.script_ranges:
        if lo > hi:
            errors.append(("script_ranges", f"range {range_to_str((lo, hi))} has lo > hi"))
    if not 1 <= cfg.size_min <= cfg.size_max:
        errors.append(("size.min", "need 1 <= min <= max"))
    if cfg.size_distribution not in ("normal", "uniform"):
        errors.append(("size.distribution", f"unknown distribution {cfg.size_distribution!r}"))
    if not 0.0 < cfg.split_ratio < 1.0:
        errors.append(("split_ratio", f"must be in (0, 1), got {cfg.split_ratio}"))
    if cfg.output_format not in OUTPUT_FORMATS:
        errors.append(("format", f"unknown format {cfg.output_format!r}"))
    if cfg.storage_mode not in STORAGE_MODES:
        errors.append(("storage.mode", f"unknown storage mode {cfg.storage_mode!r}"))
    if cfg.batch_size < 1:
        errors.append(("storage.batch_size", "batch size must be >= 1"))
    if cfg.memory_budget <= 0:
        errors.append(("memory_budget", "memory budget must be > 0"))
    if cfg.workers < 1:
        errors.append(("workers", "workers must be >= 1"))
    if cfg.direction not in DIRECTIONS:
        errors.append(("direction", f"unknown direction {cfg.direction!r}"))
    if cfg.alignment not in ALIGNMENTS:
        errors.append(("alignment", f"unknown alignment {cfg.alignment!r}"))
    if cfg.padding_left < 0 or cfg.padding_right < 0:
        errors.append(("padding", "padding must be >= 0"))
    return errors
