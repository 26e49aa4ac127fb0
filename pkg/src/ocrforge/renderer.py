"""Shaped, direction-aware rasterization of text segments.

Text is shaped with HarfBuzz and reordered with FriBiDi (Pillow's Raqm
layout engine), so Arabic joining forms, mark attachment and mixed-direction
runs come out correctly; unshaped Arabic would render disconnected
letterforms and poison any model trained on it.

Coverage is composited over the background with per-pixel alpha:
out = alpha * text_color + (1 - alpha) * background.  With antialias=False
coverage is thresholded to {0, 1}, giving the idealized two-color image.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from PIL import Image, ImageDraw

from .errors import UnfitTextError
from .fonts import FLOOR_SIZE, FontEntry
from .prng import Stream
from .textprep import Segment

ALIGNMENTS = ("left", "center", "right")
DIRECTIONS = ("rtl", "ltr")


def _canonical_color(color) -> tuple[int, int, int]:
    r, g, b = color
    for v in (r, g, b):
        if not 0 <= int(v) <= 255:
            raise ValueError(f"channel value {v} outside [0, 255]")
    return (int(r), int(g), int(b))


@dataclass(frozen=True)
class BackgroundSpec:
    """A background source: flat color, stretched image, or weighted mix."""

    mode: str = "color"
    color: tuple[int, int, int] = (255, 255, 255)
    image_path: str | None = None
    mix_options: tuple[tuple["BackgroundSpec", float], ...] = ()

    def __post_init__(self) -> None:
        if self.mode not in ("color", "image", "mix"):
            raise ValueError(f"unknown background mode {self.mode!r}")
        object.__setattr__(self, "color", _canonical_color(self.color))
        if self.mode == "image" and not self.image_path:
            raise ValueError("image background needs image_path")
        if self.mode == "mix":
            if not self.mix_options:
                raise ValueError("mix background needs at least one option")
            total = 0.0
            for spec, weight in self.mix_options:
                if weight <= 0:
                    raise ValueError(f"mix weight must be positive, got {weight}")
                if spec.mode == "mix":
                    raise ValueError("mix options cannot nest another mix")
                total += weight
            if abs(total - 100.0) > 0.01:
                raise ValueError(f"mix percentages sum to {total:g}, expected 100")


# Decoded-and-scaled background rasters, shared read-only across workers.
_bg_cache: dict[tuple[str, int, int], np.ndarray] = {}
_bg_lock = threading.Lock()


def _load_background_image(path: str, width: int, height: int) -> np.ndarray:
    key = (path, width, height)
    cached = _bg_cache.get(key)
    if cached is None:
        if not Path(path).exists():
            raise FileNotFoundError(f"background image {path!r} does not exist")
        with Image.open(path) as im:
            scaled = im.convert("RGB").resize((width, height), Image.BILINEAR)
        arr = np.asarray(scaled, dtype=np.uint8)
        arr.setflags(write=False)
        with _bg_lock:
            cached = _bg_cache.setdefault(key, arr)
    return cached


def resolve_background(spec: BackgroundSpec, stream: Stream) -> BackgroundSpec:
    """Collapse a mix to a concrete option; consumes one uniform iff mix."""
    if spec.mode != "mix":
        return spec
    u = stream.uniform() * 100.0
    cumulative = 0.0
    for option, weight in spec.mix_options:
        cumulative += weight
        if u < cumulative:
            return option
    return spec.mix_options[-1][0]


def paint_background(spec: BackgroundSpec, width: int, height: int) -> np.ndarray:
    """Rasterize a concrete (non-mix) background to H x W x 3 uint8."""
    if spec.mode == "color":
        return np.full((height, width, 3), spec.color, dtype=np.uint8)
    if spec.mode == "image":
        return _load_background_image(spec.image_path, width, height).copy()
    raise ValueError("mix backgrounds must be resolved before painting")


def render_background(
    spec: BackgroundSpec, width: int, height: int, stream: Stream
) -> np.ndarray:
    return paint_background(resolve_background(spec, stream), width, height)


def background_base_color(spec: BackgroundSpec, raster: np.ndarray) -> tuple[int, int, int]:
    """Fill color for geometric transforms: the configured color, or the
    mean of an image background."""
    if spec.mode == "color":
        return spec.color
    mean = raster.reshape(-1, 3).mean(axis=0)
    return tuple(int(round(v)) for v in mean)


def measure_text(font: FontEntry, size: int, text: str, direction: str) -> float:
    """Advance width of the shaped run, in pixels."""
    return font.face(size).getlength(text, direction=direction)


def measure_and_fit(
    text: str,
    font: FontEntry,
    size: int,
    width: int,
    padding_left: int,
    padding_right: int,
    direction: str,
) -> tuple[int, int]:
    """Shrink the font size until the shaped text fits the writable width.

    Returns (fitted size, measured width).  Raises UnfitTextError when the
    text is still too wide at the floor size; the caller skips the segment.
    """
    if size < 1:
        raise ValueError(f"font size must be >= 1, got {size}")
    available = width - padding_left - padding_right
    z = size
    w = int(np.ceil(measure_text(font, z, text, direction)))
    while w > available and z > FLOOR_SIZE:
        z -= 1
        w = int(np.ceil(measure_text(font, z, text, direction)))
    if w > available:
        raise UnfitTextError(
            f"text ({w}px at size {z}) exceeds writable width {available}px"
        )
    return z, w


def compute_origin(
    width: int,
    text_width: int,
    alignment: str,
    direction: str,
    padding_left: int,
    padding_right: int,
) -> int:
    """Leading (visual-left) edge of the text box.

    Alignment names are logical-start-relative: under RTL, "left" means the
    run starts at its logical start, which sits at the right margin.
    """
    if alignment not in ALIGNMENTS:
        raise ValueError(f"unknown alignment {alignment!r}")
    if direction not in DIRECTIONS:
        raise ValueError(f"unknown direction {direction!r}")
    if alignment == "center":
        return (width - text_width) // 2
    if direction == "rtl":
        if alignment == "left":
            return width - padding_right - text_width
        return padding_left  # right
    if alignment == "left":
        return padding_left
    return width - padding_right - text_width  # ltr right


@dataclass(frozen=True)
class RenderPlan:
    """All resolved randomness and geometry for one sample's raster."""

    segment: Segment
    font: FontEntry
    size: int
    text_color: tuple[int, int, int]
    background: BackgroundSpec  # resolved, never a mix
    direction: str
    alignment: str
    padding_left: int
    padding_right: int
    x_start: int
    y_top: int
    y_baseline: int
    text_width: int
    antialias: bool = True


def plan_layout(
    segment: Segment,
    font: FontEntry,
    size: int,
    text_color,
    background: BackgroundSpec,
    width: int,
    height: int,
    direction: str,
    alignment: str,
    padding_left: int,
    padding_right: int,
    antialias: bool = True,
) -> RenderPlan:
    """Fit the text and resolve the draw origin into a RenderPlan."""
    fitted, text_width = measure_and_fit(
        segment.text, font, size, width, padding_left, padding_right, direction
    )
    x_start = compute_origin(width, text_width, alignment, direction, padding_left, padding_right)
    ascent, descent = font.face(fitted).getmetrics()
    y_top = (height - (ascent + descent)) // 2
    return RenderPlan(
        segment=segment,
        font=font,
        size=fitted,
        text_color=_canonical_color(text_color),
        background=background,
        direction=direction,
        alignment=alignment,
        padding_left=padding_left,
        padding_right=padding_right,
        x_start=x_start,
        y_top=y_top,
        y_baseline=y_top + ascent,
        text_width=text_width,
        antialias=antialias,
    )


def render(plan: RenderPlan, background: np.ndarray) -> np.ndarray:
    """Composite the shaped text over the background raster.

    The ascent-to-descent box is centered on the canvas midline.  Glyphs
    absent from the font render as the face's .notdef; the caller records
    the missing-glyph count separately via FontEntry.missing_codepoints.
    """
    height, width = background.shape[:2]
    layer = Image.new("L", (width, height), 0)
    draw = ImageDraw.Draw(layer)
    draw.text(
        (plan.x_start, plan.y_top),
        plan.segment.text,
        font=plan.font.face(plan.size),
        fill=255,
        direction=plan.direction,
    )
    alpha = np.asarray(layer, dtype=np.float64) / 255.0
    if not plan.antialias:
        alpha = (alpha >= 0.5).astype(np.float64)
    alpha = alpha[:, :, None]
    color = np.array(plan.text_color, dtype=np.float64)
    out = alpha * color + (1.0 - alpha) * background.astype(np.float64)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)
