"""Label-preserving image augmentation: gating, selection and ten transforms.

A sample is augmented with probability p; if gated in, m ~ uniform[1, m_max]
distinct transforms are chosen by a seeded partial shuffle, parameterized
uniformly from their configured ranges, and applied in a fixed canonical
order (geometric -> blur -> noise -> degradation -> lighting) so composition
is deterministic and physically plausible.

No operation reads or writes the text label; pairing is preserved
structurally.
"""

from __future__ import annotations

import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from PIL import Image
from scipy import ndimage

from .prng import Stream

TRANSFORM_ORDER = (
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
)

_CANONICAL_RANK = {kind: i for i, kind in enumerate(TRANSFORM_ORDER)}


def _check_range(name, lo, hi, dom_lo, dom_hi):
    if lo > hi:
        raise ValueError(f"{name}: lo {lo} > hi {hi}")
    if lo < dom_lo or hi > dom_hi:
        raise ValueError(f"{name}: range [{lo}, {hi}] outside valid domain [{dom_lo}, {dom_hi}]")


@dataclass(frozen=True)
class AugmentationConfig:
    probability: float = 0.7
    max_transforms: int = 4
    enabled: tuple[str, ...] = TRANSFORM_ORDER
    rotation_max_degrees: float = 10.0
    skew_max: float = 0.2
    blur_sigma: tuple[float, float] = (0.5, 2.0)
    motion_kernel: tuple[int, int] = (3, 7)
    noise_sigma: tuple[float, float] = (5.0, 25.0)
    salt_pepper_prob: tuple[float, float] = (0.01, 0.05)
    jpeg_quality: tuple[int, int] = (30, 70)
    resolution_scale: tuple[float, float] = (0.3, 0.7)
    brightness_delta: tuple[float, float] = (-0.15, 0.15)
    contrast_gamma: tuple[float, float] = (0.7, 1.3)

    def __post_init__(self) -> None:
        if not 0.0 <= self.probability <= 1.0:
            raise ValueError(f"probability {self.probability} outside [0, 1]")
        ordered = tuple(k for k in TRANSFORM_ORDER if k in self.enabled)
        unknown = set(self.enabled) - set(TRANSFORM_ORDER)
        if unknown:
            raise ValueError(f"unknown transforms: {sorted(unknown)}")
        object.__setattr__(self, "enabled", ordered)
        if ordered and not 1 <= self.max_transforms:
            raise ValueError(f"max_transforms must be >= 1, got {self.max_transforms}")
        if not 0 < self.rotation_max_degrees <= 45:
            raise ValueError("rotation_max_degrees must be in (0, 45]")
        if not 0 < self.skew_max <= 0.5:
            raise ValueError("skew_max must be in (0, 0.5]")
        _check_range("blur_sigma", *self.blur_sigma, 1e-6, 20.0)
        _check_range("motion_kernel", *self.motion_kernel, 3, 15)
        _check_range("noise_sigma", *self.noise_sigma, 0.0, 128.0)
        _check_range("salt_pepper_prob", *self.salt_pepper_prob, 0.0, 1.0)
        _check_range("jpeg_quality", *self.jpeg_quality, 1, 100)
        _check_range("resolution_scale", *self.resolution_scale, 1e-6, 1.0)
        _check_range("brightness_delta", *self.brightness_delta, -1.0, 4.0)
        _check_range("contrast_gamma", *self.contrast_gamma, 1e-6, 10.0)


@dataclass(frozen=True)
class AugmentationRecipe:
    """Ordered transform steps with sampled parameters; empty when clean."""

    steps: tuple[tuple[str, dict], ...] = ()
    applied: bool = False

    @property
    def kinds(self) -> tuple[str, ...]:
        return tuple(kind for kind, _ in self.steps)

    def summary(self) -> str:
        if not self.applied:
            return ""
        parts = []
        for kind, params in self.steps:
            inner = ",".join(f"{k}={v:.4g}" if isinstance(v, float) else f"{k}={v}"
                             for k, v in params.items())
            parts.append(f"{kind}({inner})")
        return ";".join(parts)


def _sample_params(kind: str, cfg: AugmentationConfig, stream: Stream) -> dict:
    if kind == "rotation":
        return {"degrees": stream.uniform_range(-cfg.rotation_max_degrees, cfg.rotation_max_degrees)}
    if kind == "skew":
        return {
            "sx": stream.uniform_range(-cfg.skew_max, cfg.skew_max),
            "sy": stream.uniform_range(-cfg.skew_max / 2, cfg.skew_max / 2),
        }
    if kind == "gaussian_blur":
        return {"sigma": stream.uniform_range(*cfg.blur_sigma)}
    if kind == "motion_blur":
        return {
            "k": stream.int_range(*cfg.motion_kernel),
            "alpha": stream.uniform_range(0.0, 2.0 * math.pi),
        }
    if kind == "gaussian_noise":
        return {"sigma": stream.uniform_range(*cfg.noise_sigma)}
    if kind == "salt_pepper":
        return {"p": stream.uniform_range(*cfg.salt_pepper_prob)}
    if kind == "jpeg":
        return {"quality": stream.int_range(*cfg.jpeg_quality)}
    if kind == "resolution":
        return {"scale": stream.uniform_range(*cfg.resolution_scale)}
    if kind == "brightness":
        return {"delta": stream.uniform_range(*cfg.brightness_delta)}
    if kind == "contrast":
        return {"gamma": stream.uniform_range(*cfg.contrast_gamma)}
    raise ValueError(f"unknown transform {kind!r}")


_PARAM_BOUNDS = {
    "rotation": lambda p, c: abs(p["degrees"]) <= c.rotation_max_degrees,
    "skew": lambda p, c: abs(p["sx"]) <= c.skew_max and abs(p["sy"]) <= c.skew_max / 2,
    "gaussian_blur": lambda p, c: c.blur_sigma[0] <= p["sigma"] <= c.blur_sigma[1],
    "motion_blur": lambda p, c: c.motion_kernel[0] <= p["k"] <= c.motion_kernel[1],
    "gaussian_noise": lambda p, c: c.noise_sigma[0] <= p["sigma"] <= c.noise_sigma[1],
    "salt_pepper": lambda p, c: c.salt_pepper_prob[0] <= p["p"] <= c.salt_pepper_prob[1],
    "jpeg": lambda p, c: c.jpeg_quality[0] <= p["quality"] <= c.jpeg_quality[1],
    "resolution": lambda p, c: c.resolution_scale[0] <= p["scale"] <= c.resolution_scale[1],
    "brightness": lambda p, c: c.brightness_delta[0] <= p["delta"] <= c.brightness_delta[1],
    "contrast": lambda p, c: c.contrast_gamma[0] <= p["gamma"] <= c.contrast_gamma[1],
}


def plan_recipe(cfg: AugmentationConfig, stream: Stream) -> AugmentationRecipe:
    """Gate, choose transform count and kinds, and sample parameters.

    Draw order: gate (1 uniform); count (1); partial Fisher-Yates selection
    (m draws); per-kind parameters in selection order.  Selected kinds are
    then sorted into the canonical order.
    """
    if not cfg.enabled or not stream.bernoulli(cfg.probability):
        return AugmentationRecipe(steps=(), applied=False)
    pool = list(cfg.enabled)
    m = stream.int_range(1, min(cfg.max_transforms, len(pool)))
    for j in range(m):
        swap = stream.int_range(j, len(pool) - 1)
        pool[j], pool[swap] = pool[swap], pool[j]
    selected = pool[:m]
    sampled = [(kind, _sample_params(kind, cfg, stream)) for kind in selected]
    for kind, params in sampled:
        assert _PARAM_BOUNDS[kind](params, cfg), (kind, params)
    sampled.sort(key=lambda item: _CANONICAL_RANK[item[0]])
    return AugmentationRecipe(steps=tuple(sampled), applied=True)


# --- geometric ---------------------------------------------------------------


def _affine_bilinear(img: np.ndarray, inverse: np.ndarray, fill) -> np.ndarray:
    """Inverse-mapped affine resample about the image center.

    inverse is the 2x2 matrix taking destination offsets (from center) to
    source offsets.  Destination pixels whose source lands outside the image
    take the fill color.
    """
    h, w = img.shape[:2]
    cy, cx = (h - 1) / 2.0, (w - 1) / 2.0
    ys, xs = np.mgrid[0:h, 0:w]
    dx = xs - cx
    dy = ys - cy
    sx = inverse[0, 0] * dx + inverse[0, 1] * dy + cx
    sy = inverse[1, 0] * dx + inverse[1, 1] * dy + cy

    inside = (sx >= 0) & (sx <= w - 1) & (sy >= 0) & (sy <= h - 1)
    x0 = np.clip(np.floor(sx).astype(np.int64), 0, w - 1)
    y0 = np.clip(np.floor(sy).astype(np.int64), 0, h - 1)
    x1 = np.minimum(x0 + 1, w - 1)
    y1 = np.minimum(y0 + 1, h - 1)
    fx = np.clip(sx, 0, w - 1) - x0
    fy = np.clip(sy, 0, h - 1) - y0

    src = img.astype(np.float64)
    top = src[y0, x0] * (1 - fx)[..., None] + src[y0, x1] * fx[..., None]
    bot = src[y1, x0] * (1 - fx)[..., None] + src[y1, x1] * fx[..., None]
    out = top * (1 - fy)[..., None] + bot * fy[..., None]
    out[~inside] = np.array(fill, dtype=np.float64)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def rotate(img: np.ndarray, degrees: float, fill) -> np.ndarray:
    """Rotation about the center, bilinear, fill outside the source."""
    if degrees == 0.0:
        return img.copy()
    theta = math.radians(degrees)
    c, s = math.cos(theta), math.sin(theta)
    # snap the epsilon residue of right-angle trig so exact 90/180/270
    # rotations stay pure index permutations
    if abs(c) < 1e-12:
        c = 0.0
    if abs(s) < 1e-12:
        s = 0.0
    inverse = np.array([[c, s], [-s, c]])  # R(-theta)
    return _affine_bilinear(img, inverse, fill)


def skew(img: np.ndarray, sx: float, sy: float, fill) -> np.ndarray:
    """Center-anchored shear with factors (sx, sy)."""
    if sx == 0.0 and sy == 0.0:
        return img.copy()
    det = 1.0 - sx * sy
    inverse = np.array([[1.0, -sx], [-sy, 1.0]]) / det
    return _affine_bilinear(img, inverse, fill)


# --- blur --------------------------------------------------------------------


def gaussian_kernel_1d(sigma: float) -> np.ndarray:
    """Truncated at radius ceil(3*sigma), renormalized to sum exactly 1."""
    if sigma <= 0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    radius = math.ceil(3.0 * sigma)
    xs = np.arange(-radius, radius + 1, dtype=np.float64)
    k = np.exp(-(xs**2) / (2.0 * sigma * sigma))
    return k / k.sum()


def gaussian_blur(img: np.ndarray, sigma: float) -> np.ndarray:
    """Separable Gaussian convolution, clamp-to-edge."""
    k = gaussian_kernel_1d(sigma)
    out = img.astype(np.float64)
    out = ndimage.convolve1d(out, k, axis=1, mode="nearest")
    out = ndimage.convolve1d(out, k, axis=0, mode="nearest")
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def motion_kernel(k: int, alpha: float) -> np.ndarray:
    """k-tap line kernel through the center at angle alpha.

    Taps are placed by rounding line coordinates; rounding collisions merge
    weight, then the kernel is renormalized.
    """
    if k % 2 == 0:
        k += 1
    if k == 1:
        return np.array([[1.0]])
    kern = np.zeros((k, k), dtype=np.float64)
    center = (k - 1) / 2.0
    c, s = math.cos(alpha), math.sin(alpha)
    for t in range(k):
        off = t - center
        col = math.floor(center + off * c + 0.5)
        row = math.floor(center + off * s + 0.5)
        kern[row, col] += 1.0 / k
    return kern / kern.sum()


def motion_blur(img: np.ndarray, k: int, alpha: float) -> np.ndarray:
    """Directional line blur; even kernel sizes round up to the next odd."""
    kern = motion_kernel(k, alpha)
    if kern.shape == (1, 1):
        return img.copy()
    out = img.astype(np.float64)
    for ch in range(out.shape[2]):
        out[:, :, ch] = ndimage.convolve(out[:, :, ch], kern, mode="nearest")
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


# --- noise -------------------------------------------------------------------


def gaussian_noise(img: np.ndarray, sigma: float, stream: Stream) -> np.ndarray:
    """Additive Gaussian noise, one deviate shared across RGB per pixel.

    Consumes exactly two uniforms per pixel, row-major.
    """
    if sigma < 0:
        raise ValueError(f"sigma must be >= 0, got {sigma}")
    if sigma == 0.0:
        return img.copy()
    h, w = img.shape[:2]
    z = stream.gaussian_array(h * w).reshape(h, w, 1)
    out = img.astype(np.float64) + z * sigma
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def salt_pepper(img: np.ndarray, p: float, stream: Stream) -> np.ndarray:
    """Impulse noise: u < p/2 -> black, p/2 <= u < p -> white, else keep.

    Consumes exactly one uniform per pixel, row-major.
    """
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must be in [0, 1], got {p}")
    if p == 0.0:
        return img.copy()
    h, w = img.shape[:2]
    u = stream.uniform_array(h * w).reshape(h, w)
    out = img.copy()
    out[u < p / 2] = 0
    out[(u >= p / 2) & (u < p)] = 255
    return out


# --- degradation -------------------------------------------------------------


def jpeg_degrade(img: np.ndarray, quality: int) -> np.ndarray:
    """In-memory JPEG encode/decode round trip at the given quality."""
    if not 1 <= quality <= 100:
        raise ValueError(f"quality must be in [1, 100], got {quality}")
    try:
        buf = io.BytesIO()
        Image.fromarray(img, "RGB").save(buf, format="JPEG", quality=int(quality))
        buf.seek(0)
        with Image.open(buf) as decoded:
            return np.asarray(decoded.convert("RGB"), dtype=np.uint8)
    except Exception as exc:  # codec failure: pass through, keep going
        warnings.warn(f"jpeg transform skipped: {exc}")
        return img.copy()


def resolution_degrade(img: np.ndarray, scale: float) -> np.ndarray:
    """Bilinear downscale by `scale` then upscale back to original size."""
    if not 0.0 < scale <= 1.0:
        raise ValueError(f"scale must be in (0, 1], got {scale}")
    if scale == 1.0:
        return img.copy()
    h, w = img.shape[:2]
    lw = max(1, math.floor(w * scale))
    lh = max(1, math.floor(h * scale))
    pil = Image.fromarray(img, "RGB")
    low = pil.resize((lw, lh), Image.BILINEAR)
    back = low.resize((w, h), Image.BILINEAR)
    return np.asarray(back, dtype=np.uint8)


# --- lighting ----------------------------------------------------------------


def brightness(img: np.ndarray, delta: float) -> np.ndarray:
    """Linear scale by (1 + delta), clipped."""
    if delta < -1.0:
        raise ValueError(f"delta must be >= -1, got {delta}")
    out = img.astype(np.float64) * (1.0 + delta)
    return np.clip(np.rint(out), 0, 255).astype(np.uint8)


def contrast(img: np.ndarray, gamma: float) -> np.ndarray:
    """Per-channel gamma map through a 256-entry lookup table."""
    if gamma <= 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    levels = np.arange(256, dtype=np.float64)
    lut = np.clip(np.rint(255.0 * (levels / 255.0) ** gamma), 0, 255).astype(np.uint8)
    return lut[img]


_APPLY = {
    "rotation": lambda img, p, fill, stream: rotate(img, p["degrees"], fill),
    "skew": lambda img, p, fill, stream: skew(img, p["sx"], p["sy"], fill),
    "gaussian_blur": lambda img, p, fill, stream: gaussian_blur(img, p["sigma"]),
    "motion_blur": lambda img, p, fill, stream: motion_blur(img, p["k"], p["alpha"]),
    "gaussian_noise": lambda img, p, fill, stream: gaussian_noise(img, p["sigma"], stream),
    "salt_pepper": lambda img, p, fill, stream: salt_pepper(img, p["p"], stream),
    "jpeg": lambda img, p, fill, stream: jpeg_degrade(img, p["quality"]),
    "resolution": lambda img, p, fill, stream: resolution_degrade(img, p["scale"]),
    "brightness": lambda img, p, fill, stream: brightness(img, p["delta"]),
    "contrast": lambda img, p, fill, stream: contrast(img, p["gamma"]),
}


def apply(img: np.ndarray, recipe: AugmentationRecipe, fill, stream: Stream) -> np.ndarray:
    """Apply the recipe's transforms in order; empty recipe is the identity."""
    for kind, params in recipe.steps:
        img = _APPLY[kind](img, params, fill, stream)
    return img
