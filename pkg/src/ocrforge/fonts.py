"""Font loading, coverage checks, weighted selection and size sampling.

Faces are parsed with FreeType (via Pillow) using the Raqm layout engine so
Arabic joining forms and combining marks shape correctly.  Glyph coverage
comes from the font's cmap (via fontTools).  Selection follows inverse
transform sampling over configured percentages; sizes come from a clipped
normal or a uniform distribution over [z_min, z_max].
"""

from __future__ import annotations

import hashlib
import math
import threading
import warnings
from dataclasses import dataclass, field
from pathlib import Path

from fontTools.ttLib import TTFont, TTLibError
from PIL import ImageFont

from .errors import FontLoadError
from .prng import Stream

# Representative Arabic letters probed when warning about script coverage.
ARABIC_PROBE_CODEPOINTS = (0x0627, 0x0628, 0x062A, 0x0633, 0x0644, 0x0645, 0x0648, 0x064A)

FLOOR_SIZE = 8


class FontCoverageWarning(UserWarning):
    """A loaded font is missing glyphs the script policy will need."""


class FontEntry:
    """A loaded typeface with its selection weight.

    Face objects are cached per (thread, size): FreeType faces are not
    thread-safe, and workers render concurrently.
    """

    def __init__(self, path: str | Path, percentage: float = 100.0):
        self.path = str(path)
        if not percentage > 0:
            raise ValueError(f"font percentage must be > 0, got {percentage}")
        self.percentage = float(percentage)

        data = self._read(self.path)
        self.family_id = hashlib.sha256(data).hexdigest()[:12]
        try:
            probe = ImageFont.truetype(
                self.path, 16, layout_engine=ImageFont.Layout.RAQM
            )
        except Exception as exc:
            raise FontLoadError(f"cannot parse font {self.path!r}: {exc}") from exc
        family, style = probe.getname()
        self.display_name = family if style in ("Regular", "Book", "") else f"{family} {style}"

        try:
            tt = TTFont(self.path, fontNumber=0, lazy=True)
            cmap = tt.getBestCmap()
            tt.close()
        except (TTLibError, Exception) as exc:
            raise FontLoadError(f"cannot read glyph tables of {self.path!r}: {exc}") from exc
        if not cmap:
            raise FontLoadError(f"font {self.path!r} has an empty character map")
        self.codepoints = frozenset(cmap)

        self._faces = threading.local()

    @staticmethod
    def _read(path: str) -> bytes:
        try:
            return Path(path).read_bytes()
        except OSError as exc:
            raise FontLoadError(f"cannot read font file {path!r}: {exc}") from exc

    def face(self, size: int) -> ImageFont.FreeTypeFont:
        cache = getattr(self._faces, "cache", None)
        if cache is None:
            cache = self._faces.cache = {}
        f = cache.get(size)
        if f is None:
            f = cache[size] = ImageFont.truetype(
                self.path, size, layout_engine=ImageFont.Layout.RAQM
            )
        return f

    def missing_codepoints(self, text: str) -> list[int]:
        """Code points of text absent from this font's character map."""
        return [ord(ch) for ch in text if ord(ch) not in self.codepoints]

    def __repr__(self) -> str:
        return f"FontEntry({self.display_name!r}, {self.percentage:g}%)"


def load_font(path: str | Path, percentage: float = 100.0, *, arabic_policy: bool = False) -> FontEntry:
    """Load and validate one font file.

    With arabic_policy=True, a font covering none of the probe letters
    triggers a FontCoverageWarning listing the missing sample code points
    (not fatal: the caller may be generating Latin-only previews).
    """
    entry = FontEntry(path, percentage)
    if arabic_policy:
        missing = [cp for cp in ARABIC_PROBE_CODEPOINTS if cp not in entry.codepoints]
        if len(missing) == len(ARABIC_PROBE_CODEPOINTS):
            warnings.warn(
                FontCoverageWarning(
                    f"font {entry.display_name!r} has no Arabic-block glyphs; "
                    f"missing sample code points: "
                    + ", ".join(f"U+{cp:04X}" for cp in missing)
                )
            )
    return entry


@dataclass(frozen=True)
class FontSet:
    entries: tuple[FontEntry, ...]

    def __post_init__(self) -> None:
        if not self.entries:
            raise ValueError("font set must contain at least one font")
        total = sum(e.percentage for e in self.entries)
        if abs(total - 100.0) > 0.01:
            raise ValueError(f"font percentages sum to {total:g}, expected 100")

    @property
    def k(self) -> int:
        return len(self.entries)

    @classmethod
    def equal_split(cls, entries: list[FontEntry]) -> "FontSet":
        share = 100.0 / len(entries)
        for e in entries:
            e.percentage = share
        return cls(tuple(entries))


def select_font(fonts: FontSet, stream: Stream) -> FontEntry:
    """Inverse transform sampling over the percentage weights.

    Consumes exactly one uniform.  Floating-point leakage past the total
    falls back to the last entry.
    """
    u = stream.uniform() * 100.0
    cumulative = 0.0
    for entry in fonts.entries:
        cumulative += entry.percentage
        if u < cumulative:
            return entry
    return fonts.entries[-1]


@dataclass(frozen=True)
class SizePolicy:
    z_min: int = 28
    z_max: int = 42
    distribution: str = "normal"

    def __post_init__(self) -> None:
        if not 1 <= self.z_min <= self.z_max:
            raise ValueError(f"need 1 <= z_min <= z_max, got {self.z_min}..{self.z_max}")
        if self.distribution not in ("normal", "uniform"):
            raise ValueError(f"unknown size distribution {self.distribution!r}")

    @property
    def mu(self) -> float:
        return (self.z_min + self.z_max) / 2.0

    @property
    def sigma(self) -> float:
        return (self.z_max - self.z_min) / 6.0


def sample_size(policy: SizePolicy, stream: Stream) -> int:
    """Integer pixel size.

    normal: round(mu + sigma * g) clipped into [z_min, z_max], two uniforms;
    uniform: floor of uniform_range(z_min, z_max + 1), one uniform.
    """
    if policy.distribution == "normal":
        g = stream.gaussian()
        z = math.floor(policy.mu + policy.sigma * g + 0.5)
        return min(max(z, policy.z_min), policy.z_max)
    v = stream.uniform_range(policy.z_min, policy.z_max + 1)
    return min(math.floor(v), policy.z_max)
