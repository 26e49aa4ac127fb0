"""Corpus loading, segmentation, normalization and script validation.

Five segmentation modes (char / word / ngram / sentence / line) produce raw
segments, which are filtered by grapheme length, NFC-normalized and checked
against a script policy (allowed code-point ranges).  Combining diacritics
are never stripped: the emitted label is exactly the NFC form of the input.

Everything here is a pure function over immutable inputs.
"""

from __future__ import annotations

import unicodedata
from dataclasses import dataclass, field
from pathlib import Path

import regex

from .errors import EmptyCorpusError, NoValidSegmentsError

MODES = ("char", "word", "ngram", "sentence", "line")

# Word delimiters: Latin and Arabic punctuation plus whitespace.  Newlines
# are included so multi-line corpora never yield labels containing line
# breaks (which the tab-separated label format cannot represent).
WORD_DELIMITERS = frozenset(
    {" ", "\t", "\n", "\r", "،", "؛", ".", "!", "?", "؟", "۔", ":", ";", ","}
)

SENTENCE_DELIMITERS = frozenset({".", "?", "!", "؟", "۔"})

# Arabic script blocks plus Basic Latin and General Punctuation.
KASHMIRI_RANGES = (
    (0x0020, 0x007F),
    (0x0600, 0x06FF),
    (0x0750, 0x077F),
    (0x08A0, 0x08FF),
    (0x2000, 0x206F),
)

KASHMIRI_DIACRITICS = frozenset(range(0x064B, 0x0660))

_GRAPHEME_RE = regex.compile(r"\X")


def graphemes(text: str) -> list[str]:
    """Extended grapheme clusters (UAX #29) of text."""
    return _GRAPHEME_RE.findall(text)


def grapheme_count(text: str) -> int:
    return len(graphemes(text))


def normalize(text: str) -> str:
    """Canonical composition (NFC); idempotent."""
    return unicodedata.normalize("NFC", text)


@dataclass(frozen=True)
class Corpus:
    text: str
    char_count: int
    source_name: str = "<memory>"

    @classmethod
    def from_text(cls, text: str, source_name: str = "<memory>") -> "Corpus":
        return cls(text=text, char_count=len(text), source_name=source_name)

    @classmethod
    def load(cls, path: str | Path) -> "Corpus":
        """Read a UTF-8 text file; a leading byte-order mark is consumed."""
        raw = Path(path).read_text(encoding="utf-8-sig")
        return cls.from_text(raw, source_name=str(path))


@dataclass(frozen=True)
class Segment:
    """A validated text unit: NFC-normalized label plus its grapheme count."""

    text: str
    grapheme_len: int

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("segment text must be non-empty")


@dataclass(frozen=True)
class SegmentationConfig:
    mode: str = "word"
    min_graphemes: int = 1
    max_graphemes: int = 50
    ngram_min: int = 2
    ngram_max: int = 4

    def __post_init__(self) -> None:
        if self.mode not in MODES:
            raise ValueError(f"unknown segmentation mode {self.mode!r}")
        if not 1 <= self.min_graphemes <= self.max_graphemes:
            raise ValueError(
                f"need 1 <= min_graphemes <= max_graphemes, "
                f"got {self.min_graphemes}..{self.max_graphemes}"
            )


def _canonical_ranges(ranges) -> tuple[tuple[int, int], ...]:
    """Sort and merge code point intervals so they are non-overlapping."""
    items = sorted(tuple(r) for r in ranges)
    merged: list[tuple[int, int]] = []
    for lo, hi in items:
        if lo > hi:
            raise ValueError(f"range lo {lo:#06x} > hi {hi:#06x}")
        if merged and lo <= merged[-1][1] + 1:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    return tuple(merged)


@dataclass(frozen=True)
class ScriptPolicy:
    """Allowed code-point intervals plus diacritics that must survive."""

    allowed_ranges: tuple[tuple[int, int], ...] = KASHMIRI_RANGES
    preserved_diacritics: frozenset[int] = KASHMIRI_DIACRITICS
    normalization_form: str = "NFC"

    def __post_init__(self) -> None:
        object.__setattr__(self, "allowed_ranges", _canonical_ranges(self.allowed_ranges))
        object.__setattr__(self, "preserved_diacritics", frozenset(self.preserved_diacritics))
        for cp in self.preserved_diacritics:
            if not self.allows(cp):
                raise ValueError(
                    f"preserved diacritic U+{cp:04X} outside every allowed range"
                )

    def allows(self, codepoint: int) -> bool:
        for lo, hi in self.allowed_ranges:
            if lo <= codepoint <= hi:
                return True
        return False


@dataclass(frozen=True)
class Rejection:
    """A segment refused by validation, carrying the first offender."""

    text: str
    offending_codepoint: int


def _split_on(text: str, delimiters: frozenset[str]) -> list[str]:
    parts: list[str] = []
    current: list[str] = []
    for ch in text:
        if ch in delimiters:
            if current:
                parts.append("".join(current))
                current = []
        else:
            current.append(ch)
    if current:
        parts.append("".join(current))
    return parts


def _words(text: str) -> list[str]:
    return _split_on(text, WORD_DELIMITERS)


def segment(corpus: Corpus, cfg: SegmentationConfig) -> list[str]:
    """Raw segment strings for the configured mode, in corpus order."""
    if not corpus.text:
        raise EmptyCorpusError(f"corpus {corpus.source_name!r} is empty")
    text = corpus.text

    if cfg.mode == "char":
        return [g for g in graphemes(text) if not g.isspace()]

    if cfg.mode == "word":
        return _words(text)

    if cfg.mode == "ngram":
        words = _words(text)
        seen: set[str] = set()
        out: list[str] = []
        for n in range(cfg.ngram_min, cfg.ngram_max + 1):
            for i in range(len(words) - n + 1):
                gram = " ".join(words[i : i + n])
                if gram not in seen:
                    seen.add(gram)
                    out.append(gram)
        return out

    if cfg.mode == "sentence":
        return [s for s in (p.strip() for p in _split_on(text, SENTENCE_DELIMITERS)) if s]

    if cfg.mode == "line":
        unified = text.replace("\r\n", "\n").replace("\r", "\n")
        return [s for s in (p.strip() for p in unified.split("\n")) if s]

    raise ValueError(f"unknown mode {cfg.mode!r}")  # unreachable; cfg validates


def filter_by_length(segments: list[str], cfg: SegmentationConfig) -> list[str]:
    """Keep segments whose grapheme count is within [min, max], stable order."""
    return [s for s in segments if cfg.min_graphemes <= grapheme_count(s) <= cfg.max_graphemes]


def validate(text: str, policy: ScriptPolicy) -> Segment | Rejection:
    """NFC-normalize, then accept iff every scalar is inside an allowed range.

    Rejection is a value, not an exception; it carries the first offending
    code point of the normalized text.
    """
    nfc = normalize(text)
    for ch in nfc:
        if not policy.allows(ord(ch)):
            return Rejection(text=text, offending_codepoint=ord(ch))
    return Segment(text=nfc, grapheme_len=grapheme_count(nfc))


@dataclass(frozen=True)
class PrepResult:
    segments: tuple[Segment, ...]
    rejected: int
    raw_count: int = 0
    length_filtered: int = 0

    def __iter__(self):
        return iter(self.segments)

    def __len__(self):
        return len(self.segments)


def prepare(corpus: Corpus, seg_cfg: SegmentationConfig, policy: ScriptPolicy) -> PrepResult:
    """segment -> length-filter -> per-segment normalize+validate.

    Rejected segments are silently excluded but counted.  Raises
    NoValidSegmentsError when nothing survives.
    """
    raw = segment(corpus, seg_cfg)
    kept = filter_by_length(raw, seg_cfg)
    out: list[Segment] = []
    rejected = 0
    for s in kept:
        result = validate(s, policy)
        if isinstance(result, Rejection):
            rejected += 1
        else:
            out.append(result)
    if not out:
        raise NoValidSegmentsError(
            f"no valid segments in {corpus.source_name!r} "
            f"({len(raw)} raw, {len(kept)} after length filter, {rejected} rejected)"
        )
    return PrepResult(
        segments=tuple(out),
        rejected=rejected,
        raw_count=len(raw),
        length_filtered=len(raw) - len(kept),
    )
