"""Exception types shared across the generator."""


class OcrForgeError(Exception):
    """Base class for all generator errors."""


class InvalidRangeError(OcrForgeError, ValueError):
    """A numeric range was given with lo > hi."""


class InvalidProbabilityError(OcrForgeError, ValueError):
    """A probability outside [0, 1]."""


class EmptyCorpusError(OcrForgeError, ValueError):
    """Segmentation was asked to run on an empty corpus."""


class NoValidSegmentsError(OcrForgeError, ValueError):
    """Every segment was filtered or rejected; nothing left to render."""


class FontLoadError(OcrForgeError, ValueError):
    """A font file could not be read or parsed."""


class UnfitTextError(OcrForgeError):
    """Text cannot fit the canvas even at the floor font size.

    This is a control-flow signal: the caller skips to the next segment
    and records the skip, it is not a fatal fault.
    """


class LabelFormatError(OcrForgeError, ValueError):
    """A label cannot be represented in the requested output format."""


class SplitError(OcrForgeError, ValueError):
    """Train/val split cannot be performed (too few records)."""


class GenerationError(OcrForgeError, RuntimeError):
    """A generation run failed; partial output has been cleaned up."""


class GenerationCancelled(OcrForgeError, RuntimeError):
    """A generation run was cancelled from outside."""


class ConfigValidationError(OcrForgeError, ValueError):
    """Configuration failed semantic validation.

    ``errors`` is a list of (field_path, message) pairs, e.g.
    ("fonts[].percentage", "percentages sum to 110, expected 100").
    """

    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(f"{path}: {msg}" for path, msg in self.errors))
