"""ocrforge: deterministic synthetic text-image dataset generation.

Pipeline: corpus segmentation -> script validation -> shaped rendering ->
seeded augmentation -> packaging into archive/label formats, all driven by
one integer seed so output is byte-reproducible.
"""

__version__ = "0.1.0"
