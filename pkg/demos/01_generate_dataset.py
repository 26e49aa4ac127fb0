"""
Generate a small labeled dataset end to end
============================================

Corpus file + font files in, directory of PNGs + label files +
metadata.json out.  Everything is driven by the seed: run this twice and
every output byte is identical.
"""

import json
from pathlib import Path

from ocrforge.config import FontConfig, GeneratorConfig
from ocrforge.engine import generate
from ocrforge.packaging import verify

HERE = Path(__file__).parent
OUT = HERE / "output" / "dataset"

# A font with Arabic coverage; swap in your own .ttf/.otf files.
FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf"

cfg = GeneratorConfig(
    corpus_path=str(HERE / "data" / "corpus_sample.txt"),
    fonts=(FontConfig(FONT, 100.0),),
    count=48,
    seed=42,
    mode="word",
    storage_mode="files",
)

# generate() reports progress through a callback; here we just print it
manifest = generate(cfg, OUT, progress=lambda e: print(f"  {e.produced}/{e.total}"))

print("counts:", json.dumps(manifest.counts))
print("transforms applied:", json.dumps(manifest.transform_counts))
print("distinct characters:", len(manifest.char_histogram))

# a couple of labels, straight from the train file (note the leading BOM)
labels = (OUT / "labels_train.txt").read_text(encoding="utf-8-sig")
print("first labels:")
for line in labels.splitlines()[:4]:
    print("  ", line)

# the dataset carries checksums for every file; verify() replays them
report = verify(OUT)
print(report.summary())
