"""
Seeded reproducibility, demonstrated
====================================

The same configuration and seed give byte-identical output; a different
seed gives a different dataset.  Per-sample substreams mean the worker
count changes nothing either.
"""

import hashlib
import shutil
import tempfile
from pathlib import Path

from ocrforge.config import FontConfig, GeneratorConfig
from ocrforge.engine import generate
from ocrforge.prng import Stream

HERE = Path(__file__).parent
FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf"


def dataset_fingerprint(root: Path) -> str:
    digest = hashlib.sha256()
    for p in sorted(root.rglob("*")):
        if p.is_file():
            digest.update(p.name.encode())
            digest.update(p.read_bytes())
    return digest.hexdigest()[:16]


work = Path(tempfile.mkdtemp(prefix="repro-demo-"))
cfg = GeneratorConfig(
    corpus_path=str(HERE / "data" / "corpus_sample.txt"),
    fonts=(FontConfig(FONT, 100.0),),
    count=32,
    seed=42,
    storage_mode="files",
)

generate(cfg, work / "run_a")
generate(cfg, work / "run_b")                      # same seed, rerun
generate(cfg.with_(workers=4), work / "run_c")     # same seed, 4 workers
generate(cfg.with_(seed=7), work / "run_d")        # different seed

fp = {name: dataset_fingerprint(work / name) for name in ("run_a", "run_b", "run_c", "run_d")}
for name, value in fp.items():
    print(f"{name}: {value}")
assert fp["run_a"] == fp["run_b"] == fp["run_c"], "same seed must be byte-identical"
assert fp["run_a"] != fp["run_d"], "different seed must differ"
print("same-seed runs identical, different seed differs — as promised")

# the substream machinery behind that guarantee: sample i's randomness
# depends only on (seed, i), never on what other samples consumed
s10 = Stream.for_sample(42, 10)
print("first uniforms of sample 10:", [round(s10.uniform(), 6) for _ in range(3)])
s10_again = Stream.for_sample(42, 10)
print("recomputed independently:   ", [round(s10_again.uniform(), 6) for _ in range(3)])

shutil.rmtree(work)
