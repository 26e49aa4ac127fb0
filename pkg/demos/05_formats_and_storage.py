"""
Label formats and storage modes
===============================

One generation config, four label formats, three storage modes.  Shows
the first label row of each format and the file layout each storage mode
produces, then integrity-checks everything.
"""

import shutil
import tempfile
import zipfile
from pathlib import Path

from ocrforge.config import FontConfig, GeneratorConfig
from ocrforge.engine import generate
from ocrforge.packaging import LABEL_EXTENSIONS, verify

HERE = Path(__file__).parent
FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf"
work = Path(tempfile.mkdtemp(prefix="formats-demo-"))

base = GeneratorConfig(
    corpus_path=str(HERE / "data" / "corpus_sample.txt"),
    fonts=(FontConfig(FONT, 100.0),),
    count=12,
    seed=42,
    storage_mode="files",
)

print("== label formats ==")
for fmt in ("crnn", "trocr", "csv", "huggingface"):
    out = work / f"fmt_{fmt}"
    generate(base.with_(output_format=fmt), out)
    labels = (out / f"labels_train.{LABEL_EXTENSIONS[fmt]}").read_text(encoding="utf-8-sig")
    head = labels.splitlines()[0]
    print(f"{fmt:>12}: {head}")
    assert verify(out).ok

print("\n== storage modes ==")
generate(base.with_(storage_mode="zip"), work / "as_zip")
with zipfile.ZipFile(work / "as_zip" / "dataset.zip") as zf:
    print(f"  zip: one archive, {len(zf.namelist())} members")

generate(base.with_(storage_mode="chunked", batch_size=5), work / "as_chunks")
parts = sorted(p.name for p in (work / "as_chunks").glob("*.zip"))
print(f"  chunked: {parts}")

generate(base, work / "as_files")
files = sum(1 for p in (work / "as_files").rglob("*") if p.is_file())
print(f"  files: plain tree with {files} files")

for target in ("as_zip/dataset.zip", "as_chunks", "as_files"):
    report = verify(work / target)
    print(f"  verify {target}: {report.summary()}")

shutil.rmtree(work)
