"""
Driving the HTTP preview service
================================

Uploads a font and a corpus, requests an 8-sample preview, launches a
generation job, polls its progress, and downloads the finished archive —
the same call sequence the browser UI makes.
"""

import base64
import io
import time
import zipfile
from pathlib import Path

from fastapi.testclient import TestClient

from ocrforge.service import create_app

HERE = Path(__file__).parent
OUT = HERE / "output" / "service_preview"
OUT.mkdir(parents=True, exist_ok=True)
FONT = "/usr/share/fonts/truetype/dejavu/DejaVuSans.ttf"

with TestClient(create_app()) as client:
    # 1. upload resources; configs reference them as upload:<id>
    with open(FONT, "rb") as fh:
        font = client.post("/api/fonts", files={"file": ("sans.ttf", fh, "font/ttf")}).json()
    print("font:", font)
    corpus_bytes = (HERE / "data" / "corpus_sample.txt").read_bytes()
    corpus = client.post(
        "/api/corpus", files={"file": ("corpus.txt", io.BytesIO(corpus_bytes), "text/plain")}
    ).json()
    print("corpus:", corpus)

    config = {
        "corpus": f"upload:{corpus['corpus_id']}",
        "fonts": [{"path": f"upload:{font['font_id']}", "percentage": 100}],
        "count": 24,
        "seed": 42,
    }

    # 2. live preview: the first 8 samples of the eventual dataset
    preview = client.post("/api/preview", json={"config": config, "count": 8}).json()
    for i, sample in enumerate(preview):
        (OUT / f"preview_{i}.png").write_bytes(base64.b64decode(sample["png_base64"]))
    print(f"saved {len(preview)} preview PNGs to {OUT}")

    # 3. a validation error comes back as 422 with field paths
    broken = dict(config, fonts=[dict(config["fonts"][0], percentage=110)])
    res = client.post("/api/preview", json={"config": broken, "count": 4})
    print("validation response:", res.status_code, res.json()["errors"][0])

    # 4. full job: submit, poll, download
    job_id = client.post("/api/jobs", json={"config": config}).json()["job_id"]
    while True:
        status = client.get(f"/api/jobs/{job_id}").json()
        print("job:", status["state"], f"{status['produced']}/{status['total']}")
        if status["state"] in ("done", "failed"):
            break
        time.sleep(0.2)
    archive = client.get(f"/api/jobs/{job_id}/archive")
    names = zipfile.ZipFile(io.BytesIO(archive.content)).namelist()
    print(f"archive holds {len(names)} members, last = {names[-1]}")
