import base64
import hashlib
import io
import time
import zipfile

import pytest
from fastapi.testclient import TestClient

from ocrforge.config import FontConfig, GeneratorConfig
from ocrforge.service import create_app


@pytest.fixture()
def client():
    app = create_app()
    with TestClient(app) as c:
        yield c


def config_dict(three_font_paths, corpus_file, count=6, **kw):
    a, b, c = three_font_paths
    cfg = GeneratorConfig(
        corpus_path=corpus_file,
        fonts=(FontConfig(a, 40.0), FontConfig(b, 35.0), FontConfig(c, 25.0)),
        count=count,
        **kw,
    )
    return cfg.to_dict()


def wait_for(client, job_id, timeout=60):
    deadline = time.time() + timeout
    while time.time() < deadline:
        body = client.get(f"/api/jobs/{job_id}").json()
        if body["state"] in ("done", "failed"):
            return body
        time.sleep(0.05)
    raise TimeoutError("job did not finish")


class TestFonts:
    def test_upload_and_list(self, client, sans_path):
        with open(sans_path, "rb") as fh:
            res = client.post("/api/fonts", files={"file": ("sans.ttf", fh, "font/ttf")})
        assert res.status_code == 200
        body = res.json()
        assert body["family_name"].startswith("DejaVu")
        listed = client.get("/api/fonts").json()
        assert any(f["font_id"] == body["font_id"] for f in listed)

    def test_invalid_font_422(self, client):
        res = client.post(
            "/api/fonts", files={"file": ("bad.ttf", io.BytesIO(b"junk"), "font/ttf")}
        )
        assert res.status_code == 422
        assert res.json()["errors"]


class TestPreview:
    def test_preview_matches_cli(self, client, three_font_paths, corpus_file):
        from ocrforge.engine import preview as engine_preview

        cfg_dict = config_dict(three_font_paths, corpus_file)
        res = client.post("/api/preview", json={"config": cfg_dict, "count": 4})
        assert res.status_code == 200
        samples = res.json()
        assert len(samples) == 4
        records = engine_preview(GeneratorConfig.from_dict(cfg_dict), 4)
        for got, want in zip(samples, records):
            assert base64.b64decode(got["png_base64"]) == want.image_png
            assert got["label"] == want.label

    def test_percentage_sum_field_path(self, client, three_font_paths, corpus_file):
        cfg_dict = config_dict(three_font_paths, corpus_file)
        cfg_dict["fonts"][0]["percentage"] = 50  # 50+35+25 = 110
        res = client.post("/api/preview", json={"config": cfg_dict, "count": 2})
        assert res.status_code == 422
        errors = res.json()["errors"]
        assert any(e["path"] == "fonts[].percentage" for e in errors)
        assert any("110" in e["message"] for e in errors)

    def test_malformed_json_400(self, client):
        res = client.post(
            "/api/preview",
            content=b"{not json",
            headers={"content-type": "application/json"},
        )
        assert res.status_code == 400

    def test_count_cap(self, client, three_font_paths, corpus_file):
        res = client.post(
            "/api/preview",
            json={"config": config_dict(three_font_paths, corpus_file), "count": 17},
        )
        assert res.status_code == 422

    def test_uploaded_resources(self, client, sans_path):
        with open(sans_path, "rb") as fh:
            font_id = client.post(
                "/api/fonts", files={"file": ("s.ttf", fh, "font/ttf")}
            ).json()["font_id"]
        corpus_id = client.post(
            "/api/corpus",
            files={"file": ("c.txt", io.BytesIO("سلام دنیا کتاب".encode()), "text/plain")},
        ).json()["corpus_id"]
        cfg = {
            "corpus": f"upload:{corpus_id}",
            "fonts": [{"path": f"upload:{font_id}", "percentage": 100}],
            "count": 2,
        }
        res = client.post("/api/preview", json={"config": cfg, "count": 2})
        assert res.status_code == 200
        assert len(res.json()) == 2


class TestJobs:
    def test_lifecycle_and_archive(self, client, three_font_paths, corpus_file, tmp_path):
        cfg_dict = config_dict(three_font_paths, corpus_file, count=8)
        res = client.post("/api/jobs", json={"config": cfg_dict})
        assert res.status_code == 200
        job_id = res.json()["job_id"]

        body = wait_for(client, job_id)
        assert body["state"] == "done"
        assert body["produced"] == 8

        archive = client.get(f"/api/jobs/{job_id}/archive")
        assert archive.status_code == 200
        assert archive.headers["content-type"] == "application/zip"
        assert "dataset.zip" in archive.headers.get("content-disposition", "")

        # hash parity with a CLI-style run of the same config
        from ocrforge.engine import generate

        out = tmp_path / "cli"
        generate(GeneratorConfig.from_dict(cfg_dict), out)
        cli_bytes = (out / "dataset.zip").read_bytes()
        assert hashlib.sha256(archive.content).hexdigest() == hashlib.sha256(cli_bytes).hexdigest()
        with zipfile.ZipFile(io.BytesIO(archive.content)) as zf:
            assert sum(n.startswith("images/") for n in zf.namelist()) == 8

    def test_archive_before_done_409(self, client, three_font_paths, corpus_file):
        cfg_dict = config_dict(three_font_paths, corpus_file, count=40)
        job_id = client.post("/api/jobs", json={"config": cfg_dict}).json()["job_id"]
        res = client.get(f"/api/jobs/{job_id}/archive")
        assert res.status_code in (200, 409)  # tiny jobs may already be done
        wait_for(client, job_id)

    def test_second_job_while_running_409(self, client, three_font_paths, corpus_file):
        cfg_dict = config_dict(three_font_paths, corpus_file, count=200)
        first = client.post("/api/jobs", json={"config": cfg_dict})
        assert first.status_code == 200
        second = client.post("/api/jobs", json={"config": cfg_dict})
        assert second.status_code == 409
        job_id = first.json()["job_id"]
        client.delete(f"/api/jobs/{job_id}")
        wait_for(client, job_id)

    def test_unknown_job_404(self, client):
        assert client.get("/api/jobs/nope").status_code == 404
        assert client.get("/api/jobs/nope/archive").status_code == 404
        assert client.delete("/api/jobs/nope").status_code == 404

    def test_invalid_config_422(self, client, three_font_paths, corpus_file):
        cfg_dict = config_dict(three_font_paths, corpus_file)
        cfg_dict["count"] = 0
        res = client.post("/api/jobs", json={"config": cfg_dict})
        assert res.status_code == 422

    def test_progress_monotone(self, client, three_font_paths, corpus_file):
        cfg_dict = config_dict(three_font_paths, corpus_file, count=60)
        job_id = client.post("/api/jobs", json={"config": cfg_dict}).json()["job_id"]
        seen = []
        for _ in range(200):
            body = client.get(f"/api/jobs/{job_id}").json()
            seen.append(body["produced"])
            if body["state"] in ("done", "failed"):
                break
            time.sleep(0.02)
        assert seen == sorted(seen)
        assert seen[-1] == 60
