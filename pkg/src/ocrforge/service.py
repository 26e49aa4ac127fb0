"""Local HTTP service exposing the generator to a browser UI.

Loopback-only by default; uploads live in a per-session temporary store
that is purged on shutdown.  Previews and jobs run through the same engine
as the CLI, so a service preview is byte-identical to a CLI preview of the
same config.

Config documents may reference uploaded resources as "upload:<id>" in the
corpus and font path fields; the service resolves those to temporary paths
before validation.
"""

from __future__ import annotations

import base64
import json
import shutil
import tempfile
import threading
import uuid
from contextlib import asynccontextmanager
from dataclasses import dataclass, field as dataclass_field
from pathlib import Path

from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import FileResponse, JSONResponse

from .config import GeneratorConfig
from .engine import generate, preview
from .errors import ConfigValidationError, FontLoadError, OcrForgeError
from .fonts import load_font

DEFAULT_PORT = 8787
MAX_PREVIEW = 16

JOB_STATES = ("queued", "running", "done", "failed")


@dataclass
class Job:
    id: str
    config: GeneratorConfig
    state: str = "queued"
    produced: int = 0
    total: int = 0
    skips: int = 0
    error: str | None = None
    output_dir: Path | None = None
    cancel_event: threading.Event = dataclass_field(default_factory=threading.Event)

    def to_dict(self) -> dict:
        return {
            "job_id": self.id,
            "state": self.state,
            "produced": self.produced,
            "total": self.total,
            "skips": self.skips,
            "error": self.error,
        }

    @property
    def archive_path(self) -> Path | None:
        if self.output_dir is None:
            return None
        candidate = self.output_dir / "dataset.zip"
        return candidate if candidate.exists() else None


class ServiceState:
    def __init__(self):
        self.workdir = Path(tempfile.mkdtemp(prefix="ocrforge-service-"))
        self.fonts: dict[str, dict] = {}
        self.corpora: dict[str, Path] = {}
        self.jobs: dict[str, Job] = {}
        self.lock = threading.Lock()

    def close(self):
        shutil.rmtree(self.workdir, ignore_errors=True)

    def running_job(self) -> Job | None:
        for job in self.jobs.values():
            if job.state in ("queued", "running"):
                return job
        return None

    def resolve_uploads(self, data: dict) -> dict:
        """Rewrite upload:<id> references to their temporary paths."""
        data = json.loads(json.dumps(data))  # deep copy
        corpus = data.get("corpus", "")
        if isinstance(corpus, str) and corpus.startswith("upload:"):
            key = corpus.removeprefix("upload:")
            if key in self.corpora:
                data["corpus"] = str(self.corpora[key])
        for font in data.get("fonts", []) or []:
            if isinstance(font, dict):
                path = font.get("path", "")
                if isinstance(path, str) and path.startswith("upload:"):
                    key = path.removeprefix("upload:")
                    if key in self.fonts:
                        font["path"] = self.fonts[key]["path"]
        return data


def _validation_response(errors) -> JSONResponse:
    return JSONResponse(
        status_code=422,
        content={"errors": [{"path": p, "message": m} for p, m in errors]},
    )


async def _read_json(request: Request):
    try:
        return json.loads(await request.body())
    except (ValueError, UnicodeDecodeError):
        return None


def create_app(state: ServiceState | None = None, static_dir: str | None = None) -> FastAPI:
    service = state or ServiceState()

    @asynccontextmanager
    async def lifespan(_app):
        yield
        service.close()

    app = FastAPI(title="ocrforge preview service", lifespan=lifespan)
    app.state.service = service

    @app.post("/api/fonts")
    async def upload_font(file: UploadFile):
        data = await file.read()
        suffix = Path(file.filename or "font.ttf").suffix or ".ttf"
        dest = service.workdir / f"font-{uuid.uuid4().hex}{suffix}"
        dest.write_bytes(data)
        try:
            entry = load_font(dest)
        except FontLoadError as exc:
            dest.unlink(missing_ok=True)
            return _validation_response([("file", str(exc))])
        font_id = entry.family_id
        service.fonts[font_id] = {
            "path": str(dest),
            "family_name": entry.display_name,
        }
        return {"font_id": font_id, "family_name": entry.display_name}

    @app.get("/api/fonts")
    async def list_fonts():
        return [
            {"font_id": font_id, "family_name": info["family_name"]}
            for font_id, info in service.fonts.items()
        ]

    @app.post("/api/corpus")
    async def upload_corpus(file: UploadFile):
        data = await file.read()
        try:
            text = data.decode("utf-8-sig")
        except UnicodeDecodeError as exc:
            return _validation_response([("file", f"not valid UTF-8: {exc}")])
        corpus_id = uuid.uuid4().hex[:12]
        dest = service.workdir / f"corpus-{corpus_id}.txt"
        dest.write_text(text, encoding="utf-8")
        service.corpora[corpus_id] = dest
        return {"corpus_id": corpus_id, "chars": len(text)}

    @app.post("/api/preview")
    async def preview_samples(request: Request):
        body = await _read_json(request)
        if body is None or not isinstance(body, dict):
            return JSONResponse(status_code=400, content={"error": "malformed JSON body"})
        count = body.get("count", 8)
        if not isinstance(count, int) or count < 0 or count > MAX_PREVIEW:
            return _validation_response(
                [("count", f"count must be an integer in [0, {MAX_PREVIEW}]")]
            )
        try:
            cfg = GeneratorConfig.from_dict(service.resolve_uploads(body.get("config", {})))
        except ConfigValidationError as exc:
            return _validation_response(exc.errors)
        try:
            records = preview(cfg, count)
        except OcrForgeError as exc:
            return _validation_response([("config", str(exc))])
        return [
            {
                "png_base64": base64.b64encode(r.image_png).decode("ascii"),
                "label": r.label,
            }
            for r in records
        ]

    @app.post("/api/jobs")
    async def create_job(request: Request):
        body = await _read_json(request)
        if body is None or not isinstance(body, dict):
            return JSONResponse(status_code=400, content={"error": "malformed JSON body"})
        with service.lock:
            if service.running_job() is not None:
                return JSONResponse(
                    status_code=409, content={"error": "a generation job is already running"}
                )
            try:
                cfg = GeneratorConfig.from_dict(
                    service.resolve_uploads(body.get("config", body))
                )
            except ConfigValidationError as exc:
                return _validation_response(exc.errors)
            job = Job(id=uuid.uuid4().hex[:12], config=cfg, total=cfg.count)
            job.output_dir = service.workdir / f"job-{job.id}"
            job.output_dir.mkdir()
            service.jobs[job.id] = job

        def run():
            job.state = "running"
            try:
                def on_progress(event):
                    job.produced = event.produced
                    job.skips = event.skips

                generate(
                    cfg,
                    job.output_dir,
                    progress=on_progress,
                    cancel=job.cancel_event.is_set,
                )
                job.produced = job.total
                job.state = "done"
            except Exception as exc:
                job.error = str(exc)
                job.state = "failed"

        threading.Thread(target=run, name=f"ocrforge-job-{job.id}", daemon=True).start()
        return {"job_id": job.id}

    @app.get("/api/jobs/{job_id}")
    async def job_status(job_id: str):
        job = service.jobs.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"unknown job {job_id!r}"})
        return job.to_dict()

    @app.get("/api/jobs/{job_id}/archive")
    async def job_archive(job_id: str):
        job = service.jobs.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"unknown job {job_id!r}"})
        if job.state != "done":
            return JSONResponse(
                status_code=409,
                content={"error": f"job is {job.state}; archive available when done"},
            )
        archive = job.archive_path
        if archive is None:
            return JSONResponse(
                status_code=409,
                content={"error": "job storage mode did not produce a single zip archive"},
            )
        return FileResponse(
            archive,
            media_type="application/zip",
            filename="dataset.zip",
        )

    @app.delete("/api/jobs/{job_id}")
    async def cancel_job(job_id: str):
        job = service.jobs.get(job_id)
        if job is None:
            return JSONResponse(status_code=404, content={"error": f"unknown job {job_id!r}"})
        job.cancel_event.set()
        return {"job_id": job.id, "state": job.state, "cancelling": True}

    if static_dir and Path(static_dir).is_dir():
        from fastapi.staticfiles import StaticFiles

        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")

    return app


def main() -> None:
    import argparse

    import uvicorn

    parser = argparse.ArgumentParser(description="ocrforge preview service")
    parser.add_argument("--host", default="127.0.0.1")
    parser.add_argument("--port", type=int, default=DEFAULT_PORT)
    parser.add_argument("--static", default=None, help="directory of UI assets to serve at /")
    args = parser.parse_args()
    uvicorn.run(create_app(static_dir=args.static), host=args.host, port=args.port)


if __name__ == "__main__":
    main()
