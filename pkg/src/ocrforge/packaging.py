"""Dataset packaging: label formats, splits, storage modes, verification.

Layout (identical across storage modes):

    images/image_000000.png ...
    labels_train.<ext>   labels_val.<ext>     (ext per format)
    metadata.json                             (always last)

Three storage modes: a single in-memory zip, chunked part-archives of at
most batch_size images each (plus a final manifest chunk), and a plain
directory tree with periodic label checkpoints.  Every emitted byte is a
pure function of the records and manifest fields: zip entries carry fixed
timestamps/attrs, PNG and deflate settings are pinned, and the manifest has
a fixed key order.
"""

from __future__ import annotations

import hashlib
import io
import json
import math
import zipfile
from dataclasses import dataclass, field
from pathlib import Path

from .errors import LabelFormatError, SplitError
from .textprep import normalize

PNG_SIGNATURE = b"\x89PNG\r\n\x1a\n"
BOM = "﻿"

LABEL_EXTENSIONS = {"crnn": "txt", "trocr": "jsonl", "csv": "csv", "huggingface": "csv"}

_ZIP_DATE = (1980, 1, 1, 0, 0, 0)
_DEFLATE_LEVEL = 6


@dataclass(frozen=True)
class SampleRecord:
    index: int
    image_png: bytes
    label: str
    font_used: str = ""
    size_used: int = 0
    recipe_summary: str = ""

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"negative sample index {self.index}")
        if not self.image_png.startswith(PNG_SIGNATURE):
            raise ValueError(f"record {self.index}: image bytes are not a PNG")
        if not self.label:
            raise ValueError(f"record {self.index}: empty label")


def filename_for(index: int) -> str:
    """image_NNNNNN.png, zero-based, pad width 6 (growing past 10^6 - 1)."""
    if index < 0:
        raise ValueError(f"negative sample index {index}")
    return f"image_{index:06d}.png"


def _csv_row(name: str, label: str) -> str:
    return '"%s","%s"' % (name, label.replace('"', '""'))


def encode_labels(records, fmt: str) -> bytes:
    """Serialize labels; UTF-8, one leading BOM, LF endings, trailing newline."""
    if fmt not in LABEL_EXTENSIONS:
        raise ValueError(f"unknown label format {fmt!r}")
    records = list(records)
    if not records:
        raise ValueError("cannot encode an empty record list")
    lines: list[str] = []
    if fmt == "crnn":
        for r in records:
            if "\t" in r.label or "\n" in r.label or "\r" in r.label:
                raise LabelFormatError(
                    f"crnn cannot represent label of record {r.index} "
                    "(contains a tab or line break)"
                )
            lines.append(f"{filename_for(r.index)}\t{r.label}")
    elif fmt == "trocr":
        for r in records:
            lines.append(
                json.dumps(
                    {"image": f"images/{filename_for(r.index)}", "text": r.label},
                    ensure_ascii=False,
                    separators=(",", ":"),
                )
            )
    elif fmt == "csv":
        for r in records:
            lines.append(_csv_row(f"images/{filename_for(r.index)}", r.label))
    else:  # huggingface
        lines.append("file_name,text")
        for r in records:
            lines.append(_csv_row(f"images/{filename_for(r.index)}", r.label))
    return (BOM + "\n".join(lines) + "\n").encode("utf-8")


def _parse_csv_line(line: str) -> tuple[str, str]:
    if not line.startswith('"'):
        raise ValueError(f"unquoted csv line: {line[:40]!r}")
    fields = []
    i = 1
    cur = []
    while i < len(line):
        ch = line[i]
        if ch == '"':
            if i + 1 < len(line) and line[i + 1] == '"':
                cur.append('"')
                i += 2
                continue
            fields.append("".join(cur))
            cur = []
            # expect ," or end
            if i + 2 < len(line) and line[i + 1] == "," and line[i + 2] == '"':
                i += 3
                continue
            i += 1
            break
        cur.append(ch)
        i += 1
    if len(fields) != 2:
        raise ValueError(f"expected two quoted fields: {line[:40]!r}")
    return fields[0], fields[1]


def decode_labels(data: bytes, fmt: str) -> list[tuple[str, str]]:
    """Inverse of encode_labels: (image name, label) pairs."""
    text = data.decode("utf-8")
    if text.startswith(BOM):
        text = text[len(BOM):]
    lines = text.split("\n")
    if lines and lines[-1] == "":
        lines.pop()
    out: list[tuple[str, str]] = []
    if fmt == "crnn":
        for line in lines:
            name, sep, label = line.partition("\t")
            if not sep:
                raise ValueError(f"missing tab in crnn line: {line[:40]!r}")
            out.append((name, label))
    elif fmt == "trocr":
        for line in lines:
            obj = json.loads(line)
            out.append((obj["image"].removeprefix("images/"), obj["text"]))
    elif fmt in ("csv", "huggingface"):
        if fmt == "huggingface":
            if not lines or lines[0] != "file_name,text":
                raise ValueError("missing huggingface header")
            lines = lines[1:]
        for line in lines:
            name, label = _parse_csv_line(line)
            out.append((name.removeprefix("images/"), label))
    else:
        raise ValueError(f"unknown label format {fmt!r}")
    return out


def split_train_val(records, ratio: float):
    """First floor(ratio * N) records to train, the rest to val."""
    if not 0.0 < ratio < 1.0:
        raise ValueError(f"split ratio must be in (0, 1), got {ratio}")
    records = list(records)
    if len(records) < 2:
        raise SplitError(f"cannot split {len(records)} record(s)")
    boundary = math.floor(ratio * len(records))
    return records[:boundary], records[boundary:]


def train_boundary(total: int, ratio: float) -> int:
    return math.floor(ratio * total)


# --- manifest ----------------------------------------------------------------


@dataclass
class DatasetManifest:
    tool_version: str
    master_seed: int
    config: dict
    counts: dict
    transform_counts: dict
    rejected_segments: int
    segment_skips: int
    throttle_events: int
    missing_glyphs: int
    char_histogram: dict
    checksums: list
    chunks: list | None = None
    timestamp: str | None = None

    def to_dict(self) -> dict:
        # key order is part of the byte format
        out = {
            "tool_version": self.tool_version,
            "master_seed": self.master_seed,
            "config": self.config,
            "counts": self.counts,
            "transform_counts": self.transform_counts,
            "rejected_segments": self.rejected_segments,
            "segment_skips": self.segment_skips,
            "throttle_events": self.throttle_events,
            "missing_glyphs": self.missing_glyphs,
            "char_histogram": self.char_histogram,
        }
        if self.chunks is not None:
            out["chunks"] = self.chunks
        if self.timestamp is not None:
            out["timestamp"] = self.timestamp
        out["checksums"] = self.checksums
        return out

    def to_json_bytes(self) -> bytes:
        return (json.dumps(self.to_dict(), indent=2, ensure_ascii=False) + "\n").encode("utf-8")

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetManifest":
        return cls(
            tool_version=data.get("tool_version", ""),
            master_seed=data.get("master_seed", 0),
            config=data.get("config", {}),
            counts=data.get("counts", {}),
            transform_counts=data.get("transform_counts", {}),
            rejected_segments=data.get("rejected_segments", 0),
            segment_skips=data.get("segment_skips", 0),
            throttle_events=data.get("throttle_events", 0),
            missing_glyphs=data.get("missing_glyphs", 0),
            char_histogram=data.get("char_histogram", {}),
            checksums=data.get("checksums", []),
            chunks=data.get("chunks"),
            timestamp=data.get("timestamp"),
        )


def _sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def _zip_add(zf: zipfile.ZipFile, name: str, data: bytes) -> None:
    info = zipfile.ZipInfo(name, date_time=_ZIP_DATE)
    info.compress_type = zipfile.ZIP_DEFLATED
    info.create_system = 3
    info.external_attr = 0o644 << 16
    zf.writestr(info, data, compresslevel=_DEFLATE_LEVEL)


# --- writers ------------------------------------------------------------------


class DatasetWriter:
    """Single-consumer sink; records must arrive in ascending index order.

    Subclasses implement the storage mode.  finalize() writes label files
    and the manifest and returns the populated DatasetManifest.
    """

    def __init__(self, sink, fmt: str, total: int, split_ratio: float):
        if fmt not in LABEL_EXTENSIONS:
            raise ValueError(f"unknown label format {fmt!r}")
        if total < 2:
            raise SplitError(f"cannot split a {total}-record dataset")
        self.sink = Path(sink)
        self.fmt = fmt
        self.total = total
        self.boundary = train_boundary(total, split_ratio)
        self.records_seen = 0
        self.checksums: list[dict] = []
        self._last_index = -1

    @property
    def label_ext(self) -> str:
        return LABEL_EXTENSIONS[self.fmt]

    @property
    def buffered_bytes(self) -> int:
        return 0

    def _check_order(self, record: SampleRecord) -> None:
        if record.index <= self._last_index:
            raise ValueError(
                f"records must arrive in ascending order "
                f"(got {record.index} after {self._last_index})"
            )
        self._last_index = record.index

    def add(self, record: SampleRecord) -> None:
        raise NotImplementedError

    def finalize(self, manifest: DatasetManifest) -> DatasetManifest:
        raise NotImplementedError

    def abort(self) -> None:
        raise NotImplementedError


class FilesWriter(DatasetWriter):
    """Plain directory tree; labels checkpointed every 1000 samples."""

    CHECKPOINT_EVERY = 1000

    def __init__(self, sink, fmt, total, split_ratio):
        super().__init__(sink, fmt, total, split_ratio)
        self.images_dir = self.sink / "images"
        self.images_dir.mkdir(parents=True, exist_ok=True)
        self._train: list[SampleRecord] = []
        self._val: list[SampleRecord] = []

    def _label_records(self, record: SampleRecord) -> None:
        slim = SampleRecord(
            index=record.index,
            image_png=PNG_SIGNATURE,  # labels only need index + text
            label=record.label,
        )
        (self._train if record.index < self.boundary else self._val).append(slim)

    def add(self, record: SampleRecord) -> None:
        self._check_order(record)
        name = filename_for(record.index)
        (self.images_dir / name).write_bytes(record.image_png)
        self.checksums.append({"path": f"images/{name}", "sha256": _sha256(record.image_png)})
        self._label_records(record)
        self.records_seen += 1
        if self.records_seen % self.CHECKPOINT_EVERY == 0:
            self._write_labels()

    def _write_labels(self) -> list[dict]:
        entries = []
        for part, recs in (("train", self._train), ("val", self._val)):
            if not recs:
                continue
            data = encode_labels(recs, self.fmt)
            path = self.sink / f"labels_{part}.{self.label_ext}"
            path.write_bytes(data)
            entries.append({"path": path.name, "sha256": _sha256(data)})
        return entries

    def finalize(self, manifest: DatasetManifest) -> DatasetManifest:
        manifest.checksums = self.checksums + self._write_labels()
        (self.sink / "metadata.json").write_bytes(manifest.to_json_bytes())
        return manifest

    def abort(self) -> None:
        (self.sink / "FAILED").write_text("generation failed; output incomplete\n")


class ZipWriter(DatasetWriter):
    """Whole archive accumulated in memory, written once at finalize."""

    def __init__(self, sink, fmt, total, split_ratio):
        super().__init__(sink, fmt, total, split_ratio)
        sink = Path(sink)
        self.archive_path = sink if sink.suffix == ".zip" else sink / "dataset.zip"
        self.archive_path.parent.mkdir(parents=True, exist_ok=True)
        self._buffer = io.BytesIO()
        self._zip = zipfile.ZipFile(self._buffer, "w")
        self._train: list[SampleRecord] = []
        self._val: list[SampleRecord] = []

    @property
    def buffered_bytes(self) -> int:
        return self._buffer.tell()

    def add(self, record: SampleRecord) -> None:
        self._check_order(record)
        name = filename_for(record.index)
        _zip_add(self._zip, f"images/{name}", record.image_png)
        self.checksums.append({"path": f"images/{name}", "sha256": _sha256(record.image_png)})
        slim = SampleRecord(index=record.index, image_png=PNG_SIGNATURE, label=record.label)
        (self._train if record.index < self.boundary else self._val).append(slim)
        self.records_seen += 1

    def finalize(self, manifest: DatasetManifest) -> DatasetManifest:
        for part, recs in (("train", self._train), ("val", self._val)):
            if not recs:
                continue
            data = encode_labels(recs, self.fmt)
            name = f"labels_{part}.{self.label_ext}"
            _zip_add(self._zip, name, data)
            self.checksums.append({"path": name, "sha256": _sha256(data)})
        manifest.checksums = self.checksums
        _zip_add(self._zip, "metadata.json", manifest.to_json_bytes())
        self._zip.close()
        self.archive_path.write_bytes(self._buffer.getvalue())
        return manifest

    def abort(self) -> None:
        self._zip.close()
        self.archive_path.unlink(missing_ok=True)


class ChunkedZipWriter(DatasetWriter):
    """Part archives of at most batch_size images, plus a manifest chunk."""

    def __init__(self, sink, fmt, total, split_ratio, batch_size: int):
        super().__init__(sink, fmt, total, split_ratio)
        if batch_size < 1:
            raise ValueError(f"batch size must be >= 1, got {batch_size}")
        self.batch_size = batch_size
        self.sink.mkdir(parents=True, exist_ok=True)
        self.chunks: list[dict] = []
        self._chunk: list[SampleRecord] = []
        self._chunk_bytes = 0

    @property
    def buffered_bytes(self) -> int:
        return self._chunk_bytes

    def _chunk_name(self) -> str:
        return f"dataset.part-{len(self.chunks):04d}.zip"

    def add(self, record: SampleRecord) -> None:
        self._check_order(record)
        self._chunk.append(record)
        self._chunk_bytes += len(record.image_png)
        self.records_seen += 1
        if len(self._chunk) >= self.batch_size:
            self._flush_chunk()

    def _flush_chunk(self) -> None:
        if not self._chunk:
            return
        name = self._chunk_name()
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as zf:
            train = [r for r in self._chunk if r.index < self.boundary]
            val = [r for r in self._chunk if r.index >= self.boundary]
            for r in self._chunk:
                member = f"images/{filename_for(r.index)}"
                _zip_add(zf, member, r.image_png)
                self.checksums.append(
                    {"path": f"{name}/{member}", "sha256": _sha256(r.image_png)}
                )
            for part, recs in (("train", train), ("val", val)):
                if not recs:
                    continue
                data = encode_labels(recs, self.fmt)
                member = f"labels_{part}.{self.label_ext}"
                _zip_add(zf, member, data)
                self.checksums.append({"path": f"{name}/{member}", "sha256": _sha256(data)})
        (self.sink / name).write_bytes(buf.getvalue())
        self.chunks.append({"name": name, "images": len(self._chunk)})
        self._chunk = []
        self._chunk_bytes = 0

    def finalize(self, manifest: DatasetManifest) -> DatasetManifest:
        self._flush_chunk()
        manifest.checksums = self.checksums
        name = self._chunk_name()
        self.chunks.append({"name": name, "images": 0})
        manifest.chunks = self.chunks
        buf = io.BytesIO()
        with zipfile.ZipFile(buf, "w") as zf:
            _zip_add(zf, "metadata.json", manifest.to_json_bytes())
        (self.sink / name).write_bytes(buf.getvalue())
        return manifest

    def abort(self) -> None:
        for part in self.sink.glob("dataset.part-*.zip"):
            part.unlink()


def make_writer(mode: str, sink, fmt: str, total: int, split_ratio: float, batch_size: int):
    if mode == "files":
        return FilesWriter(sink, fmt, total, split_ratio)
    if mode == "zip":
        return ZipWriter(sink, fmt, total, split_ratio)
    if mode == "chunked":
        return ChunkedZipWriter(sink, fmt, total, split_ratio, batch_size)
    raise ValueError(f"unknown storage mode {mode!r}")


def build_archive(records, fmt: str, mode: str, sink, *, split_ratio: float = 0.9,
                  batch_size: int = 10000, manifest: DatasetManifest | None = None) -> DatasetManifest:
    """One-shot packaging of a finished record list."""
    records = sorted(records, key=lambda r: r.index)
    writer = make_writer(mode, sink, fmt, len(records), split_ratio, batch_size)
    if manifest is None:
        manifest = DatasetManifest(
            tool_version="0", master_seed=0, config={},
            counts={"total": len(records)}, transform_counts={},
            rejected_segments=0, segment_skips=0, throttle_events=0,
            missing_glyphs=0, char_histogram={}, checksums=[],
        )
    try:
        for r in records:
            writer.add(r)
        return writer.finalize(manifest)
    except Exception:
        writer.abort()
        raise


# --- verification -------------------------------------------------------------


@dataclass(frozen=True)
class Failure:
    kind: str  # png_signature | count_mismatch | label_parse | label_nfc |
    #            checksum_mismatch | missing_file | manifest
    path: str
    detail: str


@dataclass
class VerificationReport:
    failures: list[Failure] = field(default_factory=list)
    images_checked: int = 0
    labels_checked: int = 0

    @property
    def ok(self) -> bool:
        return not self.failures

    def of_kind(self, kind: str) -> list[Failure]:
        return [f for f in self.failures if f.kind == kind]

    def summary(self) -> str:
        status = "OK" if self.ok else f"{len(self.failures)} failure(s)"
        return (
            f"verification: {status} "
            f"({self.images_checked} images, {self.labels_checked} labels)"
        )


class _Dataset:
    """Uniform member access over the three storage layouts."""

    def __init__(self, path):
        path = Path(path)
        self.members: dict[str, bytes] = {}
        if path.is_file() and path.suffix == ".zip":
            with zipfile.ZipFile(path) as zf:
                for name in zf.namelist():
                    self.members[name] = zf.read(name)
        elif path.is_dir():
            parts = sorted(path.glob("dataset.part-*.zip"))
            if parts:
                for part in parts:
                    with zipfile.ZipFile(part) as zf:
                        for name in zf.namelist():
                            key = name if name == "metadata.json" else f"{part.name}/{name}"
                            self.members[key] = zf.read(name)
            else:
                single = path / "dataset.zip"
                if single.exists():
                    with zipfile.ZipFile(single) as zf:
                        for name in zf.namelist():
                            self.members[name] = zf.read(name)
                else:
                    for p in sorted(path.rglob("*")):
                        if p.is_file():
                            self.members[str(p.relative_to(path)).replace("\\", "/")] = p.read_bytes()
        else:
            raise FileNotFoundError(f"no dataset at {path}")

    def images(self):
        return {k: v for k, v in self.members.items() if k.rsplit("/", 1)[-1].endswith(".png")}

    def label_files(self):
        return {
            k: v
            for k, v in self.members.items()
            if k.rsplit("/", 1)[-1].startswith("labels_")
        }

    def manifest_bytes(self):
        return self.members.get("metadata.json")


def verify(path) -> VerificationReport:
    """Integrity check over a generated dataset (directory, zip or chunks)."""
    report = VerificationReport()
    try:
        ds = _Dataset(path)
    except FileNotFoundError as exc:
        report.failures.append(Failure("manifest", str(path), str(exc)))
        return report

    raw_manifest = ds.manifest_bytes()
    manifest = None
    if raw_manifest is None:
        report.failures.append(Failure("manifest", "metadata.json", "manifest missing"))
    else:
        try:
            manifest = DatasetManifest.from_dict(json.loads(raw_manifest.decode("utf-8")))
        except (ValueError, UnicodeDecodeError) as exc:
            report.failures.append(Failure("manifest", "metadata.json", f"unreadable: {exc}"))

    images = ds.images()
    for name, data in sorted(images.items()):
        if not data.startswith(PNG_SIGNATURE):
            report.failures.append(Failure("png_signature", name, "missing PNG signature"))
    report.images_checked = len(images)

    # label parsing + NFC
    fmt = None
    if manifest:
        fmt = manifest.config.get("format")
    if fmt is None:
        exts = {k.rsplit(".", 1)[-1] for k in ds.label_files()}
        fmt = next((f for f, e in LABEL_EXTENSIONS.items() if e in exts), "crnn")
    label_total = 0
    for name, data in sorted(ds.label_files().items()):
        try:
            pairs = decode_labels(data, fmt)
        except (ValueError, KeyError) as exc:
            report.failures.append(Failure("label_parse", name, str(exc)))
            continue
        label_total += len(pairs)
        for image_name, label in pairs:
            if normalize(label) != label:
                report.failures.append(
                    Failure("label_nfc", name, f"label for {image_name} is not NFC")
                )
    report.labels_checked = label_total

    if label_total != len(images):
        report.failures.append(
            Failure(
                "count_mismatch",
                str(path),
                f"images={len(images)} labels={label_total}",
            )
        )

    if manifest:
        listed = {entry["path"]: entry["sha256"] for entry in manifest.checksums}
        for member_path, expected in sorted(listed.items()):
            data = ds.members.get(member_path)
            if data is None:
                report.failures.append(Failure("missing_file", member_path, "listed in manifest but absent"))
            elif _sha256(data) != expected:
                report.failures.append(
                    Failure("checksum_mismatch", member_path, "sha256 differs from manifest")
                )
    return report
