"""Command-line front door: generate, preview, verify and bench.

Exit codes: 0 success, 1 runtime failure, 2 flag/config errors.  Human
output goes to stderr; with --json a machine-readable summary is printed
on stdout.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import (
    DEFAULT_MEMORY_BUDGET,
    COLOR_PRESETS,
    FontConfig,
    GeneratorConfig,
    parse_color,
    parse_range,
)
from .augment import TRANSFORM_ORDER, AugmentationConfig
from .errors import ConfigValidationError, OcrForgeError
from .renderer import BackgroundSpec
from .textprep import KASHMIRI_RANGES

BENCH_DEFAULT_SIZES = (1000, 10000, 50000)


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _parse_memory(value: str) -> int:
    suffixes = {"k": 1024, "m": 1024**2, "g": 1024**3}
    v = value.strip().lower().rstrip("ib")
    if v and v[-1] in suffixes:
        return int(float(v[:-1]) * suffixes[v[-1]])
    return int(v)


def _parse_fonts(specs: list[str]) -> tuple[FontConfig, ...]:
    entries = []
    explicit = 0
    for spec in specs:
        path, sep, pct = spec.rpartition(":")
        if sep and path:
            entries.append(FontConfig(path=path, percentage=float(pct)))
            explicit += 1
        else:
            entries.append(FontConfig(path=spec, percentage=0.0))
    if explicit and explicit != len(entries):
        raise ConfigValidationError(
            [("fonts", "mix of explicit and omitted font percentages; give all or none")]
        )
    if not explicit and entries:
        share = 100.0 / len(entries)
        entries = [FontConfig(path=e.path, percentage=share) for e in entries]
    return tuple(entries)


def _parse_backgrounds(specs: list[str]) -> BackgroundSpec:
    def leaf(token: str) -> BackgroundSpec:
        if token in COLOR_PRESETS or token.startswith("#"):
            return BackgroundSpec(mode="color", color=parse_color(token))
        return BackgroundSpec(mode="image", image_path=token)

    if not specs:
        return BackgroundSpec()
    if len(specs) == 1 and ":" not in specs[0].rpartition("/")[2]:
        return leaf(specs[0])
    options = []
    for spec in specs:
        token, sep, pct = spec.rpartition(":")
        if not sep:
            token, pct = spec, None
        if pct is None:
            raise ConfigValidationError(
                [("background", f"{spec!r}: every mix option needs :PCT")]
            )
        options.append((leaf(token), float(pct)))
    if len(options) == 1:
        return options[0][0]
    return BackgroundSpec(mode="mix", mix_options=tuple(options))


def _resolve_transforms(enabled: list[str], disabled: list[str]) -> tuple[str, ...]:
    for name in enabled + disabled:
        if name not in TRANSFORM_ORDER:
            raise ConfigValidationError(
                [("augmentation.enabled", f"unknown transform {name!r}")]
            )
    clash = set(enabled) & set(disabled)
    if clash:
        name = sorted(clash)[0]
        raise ConfigValidationError(
            [("augmentation.enabled",
              f"conflicting flags --enable {name} and --disable {name}")]
        )
    base = list(enabled) if enabled else list(TRANSFORM_ORDER)
    return tuple(k for k in TRANSFORM_ORDER if k in base and k not in disabled)


def _add_generation_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="JSON config file; explicit flags win")
    p.add_argument("--corpus", help="UTF-8 corpus file")
    p.add_argument("--font", action="append", default=[], metavar="PATH[:PCT]",
                   help="font file with optional percentage (repeatable)")
    p.add_argument("--mode", choices=["char", "word", "ngram", "sentence", "line"])
    p.add_argument("--count", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--width", type=int)
    p.add_argument("--height", type=int)
    p.add_argument("--len-min", type=int, dest="len_min")
    p.add_argument("--len-max", type=int, dest="len_max")
    p.add_argument("--size-min", type=int)
    p.add_argument("--size-max", type=int)
    p.add_argument("--size-dist", choices=["normal", "uniform"])
    p.add_argument("--aug-prob", type=float)
    p.add_argument("--aug-max", type=int)
    p.add_argument("--enable", action="append", default=[], metavar="TRANSFORM")
    p.add_argument("--disable", action="append", default=[], metavar="TRANSFORM")
    p.add_argument("--format", choices=["crnn", "trocr", "csv", "huggingface"])
    p.add_argument("--output", help="output path")
    p.add_argument("--storage", choices=["zip", "chunked", "files"])
    p.add_argument("--batch-size", type=int)
    p.add_argument("--split", type=float)
    p.add_argument("--direction", choices=["rtl", "ltr"])
    p.add_argument("--align", choices=["left", "center", "right"])
    p.add_argument("--ranges", action="append", default=[], metavar="HEXLO-HEXHI")
    p.add_argument("--bg", action="append", default=[], metavar="COLOR|IMAGE[:PCT]")
    p.add_argument("--text-color", metavar="COLOR")
    p.add_argument("--workers", type=int)
    p.add_argument("--memory-budget", metavar="BYTES")
    p.add_argument("--timestamp", action="store_true", default=None,
                   help="embed a wall-clock timestamp in metadata.json "
                        "(breaks byte reproducibility)")
    p.add_argument("--no-antialias", action="store_true", default=None,
                   help="threshold glyph coverage to an exact two-color image")
    p.add_argument("--json", action="store_true", help="machine summary on stdout")


def _config_from_args(args) -> GeneratorConfig:
    data: dict = {}
    if args.config:
        data = json.loads(Path(args.config).read_text(encoding="utf-8"))
    base = GeneratorConfig.from_dict(data) if data else None

    def pick(flag, fallback, default):
        if flag is not None:
            return flag
        if base is not None:
            return fallback
        return default

    fonts = _parse_fonts(args.font) if args.font else (base.fonts if base else ())
    background = (
        _parse_backgrounds(args.bg) if args.bg
        else (base.background if base else BackgroundSpec())
    )
    ranges = (
        tuple(parse_range(r) for r in args.ranges) if args.ranges
        else (base.script_ranges if base else KASHMIRI_RANGES)
    )
    aug_base = base.augmentation if base else AugmentationConfig()
    augmentation = AugmentationConfig(
        probability=pick(args.aug_prob, aug_base.probability, 0.7),
        max_transforms=pick(args.aug_max, aug_base.max_transforms, 4),
        enabled=(
            _resolve_transforms(args.enable, args.disable)
            if (args.enable or args.disable)
            else aug_base.enabled
        ),
        rotation_max_degrees=aug_base.rotation_max_degrees,
        skew_max=aug_base.skew_max,
        blur_sigma=aug_base.blur_sigma,
        motion_kernel=aug_base.motion_kernel,
        noise_sigma=aug_base.noise_sigma,
        salt_pepper_prob=aug_base.salt_pepper_prob,
        jpeg_quality=aug_base.jpeg_quality,
        resolution_scale=aug_base.resolution_scale,
        brightness_delta=aug_base.brightness_delta,
        contrast_gamma=aug_base.contrast_gamma,
    )
    return GeneratorConfig(
        corpus_path=pick(args.corpus, base.corpus_path if base else "", ""),
        fonts=fonts,
        count=pick(args.count, base.count if base else 1, 1),
        seed=pick(args.seed, base.seed if base else 42, 42),
        width=pick(args.width, base.width if base else 256, 256),
        height=pick(args.height, base.height if base else 64, 64),
        mode=pick(args.mode, base.mode if base else "word", "word"),
        min_graphemes=pick(args.len_min, base.min_graphemes if base else 1, 1),
        max_graphemes=pick(args.len_max, base.max_graphemes if base else 50, 50),
        script_ranges=ranges,
        size_min=pick(args.size_min, base.size_min if base else 28, 28),
        size_max=pick(args.size_max, base.size_max if base else 42, 42),
        size_distribution=pick(args.size_dist, base.size_distribution if base else "normal", "normal"),
        background=background,
        augmentation=augmentation,
        text_color=(
            parse_color(args.text_color) if args.text_color
            else (base.text_color if base else (0, 0, 0))
        ),
        direction=pick(args.direction, base.direction if base else "rtl", "rtl"),
        alignment=pick(args.align, base.alignment if base else "center", "center"),
        padding_left=base.padding_left if base else 10,
        padding_right=base.padding_right if base else 10,
        split_ratio=pick(args.split, base.split_ratio if base else 0.9, 0.9),
        output_format=pick(args.format, base.output_format if base else "crnn", "crnn"),
        storage_mode=pick(args.storage, base.storage_mode if base else "zip", "zip"),
        batch_size=pick(args.batch_size, base.batch_size if base else 10000, 10000),
        memory_budget=(
            _parse_memory(args.memory_budget) if args.memory_budget
            else (base.memory_budget if base else DEFAULT_MEMORY_BUDGET)
        ),
        workers=pick(args.workers, base.workers if base else 1, 1),
        antialias=(
            False if args.no_antialias
            else (base.antialias if base else True)
        ),
        timestamp=pick(args.timestamp, base.timestamp if base else False, False),
    )


def _cmd_generate(args) -> int:
    from .engine import generate

    cfg = _config_from_args(args)
    if not args.output:
        _log("error: --output is required")
        return 2
    last = {"produced": 0, "rate": 0.0}

    def progress(event):
        last.update(produced=event.produced, rate=event.rate)
        _log(
            f"  {event.produced}/{event.total} samples "
            f"({event.rate:.1f}/s, {event.skips} skips)"
        )

    manifest = generate(cfg, args.output, progress=progress)
    _log(
        f"generated {manifest.counts['total']} samples -> {args.output} "
        f"(clean {manifest.counts['clean']}, augmented {manifest.counts['augmented']})"
    )
    if args.json:
        print(json.dumps({
            "output": args.output,
            "counts": manifest.counts,
            "rate": last["rate"],
            "transform_counts": manifest.transform_counts,
            "segment_skips": manifest.segment_skips,
        }, ensure_ascii=False))
    return 0


def _cmd_preview(args) -> int:
    from .engine import preview
    from .packaging import LABEL_EXTENSIONS, encode_labels, filename_for

    cfg = _config_from_args(args)
    if not args.output:
        _log("error: --output is required")
        return 2
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    records = preview(cfg, args.samples)
    for r in records:
        (out / filename_for(r.index)).write_bytes(r.image_png)
    ext = LABEL_EXTENSIONS[cfg.output_format]
    (out / f"labels_preview.{ext}").write_bytes(encode_labels(records, cfg.output_format))
    _log(f"wrote {len(records)} preview samples to {out}")
    if args.json:
        print(json.dumps(
            {"output": str(out), "samples": [
                {"file": filename_for(r.index), "label": r.label} for r in records
            ]},
            ensure_ascii=False,
        ))
    return 0


def _cmd_verify(args) -> int:
    from .packaging import verify

    report = verify(args.path)
    for failure in report.failures:
        _log(f"FAIL [{failure.kind}] {failure.path}: {failure.detail}")
    _log(report.summary())
    if args.json:
        print(json.dumps({
            "ok": report.ok,
            "images": report.images_checked,
            "labels": report.labels_checked,
            "failures": [
                {"kind": f.kind, "path": f.path, "detail": f.detail}
                for f in report.failures
            ],
        }, ensure_ascii=False))
    return 0 if report.ok else 1


def _cmd_bench(args) -> int:
    import tempfile

    from .engine import bench

    cfg = _config_from_args(args)
    sizes = [int(s) for s in args.sizes.split(",")] if args.sizes else list(BENCH_DEFAULT_SIZES)
    with tempfile.TemporaryDirectory(prefix="ocrforge-bench-") as tmp:
        rows = bench(cfg, sizes, tmp)
    header = f"{'size':>8}  {'seconds':>9}  {'samples/s':>10}  {'output MB':>10}"
    _log(header)
    _log("-" * len(header))
    for row in rows:
        _log(
            f"{row.size:>8}  {row.seconds:>9.1f}  {row.rate:>10.1f}  "
            f"{row.output_bytes / 1e6:>10.1f}"
        )
    if args.json:
        print(json.dumps({"rows": [
            {"size": r.size, "seconds": r.seconds, "rate": r.rate,
             "output_bytes": r.output_bytes}
            for r in rows
        ]}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ocrforge",
        description="Deterministic synthetic text-image dataset generator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_gen = sub.add_parser("generate", help="generate a dataset")
    _add_generation_flags(p_gen)
    p_gen.set_defaults(func=_cmd_generate)

    p_prev = sub.add_parser("preview", help="render the first K samples")
    _add_generation_flags(p_prev)
    p_prev.add_argument("--samples", type=int, default=8, metavar="K")
    p_prev.set_defaults(func=_cmd_preview)

    p_ver = sub.add_parser("verify", help="integrity-check a dataset")
    p_ver.add_argument("path")
    p_ver.add_argument("--json", action="store_true")
    p_ver.set_defaults(func=_cmd_verify)

    p_bench = sub.add_parser("bench", help="throughput benchmark")
    _add_generation_flags(p_bench)
    p_bench.add_argument(
        "--sizes", metavar="N,N,...",
        help=f"dataset sizes (default {','.join(map(str, BENCH_DEFAULT_SIZES))})",
    )
    p_bench.set_defaults(func=_cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ConfigValidationError as exc:
        for path, msg in exc.errors:
            _log(f"error: {path}: {msg}")
        return 2
    except OcrForgeError as exc:
        _log(f"error: {exc}")
        return 1
    except (OSError, ValueError, json.JSONDecodeError) as exc:
        _log(f"error: {exc}")
        return 1


if __name__ == "__main__":
    sys.exit(main())
