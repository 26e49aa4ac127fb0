"""End-to-end dataset generation.

Run shape: prepare and validate segments, Fisher-Yates shuffle them with
the master stream, then produce one sample per slot.  Every slot derives
its own substream from (seed, slot index), so output bytes do not depend
on generation order or worker count.

Fixed per-slot draw order (normative; reordering breaks reproducibility):

    1. font selection            (1 uniform)
    2. size sampling             (2 uniforms normal, 1 uniform uniform)
    3. background resolution     (1 uniform iff the background is a mix)
    4. augmentation gate         (1 uniform)
    5. transform count           (1 uniform, gated)
    6. transform selection       (m uniforms, partial Fisher-Yates)
    7. transform parameters      (per kind, in selection order)
    8. application-time noise    (per-pixel draws while applying)

A segment that cannot fit the canvas at the floor font size is skipped:
the slot advances to the next segment index (no extra randomness) for up
to M attempts, then the run fails.
"""

from __future__ import annotations

import concurrent.futures
import io
import time
from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from PIL import Image

from . import __version__
from .augment import AugmentationRecipe, apply as apply_recipe, plan_recipe
from .config import GeneratorConfig
from .errors import GenerationCancelled, GenerationError, UnfitTextError
from .fonts import FontEntry, FontSet, load_font, sample_size, select_font
from .packaging import DatasetManifest, SampleRecord, make_writer
from .prng import Stream, int_range, seed_state
from .renderer import (
    BackgroundSpec,
    background_base_color,
    paint_background,
    plan_layout,
    render,
    resolve_background,
)
from .textprep import Corpus, Segment, prepare

PROGRESS_EVERY = 1000

_PNG_COMPRESS_LEVEL = 6


@dataclass
class ProgressEvent:
    produced: int
    total: int
    rate: float
    skips: int
    memory_buffered: int


class MemoryGuard:
    """Producer throttle with 70%/50% hysteresis over a byte budget."""

    def __init__(self, budget: int):
        if budget <= 0:
            raise ValueError(f"memory budget must be > 0, got {budget}")
        self.budget = budget
        self.throttled = False
        self.events = 0

    def update(self, buffered_bytes: int) -> bool:
        if self.throttled:
            if buffered_bytes < 0.5 * self.budget:
                self.throttled = False
        elif buffered_bytes > 0.7 * self.budget:
            self.throttled = True
            self.events += 1
        return self.throttled


def _fisher_yates(items: list, stream_state):
    """Unbiased shuffle driven by the master stream; returns the end state."""
    state = stream_state
    for i in range(len(items) - 1, 0, -1):
        j, state = int_range(state, 0, i)
        items[i], items[j] = items[j], items[i]
    return state


def encode_png(img: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(img, "RGB").save(buf, format="PNG", compress_level=_PNG_COMPRESS_LEVEL)
    return buf.getvalue()


@dataclass
class SlotResult:
    record: SampleRecord
    recipe: AugmentationRecipe
    skips: int
    missing_glyphs: int
    segment_index: int


@dataclass
class RunContext:
    """Everything a slot needs, prepared once per run."""

    cfg: GeneratorConfig
    fonts: FontSet
    segments: tuple[Segment, ...]
    rejected: int

    @property
    def m(self) -> int:
        return len(self.segments)


def prepare_run(cfg: GeneratorConfig) -> RunContext:
    corpus = Corpus.load(cfg.corpus_path)
    prep = prepare(corpus, cfg.segmentation_config(), cfg.script_policy())
    arabic = any(lo <= 0x0600 <= hi or lo <= 0x06FF <= hi for lo, hi in cfg.script_ranges)
    entries = [load_font(f.path, f.percentage, arabic_policy=arabic) for f in cfg.fonts]
    fonts = FontSet(tuple(entries))

    segments = list(prep.segments)
    end_state = _fisher_yates(segments, seed_state(cfg.seed))
    del end_state  # master stream is spent after the shuffle
    return RunContext(cfg=cfg, fonts=fonts, segments=tuple(segments), rejected=prep.rejected)


@dataclass
class SlotPlan:
    """The resolved randomness of one slot, before any rasterization."""

    index: int
    segment: Segment
    font: FontEntry
    size: int
    background: BackgroundSpec
    recipe: AugmentationRecipe
    stream: Stream
    skips: int


def plan_slot(ctx: RunContext, index: int) -> SlotPlan:
    """Draws 1-7 of the slot draw order, plus the segment fit/skip walk."""
    cfg = ctx.cfg
    stream = Stream.for_sample(cfg.seed, index)
    font = select_font(ctx.fonts, stream)
    size = sample_size(cfg.size_policy(), stream)
    bg = resolve_background(cfg.background, stream)
    recipe = plan_recipe(cfg.augmentation, stream)

    skips = 0
    segment = None
    for attempt in range(ctx.m):
        candidate = ctx.segments[(index + attempt) % ctx.m]
        try:
            # fitting only measures; it consumes no randomness
            plan_layout(
                candidate, font, size, cfg.text_color, bg, cfg.width, cfg.height,
                cfg.direction, cfg.alignment, cfg.padding_left, cfg.padding_right,
                cfg.antialias,
            )
            segment = candidate
            break
        except UnfitTextError:
            skips += 1
    if segment is None:
        raise GenerationError(
            f"slot {index}: no segment fits a {cfg.width}x{cfg.height} canvas "
            f"after {ctx.m} attempts"
        )
    return SlotPlan(
        index=index, segment=segment, font=font, size=size,
        background=bg, recipe=recipe, stream=stream, skips=skips,
    )


def render_slot(ctx: RunContext, index: int) -> SlotResult:
    """Produce the finished record for one slot."""
    cfg = ctx.cfg
    slot = plan_slot(ctx, index)
    layout = plan_layout(
        slot.segment, slot.font, slot.size, cfg.text_color, slot.background,
        cfg.width, cfg.height, cfg.direction, cfg.alignment,
        cfg.padding_left, cfg.padding_right, cfg.antialias,
    )
    background = paint_background(slot.background, cfg.width, cfg.height)
    fill = background_base_color(slot.background, background)
    img = render(layout, background)
    img = apply_recipe(img, slot.recipe, fill, slot.stream)
    record = SampleRecord(
        index=index,
        image_png=encode_png(img),
        label=slot.segment.text,
        font_used=slot.font.display_name,
        size_used=layout.size,
        recipe_summary=slot.recipe.summary(),
    )
    return SlotResult(
        record=record,
        recipe=slot.recipe,
        skips=slot.skips,
        missing_glyphs=len(slot.font.missing_codepoints(slot.segment.text)),
        segment_index=(index + slot.skips) % ctx.m,
    )


@dataclass
class _RunStats:
    clean: int = 0
    augmented: int = 0
    skips: int = 0
    missing_glyphs: int = 0
    transform_counts: Counter = field(default_factory=Counter)
    char_histogram: Counter = field(default_factory=Counter)

    def absorb(self, result: SlotResult) -> None:
        if result.recipe.applied:
            self.augmented += 1
            self.transform_counts.update(result.recipe.kinds)
        else:
            self.clean += 1
        self.skips += result.skips
        self.missing_glyphs += result.missing_glyphs
        self.char_histogram.update(result.record.label)


def _build_manifest(cfg: GeneratorConfig, stats: _RunStats, ctx: RunContext,
                    guard: MemoryGuard) -> DatasetManifest:
    from .packaging import train_boundary

    boundary = train_boundary(cfg.count, cfg.split_ratio)
    timestamp = None
    if cfg.timestamp:
        timestamp = time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())
    config_echo = cfg.to_dict()
    # worker count is an execution parameter with no effect on output bytes;
    # normalize it so reruns at different parallelism stay byte-identical
    config_echo["workers"] = 1
    return DatasetManifest(
        tool_version=__version__,
        master_seed=cfg.seed,
        config=config_echo,
        counts={
            "total": cfg.count,
            "train": boundary,
            "val": cfg.count - boundary,
            "clean": stats.clean,
            "augmented": stats.augmented,
        },
        transform_counts={k: stats.transform_counts.get(k, 0)
                          for k in sorted(stats.transform_counts)},
        rejected_segments=ctx.rejected,
        segment_skips=stats.skips,
        throttle_events=guard.events,
        missing_glyphs=stats.missing_glyphs,
        char_histogram={ch: stats.char_histogram[ch]
                        for ch in sorted(stats.char_histogram)},
        checksums=[],
        timestamp=timestamp,
    )


def generate(cfg: GeneratorConfig, sink, progress=None, cancel=None) -> DatasetManifest:
    """Run the full pipeline into `sink`; returns the dataset manifest.

    progress: optional callback receiving ProgressEvent at least every
    1000 slots.  cancel: optional zero-argument callable polled per slot;
    a truthy return aborts the run (partial archives are removed, files
    mode leaves a FAILED marker).
    """
    ctx = prepare_run(cfg)
    writer = make_writer(
        cfg.storage_mode, sink, cfg.output_format, cfg.count,
        cfg.split_ratio, cfg.batch_size,
    )
    guard = MemoryGuard(cfg.memory_budget)
    stats = _RunStats()
    started = time.perf_counter()

    def report(produced: int, buffered: int) -> None:
        if progress is None:
            return
        elapsed = max(time.perf_counter() - started, 1e-9)
        progress(ProgressEvent(
            produced=produced, total=cfg.count, rate=produced / elapsed,
            skips=stats.skips, memory_buffered=buffered,
        ))

    try:
        if cfg.workers <= 1:
            for i in range(cfg.count):
                if cancel is not None and cancel():
                    raise GenerationCancelled(f"cancelled at slot {i}")
                result = render_slot(ctx, i)
                stats.absorb(result)
                writer.add(result.record)
                guard.update(writer.buffered_bytes)
                if (i + 1) % PROGRESS_EVERY == 0:
                    report(i + 1, writer.buffered_bytes)
        else:
            _generate_parallel(ctx, writer, guard, stats, report, cancel)
        report(cfg.count, writer.buffered_bytes)
        manifest = _build_manifest(cfg, stats, ctx, guard)
        return writer.finalize(manifest)
    except Exception:
        writer.abort()
        raise


def _generate_parallel(ctx, writer, guard, stats, report, cancel) -> None:
    """Worker pool over slots with an ordered reorder buffer.

    The writer only ever sees ascending indices, so multi-worker output is
    byte-identical to single-worker output.  When the guard throttles, no
    new slots are submitted until the buffer drains.
    """
    cfg = ctx.cfg
    window = max(16, 4 * cfg.workers)
    pending: dict[int, concurrent.futures.Future] = {}
    done_buffer: dict[int, SlotResult] = {}
    next_submit = 0
    next_write = 0

    def buffered_bytes() -> int:
        queued = sum(len(r.record.image_png) for r in done_buffer.values())
        return queued + writer.buffered_bytes

    with concurrent.futures.ThreadPoolExecutor(max_workers=cfg.workers) as pool:
        while next_write < cfg.count:
            if cancel is not None and cancel():
                for fut in pending.values():
                    fut.cancel()
                raise GenerationCancelled(f"cancelled at slot {next_write}")
            throttled = guard.update(buffered_bytes())
            while (
                not throttled
                and next_submit < cfg.count
                and len(pending) + len(done_buffer) < window
            ):
                pending[next_submit] = pool.submit(render_slot, ctx, next_submit)
                next_submit += 1
            for i in [i for i, f in pending.items() if f.done()]:
                done_buffer[i] = pending.pop(i).result()
            if next_write not in done_buffer and next_write in pending:
                done_buffer[next_write] = pending.pop(next_write).result()
            if next_write in done_buffer:
                result = done_buffer.pop(next_write)
                stats.absorb(result)
                writer.add(result.record)
                next_write += 1
                if next_write % PROGRESS_EVERY == 0:
                    report(next_write, buffered_bytes())
            elif throttled:
                # the next slot was never submitted and nothing can drain
                # further without accepting new work
                guard.throttled = False


def preview(cfg: GeneratorConfig, count: int) -> list[SampleRecord]:
    """The first `count` records exactly as generate() would emit them."""
    if count < 0:
        raise ValueError("preview count must be >= 0")
    if count > 64:
        raise ValueError(f"preview count capped at 64, got {count}")
    if count == 0:
        return []
    ctx = prepare_run(cfg)
    return [render_slot(ctx, i).record for i in range(count)]


@dataclass
class BenchRow:
    size: int
    seconds: float
    rate: float
    output_bytes: int


def bench(cfg: GeneratorConfig, sizes: list[int], sink_root) -> list[BenchRow]:
    """Timed end-to-end runs (files mode) at each requested dataset size."""
    import shutil
    from pathlib import Path

    rows = []
    for n in sizes:
        out = Path(sink_root) / f"bench_{n}"
        run_cfg = cfg.with_(count=n, storage_mode="files", timestamp=False)
        t0 = time.perf_counter()
        generate(run_cfg, out)
        elapsed = time.perf_counter() - t0
        total_bytes = sum(p.stat().st_size for p in out.rglob("*") if p.is_file())
        rows.append(BenchRow(size=n, seconds=elapsed, rate=n / elapsed, output_bytes=total_bytes))
        shutil.rmtree(out)
    return rows
