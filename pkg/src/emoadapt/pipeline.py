"""Parallel frame-processing pipeline with exact work instrumentation.

Frames flow through grayscale -> face detection -> classification on up to P
workers. Pixel-visit counters measure the work each stage actually did, which
is what the cost model predicts:

    sequential work = N * M
    parallel work   = N * alpha * M / P

Worker scheduling must never leak into results: frames are partitioned
round-robin, raw per-frame outputs are reassembled in index order, and the
carry-forward emotion state is resolved in a deterministic ordered post-pass.
"""

from __future__ import annotations

import concurrent.futures
import csv
import io
import multiprocessing
import time
from dataclasses import dataclass, field

import numpy as np

from .cascade import Cascade, DetectParams, EvalCounters, FaceBox, detect_faces, union_pixels
from .emotion import (
    CarryForwardState,
    ClassifierModel,
    argmax_emotion,
    classify,
    frame_emotion,
    neutral_distribution,
    preprocess_face,
)
from .errors import InvalidParameterError
from .imaging import GrayFrame, RgbFrame, Rect, to_grayscale


@dataclass(frozen=True)
class CostModel:
    """The five cost parameters: video length X, frames N, pixels M,
    processors P, analyzed-pixel proportion alpha."""

    video_s: float  # X
    frames: int  # N
    pixels: int  # M
    workers: int  # P
    alpha: float

    def __post_init__(self):
        if self.workers < 1:
            raise InvalidParameterError("worker count P must be >= 1")
        if not (0 < self.alpha <= 1):
            raise InvalidParameterError("alpha must be in (0, 1]")
        if self.frames < 0 or self.pixels < 1:
            raise InvalidParameterError("invalid frame or pixel count")


def predict_work(cm: CostModel, mode: str) -> float:
    """Abstract work units: pixel visits the pipeline is expected to perform."""
    if mode == "sequential":
        return float(cm.frames * cm.pixels)
    if mode == "parallel":
        return cm.frames * cm.alpha * cm.pixels / cm.workers
    raise InvalidParameterError(f"unknown mode {mode!r}")


@dataclass
class PipelineMetrics:
    grayscale_channel_visits: int = 0  # 3 per pixel for an RGB frame
    detection_pixels: int = 0  # window-covered pixel visits
    classification_pixels: int = 0  # ROI-union pixels only
    grayscale_ms: float = 0.0
    detection_ms: float = 0.0
    classification_ms: float = 0.0
    per_worker_frames: list[int] = field(default_factory=list)
    effective_alpha: float = 0.0

    def merge(self, other: "PipelineMetrics") -> None:
        self.grayscale_channel_visits += other.grayscale_channel_visits
        self.detection_pixels += other.detection_pixels
        self.classification_pixels += other.classification_pixels
        self.grayscale_ms += other.grayscale_ms
        self.detection_ms += other.detection_ms
        self.classification_ms += other.classification_ms

    def counters(self) -> tuple[int, int, int]:
        return (
            self.grayscale_channel_visits,
            self.detection_pixels,
            self.classification_pixels,
        )


@dataclass
class FrameResult:
    frame_index: int
    boxes: list[FaceBox]
    distribution: list[float]
    label: str
    error: str | None = None


@dataclass(frozen=True)
class FrameError:
    """Placeholder for a frame that failed upstream (e.g. decode)."""

    frame_index: int
    code: str


@dataclass(frozen=True)
class FixedBoxDetector:
    """Synthetic detector returning one box of prescribed area per frame.

    Used by benchmark workloads where alpha must be controlled exactly.
    Detection-stage pixel visits are the box area (only that region is
    scanned).
    """

    box: Rect

    def __call__(self, gray: GrayFrame, counters: EvalCounters) -> list[FaceBox]:
        counters.pixels_visited += self.box.area
        counters.windows_evaluated += 1
        return [FaceBox(self.box, 1.0)]


@dataclass(frozen=True)
class CascadeDetector:
    cascade: Cascade
    params: DetectParams

    def __call__(self, gray: GrayFrame, counters: EvalCounters) -> list[FaceBox]:
        return detect_faces(gray, self.cascade, self.params, counters=counters)


@dataclass
class _RawResult:
    frame_index: int
    boxes: list[FaceBox]
    distribution: list[float] | None  # None when no face: resolved in post-pass
    error: str | None


def _process_subset(
    frames: list,
    detector,
    model: ClassifierModel,
) -> tuple[list[_RawResult], PipelineMetrics]:
    """Process one worker's frame subset; pure per frame, no cross-frame state."""
    metrics = PipelineMetrics()
    raws: list[_RawResult] = []
    for frame in frames:
        if isinstance(frame, FrameError):
            raws.append(_RawResult(frame.frame_index, [], None, frame.code))
            continue
        t0 = time.perf_counter()
        gray = to_grayscale(frame)
        metrics.grayscale_channel_visits += 3 * gray.pixel_count
        t1 = time.perf_counter()
        counters = EvalCounters()
        boxes = detector(gray, counters)
        metrics.detection_pixels += counters.pixels_visited
        t2 = time.perf_counter()
        if boxes:
            roi = union_pixels(boxes, gray.width, gray.height)
            metrics.classification_pixels += roi
            best = max(boxes, key=lambda b: (b.rect.area, b.score))
            dist = classify(model, preprocess_face(gray, best))
            raws.append(_RawResult(frame.frame_index, boxes, list(dist), None))
        else:
            raws.append(_RawResult(frame.frame_index, boxes, None, None))
        t3 = time.perf_counter()
        metrics.grayscale_ms += (t1 - t0) * 1e3
        metrics.detection_ms += (t2 - t1) * 1e3
        metrics.classification_ms += (t3 - t2) * 1e3
    return raws, metrics


def _resolve_carry_forward(
    raws: list[_RawResult], state: CarryForwardState | None = None
) -> list[FrameResult]:
    """Ordered post-pass: fill face-less frames from the previous distribution."""
    state = state or CarryForwardState()
    results = []
    for raw in sorted(raws, key=lambda r: r.frame_index):
        if raw.distribution is not None:
            dist = np.asarray(raw.distribution)
        elif state.last is not None:
            dist = state.last
        else:
            dist = neutral_distribution()
        state.last = dist
        results.append(
            FrameResult(raw.frame_index, raw.boxes, list(dist), argmax_emotion(dist), raw.error)
        )
    return results


def _finish_metrics(metrics: PipelineMetrics, frames: list) -> PipelineMetrics:
    total_pixels = sum(
        f.width * f.height for f in frames if not isinstance(f, FrameError)
    )
    metrics.effective_alpha = (
        metrics.classification_pixels / total_pixels if total_pixels else 0.0
    )
    return metrics


def run_sequential(
    frames: list,
    cascade: Cascade,
    model: ClassifierModel,
    params: DetectParams = DetectParams(),
    detector=None,
    carry_state: CarryForwardState | None = None,
) -> tuple[list[FrameResult], PipelineMetrics]:
    """Process all frames in index order on one worker."""
    detector = detector or CascadeDetector(cascade, params)
    ordered = sorted(frames, key=lambda f: f.frame_index)
    raws, metrics = _process_subset(ordered, detector, model)
    metrics.per_worker_frames = [len(ordered)]
    return _resolve_carry_forward(raws, carry_state), _finish_metrics(metrics, frames)


def round_robin_partition(frames: list, workers: int) -> list[list]:
    ordered = sorted(frames, key=lambda f: f.frame_index)
    return [ordered[w::workers] for w in range(workers)]


def run_parallel(
    frames: list,
    cascade: Cascade,
    model: ClassifierModel,
    params: DetectParams = DetectParams(),
    workers: int = 1,
    detector=None,
    carry_state: CarryForwardState | None = None,
) -> tuple[list[FrameResult], PipelineMetrics]:
    """Round-robin the frames across P workers and reassemble in index order.

    Results are element-wise identical to run_sequential on the same input.
    A worker failure on one frame becomes an error result for that frame only.
    """
    if workers < 1:
        raise InvalidParameterError("worker count P must be >= 1")
    detector = detector or CascadeDetector(cascade, params)
    if workers == 1:
        results, metrics = run_sequential(
            frames, cascade, model, params, detector, carry_state
        )
        return results, metrics

    subsets = round_robin_partition(frames, workers)
    metrics = PipelineMetrics()
    metrics.per_worker_frames = [len(s) for s in subsets]
    all_raws: list[_RawResult] = []
    ctx = multiprocessing.get_context("fork")
    with concurrent.futures.ProcessPoolExecutor(
        max_workers=workers, mp_context=ctx
    ) as pool:
        futures = [
            pool.submit(_process_subset, subset, detector, model) for subset in subsets
        ]
        for subset, fut in zip(subsets, futures):
            try:
                raws, worker_metrics = fut.result()
            except Exception as exc:  # worker crash: error out its frames only
                raws = [
                    _RawResult(f.frame_index, [], None, f"worker-failure: {exc}")
                    for f in subset
                ]
                worker_metrics = PipelineMetrics()
            all_raws.extend(raws)
            metrics.merge(worker_metrics)
    return _resolve_carry_forward(all_raws, carry_state), _finish_metrics(metrics, frames)


# ---------------------------------------------------------------------------
# Benchmark harness
# ---------------------------------------------------------------------------

REPORT_HEADER = ["N", "M", "alpha", "P", "predicted_work", "measured_pixels", "wall_ms"]


def synthetic_frames(n: int, width: int, height: int, seed: int = 0) -> list[RgbFrame]:
    rng = np.random.default_rng(seed)
    return [
        RgbFrame(
            width,
            height,
            rng.integers(0, 256, (height, width, 3), dtype=np.uint8),
            frame_index=i,
            timestamp_s=i * 0.1,
        )
        for i in range(n)
    ]


def alpha_box(width: int, height: int, alpha: float) -> Rect:
    """A single rect covering exactly round(alpha * M) pixels."""
    target = round(alpha * width * height)
    if target < 1 or target > width * height:
        raise InvalidParameterError(f"alpha {alpha} unrealizable on {width}x{height}")
    h = max(1, target // width)
    w = target // h
    if w * h != target or w > width:
        raise InvalidParameterError(
            f"alpha {alpha} does not factor into a {width}x{height} box"
        )
    return Rect(0, 0, w, h)


@dataclass
class BenchmarkRow:
    frames: int
    pixels: int
    alpha: float
    workers: int
    predicted_work: float
    measured_pixels: int
    wall_ms: float

    def as_list(self) -> list:
        return [
            self.frames,
            self.pixels,
            self.alpha,
            self.workers,
            self.predicted_work,
            self.measured_pixels,
            self.wall_ms,
        ]


def benchmark(
    configs: list[CostModel],
    model: ClassifierModel,
    frame_width: int = 48,
    seed: int = 0,
) -> list[BenchmarkRow]:
    """Run the controlled-alpha workload for each configuration.

    Frames carry one synthetic face box of exactly alpha*M pixels, so the
    measured classification pixel count must equal N * alpha * M.
    """
    rows = []
    for cm in configs:
        height = cm.pixels // frame_width
        if height * frame_width != cm.pixels:
            raise InvalidParameterError(
                f"pixel count {cm.pixels} not divisible by width {frame_width}"
            )
        frames = synthetic_frames(cm.frames, frame_width, height, seed)
        detector = FixedBoxDetector(alpha_box(frame_width, height, cm.alpha))
        t0 = time.perf_counter()
        _, metrics = run_parallel(
            frames, cascade=None, model=model, workers=cm.workers, detector=detector
        )
        wall_ms = (time.perf_counter() - t0) * 1e3
        rows.append(
            BenchmarkRow(
                cm.frames,
                cm.pixels,
                cm.alpha,
                cm.workers,
                predict_work(cm, "parallel"),
                metrics.classification_pixels,
                wall_ms,
            )
        )
    return rows


def report_csv(rows: list[BenchmarkRow]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(REPORT_HEADER)
    for row in rows:
        writer.writerow(row.as_list())
    return buf.getvalue()
