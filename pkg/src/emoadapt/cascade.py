"""Staged cascade face detection over sliding windows of the integral image.

The cascade is a hand-specifiable alternative to a DNN detector: each stage
sums per-feature votes and rejects the window as soon as a stage falls below
its threshold. Feature values are normalized by the window's standard
deviation so thresholds are brightness-independent; zero-variance windows are
rejected outright.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

from .errors import BoundsError, InvalidParameterError, ParseError
from .imaging import GrayFrame, IntegralImage, Rect, integral_image, rect_sum, rect_sum_sq

VARIANCE_EPS = 1e-6


@dataclass(frozen=True)
class UnitRect:
    """Rectangle in unit-window coordinates, [0,1) origin, extents in (0,1]."""

    x: float
    y: float
    w: float
    h: float
    weight: float

    def __post_init__(self):
        if not (0 <= self.x < 1 and 0 <= self.y < 1):
            raise InvalidParameterError(f"unit rect origin out of range: {self}")
        if self.w <= 0 or self.h <= 0 or self.x + self.w > 1 or self.y + self.h > 1:
            raise InvalidParameterError(f"unit rect extent out of range: {self}")


@dataclass(frozen=True)
class HaarFeature:
    rects: tuple[UnitRect, ...]
    threshold: float
    polarity: int  # +1 or -1
    pass_weight: float
    fail_weight: float

    def __post_init__(self):
        if not self.rects:
            raise InvalidParameterError("feature needs at least one rect")
        if self.polarity not in (1, -1):
            raise InvalidParameterError("polarity must be +1 or -1")


@dataclass(frozen=True)
class CascadeStage:
    features: tuple[HaarFeature, ...]
    stage_threshold: float

    def __post_init__(self):
        if not self.features:
            raise InvalidParameterError("stage needs at least one feature")


@dataclass(frozen=True)
class Cascade:
    base_w: int
    base_h: int
    stages: tuple[CascadeStage, ...]

    def __post_init__(self):
        if self.base_w < 8 or self.base_h < 8:
            raise InvalidParameterError("base window must be at least 8x8")
        if not self.stages:
            raise InvalidParameterError("cascade needs at least one stage")


@dataclass(frozen=True)
class FaceBox:
    rect: Rect
    score: float

    def __post_init__(self):
        if not math.isfinite(self.score):
            raise InvalidParameterError("face box score must be finite")


@dataclass(frozen=True)
class DetectParams:
    scale_step: float = 1.25
    window_stride: int = 2
    min_window: int = 0  # 0 means "cascade base window"
    merge_iou: float = 0.3

    def __post_init__(self):
        if self.scale_step <= 1:
            raise InvalidParameterError("scale_step must be > 1")
        if self.window_stride < 1:
            raise InvalidParameterError("window_stride must be >= 1")
        if not (0 <= self.merge_iou <= 1):
            raise InvalidParameterError("merge_iou must be in [0,1]")


@dataclass
class EvalCounters:
    """Instrumentation for one detection pass."""

    windows_evaluated: int = 0
    pixels_visited: int = 0  # sum of w*h over evaluated windows
    stage_evaluations: int = 0


def _rnd(x: float) -> int:
    # round-half-up; deterministic across platforms
    return math.floor(x + 0.5)


def scale_rect(u: UnitRect, window: Rect) -> Rect | None:
    """Map a unit-window rect to pixel coordinates inside ``window``.

    Returns None when the scaled extent collapses below one pixel.
    """
    w = _rnd(u.w * window.w)
    h = _rnd(u.h * window.h)
    if w < 1 or h < 1:
        return None
    return Rect(window.x + _rnd(u.x * window.w), window.y + _rnd(u.y * window.h), w, h)


def feature_raw_value(ii: IntegralImage, f: HaarFeature, window: Rect) -> float:
    total = 0.0
    for u in f.rects:
        r = scale_rect(u, window)
        if r is not None:
            total += u.weight * rect_sum(ii, r)
    return total


def eval_window(
    ii: IntegralImage,
    cascade: Cascade,
    window: Rect,
    counters: EvalCounters | None = None,
) -> tuple[bool, float]:
    """Evaluate the full cascade on one window: (accepted, final-stage margin).

    Rejection is monotone: the first failing stage ends evaluation. Rejected
    windows report the margin of the stage that rejected them.
    """
    if not window.within(ii.width, ii.height):
        raise BoundsError(f"window {window} outside {ii.width}x{ii.height} image")
    if window.w < cascade.base_w or window.h < cascade.base_h:
        raise BoundsError(f"window {window} smaller than cascade base window")
    if counters is not None:
        counters.windows_evaluated += 1
        counters.pixels_visited += window.area

    n = window.area
    s1 = rect_sum(ii, window)
    s2 = rect_sum_sq(ii, window)
    mean = s1 / n
    var = max(s2 / n - mean * mean, 0.0)
    std = math.sqrt(var)
    if std < VARIANCE_EPS:
        return False, 0.0
    norm = std * n

    margin = 0.0
    for stage in cascade.stages:
        if counters is not None:
            counters.stage_evaluations += 1
        vote_sum = 0.0
        for f in stage.features:
            value = feature_raw_value(ii, f, window) / norm
            if f.polarity * value >= f.polarity * f.threshold:
                vote_sum += f.pass_weight
            else:
                vote_sum += f.fail_weight
        margin = vote_sum - stage.stage_threshold
        if vote_sum < stage.stage_threshold:
            return False, margin
    return True, margin


def _iou(a: Rect, b: Rect) -> float:
    ix = max(0, min(a.x + a.w, b.x + b.w) - max(a.x, b.x))
    iy = max(0, min(a.y + a.h, b.y + b.h) - max(a.y, b.y))
    inter = ix * iy
    if inter == 0:
        return 0.0
    return inter / (a.area + b.area - inter)


def _box_order(b: FaceBox):
    return (-b.score, b.rect.y, b.rect.x, b.rect.w)


def merge_boxes(boxes: list[FaceBox], iou_threshold: float) -> list[FaceBox]:
    """Greedy overlap merge: keep the highest-score box of each group."""
    kept: list[FaceBox] = []
    for box in sorted(boxes, key=_box_order):
        if all(_iou(box.rect, k.rect) < iou_threshold for k in kept):
            kept.append(box)
    return kept


def detect_faces(
    gray: GrayFrame,
    cascade: Cascade,
    params: DetectParams = DetectParams(),
    counters: EvalCounters | None = None,
    ii: IntegralImage | None = None,
) -> list[FaceBox]:
    """Slide windows at every scale and stride, evaluate, merge overlaps.

    Deterministic: output sorted by descending score, ties by (y, x, w).
    """
    if ii is None:
        ii = integral_image(gray)
    min_w = max(params.min_window, cascade.base_w)
    min_h = max(params.min_window, cascade.base_h)
    accepted: list[FaceBox] = []
    k = 0
    while True:
        scale = params.scale_step**k
        ww = _rnd(cascade.base_w * scale)
        wh = _rnd(cascade.base_h * scale)
        if ww > gray.width or wh > gray.height:
            break
        k += 1
        if ww < min_w or wh < min_h:
            continue
        for y in range(0, gray.height - wh + 1, params.window_stride):
            for x in range(0, gray.width - ww + 1, params.window_stride):
                window = Rect(x, y, ww, wh)
                ok, score = eval_window(ii, cascade, window, counters)
                if ok:
                    accepted.append(FaceBox(window, score))
    return sorted(merge_boxes(accepted, params.merge_iou), key=_box_order)


def alpha_coverage(boxes: list[FaceBox], width: int, height: int) -> float:
    """Proportion of image pixels covered by the union of the face boxes."""
    return union_pixels(boxes, width, height) / (width * height)


def union_pixels(boxes: list[FaceBox], width: int, height: int) -> int:
    """Exact pixel count of the box union, by bitmap marking."""
    import numpy as np

    if not boxes:
        return 0
    mask = np.zeros((height, width), dtype=bool)
    for b in boxes:
        r = b.rect
        if not r.within(width, height):
            raise BoundsError(f"box {r} outside {width}x{height} image")
        mask[r.y : r.y + r.h, r.x : r.x + r.w] = True
    return int(mask.sum())


# ---------------------------------------------------------------------------
# Cascade file format (line-oriented text, '#' comments):
#   cascade <base_w> <base_h> <n_stages>
#   stage <n_features> <stage_threshold>
#   feature <n_rects> <threshold> <polarity> <pass_weight> <fail_weight>
#   rect <x> <y> <w> <h> <weight>
# ---------------------------------------------------------------------------


def load_cascade(text: str) -> Cascade:
    lines = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.split("#", 1)[0].strip()
        if stripped:
            lines.append((lineno, stripped))
    pos = 0

    def take(expected: str, n_fields: int) -> list[str]:
        nonlocal pos
        if pos >= len(lines):
            raise ParseError(f"unexpected end of file, expected '{expected}' line")
        lineno, line = lines[pos]
        pos += 1
        parts = line.split()
        if parts[0] != expected:
            raise ParseError(f"line {lineno}: expected '{expected}', got '{parts[0]}'")
        if len(parts) != n_fields + 1:
            raise ParseError(
                f"line {lineno}: '{expected}' needs {n_fields} fields, got {len(parts) - 1}"
            )
        return parts[1:]

    def numeric(fields: list[str], lineno_hint: str, kinds) -> list:
        out = []
        for value, kind in zip(fields, kinds):
            try:
                out.append(kind(value))
            except ValueError as exc:
                raise ParseError(f"{lineno_hint}: bad field {value!r}") from exc
        return out

    header = numeric(take("cascade", 3), "header", (int, int, int))
    base_w, base_h, n_stages = header
    stages = []
    for _ in range(n_stages):
        n_features, stage_threshold = numeric(take("stage", 2), "stage", (int, float))
        features = []
        for _ in range(n_features):
            vals = numeric(
                take("feature", 5), "feature", (int, float, int, float, float)
            )
            n_rects, threshold, polarity, pass_w, fail_w = vals
            rects = []
            for _ in range(n_rects):
                rx, ry, rw, rh, weight = numeric(
                    take("rect", 5), "rect", (float, float, float, float, float)
                )
                rects.append(UnitRect(rx, ry, rw, rh, weight))
            features.append(HaarFeature(tuple(rects), threshold, polarity, pass_w, fail_w))
        stages.append(CascadeStage(tuple(features), stage_threshold))
    if pos != len(lines):
        raise ParseError(f"line {lines[pos][0]}: trailing content after cascade")
    return Cascade(base_w, base_h, tuple(stages))


def save_cascade(cascade: Cascade) -> str:
    out = [f"cascade {cascade.base_w} {cascade.base_h} {len(cascade.stages)}"]
    for stage in cascade.stages:
        out.append(f"stage {len(stage.features)} {stage.stage_threshold!r}")
        for f in stage.features:
            out.append(
                f"feature {len(f.rects)} {f.threshold!r} {f.polarity} "
                f"{f.pass_weight!r} {f.fail_weight!r}"
            )
            for u in f.rects:
                out.append(f"rect {u.x!r} {u.y!r} {u.w!r} {u.h!r} {u.weight!r}")
    return "\n".join(out) + "\n"
