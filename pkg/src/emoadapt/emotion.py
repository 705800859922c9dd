"""Face preprocessing, pluggable emotion classification and aggregation.

A classifier maps a 48x48 face crop to 7 logits; softmax turns those into a
probability distribution over the canonical emotion labels. Per-frame
distributions are averaged over a sliding window to produce the session
emotion, and frames with no detected face carry the previous distribution
forward.
"""

from __future__ import annotations

import struct
from collections import deque
from dataclasses import dataclass

import numpy as np

from .cascade import FaceBox
from .errors import (
    BoundsError,
    EmptyWindowError,
    InvalidParameterError,
    ParseError,
    ShapeMismatchError,
)
from .imaging import GrayFrame

EMOTIONS = ("angry", "disgust", "fear", "happy", "sad", "surprise", "neutral")
NEUTRAL_INDEX = EMOTIONS.index("neutral")
FACE_SIZE = 48
DISTRIBUTION_TOL = 1e-9

MODEL_MAGIC = b"F2FM1"
DEFAULT_ARCH = "mlp-2304-64-7"


def validate_distribution(dist: np.ndarray) -> np.ndarray:
    dist = np.asarray(dist, dtype=np.float64)
    if dist.shape != (len(EMOTIONS),):
        raise InvalidParameterError(f"distribution shape {dist.shape} != (7,)")
    if dist.min() < 0:
        raise InvalidParameterError("distribution has a negative probability")
    if abs(dist.sum() - 1.0) > DISTRIBUTION_TOL:
        raise InvalidParameterError(f"distribution sums to {dist.sum()}, not 1")
    return dist


def neutral_distribution() -> np.ndarray:
    dist = np.zeros(len(EMOTIONS))
    dist[NEUTRAL_INDEX] = 1.0
    return dist


@dataclass(frozen=True)
class FaceTensor:
    """48x48 face crop scaled to [0,1], tagged with its source."""

    values: np.ndarray  # float64, shape (48, 48)
    frame_index: int = 0
    source_box: FaceBox | None = None

    def __post_init__(self):
        v = np.asarray(self.values, dtype=np.float64)
        if v.shape != (FACE_SIZE, FACE_SIZE):
            raise InvalidParameterError(f"face tensor shape {v.shape} != (48, 48)")
        if v.min() < 0 or v.max() > 1:
            raise InvalidParameterError("face tensor values must lie in [0,1]")
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class ClassifierModel:
    """Fully connected 2304 -> 64 -> 7 network with ReLU hidden activation.

    Tensors: W1 (2304, 64), b1 (64,), W2 (64, 7), b2 (7,).
    """

    arch: str
    tensors: tuple[np.ndarray, ...]

    def __post_init__(self):
        if self.arch != DEFAULT_ARCH:
            raise ShapeMismatchError(f"unknown architecture tag {self.arch!r}")
        shapes = [(2304, 64), (64,), (64, 7), (7,)]
        if len(self.tensors) != len(shapes):
            raise ShapeMismatchError(
                f"{self.arch} needs {len(shapes)} tensors, got {len(self.tensors)}"
            )
        frozen = []
        for t, shape in zip(self.tensors, shapes):
            t = np.asarray(t, dtype=np.float32)
            if t.shape != shape:
                raise ShapeMismatchError(f"tensor shape {t.shape} != {shape}")
            t.setflags(write=False)
            frozen.append(t)
        object.__setattr__(self, "tensors", tuple(frozen))

    def forward(self, t: FaceTensor) -> np.ndarray:
        w1, b1, w2, b2 = (np.asarray(x, dtype=np.float64) for x in self.tensors)
        x = t.values.reshape(-1)
        hidden = np.maximum(x @ w1 + b1, 0.0)
        return hidden @ w2 + b2


def zero_model() -> ClassifierModel:
    return ClassifierModel(
        DEFAULT_ARCH,
        (
            np.zeros((2304, 64), dtype=np.float32),
            np.zeros(64, dtype=np.float32),
            np.zeros((64, 7), dtype=np.float32),
            np.zeros(7, dtype=np.float32),
        ),
    )


def seeded_model(seed: int = 42) -> ClassifierModel:
    """Deterministic pseudorandom weights; the bundled default model."""
    rng = np.random.default_rng(seed)
    return ClassifierModel(
        DEFAULT_ARCH,
        (
            rng.normal(0, 0.05, (2304, 64)).astype(np.float32),
            rng.normal(0, 0.05, 64).astype(np.float32),
            rng.normal(0, 0.5, (64, 7)).astype(np.float32),
            rng.normal(0, 0.5, 7).astype(np.float32),
        ),
    )


def preprocess_face(gray: GrayFrame, box: FaceBox) -> FaceTensor:
    """Crop the box, bilinear-resize to 48x48, scale to [0,1]."""
    r = box.rect
    if not r.within(gray.width, gray.height):
        raise BoundsError(f"box {r} outside {gray.width}x{gray.height} frame")
    crop = gray.pixels[r.y : r.y + r.h, r.x : r.x + r.w].astype(np.float64)
    resized = _bilinear_resize(crop, FACE_SIZE, FACE_SIZE)
    return FaceTensor(resized / 255.0, gray.frame_index, box)


def _bilinear_resize(src: np.ndarray, out_h: int, out_w: int) -> np.ndarray:
    """Center-aligned bilinear: sample at (dst + 0.5) * scale - 0.5."""
    in_h, in_w = src.shape
    ys = (np.arange(out_h) + 0.5) * (in_h / out_h) - 0.5
    xs = (np.arange(out_w) + 0.5) * (in_w / out_w) - 0.5
    ys = np.clip(ys, 0, in_h - 1)
    xs = np.clip(xs, 0, in_w - 1)
    y0 = np.floor(ys).astype(int)
    x0 = np.floor(xs).astype(int)
    y1 = np.minimum(y0 + 1, in_h - 1)
    x1 = np.minimum(x0 + 1, in_w - 1)
    wy = (ys - y0)[:, None]
    wx = (xs - x0)[None, :]
    top = src[np.ix_(y0, x0)] * (1 - wx) + src[np.ix_(y0, x1)] * wx
    bot = src[np.ix_(y1, x0)] * (1 - wx) + src[np.ix_(y1, x1)] * wx
    return top * (1 - wy) + bot * wy


def softmax(logits: np.ndarray) -> np.ndarray:
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max()
    exps = np.exp(shifted)
    return exps / exps.sum()


def classify(model: ClassifierModel, t: FaceTensor) -> np.ndarray:
    return validate_distribution(softmax(model.forward(t)))


def argmax_emotion(dist: np.ndarray) -> str:
    """Label with maximum probability; ties go to the earliest canonical label."""
    dist = validate_distribution(dist)
    return EMOTIONS[int(np.argmax(dist))]


class AggregationWindow:
    """Ring buffer of the most recent per-frame distributions."""

    def __init__(self, window_length: int = 100):
        if window_length < 1:
            raise InvalidParameterError("window length must be >= 1")
        self.window_length = window_length
        self._buffer: deque[np.ndarray] = deque(maxlen=window_length)

    def __len__(self) -> int:
        return len(self._buffer)

    def push(self, dist: np.ndarray) -> None:
        self._buffer.append(validate_distribution(dist))

    def distributions(self) -> list[np.ndarray]:
        return list(self._buffer)


def aggregate_window(window: AggregationWindow) -> tuple[str, np.ndarray]:
    """Element-wise mean of the buffered distributions, then argmax."""
    if len(window) == 0:
        raise EmptyWindowError("cannot aggregate an empty window")
    mean = np.mean(window.distributions(), axis=0)
    mean = mean / mean.sum()  # guard accumulated drift
    return argmax_emotion(mean), validate_distribution(mean)


class CarryForwardState:
    """Per-session memory of the last per-frame distribution."""

    def __init__(self):
        self.last: np.ndarray | None = None


def frame_emotion(
    gray: GrayFrame,
    boxes: list[FaceBox],
    model: ClassifierModel,
    state: CarryForwardState,
) -> np.ndarray:
    """Classify the largest face box, or carry the previous frame forward.

    With no box and no history the frame is neutral-certain.
    """
    if boxes:
        best = max(boxes, key=lambda b: (b.rect.area, b.score))
        dist = classify(model, preprocess_face(gray, best))
    elif state.last is not None:
        dist = state.last
    else:
        dist = neutral_distribution()
    state.last = dist
    return dist


# ---------------------------------------------------------------------------
# Model file format (binary, little-endian):
#   magic "F2FM1"
#   uint8 tag length, ascii architecture tag
#   uint32 tensor count; per tensor: uint8 rank, rank x uint32 dims,
#   then prod(dims) float32 values.
# ---------------------------------------------------------------------------


def save_model(model: ClassifierModel, path) -> None:
    with open(path, "wb") as fh:
        fh.write(MODEL_MAGIC)
        tag = model.arch.encode("ascii")
        fh.write(struct.pack("<B", len(tag)))
        fh.write(tag)
        fh.write(struct.pack("<I", len(model.tensors)))
        for t in model.tensors:
            fh.write(struct.pack("<B", t.ndim))
            fh.write(struct.pack(f"<{t.ndim}I", *t.shape))
            fh.write(np.asarray(t, dtype="<f4").tobytes())


def load_model(path) -> ClassifierModel:
    with open(path, "rb") as fh:
        data = fh.read()
    view = memoryview(data)
    pos = 0

    def read(n: int) -> bytes:
        nonlocal pos
        if pos + n > len(view):
            raise ParseError("truncated model file")
        chunk = bytes(view[pos : pos + n])
        pos += n
        return chunk

    if read(len(MODEL_MAGIC)) != MODEL_MAGIC:
        raise ParseError("bad model magic")
    (tag_len,) = struct.unpack("<B", read(1))
    try:
        arch = read(tag_len).decode("ascii")
    except UnicodeDecodeError as exc:
        raise ParseError("bad architecture tag") from exc
    (n_tensors,) = struct.unpack("<I", read(4))
    tensors = []
    for _ in range(n_tensors):
        (rank,) = struct.unpack("<B", read(1))
        dims = struct.unpack(f"<{rank}I", read(4 * rank))
        count = int(np.prod(dims)) if dims else 1
        raw = read(4 * count)
        tensors.append(np.frombuffer(raw, dtype="<f4").reshape(dims))
    if pos != len(view):
        raise ParseError("trailing bytes after model tensors")
    return ClassifierModel(arch, tuple(tensors))
