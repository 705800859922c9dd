"""Frame planning, Base64 decoding, grayscale conversion and integral images.

This is the pixel-level substrate the detector and classifier build on.
All types are immutable after construction and all functions are pure, so
they are safe to call from any number of workers.
"""

from __future__ import annotations

import base64
import binascii
import io
import math
from dataclasses import dataclass

import numpy as np
from PIL import Image, UnidentifiedImageError

from .errors import BoundsError, DecodeError, InvalidParameterError, TransportError

# BT.601 luma weights: the conventional single-channel reduction.
_LUMA_R = 0.299
_LUMA_G = 0.587
_LUMA_B = 0.114

SUPPORTED_FORMATS = ("png", "jpeg", "raw")


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class RgbFrame:
    """One snapshot of the video input, row-major (R,G,B) bytes."""

    width: int
    height: int
    pixels: np.ndarray  # uint8, shape (height, width, 3)
    frame_index: int = 0
    timestamp_s: float = 0.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidParameterError("frame dimensions must be >= 1")
        if self.frame_index < 0:
            raise InvalidParameterError("frame_index must be >= 0")
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width, 3):
            raise InvalidParameterError(
                f"pixel buffer shape {px.shape} != {(self.height, self.width, 3)}"
            )
        object.__setattr__(self, "pixels", _freeze(px))


@dataclass(frozen=True)
class GrayFrame:
    """Single-channel frame; width*height is the per-frame pixel count M."""

    width: int
    height: int
    pixels: np.ndarray  # uint8, shape (height, width)
    frame_index: int = 0
    timestamp_s: float = 0.0

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise InvalidParameterError("frame dimensions must be >= 1")
        px = np.asarray(self.pixels, dtype=np.uint8)
        if px.shape != (self.height, self.width):
            raise InvalidParameterError(
                f"pixel buffer shape {px.shape} != {(self.height, self.width)}"
            )
        object.__setattr__(self, "pixels", _freeze(px))

    @property
    def pixel_count(self) -> int:
        return self.width * self.height


@dataclass(frozen=True)
class IntegralImage:
    """2-D prefix sums: entry (y, x) = sum of pixels with row < y and col < x.

    ``sq`` carries the squared-value prefix sums so window variance comes out
    of the same O(1) rectangle arithmetic. 64-bit accumulators: even a
    65535x65535 all-255 image stays in range.
    """

    width: int
    height: int
    sums: np.ndarray  # int64, shape (height+1, width+1)
    sq: np.ndarray  # int64, shape (height+1, width+1)

    def __post_init__(self):
        object.__setattr__(self, "sums", _freeze(np.asarray(self.sums, dtype=np.int64)))
        object.__setattr__(self, "sq", _freeze(np.asarray(self.sq, dtype=np.int64)))


@dataclass(frozen=True)
class Rect:
    x: int
    y: int
    w: int
    h: int

    def __post_init__(self):
        if self.x < 0 or self.y < 0 or self.w < 1 or self.h < 1:
            raise InvalidParameterError(f"invalid rect {self}")

    @property
    def area(self) -> int:
        return self.w * self.h

    def within(self, width: int, height: int) -> bool:
        return self.x + self.w <= width and self.y + self.h <= height


def plan_frames(duration_s: float, interval_s: float) -> tuple[int, list[float]]:
    """Frame count N and capture timestamps for a capture of ``duration_s``.

    Captures at the start of each interval: N = floor(duration/interval),
    timestamps k*interval for k in 0..N-1.
    """
    if interval_s <= 0:
        raise InvalidParameterError("interval_s must be positive")
    if duration_s < 0:
        raise InvalidParameterError("duration_s must be >= 0")
    n = math.floor(duration_s / interval_s)
    return n, [k * interval_s for k in range(n)]


def decode_frame(
    encoded: str,
    fmt: str,
    frame_index: int = 0,
    timestamp_s: float = 0.0,
) -> RgbFrame:
    """Decode a Base64 image payload into an RgbFrame.

    Formats: ``png`` (lossless), ``jpeg`` (lossy camera path) and ``raw``, a
    plain-text raster used by the bit-exact test oracles: whitespace-separated
    ``width height`` then width*height*3 byte values.
    """
    try:
        payload = base64.b64decode(encoded, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise TransportError(f"malformed Base64: {exc}") from exc
    if fmt not in SUPPORTED_FORMATS:
        raise DecodeError(f"unsupported format tag {fmt!r}")
    if fmt == "raw":
        return _decode_raw(payload, frame_index, timestamp_s)
    try:
        img = Image.open(io.BytesIO(payload))
        img.load()
    except (UnidentifiedImageError, OSError) as exc:
        raise DecodeError(f"corrupt {fmt} payload: {exc}") from exc
    rgb = img.convert("RGB")
    arr = np.asarray(rgb, dtype=np.uint8)
    return RgbFrame(rgb.width, rgb.height, arr, frame_index, timestamp_s)


def _decode_raw(payload: bytes, frame_index: int, timestamp_s: float) -> RgbFrame:
    try:
        tokens = payload.decode("ascii").split()
        width, height = int(tokens[0]), int(tokens[1])
        values = [int(t) for t in tokens[2:]]
    except (UnicodeDecodeError, ValueError, IndexError) as exc:
        raise DecodeError(f"malformed raw raster: {exc}") from exc
    if width < 1 or height < 1:
        raise DecodeError("raw raster dimensions must be >= 1")
    if len(values) != width * height * 3:
        raise DecodeError(
            f"raw raster expects {width * height * 3} values, got {len(values)}"
        )
    if any(v < 0 or v > 255 for v in values):
        raise DecodeError("raw raster values must be bytes 0-255")
    arr = np.array(values, dtype=np.uint8).reshape(height, width, 3)
    return RgbFrame(width, height, arr, frame_index, timestamp_s)


def encode_frame(frame: RgbFrame, fmt: str = "png") -> str:
    """Base64-encode a frame; inverse of decode_frame for lossless formats."""
    if fmt == "raw":
        tokens = [str(frame.width), str(frame.height)]
        tokens += [str(int(v)) for v in frame.pixels.reshape(-1)]
        return base64.b64encode(" ".join(tokens).encode("ascii")).decode("ascii")
    if fmt not in ("png", "jpeg"):
        raise InvalidParameterError(f"unsupported format tag {fmt!r}")
    img = Image.fromarray(np.asarray(frame.pixels), mode="RGB")
    buf = io.BytesIO()
    img.save(buf, format=fmt.upper())
    return base64.b64encode(buf.getvalue()).decode("ascii")


def to_grayscale(frame: RgbFrame) -> GrayFrame:
    """BT.601 luma with round-half-up; frame index and timestamp preserved."""
    px = frame.pixels.astype(np.float64)
    luma = _LUMA_R * px[:, :, 0] + _LUMA_G * px[:, :, 1] + _LUMA_B * px[:, :, 2]
    gray = np.clip(np.floor(luma + 0.5), 0, 255).astype(np.uint8)
    return GrayFrame(frame.width, frame.height, gray, frame.frame_index, frame.timestamp_s)


def integral_image(gray: GrayFrame) -> IntegralImage:
    px = gray.pixels.astype(np.int64)
    sums = np.zeros((gray.height + 1, gray.width + 1), dtype=np.int64)
    sq = np.zeros_like(sums)
    sums[1:, 1:] = px.cumsum(axis=0).cumsum(axis=1)
    sq[1:, 1:] = (px * px).cumsum(axis=0).cumsum(axis=1)
    return IntegralImage(gray.width, gray.height, sums, sq)


def rect_sum(ii: IntegralImage, r: Rect) -> int:
    if not r.within(ii.width, ii.height):
        raise BoundsError(f"rect {r} outside {ii.width}x{ii.height} image")
    s = ii.sums
    return int(
        s[r.y + r.h, r.x + r.w] - s[r.y, r.x + r.w] - s[r.y + r.h, r.x] + s[r.y, r.x]
    )


def rect_sum_sq(ii: IntegralImage, r: Rect) -> int:
    """Sum of squared pixel values in r; used for window variance."""
    if not r.within(ii.width, ii.height):
        raise BoundsError(f"rect {r} outside {ii.width}x{ii.height} image")
    s = ii.sq
    return int(
        s[r.y + r.h, r.x + r.w] - s[r.y, r.x + r.w] - s[r.y + r.h, r.x] + s[r.y, r.x]
    )
