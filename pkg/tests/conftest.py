import numpy as np
import pytest
from importlib import resources

from emoadapt.cascade import load_cascade
from emoadapt.emotion import seeded_model, zero_model
from emoadapt.imaging import GrayFrame, RgbFrame


def fixture_cascade_text() -> str:
    return resources.files("emoadapt.data").joinpath("fixture_cascade.txt").read_text()


@pytest.fixture(scope="session")
def cascade():
    return load_cascade(fixture_cascade_text())


@pytest.fixture(scope="session")
def model():
    return seeded_model()


@pytest.fixture(scope="session")
def flat_model():
    return zero_model()


def paint_pattern(img: np.ndarray, x: int, y: int, size: int = 24, hi: int = 200, lo: int = 50):
    """The bright-band-over-dark-band pattern the fixture cascade accepts."""
    img[y : y + size // 2, x : x + size] = hi
    img[y + size // 2 : y + size, x : x + size] = lo


def pattern_gray(width=64, height=64, x=10, y=12) -> GrayFrame:
    img = np.full((height, width), 128, dtype=np.uint8)
    paint_pattern(img, x, y)
    return GrayFrame(width, height, img)


def pattern_rgb(width=64, height=64, x=10, y=12, frame_index=0, timestamp_s=0.0) -> RgbFrame:
    img = np.full((height, width), 128, dtype=np.uint8)
    paint_pattern(img, x, y)
    rgb = np.repeat(img[:, :, None], 3, axis=2)
    return RgbFrame(width, height, rgb, frame_index, timestamp_s)
