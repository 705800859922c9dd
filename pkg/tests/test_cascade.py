import math

import numpy as np
import pytest

from conftest import fixture_cascade_text, paint_pattern, pattern_gray
from emoadapt.cascade import (
    Cascade,
    CascadeStage,
    DetectParams,
    EvalCounters,
    FaceBox,
    HaarFeature,
    UnitRect,
    alpha_coverage,
    detect_faces,
    eval_window,
    feature_raw_value,
    load_cascade,
    merge_boxes,
    save_cascade,
    union_pixels,
)
from emoadapt.errors import BoundsError, InvalidParameterError, ParseError
from emoadapt.imaging import GrayFrame, Rect, integral_image


def brute_stage_decision(pixels: np.ndarray, cascade: Cascade, window: Rect):
    """Independent cascade evaluation: direct double-loop pixel sums."""
    patch = pixels[window.y : window.y + window.h, window.x : window.x + window.w]
    patch = patch.astype(np.float64)
    n = window.w * window.h
    std = math.sqrt(max(patch.mean() ** 2 * 0 + (patch**2).mean() - patch.mean() ** 2, 0))
    if std < 1e-6:
        return False, 0.0
    margin = 0.0
    for stage in cascade.stages:
        votes = 0.0
        for f in stage.features:
            raw = 0.0
            for u in f.rects:
                rw = math.floor(u.w * window.w + 0.5)
                rh = math.floor(u.h * window.h + 0.5)
                if rw < 1 or rh < 1:
                    continue
                rx = math.floor(u.x * window.w + 0.5)
                ry = math.floor(u.y * window.h + 0.5)
                total = 0.0
                for yy in range(ry, ry + rh):
                    for xx in range(rx, rx + rw):
                        total += patch[yy, xx]
                raw += u.weight * total
            value = raw / (std * n)
            votes += f.pass_weight if f.polarity * value >= f.polarity * f.threshold else f.fail_weight
        margin = votes - stage.stage_threshold
        if votes < stage.stage_threshold:
            return False, margin
    return True, margin


class TestCascadeFormat:
    def test_fixture_loads(self, cascade):
        assert cascade.base_w == 24 and cascade.base_h == 24
        assert len(cascade.stages) == 2
        assert len(cascade.stages[0].features) == 1
        assert cascade.stages[0].features[0].threshold == 0.9

    def test_roundtrip(self, cascade):
        assert load_cascade(save_cascade(cascade)) == cascade

    def test_comments_and_blank_lines(self):
        text = "# header comment\n\n" + fixture_cascade_text()
        assert load_cascade(text) == load_cascade(fixture_cascade_text())

    def test_empty_stage_list_is_invariant_error(self):
        with pytest.raises(InvalidParameterError):
            load_cascade("cascade 24 24 0\n")

    def test_parse_error_reports_line(self):
        with pytest.raises(ParseError, match="expected 'stage'"):
            load_cascade("cascade 24 24 1\nbogus 1 2\n")

    def test_truncated_file(self):
        with pytest.raises(ParseError, match="unexpected end"):
            load_cascade("cascade 24 24 1\nstage 1 0.5\n")

    def test_small_base_window_rejected(self):
        with pytest.raises(InvalidParameterError):
            Cascade(4, 4, (CascadeStage((HaarFeature((UnitRect(0, 0, 1, 1, 1.0),), 0, 1, 1, -1),), 0.0),))


class TestEvalWindow:
    def test_flat_window_rejected(self, cascade):
        g = GrayFrame(32, 32, np.full((32, 32), 128, np.uint8))
        ok, _ = eval_window(integral_image(g), cascade, Rect(0, 0, 24, 24))
        assert not ok

    def test_all_zero_rejected(self, cascade):
        g = GrayFrame(32, 32, np.zeros((32, 32), np.uint8))
        ok, _ = eval_window(integral_image(g), cascade, Rect(0, 0, 24, 24))
        assert not ok

    def test_band_pattern_accepted(self, cascade):
        g = pattern_gray()
        ok, score = eval_window(integral_image(g), cascade, Rect(10, 12, 24, 24))
        assert ok
        assert score == pytest.approx(0.5)  # vote 1.0 minus stage threshold 0.5

    def test_inverted_pattern_rejected_at_stage_one(self, cascade):
        img = np.full((32, 32), 128, np.uint8)
        img[:12, 4:28] = 50
        img[12:24, 4:28] = 200
        counters = EvalCounters()
        ok, _ = eval_window(integral_image(GrayFrame(32, 32, img)), cascade, Rect(4, 0, 24, 24), counters)
        assert not ok
        assert counters.stage_evaluations == 1  # monotone rejection

    def test_decisions_match_independent_oracle(self, cascade):
        rng = np.random.default_rng(11)
        img = np.full((64, 64), 128, np.uint8)
        paint_pattern(img, 10, 12)
        img[40:60, 40:60] = rng.integers(0, 256, (20, 20), dtype=np.uint8)
        g = GrayFrame(64, 64, img)
        ii = integral_image(g)
        windows = [
            Rect(10, 12, 24, 24),
            Rect(8, 12, 24, 24),
            Rect(0, 0, 24, 24),
            Rect(36, 36, 24, 24),
            Rect(12, 14, 24, 24),
            Rect(40, 8, 24, 24),
        ]
        for window in windows:
            got = eval_window(ii, cascade, window)
            expected = brute_stage_decision(img, cascade, window)
            assert got[0] == expected[0], window
            assert got[1] == pytest.approx(expected[1], abs=1e-9)

    def test_out_of_bounds(self, cascade):
        g = pattern_gray()
        with pytest.raises(BoundsError):
            eval_window(integral_image(g), cascade, Rect(50, 50, 24, 24))

    def test_window_smaller_than_base(self, cascade):
        g = pattern_gray()
        with pytest.raises(BoundsError):
            eval_window(integral_image(g), cascade, Rect(0, 0, 16, 16))

    def test_scaling_soundness(self, cascade):
        """2x pixel replication and a 2x window quadruple raw feature sums."""
        g = pattern_gray(48, 48, 10, 12)
        big = GrayFrame(96, 96, np.repeat(np.repeat(g.pixels, 2, axis=0), 2, axis=1))
        ii1 = integral_image(g)
        ii2 = integral_image(big)
        for stage in cascade.stages:
            for f in stage.features:
                small = feature_raw_value(ii1, f, Rect(10, 12, 24, 24))
                scaled = feature_raw_value(ii2, f, Rect(20, 24, 48, 48))
                assert scaled == pytest.approx(4 * small)


class TestDetectFaces:
    def test_all_zero_image_empty(self, cascade):
        g = GrayFrame(64, 64, np.zeros((64, 64), np.uint8))
        assert detect_faces(g, cascade) == []

    def test_single_pattern_one_box(self, cascade):
        g = pattern_gray(64, 64, 10, 12)
        boxes = detect_faces(g, cascade)
        assert len(boxes) == 1
        r = boxes[0].rect
        cx, cy = 10 + 12, 12 + 12  # pattern center
        assert r.x <= cx < r.x + r.w and r.y <= cy < r.y + r.h

    def test_two_disjoint_patterns_two_boxes(self, cascade):
        img = np.full((96, 64), 128, np.uint8)
        paint_pattern(img, 6, 8)
        paint_pattern(img, 34, 60)
        boxes = detect_faces(GrayFrame(64, 96, img), cascade)
        assert len(boxes) == 2

    def test_determinism(self, cascade):
        g = pattern_gray()
        assert detect_faces(g, cascade) == detect_faces(g, cascade)

    def test_accepting_windows_match_brute_enumeration(self, cascade):
        """Merged output keeps the top-ordered box of the accepting set."""
        g = pattern_gray(64, 64, 10, 12)
        ii = integral_image(g)
        params = DetectParams()
        accepted = []
        k = 0
        while True:
            scale = params.scale_step**k
            ww = math.floor(cascade.base_w * scale + 0.5)
            if ww > 64:
                break
            k += 1
            for y in range(0, 64 - ww + 1, params.window_stride):
                for x in range(0, 64 - ww + 1, params.window_stride):
                    ok, score = eval_window(ii, cascade, Rect(x, y, ww, ww))
                    if ok:
                        accepted.append(FaceBox(Rect(x, y, ww, ww), score))
        assert accepted  # the pattern is found by enumeration
        expected = merge_boxes(accepted, params.merge_iou)
        assert detect_faces(g, cascade) == sorted(
            expected, key=lambda b: (-b.score, b.rect.y, b.rect.x, b.rect.w)
        )


class TestAlphaCoverage:
    def test_empty(self):
        assert alpha_coverage([], 10, 10) == 0.0

    def test_quarter_box(self):
        boxes = [FaceBox(Rect(0, 0, 5, 5), 1.0)]
        assert alpha_coverage(boxes, 10, 10) == 0.25

    def test_overlap_inclusion_exclusion(self):
        a = FaceBox(Rect(0, 0, 6, 6), 1.0)
        b = FaceBox(Rect(3, 3, 6, 6), 0.5)
        union = 36 + 36 - 9
        assert union_pixels([a, b], 12, 12) == union
        assert alpha_coverage([a, b], 12, 12) == union / 144

    def test_random_boxes_match_bitmap(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            boxes = []
            for _ in range(rng.integers(0, 6)):
                w = int(rng.integers(1, 16))
                h = int(rng.integers(1, 16))
                x = int(rng.integers(0, 32 - w))
                y = int(rng.integers(0, 32 - h))
                boxes.append(FaceBox(Rect(x, y, w, h), 1.0))
            mask = np.zeros((32, 32), bool)
            for bx in boxes:
                r = bx.rect
                mask[r.y : r.y + r.h, r.x : r.x + r.w] = True
            alpha = alpha_coverage(boxes, 32, 32)
            assert alpha == mask.sum() / 1024
            assert 0 <= alpha <= 1
