"""Emotion-aware UI adaptation engine."""

from .adaptation import (
    AdaptationDirective,
    BookCatalog,
    EmotionEvent,
    EventStore,
    Preferences,
    apply_preferences,
    default_directive,
    emotion_stats,
    recommend_books,
)
from .cascade import Cascade, DetectParams, FaceBox, detect_faces, load_cascade
from .emotion import (
    EMOTIONS,
    AggregationWindow,
    ClassifierModel,
    aggregate_window,
    argmax_emotion,
    classify,
    load_model,
    preprocess_face,
)
from .imaging import (
    GrayFrame,
    IntegralImage,
    Rect,
    RgbFrame,
    decode_frame,
    integral_image,
    plan_frames,
    rect_sum,
    to_grayscale,
)
from .pipeline import CostModel, FrameResult, PipelineMetrics, predict_work, run_parallel, run_sequential

__version__ = "0.1.0"
