"""Session engine: all per-user mutable state and the request semantics.

Framework-free so it can be driven by the HTTP layer and by tests directly.
Requests for distinct sessions run concurrently; requests for one session
serialize on the session's lock. Every directive the engine returns is
exactly apply_preferences(default_directive(label), prefs, label) — no
directive logic lives here.
"""

from __future__ import annotations

import itertools
import threading
from dataclasses import dataclass, field

import numpy as np

from ..adaptation import (
    BookCatalog,
    EmotionEvent,
    EventStore,
    Preferences,
    RuleTable,
    apply_preferences,
    default_directive,
    emotion_stats,
    load_default_catalog,
    load_default_quotes,
    load_default_rules,
    recommend_books,
    select_quote,
)
from ..cascade import Cascade, DetectParams
from ..emotion import (
    AggregationWindow,
    CarryForwardState,
    ClassifierModel,
    aggregate_window,
    neutral_distribution,
)
from ..errors import (
    DecodeError,
    EmoAdaptError,
    InvalidParameterError,
    TransportError,
    UnknownSessionError,
    ValidationError,
)
from ..imaging import decode_frame
from ..pipeline import FrameError, run_parallel


@dataclass
class EngineConfig:
    cascade: Cascade
    model: ClassifierModel
    rules: RuleTable | None = None
    catalog: BookCatalog | None = None
    quotes: dict[str, list[str]] | None = None
    store_dir: str = "./emoadapt-store"
    workers: int = 1
    window_length: int = 100
    detect_params: DetectParams = field(default_factory=DetectParams)
    book_limit: int = 5

    def __post_init__(self):
        if self.rules is None:
            self.rules = load_default_rules()
        if self.catalog is None:
            self.catalog = load_default_catalog()
        if self.quotes is None:
            self.quotes = load_default_quotes()


class _Session:
    def __init__(self, session_id: str, window_length: int, prefs: Preferences):
        self.id = session_id
        self.window = AggregationWindow(window_length)
        self.carry = CarryForwardState()
        self.prefs = prefs
        self.label = "neutral"
        self.confidence = 1.0
        self.event_count = 0
        self.lock = threading.Lock()


class SessionEngine:
    def __init__(self, config: EngineConfig):
        self.config = config
        self.store = EventStore(config.store_dir)
        self._sessions: dict[str, _Session] = {}
        self._counter = itertools.count(1)
        self._registry_lock = threading.Lock()

    # -- sessions ----------------------------------------------------------

    def create_session(self, prefs: Preferences | None = None) -> str:
        with self._registry_lock:
            session_id = f"s{next(self._counter):08d}"
            self._sessions[session_id] = _Session(
                session_id, self.config.window_length, prefs or Preferences()
            )
        return session_id

    def _session(self, session_id: str) -> _Session:
        with self._registry_lock:
            session = self._sessions.get(session_id)
        if session is None:
            raise UnknownSessionError(f"unknown session {session_id!r}")
        return session

    # -- operations --------------------------------------------------------

    def submit_frames(self, session_id: str, frames: list[dict]) -> dict:
        """frames: [{payload, format, timestamp_s, frame_index}, ...]"""
        session = self._session(session_id)
        if not frames:
            raise InvalidParameterError("frame batch must be non-empty")
        indices = [f["frame_index"] for f in frames]
        if any(b <= a for a, b in zip(indices, indices[1:])):
            raise InvalidParameterError("frame_index must be strictly increasing")

        decoded = []
        frame_errors = []
        for f in frames:
            try:
                decoded.append(
                    decode_frame(
                        f["payload"], f["format"], f["frame_index"], f["timestamp_s"]
                    )
                )
            except (TransportError, DecodeError) as exc:
                decoded.append(FrameError(f["frame_index"], exc.code))
                frame_errors.append({"frame_index": f["frame_index"], "code": exc.code})
        if len(frame_errors) == len(frames):
            raise ValidationError(
                "no decodable frames in batch",
                [f"frame {e['frame_index']}: {e['code']}" for e in frame_errors],
            )

        with session.lock:
            results, _ = run_parallel(
                decoded,
                self.config.cascade,
                self.config.model,
                self.config.detect_params,
                workers=self.config.workers,
                carry_state=session.carry,
            )
            for result in results:
                session.window.push(np.asarray(result.distribution))
            label, mean = aggregate_window(session.window)
            if label != session.label:
                last_ts = max(f["timestamp_s"] for f in frames)
                self.store.record_emotion(
                    EmotionEvent(session_id, last_ts, label, float(mean.max()))
                )
                session.event_count += 1
            session.label = label
            session.confidence = float(mean.max())
            return self._response(session, frame_errors)

    def get_adaptation(self, session_id: str) -> dict:
        session = self._session(session_id)
        with session.lock:
            return self._response(session)

    def update_preferences(self, session_id: str, prefs: Preferences) -> dict:
        session = self._session(session_id)
        with session.lock:
            session.prefs = prefs
            return self._response(session)

    def get_stats(
        self, session_id: str, from_ts: float | None = None, to_ts: float | None = None
    ) -> list[dict]:
        self._session(session_id)  # existence check
        events = self.store.load_events(session_id)
        return [
            {"label": label, "count": count, "proportion": proportion}
            for label, count, proportion in emotion_stats(events, from_ts, to_ts)
        ]

    # -- response assembly -------------------------------------------------

    def _response(self, session: _Session, frame_errors: list[dict] | None = None) -> dict:
        label = session.label
        directive = apply_preferences(
            default_directive(label, self.config.rules), session.prefs, label
        )
        books = recommend_books(
            label, self.config.catalog, self.config.book_limit, self.config.rules
        )
        quote = select_quote(
            directive.quote_category, session.event_count, self.config.quotes
        )
        return {
            "emotion": label,
            "confidence": session.confidence,
            "directive": directive.as_dict(),
            "books": [
                {"rank": b.rank, "title": b.title, "author": b.author} for b in books
            ],
            "quote": quote,
            "frame_errors": frame_errors or [],
        }
