"""Emotion -> UI directive mapping, user preferences, books and history.

The default rule table ships as a reviewed data file (one section per
emotion) and is pinned by golden tests. Emotions the table does not cover
(disgust, fear) fall back to the neutral row so every classifier output has
defined UI behavior.
"""

from __future__ import annotations

import configparser
import io
import os
import threading
from dataclasses import dataclass, field, replace
from importlib import resources

from .emotion import EMOTIONS
from .errors import (
    InvalidParameterError,
    OrderingError,
    ParseError,
    PersistenceError,
    ValidationError,
)

# Emotions with their own rule-table row; the rest use the fallback row.
RULE_EMOTIONS = ("happy", "sad", "angry", "neutral", "surprise")
FALLBACK_EMOTION = "neutral"

DIRECTIVE_FIELDS = (
    "background_color",
    "animation_kind",
    "animation_enabled",
    "quote_category",
    "message",
    "shelf_category",
    "soundtrack",
)


@dataclass(frozen=True)
class AdaptationDirective:
    background_color: str
    animation_kind: str
    animation_enabled: bool
    quote_category: str
    message: str
    shelf_category: str
    soundtrack: str | None = None

    def __post_init__(self):
        if not self.background_color:
            raise InvalidParameterError("background_color must be present")
        if not self.animation_kind:
            raise InvalidParameterError("animation_kind must be defined")

    def as_dict(self) -> dict:
        return {
            "background_color": self.background_color,
            "animation": {"kind": self.animation_kind, "enabled": self.animation_enabled},
            "quote_category": self.quote_category,
            "message": self.message,
            "shelf_category": self.shelf_category,
            "soundtrack": self.soundtrack,
        }


@dataclass(frozen=True)
class Preferences:
    """Per-emotion directive overrides plus global toggles."""

    overrides: dict[str, dict[str, object]] = field(default_factory=dict)
    animations_enabled: bool = True
    soundtrack_enabled: bool = True

    def __post_init__(self):
        bad = []
        for emotion, fields_ in self.overrides.items():
            if emotion not in EMOTIONS:
                bad.append(emotion)
                continue
            for name in fields_:
                if name not in DIRECTIVE_FIELDS:
                    bad.append(f"{emotion}.{name}")
        if bad:
            raise ValidationError(f"invalid preference fields: {', '.join(bad)}", bad)


@dataclass(frozen=True)
class BookEntry:
    rank: int
    title: str
    author: str
    categories: tuple[str, ...]

    def __post_init__(self):
        if not self.categories:
            raise InvalidParameterError(f"book {self.title!r} needs >= 1 category")


@dataclass(frozen=True)
class BookCatalog:
    entries: tuple[BookEntry, ...]

    def __post_init__(self):
        titles = [e.title for e in self.entries]
        if len(set(titles)) != len(titles):
            raise InvalidParameterError("catalog titles must be unique")


@dataclass(frozen=True)
class EmotionEvent:
    session_id: str
    timestamp: float
    label: str
    confidence: float

    def __post_init__(self):
        if self.label not in EMOTIONS:
            raise InvalidParameterError(f"unknown emotion label {self.label!r}")


# ---------------------------------------------------------------------------
# Rule table
# ---------------------------------------------------------------------------


class RuleTable:
    def __init__(self, rows: dict[str, AdaptationDirective]):
        missing = [e for e in RULE_EMOTIONS if e not in rows]
        if missing:
            raise ParseError(f"rule table missing emotions: {missing}")
        self._rows = rows

    def row(self, emotion: str) -> AdaptationDirective:
        if emotion not in EMOTIONS:
            raise InvalidParameterError(f"unknown emotion label {emotion!r}")
        return self._rows.get(emotion, self._rows[FALLBACK_EMOTION])


def parse_rules(text: str) -> RuleTable:
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"bad rule file: {exc}") from exc
    rows = {}
    for section in parser.sections():
        if section not in EMOTIONS:
            raise ParseError(f"rule section {section!r} is not an emotion label")
        opts = dict(parser[section])
        unknown = set(opts) - set(DIRECTIVE_FIELDS)
        if unknown:
            raise ParseError(f"rule section {section!r} has unknown keys {sorted(unknown)}")
        try:
            rows[section] = AdaptationDirective(
                background_color=opts["background_color"],
                animation_kind=opts["animation_kind"],
                animation_enabled=opts.get("animation_enabled", "true").lower() == "true",
                quote_category=opts.get("quote_category", ""),
                message=opts.get("message", ""),
                shelf_category=opts.get("shelf_category", ""),
                soundtrack=opts.get("soundtrack") or None,
            )
        except KeyError as exc:
            raise ParseError(f"rule section {section!r} missing {exc}") from exc
    return RuleTable(rows)


def load_default_rules() -> RuleTable:
    text = resources.files("emoadapt.data").joinpath("rules.ini").read_text()
    return parse_rules(text)


_DEFAULT_RULES: RuleTable | None = None


def default_directive(emotion: str, rules: RuleTable | None = None) -> AdaptationDirective:
    global _DEFAULT_RULES
    if rules is None:
        if _DEFAULT_RULES is None:
            _DEFAULT_RULES = load_default_rules()
        rules = _DEFAULT_RULES
    return rules.row(emotion)


def apply_preferences(
    directive: AdaptationDirective, prefs: Preferences, emotion: str
) -> AdaptationDirective:
    """Field-wise override: per-emotion override > global toggles > default."""
    changes = dict(prefs.overrides.get(emotion, {}))
    if "animation_enabled" in changes:
        changes["animation_enabled"] = _as_bool(changes["animation_enabled"])
    out = replace(directive, **changes)
    if not prefs.animations_enabled:
        out = replace(out, animation_enabled=False)
    if not prefs.soundtrack_enabled:
        out = replace(out, soundtrack=None)
    return out


def _as_bool(value) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).lower() == "true"


def parse_preferences(text: str) -> Preferences:
    """Preferences file: a [global] section plus per-emotion override sections."""
    parser = configparser.ConfigParser()
    try:
        parser.read_string(text)
    except configparser.Error as exc:
        raise ParseError(f"bad preferences file: {exc}") from exc
    overrides: dict[str, dict[str, object]] = {}
    animations_enabled = True
    soundtrack_enabled = True
    for section in parser.sections():
        opts = dict(parser[section])
        if section == "global":
            unknown = set(opts) - {"animations_enabled", "soundtrack_enabled"}
            if unknown:
                raise ValidationError(
                    f"unknown global preference keys {sorted(unknown)}", sorted(unknown)
                )
            animations_enabled = opts.get("animations_enabled", "true").lower() == "true"
            soundtrack_enabled = opts.get("soundtrack_enabled", "true").lower() == "true"
        else:
            if "animation_enabled" in opts:
                opts["animation_enabled"] = opts["animation_enabled"].lower() == "true"
            overrides[section] = opts
    return Preferences(overrides, animations_enabled, soundtrack_enabled)


def save_preferences(prefs: Preferences) -> str:
    parser = configparser.ConfigParser()
    parser["global"] = {
        "animations_enabled": str(prefs.animations_enabled).lower(),
        "soundtrack_enabled": str(prefs.soundtrack_enabled).lower(),
    }
    for emotion in sorted(prefs.overrides):
        parser[emotion] = {
            k: str(v).lower() if isinstance(v, bool) else str(v)
            for k, v in prefs.overrides[emotion].items()
        }
    buf = io.StringIO()
    parser.write(buf)
    return buf.getvalue()


# ---------------------------------------------------------------------------
# Books and quotes
# ---------------------------------------------------------------------------


def parse_catalog(text: str) -> BookCatalog:
    """One entry per line: rank|title|author|category[,category...]"""
    entries = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split("|")
        if len(parts) != 4:
            raise ParseError(f"catalog line {lineno}: expected 4 '|'-separated fields")
        try:
            rank = int(parts[0])
        except ValueError as exc:
            raise ParseError(f"catalog line {lineno}: bad rank {parts[0]!r}") from exc
        categories = tuple(c.strip() for c in parts[3].split(",") if c.strip())
        entries.append(BookEntry(rank, parts[1].strip(), parts[2].strip(), categories))
    return BookCatalog(tuple(entries))


def load_default_catalog() -> BookCatalog:
    text = resources.files("emoadapt.data").joinpath("catalog.txt").read_text()
    return parse_catalog(text)


def recommend_books(
    emotion: str,
    catalog: BookCatalog,
    limit: int,
    rules: RuleTable | None = None,
) -> list[BookEntry]:
    """Catalog entries on the emotion's shelf, by rank then title, truncated."""
    if limit < 1:
        raise InvalidParameterError("limit must be >= 1")
    shelf = default_directive(emotion, rules).shelf_category
    matches = [e for e in catalog.entries if shelf in e.categories]
    matches.sort(key=lambda e: (e.rank, e.title))
    return matches[:limit]


def load_default_quotes() -> dict[str, list[str]]:
    text = resources.files("emoadapt.data").joinpath("quotes.txt").read_text()
    quotes: dict[str, list[str]] = {}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        category, _, quote = line.partition("|")
        quotes.setdefault(category.strip(), []).append(quote.strip())
    return quotes


def select_quote(category: str, rotation: int, quotes: dict[str, list[str]]) -> str:
    """Deterministic rotation through the category's quotes by event count."""
    pool = quotes.get(category)
    if not pool:
        return ""
    return pool[rotation % len(pool)]


# ---------------------------------------------------------------------------
# Emotion history (append-only per-session event logs)
# ---------------------------------------------------------------------------


class EventStore:
    """One append-only log file per session under ``store_dir``.

    Line format: ``timestamp,session,label,confidence``. Appends for a
    session are serialized; reads see a prefix.
    """

    def __init__(self, store_dir):
        self.store_dir = str(store_dir)
        os.makedirs(self.store_dir, exist_ok=True)
        self._locks: dict[str, threading.Lock] = {}
        self._last_ts: dict[str, float] = {}
        self._registry_lock = threading.Lock()

    def _path(self, session_id: str) -> str:
        safe = "".join(c if c.isalnum() or c in "-_" else "_" for c in session_id)
        return os.path.join(self.store_dir, f"{safe}.log")

    def _lock(self, session_id: str) -> threading.Lock:
        with self._registry_lock:
            return self._locks.setdefault(session_id, threading.Lock())

    def record_emotion(self, event: EmotionEvent) -> None:
        with self._lock(event.session_id):
            last = self._last_ts.get(event.session_id)
            if last is None:
                events = self.load_events(event.session_id)
                last = events[-1].timestamp if events else None
            if last is not None and event.timestamp < last:
                raise OrderingError(
                    f"event timestamp {event.timestamp} < last {last}"
                )
            line = f"{event.timestamp!r},{event.session_id},{event.label},{event.confidence!r}\n"
            try:
                with open(self._path(event.session_id), "a") as fh:
                    fh.write(line)
                    fh.flush()
            except OSError as exc:
                raise PersistenceError(f"cannot append event: {exc}") from exc
            self._last_ts[event.session_id] = event.timestamp

    def load_events(self, session_id: str) -> list[EmotionEvent]:
        path = self._path(session_id)
        if not os.path.exists(path):
            return []
        events = []
        try:
            with open(path) as fh:
                lines = fh.readlines()
        except OSError as exc:
            raise PersistenceError(f"cannot read event log: {exc}") from exc
        for lineno, raw in enumerate(lines, start=1):
            line = raw.strip()
            if not line:
                continue
            parts = line.split(",")
            if len(parts) != 4:
                raise ParseError(f"event log line {lineno}: expected 4 fields")
            events.append(
                EmotionEvent(parts[1], float(parts[0]), parts[2], float(parts[3]))
            )
        return events


def emotion_stats(
    events: list[EmotionEvent],
    from_ts: float | None = None,
    to_ts: float | None = None,
) -> list[tuple[str, int, float]]:
    """Ranked (label, count, proportion) over events in [from_ts, to_ts]."""
    counts: dict[str, int] = {}
    for event in events:
        if from_ts is not None and event.timestamp < from_ts:
            continue
        if to_ts is not None and event.timestamp > to_ts:
            continue
        counts[event.label] = counts.get(event.label, 0) + 1
    total = sum(counts.values())
    if total == 0:
        return []
    ranked = sorted(counts.items(), key=lambda kv: (-kv[1], EMOTIONS.index(kv[0])))
    return [(label, count, count / total) for label, count in ranked]
