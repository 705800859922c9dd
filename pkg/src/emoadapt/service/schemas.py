"""Pydantic request/response models for the HTTP wire protocol."""

from __future__ import annotations

from pydantic import BaseModel, ConfigDict, Field


class FrameIn(BaseModel):
    payload: str  # Base64 image payload
    format: str  # png | jpeg | raw
    timestamp_s: float
    frame_index: int = Field(ge=0)


class FrameBatchRequest(BaseModel):
    frames: list[FrameIn]


class PreferencesIn(BaseModel):
    model_config = ConfigDict(extra="forbid")

    overrides: dict[str, dict[str, str | bool]] = {}
    animations_enabled: bool = True
    soundtrack_enabled: bool = True


class SessionCreateRequest(BaseModel):
    preferences: PreferencesIn | None = None


class SessionCreated(BaseModel):
    session_id: str


class AnimationOut(BaseModel):
    kind: str
    enabled: bool


class DirectiveOut(BaseModel):
    background_color: str
    animation: AnimationOut
    quote_category: str
    message: str
    shelf_category: str
    soundtrack: str | None = None


class BookOut(BaseModel):
    rank: int
    title: str
    author: str


class FrameErrorOut(BaseModel):
    frame_index: int
    code: str


class AdaptationResponse(BaseModel):
    emotion: str
    confidence: float
    directive: DirectiveOut
    books: list[BookOut]
    quote: str
    frame_errors: list[FrameErrorOut] = []


class StatsEntry(BaseModel):
    label: str
    count: int
    proportion: float


class StatsResponse(BaseModel):
    entries: list[StatsEntry]
