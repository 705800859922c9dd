"""FastAPI application wrapping the session engine."""

from __future__ import annotations

from fastapi import FastAPI, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import JSONResponse

from ..adaptation import Preferences
from ..errors import (
    EmoAdaptError,
    InvalidParameterError,
    OrderingError,
    UnknownSessionError,
    ValidationError,
)
from .engine import EngineConfig, SessionEngine
from .schemas import (
    AdaptationResponse,
    FrameBatchRequest,
    PreferencesIn,
    SessionCreateRequest,
    SessionCreated,
    StatsResponse,
)


def _to_preferences(p: PreferencesIn) -> Preferences:
    return Preferences(
        overrides={k: dict(v) for k, v in p.overrides.items()},
        animations_enabled=p.animations_enabled,
        soundtrack_enabled=p.soundtrack_enabled,
    )


def create_app(config: EngineConfig) -> FastAPI:
    app = FastAPI(title="emoadapt", version="0.1.0")
    app.add_middleware(
        CORSMiddleware, allow_origins=["*"], allow_methods=["*"], allow_headers=["*"]
    )
    engine = SessionEngine(config)
    app.state.engine = engine

    @app.exception_handler(EmoAdaptError)
    async def handle_domain_error(request: Request, exc: EmoAdaptError):
        status = 400
        if isinstance(exc, UnknownSessionError):
            status = 404
        elif isinstance(exc, ValidationError):
            status = 422
        elif isinstance(exc, OrderingError):
            status = 409
        body = {"error": exc.code, "detail": str(exc)}
        if isinstance(exc, ValidationError) and exc.fields:
            body["fields"] = exc.fields
        return JSONResponse(status_code=status, content=body)

    @app.post("/sessions", response_model=SessionCreated)
    def create_session(req: SessionCreateRequest | None = None):
        prefs = None
        if req is not None and req.preferences is not None:
            prefs = _to_preferences(req.preferences)
        return SessionCreated(session_id=engine.create_session(prefs))

    @app.post("/sessions/{session_id}/frames", response_model=AdaptationResponse)
    def submit_frames(session_id: str, req: FrameBatchRequest):
        frames = [f.model_dump() for f in req.frames]
        return AdaptationResponse(**engine.submit_frames(session_id, frames))

    @app.get("/sessions/{session_id}/adaptation", response_model=AdaptationResponse)
    def get_adaptation(session_id: str):
        return AdaptationResponse(**engine.get_adaptation(session_id))

    @app.put("/sessions/{session_id}/preferences", response_model=AdaptationResponse)
    def update_preferences(session_id: str, req: PreferencesIn):
        return AdaptationResponse(
            **engine.update_preferences(session_id, _to_preferences(req))
        )

    @app.get("/sessions/{session_id}/stats", response_model=StatsResponse)
    def get_stats(
        session_id: str,
        from_ts: float | None = Query(default=None, alias="from"),
        to_ts: float | None = Query(default=None, alias="to"),
    ):
        return StatsResponse(entries=engine.get_stats(session_id, from_ts, to_ts))

    return app
