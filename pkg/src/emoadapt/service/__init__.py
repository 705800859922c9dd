from .app import create_app
from .engine import EngineConfig, SessionEngine

__all__ = ["create_app", "EngineConfig", "SessionEngine"]
