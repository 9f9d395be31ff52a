"""Refactoring engine adapters."""

from .base import (
    Applied,
    CannotApply,
    Crashed,
    EngineAdapter,
    EngineOutcome,
    apply_refactoring,
    check_request,
    outcome_from_dict,
)
from .external import DEFAULT_ENGINE_TIMEOUT, ExternalEngine, rope_engine
from .rename import BuiltinRenameEngine, builtin_rename
from .replay import RecordingEngine, ReplayEngine, engine_bundle, replay_engine

__all__ = [
    "Applied",
    "BuiltinRenameEngine",
    "CannotApply",
    "Crashed",
    "DEFAULT_ENGINE_TIMEOUT",
    "EngineAdapter",
    "EngineOutcome",
    "ExternalEngine",
    "RecordingEngine",
    "ReplayEngine",
    "apply_refactoring",
    "builtin_rename",
    "check_request",
    "engine_bundle",
    "outcome_from_dict",
    "replay_engine",
    "rope_engine",
]
