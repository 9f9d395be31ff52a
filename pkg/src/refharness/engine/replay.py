"""Closed-world replay of recorded engine outcomes, and the recorder that makes bundles.

Bundle format::

    {"engine": name,
     "snapshots": {snapshot_id: {path: text}},
     "outcomes": [{"snapshot_id": ..., "request": fingerprint, "outcome": {...}}]}
"""

from __future__ import annotations

import json
import threading
from pathlib import Path
from typing import Mapping

from .. import __version__
from ..corpus import ProjectSnapshot
from ..errors import ContractError, InputError
from ..strategy import RefactoringRequest, RefactoringType
from .base import Applied, EngineAdapter, EngineOutcome, apply_refactoring, outcome_from_dict


class ReplayEngine:
    supported = frozenset(RefactoringType)
    reentrant = True

    def __init__(self, outcomes: Mapping[tuple[str, str], EngineOutcome], name: str = "replay"):
        self.name = name
        self.version = __version__
        self._outcomes = dict(outcomes)

    def __len__(self) -> int:
        return len(self._outcomes)

    def apply(self, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
        key = (snapshot.snapshot_id, request.fingerprint())
        try:
            return self._outcomes[key]
        except KeyError:
            raise ContractError(
                f"no recorded outcome for {request.refactoring_type.value} on {request.target.qualified_name} "
                f"(snapshot {snapshot.snapshot_id[:12]})"
            ) from None


def replay_engine(bundle: Mapping | str | Path) -> ReplayEngine:
    if not isinstance(bundle, Mapping):
        try:
            bundle = json.loads(Path(bundle).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read engine bundle: {exc}") from exc
    try:
        snapshots = {}
        for sid, files in bundle.get("snapshots", {}).items():
            snapshot = ProjectSnapshot.from_files(files)
            if snapshot.snapshot_id != sid:
                raise InputError(f"bundle snapshot {sid[:12]} does not match its content")
            snapshots[sid] = snapshot
        outcomes = {
            (entry["snapshot_id"], entry["request"]): outcome_from_dict(entry["outcome"], snapshots)
            for entry in bundle["outcomes"]
        }
    except InputError:
        raise
    except (KeyError, TypeError, AttributeError, ValueError) as exc:
        raise InputError(f"malformed engine bundle: {exc!r}") from exc
    return ReplayEngine(outcomes, bundle.get("engine") or "replay")


class RecordingEngine:
    """Wraps an adapter and remembers every outcome for later replay."""

    def __init__(self, inner: EngineAdapter):
        self.inner = inner
        self.name = inner.name
        self.version = inner.version
        self.supported = inner.supported
        self.reentrant = inner.reentrant
        self._lock = threading.Lock()
        self._entries: dict[tuple[str, str], EngineOutcome] = {}

    def apply(self, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
        outcome = apply_refactoring(self.inner, snapshot, request)
        with self._lock:
            self._entries[(snapshot.snapshot_id, request.fingerprint())] = outcome
        return outcome

    def to_bundle(self) -> dict:
        return engine_bundle(self._entries, self.name)


def engine_bundle(entries: Mapping[tuple[str, str], EngineOutcome], name: str) -> dict:
    snapshots, outcomes = {}, []
    for (sid, fingerprint), outcome in sorted(entries.items()):
        if isinstance(outcome, Applied):
            snapshots[outcome.refactored.snapshot_id] = dict(outcome.refactored.files)
        outcomes.append({"snapshot_id": sid, "request": fingerprint, "outcome": outcome.to_dict()})
    return {"engine": name, "snapshots": dict(sorted(snapshots.items())), "outcomes": outcomes}
