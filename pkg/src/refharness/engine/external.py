"""Engines driven as subprocesses over a private copy of the snapshot.

The harness writes ``<tmp>/project`` and ``<tmp>/request.json`` and runs the
configured command (``{project}`` and ``{request}`` placeholders are
substituted).  The process either rewrites the project copy in place and exits
0, writes the refusal file named in the request and exits 0, or exits nonzero.

request.json::

    {"refactoring_type": ..., "file": ..., "start": ..., "end": ...,
     "params": {...}, "refusal_file": ..., "offset_unit": "char" | "byte"}
"""

from __future__ import annotations

import json
import os
import subprocess
import sys
import tempfile
import threading
from pathlib import Path
from typing import Iterable, Mapping, Sequence

from ..corpus import ProjectSnapshot, load_project
from ..errors import InputError
from ..strategy import RefactoringRequest, RefactoringType
from .base import Applied, CannotApply, Crashed, EngineOutcome

DEFAULT_ENGINE_TIMEOUT = 120.0


def _to_bytes(text: str, offset: int) -> int:
    return len(text[:offset].encode("utf-8"))


class ExternalEngine:
    def __init__(
        self,
        name: str,
        command: Sequence[str],
        *,
        supported: Iterable[RefactoringType | str] = tuple(RefactoringType),
        version: str = "",
        timeout: float = DEFAULT_ENGINE_TIMEOUT,
        offset_unit: str = "char",
        concurrency: int = 1,
        env: Mapping[str, str] | None = None,
    ):
        if not command:
            raise ValueError("engine command must not be empty")
        if offset_unit not in ("char", "byte"):
            raise ValueError(f"unknown offset unit {offset_unit!r}")
        self.name = name
        self.command = list(command)
        self.supported = frozenset(RefactoringType(t) for t in supported)
        self.version = version
        self.timeout = timeout
        self.offset_unit = offset_unit
        self.concurrency = concurrency
        self.reentrant = concurrency != 1
        self.env = dict(env or {})
        self._slots = threading.BoundedSemaphore(concurrency) if concurrency > 0 else None

    def request_payload(self, snapshot: ProjectSnapshot, request: RefactoringRequest, refusal: Path) -> dict:
        text = snapshot.files[request.target.file]
        start, end = request.target.span
        params = request.to_dict()["params"]
        if self.offset_unit == "byte":
            start, end = _to_bytes(text, start), _to_bytes(text, end)
            if "region" in params:
                params["region"] = [_to_bytes(text, o) for o in params["region"]]
        return {
            "refactoring_type": request.refactoring_type.value,
            "file": request.target.file,
            "start": start,
            "end": end,
            "qualified_name": request.target.qualified_name,
            "params": params,
            "refusal_file": str(refusal),
            "offset_unit": self.offset_unit,
        }

    def apply(self, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
        if self._slots is None:
            return self._apply(snapshot, request)
        with self._slots:
            return self._apply(snapshot, request)

    def _apply(self, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
        with tempfile.TemporaryDirectory(prefix="refharness-engine-") as tmp:
            project = snapshot.materialize(Path(tmp) / "project")
            refusal = Path(tmp) / "refusal.json"
            request_file = Path(tmp) / "request.json"
            request_file.write_text(json.dumps(self.request_payload(snapshot, request, refusal), indent=2))
            argv = [part.format(project=str(project), request=str(request_file)) for part in self.command]
            try:
                proc = subprocess.run(
                    argv, cwd=tmp, capture_output=True, text=True, timeout=self.timeout,
                    env={**os.environ, **self.env},
                )
            except FileNotFoundError as exc:
                return Crashed(f"engine {self.name} unavailable: {exc}", "", self.name)
            except subprocess.TimeoutExpired as exc:
                output = (exc.stdout or "") + (exc.stderr or "")
                if isinstance(output, bytes):
                    output = output.decode("utf-8", "replace")
                return Crashed("timeout", output, self.name)
            output = proc.stdout + proc.stderr
            if proc.returncode != 0:
                return Crashed(f"engine {self.name} exited with status {proc.returncode}", output, self.name)
            if refusal.exists():
                try:
                    reason = json.loads(refusal.read_text(encoding="utf-8")).get("reason", "")
                except (OSError, json.JSONDecodeError, AttributeError):
                    reason = refusal.read_text(encoding="utf-8", errors="replace")
                return CannotApply(reason or "refused", self.name)
            try:
                refactored = load_project(project, ("**/*",))
            except InputError as exc:
                return Crashed(f"engine {self.name} left an unreadable project: {exc}", output, self.name)
        return Applied(refactored, refactored == snapshot, self.name)


def rope_engine(python: str = sys.executable, *, timeout: float = DEFAULT_ENGINE_TIMEOUT, version: str = "") -> ExternalEngine:
    """Rope driven through :mod:`refharness.engine.rope_driver` in a child interpreter."""
    if not version:
        try:
            import rope

            version = getattr(rope, "VERSION", "")
        except ImportError:
            version = ""
    package_root = str(Path(__file__).resolve().parents[2])
    path = os.pathsep.join(p for p in (package_root, os.environ.get("PYTHONPATH", "")) if p)
    return ExternalEngine(
        "rope",
        [python, "-m", "refharness.engine.rope_driver", "{project}", "{request}"],
        version=version,
        timeout=timeout,
        env={"PYTHONPATH": path},
    )
