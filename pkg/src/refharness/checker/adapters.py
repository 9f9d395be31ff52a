"""Checker adapters: the built-in micro-checker, external processes, replay."""

from __future__ import annotations

import json
import logging
import os
import subprocess
import tempfile
import threading
from pathlib import Path
from typing import Mapping, Protocol, Sequence

from .. import __version__
from ..corpus import ProjectSnapshot
from ..errors import CheckError, InputError, ParseError
from .dialects import parse_external_output
from .micro import micro_check
from .model import TypeReport

log = logging.getLogger(__name__)

DEFAULT_CHECK_TIMEOUT = 300.0


class CheckerAdapter(Protocol):
    name: str
    version: str
    concurrency: int

    def check(self, snapshot: ProjectSnapshot) -> TypeReport: ...


class MicroChecker:
    name = "micro"
    version = __version__
    concurrency = 0  # unlimited

    def check(self, snapshot: ProjectSnapshot) -> TypeReport:
        return micro_check(snapshot)


class ExternalChecker:
    """Runs a checker command over a materialized copy of the snapshot.

    ``command`` items may contain ``{project}``; the process runs with the
    project copy as working directory.  Exit codes outside ``ok_exit_codes``
    are checker crashes.
    """

    def __init__(
        self,
        name: str,
        command: Sequence[str],
        *,
        dialect: str = "line",
        version: str = "",
        timeout: float = DEFAULT_CHECK_TIMEOUT,
        ok_exit_codes: Sequence[int] = (0, 1),
        concurrency: int = 1,
        env: Mapping[str, str] | None = None,
    ):
        if not command:
            raise ValueError("checker command must not be empty")
        self.name = name
        self.command = list(command)
        self.dialect = dialect
        self.version = version
        self.timeout = timeout
        self.ok_exit_codes = set(ok_exit_codes)
        self.concurrency = concurrency
        self.env = dict(env or {})
        self._slots = threading.BoundedSemaphore(concurrency) if concurrency > 0 else None

    def check(self, snapshot: ProjectSnapshot) -> TypeReport:
        if self._slots is None:
            return self._check(snapshot)
        with self._slots:
            return self._check(snapshot)

    def _check(self, snapshot: ProjectSnapshot) -> TypeReport:
        with tempfile.TemporaryDirectory(prefix="refharness-check-") as tmp:
            project = snapshot.materialize(Path(tmp) / "project")
            argv = [part.format(project=str(project)) for part in self.command]
            try:
                proc = subprocess.run(
                    argv,
                    cwd=project,
                    capture_output=True,
                    text=True,
                    timeout=self.timeout,
                    env={**os.environ, **self.env},
                )
            except FileNotFoundError as exc:
                raise CheckError(f"checker {self.name} unavailable: {exc}") from exc
            except subprocess.TimeoutExpired as exc:
                output = (exc.stdout or "") + (exc.stderr or "")
                if isinstance(output, bytes):
                    output = output.decode("utf-8", "replace")
                raise CheckError(f"checker {self.name} timed out after {self.timeout}s", output) from exc
            raw = proc.stdout
            if proc.returncode not in self.ok_exit_codes:
                raise CheckError(
                    f"checker {self.name} exited with status {proc.returncode}",
                    proc.stdout + proc.stderr,
                )
            try:
                report = parse_external_output(
                    raw,
                    self.dialect,
                    snapshot_id=snapshot.snapshot_id,
                    checker=self.name,
                    version=self.version,
                    root=str(project),
                )
            except ParseError as exc:
                raise CheckError(f"checker {self.name}: {exc}", proc.stdout + proc.stderr) from exc
        return report


class ReplayChecker:
    """Returns recorded reports keyed by snapshot id (closed world)."""

    concurrency = 0

    def __init__(self, reports: Mapping[str, TypeReport], name: str = "replay"):
        self.name = name
        self.version = __version__
        self._reports = dict(reports)

    @classmethod
    def from_bundle(cls, bundle: Mapping | str | Path) -> ReplayChecker:
        if not isinstance(bundle, Mapping):
            try:
                bundle = json.loads(Path(bundle).read_text(encoding="utf-8"))
            except (OSError, json.JSONDecodeError) as exc:
                raise InputError(f"cannot read checker bundle: {exc}") from exc
        try:
            reports = {sid: TypeReport.from_dict(r) for sid, r in bundle["reports"].items()}
        except (KeyError, TypeError, ValueError, AttributeError) as exc:
            raise InputError(f"malformed checker bundle: {exc}") from exc
        return cls(reports)

    def to_bundle(self) -> dict:
        return {"reports": {sid: r.to_dict() for sid, r in sorted(self._reports.items())}}

    def check(self, snapshot: ProjectSnapshot) -> TypeReport:
        try:
            return self._reports[snapshot.snapshot_id]
        except KeyError:
            raise CheckError(f"no recorded report for snapshot {snapshot.snapshot_id}") from None


def run_checker(adapter: CheckerAdapter, snapshot: ProjectSnapshot) -> TypeReport:
    """One report per invocation; every adapter failure surfaces as CheckError."""
    try:
        report = adapter.check(snapshot)
    except CheckError:
        raise
    except Exception as exc:  # adapter bug or crash
        raise CheckError(f"checker {getattr(adapter, 'name', adapter)} crashed: {exc!r}") from exc
    if report.snapshot_id != snapshot.snapshot_id:
        raise CheckError(
            f"checker {adapter.name} returned a report for {report.snapshot_id}, expected {snapshot.snapshot_id}"
        )
    return report


def pyre_checker(
    executable: str = "pyre",
    *,
    typeshed: str | None = None,
    version: str = "",
    timeout: float = DEFAULT_CHECK_TIMEOUT,
    strict: bool = True,
) -> ExternalChecker:
    """Pyre in JSON mode over the project copy."""
    command = [executable, "--source-directory", ".", "--noninteractive"]
    if strict:
        command.append("--strict")
    if typeshed:
        command += ["--typeshed", typeshed]
    command += ["--output", "json", "check"]
    return ExternalChecker("pyre", command, dialect="pyre-json", version=version, timeout=timeout)


def find_pyre_typeshed() -> str | None:
    """Typeshed directory shipped with a pyre-check installation, if any."""
    candidates = [Path("/usr/local/lib/pyre_check/typeshed")]
    try:
        import sysconfig

        for key in ("data", "purelib", "platlib"):
            base = sysconfig.get_paths().get(key)
            if base:
                candidates.append(Path(base) / "lib" / "pyre_check" / "typeshed")
                candidates.append(Path(base).parent.parent / "pyre_check" / "typeshed")
    except Exception:  # pragma: no cover - sysconfig is always present
        pass
    for candidate in candidates:
        if candidate.is_dir():
            return str(candidate)
    return None
