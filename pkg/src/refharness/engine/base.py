"""Engine outcomes, the adapter contract and the guarded entry point."""

from __future__ import annotations

import traceback
from dataclasses import dataclass
from typing import ClassVar, Mapping, Protocol, Union

from ..corpus import ProjectSnapshot
from ..errors import ContractError, InputError
from ..strategy import RefactoringRequest, RefactoringType
from ..triage import OutcomeSummary


@dataclass(frozen=True)
class Applied:
    refactored: ProjectSnapshot
    noop: bool = False
    engine: str = ""
    variant: ClassVar[str] = "Applied"

    def summary(self) -> OutcomeSummary:
        return OutcomeSummary(self.variant, "", self.refactored.snapshot_id, self.noop, self.engine)

    def to_dict(self) -> dict:
        return {"variant": self.variant, "refactored_id": self.refactored.snapshot_id, "noop": self.noop,
                "engine": self.engine}


@dataclass(frozen=True)
class CannotApply:
    reason: str
    engine: str = ""
    variant: ClassVar[str] = "CannotApply"

    def summary(self) -> OutcomeSummary:
        return OutcomeSummary(self.variant, self.reason, engine=self.engine)

    def to_dict(self) -> dict:
        return {"variant": self.variant, "reason": self.reason, "engine": self.engine}


@dataclass(frozen=True)
class Crashed:
    detail: str
    output: str = ""
    engine: str = ""
    variant: ClassVar[str] = "Crashed"

    def summary(self) -> OutcomeSummary:
        return OutcomeSummary(self.variant, self.detail, engine=self.engine)

    def to_dict(self) -> dict:
        return {"variant": self.variant, "detail": self.detail, "output": self.output, "engine": self.engine}


EngineOutcome = Union[Applied, CannotApply, Crashed]


def outcome_from_dict(data: Mapping, snapshots: Mapping[str, ProjectSnapshot]) -> EngineOutcome:
    """Rebuild an outcome; Applied results look their snapshot up by id."""
    try:
        variant = data["variant"]
        if variant == Applied.variant:
            refactored = snapshots[data["refactored_id"]]
            return Applied(refactored, bool(data.get("noop", False)), data.get("engine", ""))
        if variant == CannotApply.variant:
            return CannotApply(data["reason"], data.get("engine", ""))
        if variant == Crashed.variant:
            return Crashed(data["detail"], data.get("output", ""), data.get("engine", ""))
    except KeyError as exc:
        raise InputError(f"malformed outcome record, missing {exc}") from exc
    raise InputError(f"unknown outcome variant {data.get('variant')!r}")


class EngineAdapter(Protocol):
    name: str
    version: str
    supported: frozenset[RefactoringType]
    reentrant: bool

    def apply(self, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome: ...


def check_request(snapshot: ProjectSnapshot, request: RefactoringRequest) -> None:
    target = request.target
    text = snapshot.files.get(target.file)
    if text is None:
        raise ContractError(f"target file {target.file} is not in the snapshot")
    if not 0 <= target.start < target.end <= len(text):
        raise ContractError(f"target span {target.span} is outside {target.file} ({len(text)} chars)")


def apply_refactoring(adapter: EngineAdapter, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
    """Run one refactoring; anything the engine throws becomes ``Crashed``."""
    if request.refactoring_type not in adapter.supported:
        raise ContractError(f"engine {adapter.name} does not support {request.refactoring_type.value}")
    check_request(snapshot, request)
    try:
        outcome = adapter.apply(snapshot, request)
    except ContractError:
        raise
    except Exception as exc:
        return Crashed(f"{type(exc).__name__}: {exc}", traceback.format_exc(), adapter.name)
    if not isinstance(outcome, (Applied, CannotApply, Crashed)):
        return Crashed(f"engine {adapter.name} returned {type(outcome).__name__}", "", adapter.name)
    if isinstance(outcome, Applied) and outcome.refactored == snapshot and not outcome.noop:
        outcome = Applied(outcome.refactored, True, outcome.engine)
    return outcome
