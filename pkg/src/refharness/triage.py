"""Attempt classification, failure grouping and run summaries."""

from __future__ import annotations

import hashlib
import json
import random
from collections import defaultdict
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Iterable, Mapping, Sequence

from .checker.model import DiagnosticKey, NormalizedReport
from .diff import IntroducedErrors
from .strategy import RefactoringRequest, RefactoringType, StrategyKind


class Classification(str, Enum):
    CORRECT = "Correct"
    FAILURE = "Failure"
    CANNOT_APPLY = "CannotApply"
    CRASHED = "Crashed"


class TriageLabel(str, Enum):
    UNREVIEWED = "Unreviewed"
    FALSE_POSITIVE = "FalsePositive"
    CONFIRMED = "Confirmed"


APPLIED, CANNOT_APPLY, CRASHED = "Applied", "CannotApply", "Crashed"


@dataclass(frozen=True)
class OutcomeSummary:
    """What a record keeps of an engine outcome."""

    variant: str
    detail: str = ""
    refactored_id: str = ""
    noop: bool = False
    engine: str = ""

    def __post_init__(self) -> None:
        if self.variant not in (APPLIED, CANNOT_APPLY, CRASHED):
            raise ValueError(f"unknown outcome variant {self.variant!r}")

    def to_dict(self) -> dict:
        return {
            "variant": self.variant,
            "detail": self.detail,
            "refactored_id": self.refactored_id,
            "noop": self.noop,
            "engine": self.engine,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> OutcomeSummary:
        return cls(
            data["variant"],
            data.get("detail", ""),
            data.get("refactored_id", ""),
            bool(data.get("noop", False)),
            data.get("engine", ""),
        )


def classify(outcome, introduced: IntroducedErrors | None) -> Classification:
    """Map an engine outcome (anything with a ``variant``) plus its diff to a class."""
    variant = outcome if isinstance(outcome, str) else outcome.variant
    if variant == CANNOT_APPLY:
        return Classification.CANNOT_APPLY
    if variant == CRASHED:
        return Classification.CRASHED
    if variant != APPLIED:
        raise ValueError(f"unknown outcome variant {variant!r}")
    if introduced is None:
        raise ValueError("an applied outcome needs its introduced errors")
    return Classification.FAILURE if introduced else Classification.CORRECT


@dataclass(frozen=True)
class AttemptRecord:
    attempt_id: int
    request: RefactoringRequest
    outcome: OutcomeSummary
    classification: Classification
    before: NormalizedReport | None = None
    after: NormalizedReport | None = None
    introduced: IntroducedErrors | None = None
    triage_label: TriageLabel = TriageLabel.UNREVIEWED
    snapshot_id: str = ""
    check_error: str = ""

    def __post_init__(self) -> None:
        object.__setattr__(self, "classification", Classification(self.classification))
        object.__setattr__(self, "triage_label", TriageLabel(self.triage_label))
        cls = self.classification
        if cls in (Classification.FAILURE, Classification.CORRECT):
            if self.outcome.variant != APPLIED or self.introduced is None:
                raise ValueError(f"attempt {self.attempt_id}: {cls.value} needs an applied outcome and a diff")
            if bool(self.introduced) != (cls is Classification.FAILURE):
                raise ValueError(f"attempt {self.attempt_id}: {cls.value} disagrees with its introduced errors")
        if self.triage_label is not TriageLabel.UNREVIEWED and cls is not Classification.FAILURE:
            raise ValueError(f"attempt {self.attempt_id}: only failures can carry a triage label")

    @property
    def key_set(self) -> frozenset[DiagnosticKey]:
        return self.introduced.key_set() if self.introduced is not None else frozenset()

    def with_label(self, label: TriageLabel | str) -> AttemptRecord:
        return AttemptRecord(
            self.attempt_id, self.request, self.outcome, self.classification, self.before, self.after,
            self.introduced, TriageLabel(label), self.snapshot_id, self.check_error,
        )

    def to_dict(self) -> dict:
        return {
            "attempt_id": self.attempt_id,
            "snapshot_id": self.snapshot_id,
            "request": self.request.to_dict(),
            "outcome": self.outcome.to_dict(),
            "classification": self.classification.value,
            "triage_label": self.triage_label.value,
            "before": self.before.to_list() if self.before is not None else None,
            "after": self.after.to_list() if self.after is not None else None,
            "introduced": self.introduced.to_dict() if self.introduced is not None else None,
            "check_error": self.check_error,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> AttemptRecord:
        def report(value):
            return NormalizedReport.from_list(value) if value is not None else None

        introduced = data.get("introduced")
        return cls(
            int(data["attempt_id"]),
            RefactoringRequest.from_dict(data["request"]),
            OutcomeSummary.from_dict(data["outcome"]),
            Classification(data["classification"]),
            report(data.get("before")),
            report(data.get("after")),
            IntroducedErrors.from_dict(introduced) if introduced is not None else None,
            TriageLabel(data.get("triage_label", TriageLabel.UNREVIEWED.value)),
            data.get("snapshot_id", ""),
            data.get("check_error", ""),
        )


def key_text(key: Iterable[DiagnosticKey]) -> str:
    return ", ".join(str(k) for k in sorted(key))


@dataclass(frozen=True)
class FailureGroup:
    key: tuple[DiagnosticKey, ...]
    members: tuple[int, ...]
    representative: int

    def __post_init__(self) -> None:
        if self.representative not in self.members:
            raise ValueError("representative must be a member of its group")

    @property
    def group_id(self) -> str:
        """Stable directory-friendly name derived from the key."""
        digest = hashlib.sha256(key_text(self.key).encode("utf-8")).hexdigest()[:10]
        return f"group-{digest}"

    def to_dict(self) -> dict:
        return {
            "group_id": self.group_id,
            "key": [k.to_list() for k in self.key],
            "members": list(self.members),
            "representative": self.representative,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> FailureGroup:
        return cls(
            tuple(DiagnosticKey(kind, code) for kind, code in data["key"]),
            tuple(data["members"]),
            int(data["representative"]),
        )


def group_failures(failures: Sequence[AttemptRecord], seed: int) -> list[FailureGroup]:
    """Partition failures by distinct introduced kinds; one seeded representative each.

    Each group draws from its own generator seeded by (seed, key), so adding or
    removing an unrelated group never changes another group's representative.
    """
    buckets: dict[tuple[DiagnosticKey, ...], list[int]] = defaultdict(list)
    for record in failures:
        if record.classification is not Classification.FAILURE:
            raise ValueError(f"attempt {record.attempt_id} is not a failure")
        buckets[tuple(sorted(record.key_set))].append(record.attempt_id)
    groups = []
    for key in sorted(buckets):
        members = tuple(sorted(buckets[key]))
        rng = random.Random(f"{seed}:{key_text(key)}")
        groups.append(FailureGroup(key, members, rng.choice(members)))
    return groups


COLUMNS = ("Refactoring", "Strategy", "Variables (targets)", "Cannot Apply", "Failures", "False Positives",
           "Correct application")


@dataclass(frozen=True)
class SummaryRow:
    refactoring: str
    strategy: str
    variables: int = 0
    cannot_apply: int = 0
    failures: int = 0
    false_positives: int = 0
    correct: int = 0

    @property
    def counts(self) -> tuple[int, int, int, int, int]:
        return (self.variables, self.cannot_apply, self.failures, self.false_positives, self.correct)

    def balanced(self) -> bool:
        return self.variables == self.cannot_apply + self.failures + self.false_positives + self.correct

    def to_dict(self) -> dict:
        return {
            "refactoring": self.refactoring,
            "strategy": self.strategy,
            "variables": self.variables,
            "cannot_apply": self.cannot_apply,
            "failures": self.failures,
            "false_positives": self.false_positives,
            "correct": self.correct,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> SummaryRow:
        return cls(**{k: data[k] for k in ("refactoring", "strategy", "variables", "cannot_apply", "failures",
                                           "false_positives", "correct")})


@dataclass(frozen=True)
class RunSummary:
    rows: tuple[SummaryRow, ...] = field(default_factory=tuple)

    def totals(self) -> tuple[int, int, int, int, int]:
        return tuple(sum(row.counts[i] for row in self.rows) for i in range(5))

    def to_dict(self) -> dict:
        return {"columns": list(COLUMNS), "rows": [r.to_dict() for r in self.rows], "totals": list(self.totals())}

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, data: Mapping) -> RunSummary:
        return cls(tuple(SummaryRow.from_dict(r) for r in data["rows"]))


def strategy_label(record: AttemptRecord) -> str:
    """Table label for the strategy behind an attempt."""
    raw = record.request.strategy
    if record.request.refactoring_type is RefactoringType.MOVE_FIELD_METHOD and raw in (
        StrategyKind.PROJECT_METHOD_NAMES.value,
        StrategyKind.PROJECT_FIELD_NAMES.value,
    ):
        return "Method/Field names"
    try:
        return StrategyKind(raw).display
    except ValueError:
        return raw or "-"


def default_grouping(record: AttemptRecord) -> tuple[str, str]:
    return record.request.refactoring_type.display, strategy_label(record)


def summarize_run(
    records: Sequence[AttemptRecord],
    grouping: Callable[[AttemptRecord], tuple[str, str]] = default_grouping,
    expected_rows: Sequence[tuple[str, str]] = (),
) -> RunSummary:
    """One row per (refactoring, strategy), in order of first appearance.

    ``expected_rows`` are emitted first (and even when nothing was attempted);
    a run with no attempts and no expected rows yields a single all-zero row.
    """
    tallies: dict[tuple[str, str], list[int]] = {row: [0, 0, 0, 0, 0] for row in expected_rows}
    if not records and not tallies:
        tallies[("-", "-")] = [0, 0, 0, 0, 0]
    for record in records:
        counts = tallies.setdefault(grouping(record), [0, 0, 0, 0, 0])
        counts[0] += 1
        cls = record.classification
        if cls in (Classification.CANNOT_APPLY, Classification.CRASHED):
            counts[1] += 1
        elif cls is Classification.FAILURE:
            counts[3 if record.triage_label is TriageLabel.FALSE_POSITIVE else 2] += 1
        else:
            counts[4] += 1
    return RunSummary(tuple(SummaryRow(r, s, *c) for (r, s), c in tallies.items()))
