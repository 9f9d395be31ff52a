"""End-to-end detection run: apply, check, diff, classify, group, reduce."""

from __future__ import annotations

import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from contextlib import nullcontext
from dataclasses import dataclass, field
from typing import Sequence

from .checker.adapters import CheckerAdapter, run_checker
from .checker.model import TypeReport, normalize
from .corpus import ProjectSnapshot
from .diff import diff_reports
from .engine.base import Applied, Crashed, EngineAdapter, EngineOutcome, apply_refactoring
from .errors import CheckError, ContractError, HarnessError
from .reduce import DEFAULT_BUDGET, ReductionResult, minimize
from .strategy import RefactoringRequest
from .triage import AttemptRecord, Classification, FailureGroup, RunSummary, classify, group_failures, summarize_run

log = logging.getLogger(__name__)


@dataclass
class Attempt:
    """A record plus the raw artifacts the store keeps for it."""

    record: AttemptRecord
    outcome: EngineOutcome
    before_report: TypeReport
    after_report: TypeReport | None = None


@dataclass
class Reduction:
    group: FailureGroup
    result: ReductionResult | None = None
    error: str = ""


@dataclass
class RunResult:
    snapshot: ProjectSnapshot
    before_report: TypeReport
    attempts: list[Attempt]
    groups: list[FailureGroup]
    summary: RunSummary
    reductions: dict[str, Reduction] = field(default_factory=dict)

    @property
    def records(self) -> list[AttemptRecord]:
        return [a.record for a in self.attempts]

    def attempt(self, attempt_id: int) -> Attempt:
        return next(a for a in self.attempts if a.record.attempt_id == attempt_id)


def run_attempt(
    attempt_id: int,
    snapshot: ProjectSnapshot,
    request: RefactoringRequest,
    engine: EngineAdapter,
    checker: CheckerAdapter,
    before_report: TypeReport,
    engine_lock: threading.Lock | None = None,
) -> Attempt:
    """One attempt; engine and checker failures are recorded, never raised."""
    before = normalize(before_report)
    try:
        with engine_lock or nullcontext():
            outcome = apply_refactoring(engine, snapshot, request)
    except ContractError as exc:
        outcome = Crashed(f"ContractError: {exc}", "", engine.name)
    summary = outcome.summary()
    if not isinstance(outcome, Applied):
        record = AttemptRecord(attempt_id, request, summary, classify(outcome, None), before=before,
                               snapshot_id=snapshot.snapshot_id)
        return Attempt(record, outcome, before_report)
    try:
        after_report = run_checker(checker, outcome.refactored)
    except CheckError as exc:
        record = AttemptRecord(attempt_id, request, summary, Classification.CRASHED, before=before,
                               snapshot_id=snapshot.snapshot_id, check_error=str(exc))
        return Attempt(record, outcome, before_report)
    after = normalize(after_report)
    introduced = diff_reports(before, after, before_id=snapshot.snapshot_id, after_id=outcome.refactored.snapshot_id)
    record = AttemptRecord(attempt_id, request, summary, classify(outcome, introduced), before, after, introduced,
                           snapshot_id=snapshot.snapshot_id)
    return Attempt(record, outcome, before_report, after_report)


def run_pipeline(
    snapshot: ProjectSnapshot,
    requests: Sequence[RefactoringRequest],
    engine: EngineAdapter,
    checker: CheckerAdapter,
    *,
    seed: int,
    workers: int = 1,
    reduce: bool = False,
    budget: int = DEFAULT_BUDGET,
) -> RunResult:
    """Check the original once, then run every request; results keep request order.

    A checker failure on the original snapshot raises CheckError: without a
    baseline no attempt can be classified.
    """
    before_report = run_checker(checker, snapshot)
    engine_lock = None if getattr(engine, "reentrant", False) else threading.Lock()

    def work(item: tuple[int, RefactoringRequest]) -> Attempt:
        index, request = item
        return run_attempt(index + 1, snapshot, request, engine, checker, before_report, engine_lock)

    items = list(enumerate(requests))
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            attempts = list(pool.map(work, items))
    else:
        attempts = [work(item) for item in items]

    records = [a.record for a in attempts]
    failures = [r for r in records if r.classification is Classification.FAILURE]
    groups = group_failures(failures, seed)
    result = RunResult(snapshot, before_report, attempts, groups, summarize_run(records))
    if reduce:
        for group in groups:
            result.reductions[group.group_id] = reduce_group(result, group, engine, checker, budget)
    return result


def reduce_group(result: RunResult, group: FailureGroup, engine: EngineAdapter, checker: CheckerAdapter,
                 budget: int = DEFAULT_BUDGET) -> Reduction:
    record = result.attempt(group.representative).record
    try:
        reduced = minimize(result.snapshot, record.request, frozenset(group.key), engine, checker, budget)
    except HarnessError as exc:
        log.warning("group %s left unreduced: %s", group.group_id, exc)
        return Reduction(group, None, f"{type(exc).__name__}: {exc}")
    return Reduction(group, reduced)
