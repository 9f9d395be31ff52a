"""Bug reports, run summaries and the on-disk run store.

Store layout::

    run-<id>/config.json
    run-<id>/attempts/<n>/{request,outcome,before.report,after.report,diff}.json
    run-<id>/snapshots/<snapshot_id>.json      shared, content-addressed
    run-<id>/groups.json
    run-<id>/summary.{txt,json}
    run-<id>/bugs/<group>/{report.md,report.json,reproduction/}
"""

from __future__ import annotations

import hashlib
import json
import shutil
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

from .checker.model import NormalizedReport, TypeReport, normalize
from .corpus import ProjectSnapshot
from .diff import IntroducedErrors
from .errors import InputError, ReportError, StoreError
from .reduce import ReductionResult, write_reproduction
from .strategy import RefactoringRequest
from .triage import (
    COLUMNS,
    AttemptRecord,
    FailureGroup,
    OutcomeSummary,
    RunSummary,
    SummaryRow,
    TriageLabel,
    key_text,
    strategy_label,
    summarize_run,
)


def _dump(data) -> str:
    return json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def _write(path: Path, data) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(_dump(data) if not isinstance(data, str) else data, encoding="utf-8")


# ---------------------------------------------------------------------------
# Run summary


def emit_summary(rows: RunSummary | Sequence[SummaryRow]) -> str:
    """Aligned plain-text table plus a totals line; unbalanced rows are refused."""
    rows = tuple(rows.rows if isinstance(rows, RunSummary) else rows)
    for row in rows:
        if not row.balanced():
            raise ReportError(
                f"row {row.refactoring} / {row.strategy} does not add up: "
                f"{row.variables} != {row.cannot_apply} + {row.failures} + {row.false_positives} + {row.correct}"
            )
    totals = RunSummary(rows).totals()
    body = [[r.refactoring, r.strategy, *map(str, r.counts)] for r in rows]
    total = ["Total", "", *map(str, totals)]
    widths = [max(len(line[i]) for line in [list(COLUMNS), *body, total]) for i in range(len(COLUMNS))]

    def fmt(cells):
        text = [cells[0].ljust(widths[0]), cells[1].ljust(widths[1])]
        text += [c.rjust(w) for c, w in zip(cells[2:], widths[2:])]
        return "  ".join(text).rstrip()

    rule = "  ".join("-" * w for w in widths)
    return "\n".join([fmt(list(COLUMNS)), rule, *map(fmt, body), rule, fmt(total)]) + "\n"


# ---------------------------------------------------------------------------
# Bug reports


@dataclass(frozen=True)
class BugReport:
    group: FailureGroup
    record: AttemptRecord
    reproduction_dir: Path
    reduction: ReductionResult | None = None
    original: ProjectSnapshot | None = None
    engine: str = ""
    engine_version: str = ""
    checker: str = ""
    checker_version: str = ""
    note: str = ""

    @property
    def reduced(self) -> bool:
        return self.reduction is not None

    def program(self) -> ProjectSnapshot:
        if self.reduction is not None:
            return self.reduction.minimized
        if self.original is None:
            raise ReportError("an unreduced report needs the original snapshot")
        return self.original

    def request(self) -> RefactoringRequest:
        return self.reduction.request if self.reduction is not None else self.record.request

    def title(self) -> str:
        kind = self.record.request.refactoring_type.display
        return f"{kind} introduces {key_text(self.group.key)}"


def _bug_fields(report: BugReport) -> dict:
    record = report.record
    request = report.request()
    introduced = record.introduced or IntroducedErrors(NormalizedReport())
    return {
        "title": report.title(),
        "group": report.group.group_id,
        "key_set": [k.to_list() for k in report.group.key],
        "members": list(report.group.members),
        "representative": report.group.representative,
        "refactoring_type": request.refactoring_type.display,
        "strategy": strategy_label(record),
        "engine": {"name": report.engine, "version": report.engine_version},
        "checker": {"name": report.checker, "version": report.checker_version},
        "request": request.to_dict(),
        "reduced": report.reduced,
        "reduction": report.reduction.manifest() if report.reduction is not None else None,
        "note": report.note,
        "program": dict(report.program().files),
        "before": record.before.to_list() if record.before is not None else [],
        "after": record.after.to_list() if record.after is not None else [],
        "introduced": introduced.errors.to_list(),
        "reproduction": "reproduction",
    }


def _markdown(f: dict) -> str:
    request = f["request"]
    target = request["target"]
    params = ", ".join(f"{k} = {json.dumps(v)}" for k, v in sorted(request["params"].items())) or "none"
    lines = [f"# {f['title']}", ""]
    if not f["reduced"]:
        lines += ["> **unreduced**: the full input program is attached." + (f" ({f['note']})" if f["note"] else ""), ""]
    lines += [
        f"- Refactoring: {f['refactoring_type']}",
        f"- Strategy: {f['strategy']}",
        f"- Engine: {f['engine']['name']} {f['engine']['version']}".rstrip(),
        f"- Checker: {f['checker']['name']} {f['checker']['version']}".rstrip(),
        f"- Group: {f['group']} ({len(f['members'])} failing attempts, representative #{f['representative']})",
    ]
    if f["reduced"]:
        r = f["reduction"]
        lines.append(f"- Reduction: {r['removals']} units removed in {r['oracle_evaluations']} oracle evaluations"
                     + (" (budget exhausted, partial)" if r["partial"] else ""))
    lines += [
        "",
        "## Steps to reproduce",
        "",
        f"1. Apply {f['refactoring_type']} to `{target['qualified_name']}` in `{target['file']}` "
        f"(characters {target['start']}-{target['end']}) with parameters: {params}.",
        "2. Type-check the program before and after the refactoring.",
        "",
        "## Program" if not f["reduced"] else "## Minimal program",
        "",
    ]
    for path, text in sorted(f["program"].items()):
        lines += [f"`{path}`", "", "```python", text.rstrip("\n"), "```", ""]
    lines += [
        "## Expected",
        "",
        "The refactored program has no type errors beyond those of the original.",
        "",
        "## Observed",
        "",
        "New type errors after the refactoring:",
        "",
    ]
    lines += [f"- {kind} [{code}] x{n}" for kind, code, n in f["introduced"]]
    before = {(k, c): n for k, c, n in f["before"]}
    after = {(k, c): n for k, c, n in f["after"]}
    if before or after:
        lines += ["", "| Diagnostic | Before | After |", "|---|---:|---:|"]
        for kind, code in sorted(set(before) | set(after)):
            lines.append(f"| {kind} [{code}] | {before.get((kind, code), 0)} | {after.get((kind, code), 0)} |")
    return "\n".join(lines) + "\n"


def emit_bug_report(report: BugReport, format: str = "markdown") -> str:
    """Deterministic document for one failure group."""
    if not Path(report.reproduction_dir).is_dir():
        raise ReportError(f"reproduction directory {report.reproduction_dir} does not exist")
    fields = _bug_fields(report)
    if format == "json":
        return _dump(fields)
    if format == "markdown":
        return _markdown(fields)
    raise ReportError(f"unknown report format {format!r}")


def write_bug_report(report_dir: Path, group: FailureGroup, record: AttemptRecord, *,
                     reduction: ReductionResult | None, original: ProjectSnapshot, note: str = "",
                     engine: str = "", engine_version: str = "", checker: str = "",
                     checker_version: str = "") -> BugReport:
    """Write ``reproduction/`` plus ``report.md`` and ``report.json`` under ``report_dir``."""
    repro = report_dir / "reproduction"
    if repro.exists():
        shutil.rmtree(repro)
    if reduction is not None:
        write_reproduction(reduction, repro)
    else:
        original.materialize(repro / "project")
        _write(repro / "manifest.json", {"request": record.request.to_dict(), "unreduced": True, "note": note,
                                         "key_set": [k.to_list() for k in group.key]})
    bug = BugReport(group, record, repro, reduction, original, engine, engine_version, checker, checker_version, note)
    _write(report_dir / "report.md", emit_bug_report(bug, "markdown"))
    _write(report_dir / "report.json", emit_bug_report(bug, "json"))
    return bug


# ---------------------------------------------------------------------------
# Run store


def run_id_for(config: Mapping, snapshot_id: str) -> str:
    payload = json.dumps({"config": config, "snapshot": snapshot_id}, sort_keys=True)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()[:12]


@dataclass
class RunStore:
    path: Path
    run_id: str
    config: dict
    snapshot_id: str
    records: list[AttemptRecord]
    summary: RunSummary
    groups: list[FailureGroup]
    before_reports: dict[int, TypeReport] = field(default_factory=dict)
    after_reports: dict[int, TypeReport] = field(default_factory=dict)
    outcome_output: dict[int, str] = field(default_factory=dict)

    def snapshot(self, snapshot_id: str | None = None) -> ProjectSnapshot:
        sid = snapshot_id or self.snapshot_id
        path = self.path / "snapshots" / f"{sid}.json"
        try:
            return ProjectSnapshot.from_dict(json.loads(path.read_text(encoding="utf-8")))
        except (OSError, json.JSONDecodeError, InputError) as exc:
            raise StoreError(f"snapshot {sid[:12]} is missing or corrupted: {exc}", str(path)) from exc

    def record(self, attempt_id: int) -> AttemptRecord:
        for record in self.records:
            if record.attempt_id == attempt_id:
                return record
        raise StoreError(f"no attempt {attempt_id} in {self.path}", str(self.path))

    def attempt_dir(self, attempt_id: int) -> Path:
        return self.path / "attempts" / str(attempt_id)

    def recompute_summary(self) -> RunSummary:
        return summarize_run(self.records)

    def engine_bundle(self) -> dict:
        snapshots, outcomes = {}, []
        for record in self.records:
            outcome = dict(record.outcome.to_dict())
            variant = outcome["variant"]
            if variant == "Applied":
                sid = outcome["refactored_id"]
                snapshots[sid] = dict(self.snapshot(sid).files)
                entry = {"variant": variant, "refactored_id": sid, "noop": outcome["noop"], "engine": outcome["engine"]}
            elif variant == "CannotApply":
                entry = {"variant": variant, "reason": outcome["detail"], "engine": outcome["engine"]}
            else:
                entry = {"variant": variant, "detail": outcome["detail"],
                         "output": self.outcome_output.get(record.attempt_id, ""), "engine": outcome["engine"]}
            outcomes.append({"snapshot_id": record.snapshot_id, "request": record.request.fingerprint(),
                             "outcome": entry})
        return {"engine": "replay", "snapshots": dict(sorted(snapshots.items())), "outcomes": outcomes}

    def checker_bundle(self) -> dict:
        reports = {}
        for report in [*self.before_reports.values(), *self.after_reports.values()]:
            reports[report.snapshot_id] = report.to_dict()
        return {"reports": dict(sorted(reports.items()))}


def _store_snapshot(root: Path, snapshot: ProjectSnapshot) -> None:
    path = root / "snapshots" / f"{snapshot.snapshot_id}.json"
    if not path.exists():
        _write(path, snapshot.to_dict())


def _write_summary(root: Path, summary: RunSummary, groups: Sequence[FailureGroup]) -> None:
    _write(root / "summary.txt", emit_summary(summary))
    _write(root / "summary.json", summary.to_dict())
    _write(root / "groups.json", [g.to_dict() for g in groups])


def persist_run(result, config: Mapping, store: str | Path) -> RunStore:
    """Write a pipeline result under ``store/run-<id>`` and return it as a RunStore."""
    config = dict(config)
    run_id = run_id_for(config, result.snapshot.snapshot_id)
    root = Path(store) / f"run-{run_id}"
    if root.exists():
        shutil.rmtree(root)
    root.mkdir(parents=True)
    _write(root / "config.json", {"run_id": run_id, "snapshot_id": result.snapshot.snapshot_id, "config": config})
    _store_snapshot(root, result.snapshot)
    for attempt in result.attempts:
        record = attempt.record
        adir = root / "attempts" / str(record.attempt_id)
        _write(adir / "request.json", {"attempt_id": record.attempt_id, "snapshot_id": record.snapshot_id,
                                       "request": record.request.to_dict()})
        output = getattr(attempt.outcome, "output", "")
        _write(adir / "outcome.json", {
            "outcome": record.outcome.to_dict(),
            "output": output,
            "classification": record.classification.value,
            "triage_label": record.triage_label.value,
            "check_error": record.check_error,
        })
        _write(adir / "before.report.json", attempt.before_report.to_dict())
        if attempt.after_report is not None:
            _write(adir / "after.report.json", attempt.after_report.to_dict())
        if record.introduced is not None:
            _write(adir / "diff.json", record.introduced.to_dict())
        refactored = getattr(attempt.outcome, "refactored", None)
        if refactored is not None:
            _store_snapshot(root, refactored)
    _write_summary(root, result.summary, result.groups)
    meta = _adapter_meta(result)
    for group in result.groups:
        reduction = result.reductions.get(group.group_id)
        write_bug_report(
            root / "bugs" / group.group_id, group, result.attempt(group.representative).record,
            reduction=reduction.result if reduction else None, original=result.snapshot,
            note=(reduction.error if reduction else "reduction disabled"), **meta,
        )
    return load_run(root)


def _adapter_meta(result) -> dict:
    """Engine and checker identity as recorded in the attempts themselves."""
    engine = next((a.record.outcome.engine for a in result.attempts if a.record.outcome.engine), "")
    report = result.before_report
    return {"engine": engine, "engine_version": "", "checker": report.checker, "checker_version": report.version}


def _read_json(path: Path, attempt_dir: Path):
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise StoreError(f"attempt directory {attempt_dir}: cannot read {path.name}: {exc}", str(attempt_dir)) from exc


def _load_attempt(adir: Path):
    request_data = _read_json(adir / "request.json", adir)
    outcome_data = _read_json(adir / "outcome.json", adir)
    before_data = _read_json(adir / "before.report.json", adir)
    after_path, diff_path = adir / "after.report.json", adir / "diff.json"
    after_data = _read_json(after_path, adir) if after_path.exists() else None
    diff_data = _read_json(diff_path, adir) if diff_path.exists() else None
    try:
        before_report = TypeReport.from_dict(before_data)
        after_report = TypeReport.from_dict(after_data) if after_data is not None else None
        record = AttemptRecord(
            int(request_data["attempt_id"]),
            RefactoringRequest.from_dict(request_data["request"]),
            OutcomeSummary.from_dict(outcome_data["outcome"]),
            outcome_data["classification"],
            normalize(before_report),
            normalize(after_report) if after_report is not None else None,
            IntroducedErrors.from_dict(diff_data) if diff_data is not None else None,
            outcome_data.get("triage_label", TriageLabel.UNREVIEWED.value),
            request_data["snapshot_id"],
            outcome_data.get("check_error", ""),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise StoreError(f"attempt directory {adir}: inconsistent records: {exc!r}", str(adir)) from exc
    return record, before_report, after_report, outcome_data.get("output", "")


def load_run(path: str | Path) -> RunStore:
    root = Path(path)
    config_path = root / "config.json"
    try:
        config = json.loads(config_path.read_text(encoding="utf-8"))
        summary = RunSummary.from_dict(json.loads((root / "summary.json").read_text(encoding="utf-8")))
        groups = [FailureGroup.from_dict(g) for g in json.loads((root / "groups.json").read_text(encoding="utf-8"))]
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise StoreError(f"run store {root} is unreadable: {exc}", str(root)) from exc
    attempts_dir = root / "attempts"
    dirs = sorted((d for d in attempts_dir.iterdir() if d.is_dir()), key=lambda d: int(d.name)) \
        if attempts_dir.is_dir() else []
    store = RunStore(root, config.get("run_id", ""), config.get("config", {}), config.get("snapshot_id", ""),
                     [], summary, groups)
    for adir in dirs:
        record, before_report, after_report, output = _load_attempt(adir)
        store.records.append(record)
        store.before_reports[record.attempt_id] = before_report
        if after_report is not None:
            store.after_reports[record.attempt_id] = after_report
        if output:
            store.outcome_output[record.attempt_id] = output
    return store


def set_label(store: RunStore, attempt_id: int, label: TriageLabel | str) -> RunStore:
    """Persist a human triage label and refresh the summary files."""
    record = store.record(attempt_id)
    try:
        updated = record.with_label(label)
    except ValueError as exc:
        raise StoreError(str(exc), str(store.attempt_dir(attempt_id))) from exc
    adir = store.attempt_dir(attempt_id)
    outcome = _read_json(adir / "outcome.json", adir)
    outcome["triage_label"] = updated.triage_label.value
    _write(adir / "outcome.json", outcome)
    store.records = [updated if r.attempt_id == attempt_id else r for r in store.records]
    store.summary = store.recompute_summary()
    _write_summary(store.path, store.summary, store.groups)
    return store
