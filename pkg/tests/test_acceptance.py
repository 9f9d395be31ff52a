"""One test per acceptance criterion; the terminal summary lists PASS/FAIL per criterion."""

from __future__ import annotations

import os
import random
import shutil
import time
import zipfile
from pathlib import Path

import pytest

from refharness.checker import MicroChecker, micro_check, normalize
from refharness.checker.codes import (
    CALL_ERROR,
    INCOMPATIBLE_VARIABLE_TYPE,
    INVALID_CLASS_INSTANTIATION,
    MISSING_ATTRIBUTE_ANNOTATION,
    MISSING_GLOBAL_ANNOTATION,
    MISSING_PARAMETER_ANNOTATION,
    MISSING_RETURN_ANNOTATION,
    PARSING_FAILURE,
    UNSUPPORTED_OPERAND,
)
from refharness.checker.model import NormalizedReport
from refharness.corpus import enumerate_targets, load_project, resolve_span
from refharness.diff import diff_reports
from refharness.engine import Applied, BuiltinRenameEngine, apply_refactoring
from refharness.errors import ReportError
from refharness.pipeline import run_pipeline
from refharness.reduce import ReductionOracle, enumerate_units, minimize, single_removals
from refharness.report import emit_summary
from refharness.strategy import RefactoringRequest, RefactoringType, generate_requests
from refharness.triage import Classification, SummaryRow, classify, group_failures, summarize_run
from scenarios import build_scenarios
from test_diff import KEYS, oracle_introduced
from test_pipeline import CrashEveryThird
from test_triage import load_table_fixture, make_record

PROJECTS = Path(__file__).parent / "fixtures" / "projects"

BASELINE = {MISSING_RETURN_ANNOTATION: 3, MISSING_PARAMETER_ANNOTATION: 3, MISSING_ATTRIBUTE_ANNOTATION: 1}


def test_criterion_1_dunder_rename_pipeline():
    started = time.perf_counter()
    snapshot = load_project(PROJECTS / "motivating")
    engine, checker = BuiltinRenameEngine(), MicroChecker()
    before = normalize(checker.check(snapshot))
    assert before.counts == BASELINE
    request = RefactoringRequest(RefactoringType.RENAME_METHOD, resolve_span(snapshot, "mark.py", "mark.Mark.__lt__"),
                                 {"new_name": "compare"})
    outcome = apply_refactoring(engine, snapshot, request)
    assert isinstance(outcome, Applied)
    after = normalize(checker.check(outcome.refactored))
    assert after.counts == {**BASELINE, UNSUPPORTED_OPERAND: 1}
    introduced = diff_reports(before, after)
    assert introduced.errors.counts == {UNSUPPORTED_OPERAND: 1}
    assert classify(outcome, introduced) is Classification.FAILURE
    assert time.perf_counter() - started < 1.0


def test_criterion_2_differential_properties():
    started = time.perf_counter()
    rng = random.Random(7)
    cases = 0
    for _ in range(1200):
        before = [rng.choice(KEYS) for _ in range(rng.randint(0, 12))]
        after = [rng.choice(KEYS) for _ in range(rng.randint(0, 12))]
        extra = [rng.choice(KEYS) for _ in range(rng.randint(1, 6))]
        b, a = NormalizedReport(before), NormalizedReport(after)
        assert not diff_reports(b, b)
        assert diff_reports(b, NormalizedReport(before + extra)).errors == NormalizedReport(extra)
        base = diff_reports(b, a).errors
        assert sorted(base.elements()) == oracle_introduced(before, after)
        grown = diff_reports(b, NormalizedReport(after + [rng.choice(KEYS)])).errors
        assert all(grown[k] >= base[k] for k in base)
        cases += 1
    assert cases >= 1000
    assert time.perf_counter() - started < 10.0


def test_criterion_3_reducer_minimality():
    started = time.perf_counter()
    engine, checker = BuiltinRenameEngine(), MicroChecker()
    scenarios = build_scenarios()
    assert len(scenarios) >= 5
    for scenario in scenarios:
        assert len(enumerate_units(scenario.snapshot)) <= 30
        result = minimize(scenario.snapshot, scenario.request, scenario.key_set, engine, checker)
        oracle = ReductionOracle(scenario.request, scenario.key_set, engine, checker)
        assert oracle(result.minimized), scenario.name
        for unit, candidate in single_removals(result.minimized):
            assert candidate is None or not oracle(candidate), (scenario.name, unit.describe())
        if scenario.name == "motivating":
            assert result.minimized.line_count() <= 18
    assert time.perf_counter() - started < 60.0


def test_criterion_4_grouping():
    big = [UNSUPPORTED_OPERAND, MISSING_GLOBAL_ANNOTATION, INCOMPATIBLE_VARIABLE_TYPE]
    failures = [make_record(i, "Failure", big) for i in (1, 2, 3)]
    failures.append(make_record(4, "Failure", [CALL_ERROR, INVALID_CLASS_INSTANTIATION]))
    groups = group_failures(failures, seed=2024)
    assert len(groups) == 2
    assert {len(g.key) for g in groups} == {2, 3}
    again = group_failures(list(reversed(failures)), seed=2024)
    assert [g.representative for g in groups] == [g.representative for g in again]


EXPECTED_ROWS = [
    ("Inline Method", "Method names", 150, 50, 21, 15, 64),
    ("Rename Field", "Keywords", 167, 1, 166, 0, 0),
    ("Rename Field", "Method names", 167, 1, 30, 4, 132),
    ("Rename Method", "Keywords", 150, 0, 150, 0, 0),
    ("Rename Method", "Field names", 150, 1, 39, 6, 104),
    ("Use Function", "Method names", 28, 6, 0, 0, 22),
    ("Extract Method", "Method names", 166, 0, 62, 103, 1),
    ("Move Method/Field", "Method/Field names", 174, 138, 12, 23, 1),
]


def test_criterion_5_summary_accounting():
    records = load_table_fixture()
    for record in records:
        if record.outcome.variant == "Applied":
            recomputed = diff_reports(record.before, record.after)
            assert recomputed.errors == record.introduced.errors
            assert classify(record.outcome, recomputed) is record.classification
    summary = summarize_run(records)
    assert [(r.refactoring, r.strategy, *r.counts) for r in summary.rows] == EXPECTED_ROWS
    assert all(r.balanced() for r in summary.rows)
    assert summary.totals() == (1152, 197, 480, 151, 324)
    assert emit_summary(summary).strip().splitlines()[-1].split() == ["Total", "1152", "197", "480", "151", "324"]
    with pytest.raises(ReportError):
        emit_summary([SummaryRow("Rename Method", "Keywords", 5, 1, 2, 1, 0)])


def test_criterion_6_keyword_renames_always_fail():
    started = time.perf_counter()
    snapshot = load_project(PROJECTS / "hermetic")
    index = enumerate_targets(snapshot, ["method", "field"])
    requests = generate_requests(index, "RenameMethod", "Keywords", 11, 25)
    requests += generate_requests(index, "RenameField", "Keywords", 11, 25)
    result = run_pipeline(snapshot, requests, BuiltinRenameEngine(), MicroChecker(), seed=11)
    assert len(result.records) == 50
    for record in result.records:
        assert record.classification is Classification.FAILURE
        assert PARSING_FAILURE in record.key_set
    assert time.perf_counter() - started < 30.0


def test_criterion_7_crash_containment():
    snapshot = load_project(PROJECTS / "hermetic")
    requests = generate_requests(enumerate_targets(snapshot, "method"), "RenameMethod", "Keywords", 3, 30)
    result = run_pipeline(snapshot, requests, CrashEveryThird(), MicroChecker(), seed=3)
    assert len(result.records) == 30
    crashed = [r.attempt_id for r in result.records if r.classification is Classification.CRASHED]
    assert crashed == list(range(3, 31, 3))
    assert all(r.classification is Classification.FAILURE for r in result.records if r.attempt_id % 3)
    (row,) = result.summary.rows
    assert row.counts == (30, 10, 20, 0, 0)


def _textblob_wheel() -> Path | None:
    candidates = [os.environ.get("REFHARNESS_TEXTBLOB_WHEEL", ""), *map(str, Path("/tmp/dl").glob("textblob-0.17.1*"))]
    return next((Path(c) for c in candidates if c and Path(c).is_file()), None)


def _integration_ready() -> str:
    try:
        import rope  # noqa: F401
    except ImportError:
        return "rope is not installed"
    if shutil.which(os.environ.get("REFHARNESS_PYRE", "pyre")) is None:
        return "pyre is not on PATH"
    if _textblob_wheel() is None:
        return "no TextBlob 0.17.1 wheel (set REFHARNESS_TEXTBLOB_WHEEL)"
    return ""


@pytest.mark.integration
@pytest.mark.skipif(bool(_integration_ready()), reason=_integration_ready() or "ready")
def test_criterion_8_rope_and_pyre_on_textblob(tmp_path):
    from refharness.checker.adapters import find_pyre_typeshed, pyre_checker
    from refharness.engine import rope_engine

    with zipfile.ZipFile(_textblob_wheel()) as wheel:
        for name in wheel.namelist():
            if name.startswith("textblob/") and name.endswith(".py"):
                wheel.extract(name, tmp_path)
    snapshot = load_project(tmp_path)
    assert snapshot.line_count() > 3000
    index = enumerate_targets(snapshot, ["method", "field", "class", "function"])
    requests = generate_requests(index, "RenameMethod", "ProjectMethodNames", 1, 20)
    checker = pyre_checker(os.environ.get("REFHARNESS_PYRE", "pyre"), typeshed=find_pyre_typeshed())
    result = run_pipeline(snapshot, requests, rope_engine(), checker, seed=1)
    assert len(result.records) == 20
    assert sum(len(g.members) for g in result.groups) > 0
