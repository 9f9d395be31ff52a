from __future__ import annotations

import gzip
import json
import random
from collections import Counter
from pathlib import Path

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refharness.checker.codes import (
    CALL_ERROR,
    INCOMPATIBLE_VARIABLE_TYPE,
    INVALID_CLASS_INSTANTIATION,
    MISSING_GLOBAL_ANNOTATION,
    UNBOUND_NAME,
    UNSUPPORTED_OPERAND,
)
from refharness.checker.model import NormalizedReport
from refharness.corpus import TargetSite
from refharness.diff import diff_reports
from refharness.strategy import RefactoringRequest, RefactoringType, SeedTag
from refharness.triage import (
    AttemptRecord,
    Classification,
    OutcomeSummary,
    TriageLabel,
    classify,
    group_failures,
    summarize_run,
)

TABLE_FIXTURE = Path(__file__).parent / "fixtures" / "table1_run.jsonl.gz"
TARGET = TargetSite("m.py", 10, 13, "method", "m.A.foo")


def make_record(attempt_id, kind="Correct", keys=(), label=TriageLabel.UNREVIEWED,
                rtype=RefactoringType.RENAME_METHOD, strategy="ProjectMethodNames"):
    request = RefactoringRequest(rtype, TARGET, {"new_name": "bar"}, SeedTag(strategy, 1, attempt_id))
    if kind in ("Correct", "Failure"):
        before = NormalizedReport()
        after = NormalizedReport(list(keys))
        introduced = diff_reports(before, after, before_id="b", after_id=f"a{attempt_id}")
        outcome = OutcomeSummary("Applied", refactored_id=f"a{attempt_id}")
        return AttemptRecord(attempt_id, request, outcome, classify(outcome, introduced), before, after, introduced,
                             label, "b")
    outcome = OutcomeSummary(kind, "why")
    return AttemptRecord(attempt_id, request, outcome, classify(outcome, None), NormalizedReport(), snapshot_id="b")


def test_classification():
    op = NormalizedReport([UNSUPPORTED_OPERAND])
    assert classify("Applied", diff_reports(NormalizedReport(), op)) is Classification.FAILURE
    assert classify("Applied", diff_reports(op, op)) is Classification.CORRECT
    assert classify(OutcomeSummary("Crashed", "rope crashed"), None) is Classification.CRASHED
    assert classify("CannotApply", None) is Classification.CANNOT_APPLY
    with pytest.raises(ValueError):
        classify("Applied", None)


def test_record_invariants():
    with pytest.raises(ValueError):
        AttemptRecord(1, make_record(1).request, OutcomeSummary("CannotApply"), Classification.FAILURE)
    with pytest.raises(ValueError):
        make_record(1, "Correct", label=TriageLabel.FALSE_POSITIVE)
    record = make_record(4, "Failure", [UNSUPPORTED_OPERAND, UNSUPPORTED_OPERAND])
    assert AttemptRecord.from_dict(json.loads(json.dumps(record.to_dict()))) == record


def test_grouping_scenario_with_two_groups():
    big = [UNSUPPORTED_OPERAND, MISSING_GLOBAL_ANNOTATION, INCOMPATIBLE_VARIABLE_TYPE]
    failures = [make_record(i, "Failure", big) for i in (1, 2, 3)]
    failures.append(make_record(4, "Failure", [CALL_ERROR, INVALID_CLASS_INSTANTIATION]))
    groups = group_failures(failures, seed=42)
    assert len(groups) == 2
    sizes = sorted(len(g.members) for g in groups)
    assert sizes == [1, 3]
    assert [g.representative for g in groups] == [g.representative for g in group_failures(failures[::-1], 42)]
    lone = next(g for g in groups if len(g.members) == 1)
    assert lone.representative == 4


def test_single_failure_group():
    (group,) = group_failures([make_record(9, "Failure", [UNBOUND_NAME])], seed=0)
    assert group.members == (9,) and group.representative == 9


def test_group_key_uses_set_projection():
    a = make_record(1, "Failure", [UNBOUND_NAME])
    b = make_record(2, "Failure", [UNBOUND_NAME, UNBOUND_NAME])
    assert len(group_failures([a, b], seed=0)) == 1
    with pytest.raises(ValueError):
        group_failures([make_record(3)], seed=0)


KEY_POOL = [UNBOUND_NAME, UNSUPPORTED_OPERAND, CALL_ERROR]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.lists(st.sampled_from(KEY_POOL), min_size=1, max_size=4), min_size=1, max_size=25),
       st.integers(min_value=0, max_value=1000))
def test_grouping_is_a_partition(key_lists, seed):
    failures = [make_record(i + 1, "Failure", keys) for i, keys in enumerate(key_lists)]
    groups = group_failures(failures, seed)
    members = [m for g in groups for m in g.members]
    assert sorted(members) == list(range(1, len(failures) + 1))
    by_id = {r.attempt_id: r for r in failures}
    for g in groups:
        assert {by_id[m].key_set for m in g.members} == {frozenset(g.key)}
    # oracle: one group per distinct key set
    assert len(groups) == len({frozenset(k) for k in key_lists})
    shuffled = failures[:]
    random.Random(seed).shuffle(shuffled)
    assert group_failures(shuffled, seed) == groups


def test_ten_failures_over_four_key_sets():
    sets = [[UNBOUND_NAME]] * 4 + [[CALL_ERROR]] * 3 + [[UNBOUND_NAME, CALL_ERROR]] * 2 + [[UNSUPPORTED_OPERAND]]
    groups = group_failures([make_record(i + 1, "Failure", k) for i, k in enumerate(sets)], seed=5)
    assert len(groups) == 4
    assert sum(len(g.members) for g in groups) == 10
    assert Counter(len(g.members) for g in groups) == Counter({4: 1, 3: 1, 2: 1, 1: 1})


def test_representative_of_one_group_ignores_other_groups():
    base = [make_record(i, "Failure", [UNBOUND_NAME]) for i in range(1, 8)]
    extra = [make_record(20, "Failure", [CALL_ERROR])]
    a = {g.key: g.representative for g in group_failures(base, 3)}
    b = {g.key: g.representative for g in group_failures(base + extra, 3)}
    assert a[(UNBOUND_NAME,)] == b[(UNBOUND_NAME,)]


def test_seven_record_summary():
    records = [
        make_record(1), make_record(2),
        make_record(3, "Failure", [UNBOUND_NAME]), make_record(4, "Failure", [UNBOUND_NAME]),
        make_record(5, "Failure", [CALL_ERROR]),
        make_record(6, "Failure", [CALL_ERROR], TriageLabel.FALSE_POSITIVE),
        make_record(7, "Crashed"),
    ]
    (row,) = summarize_run(records).rows
    assert row.counts == (7, 1, 3, 1, 2)
    assert (row.refactoring, row.strategy) == ("Rename Method", "Method names")


def test_zero_attempts():
    (row,) = summarize_run([]).rows
    assert row.counts == (0, 0, 0, 0, 0)
    rows = summarize_run([], expected_rows=[("Rename Method", "Keywords")]).rows
    assert rows[0].counts == (0, 0, 0, 0, 0)


def test_move_rows_merge_both_name_strategies():
    records = [
        make_record(1, rtype=RefactoringType.RENAME_METHOD, strategy="ProjectFieldNames"),
        make_record(2, "CannotApply", strategy="ProjectMethodNames"),
    ]
    move_request = RefactoringRequest(RefactoringType.MOVE_FIELD_METHOD, TARGET, {"destination": "m.B"},
                                      SeedTag("ProjectFieldNames", 1, 0))
    records.append(AttemptRecord(3, move_request, OutcomeSummary("CannotApply"), Classification.CANNOT_APPLY))
    labels = [(r.refactoring, r.strategy) for r in summarize_run(records).rows]
    assert labels == [("Rename Method", "Field names"), ("Rename Method", "Method names"),
                      ("Move Method/Field", "Method/Field names")]


def load_table_fixture() -> list[AttemptRecord]:
    with gzip.open(TABLE_FIXTURE, "rt", encoding="utf-8") as fh:
        return [AttemptRecord.from_dict(json.loads(line)) for line in fh]


def test_table_fixture_inline_row():
    rows = summarize_run(load_table_fixture()).rows
    inline = next(r for r in rows if (r.refactoring, r.strategy) == ("Inline Method", "Method names"))
    assert inline.counts == (150, 50, 21, 15, 64)
    assert all(r.balanced() for r in rows)
