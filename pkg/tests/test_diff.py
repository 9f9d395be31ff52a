from __future__ import annotations

import random

from hypothesis import given, settings
from hypothesis import strategies as st

from refharness.checker.model import DiagnosticKey, NormalizedReport
from refharness.diff import IntroducedErrors, diff_reports

KEYS = [DiagnosticKey(kind, code) for kind, code in [
    ("Parsing failure", 404), ("Unbound name", 10), ("Undefined attribute", 16),
    ("Unsupported operand", 58), ("Missing return annotation", 3), ("Call error", 29),
]]


def oracle_introduced(before: list[DiagnosticKey], after: list[DiagnosticKey]) -> list[DiagnosticKey]:
    """Strike out one matching occurrence per before item, keep the rest."""
    remaining = list(after)
    for key in before:
        if key in remaining:
            remaining.remove(key)
    return sorted(remaining)


def _random_list(rng: random.Random) -> list[DiagnosticKey]:
    return [rng.choice(KEYS) for _ in range(rng.randint(0, 12))]


def _is_sub(small: NormalizedReport, big: NormalizedReport) -> bool:
    return all(small[k] <= big[k] for k in small)


def test_seeded_pairs_match_counting_oracle():
    rng = random.Random(20240101)
    for _ in range(1500):
        before, after, extra = _random_list(rng), _random_list(rng), _random_list(rng)
        b, a = NormalizedReport(before), NormalizedReport(after)
        got = diff_reports(b, a)
        assert sorted(got.errors.elements()) == oracle_introduced(before, after)
        assert sorted(got.disappeared.elements()) == oracle_introduced(after, before)
        assert not diff_reports(b, b)
        assert diff_reports(b, NormalizedReport(before + extra)).errors == NormalizedReport(extra)
        bigger = NormalizedReport(after + extra)
        assert _is_sub(got.errors, diff_reports(b, bigger).errors)


report_lists = st.lists(st.sampled_from(KEYS), max_size=15)


@settings(max_examples=300, deadline=None)
@given(report_lists, report_lists, report_lists)
def test_difference_properties(before, after, extra):
    b, a = NormalizedReport(before), NormalizedReport(after)
    assert diff_reports(a, a).errors == NormalizedReport()
    assert diff_reports(b, NormalizedReport(before + extra)).errors == NormalizedReport(extra)
    assert _is_sub(diff_reports(b, a).errors, diff_reports(b, NormalizedReport(after + extra)).errors)
    # adding to the before side can only shrink what counts as introduced
    assert _is_sub(diff_reports(NormalizedReport(before + extra), a).errors, diff_reports(b, a).errors)


def test_set_projection_and_serialization():
    op, unbound = KEYS[3], KEYS[1]
    got = diff_reports(NormalizedReport([unbound]), NormalizedReport([op, op, unbound]), before_id="x", after_id="y")
    assert got.errors.counts == {op: 2}
    assert got.key_set() == frozenset({op})
    assert IntroducedErrors.from_dict(got.to_dict()) == got


def test_disappearing_errors_never_count_as_introduced():
    op = KEYS[3]
    got = diff_reports(NormalizedReport([op, op]), NormalizedReport())
    assert not got
    assert got.disappeared.counts == {op: 2}


def test_counts_subtract_per_key():
    a, b, c = KEYS[0], KEYS[1], KEYS[2]
    got = diff_reports(NormalizedReport({a: 2, b: 1}), NormalizedReport({a: 3, c: 2}))
    assert got.errors.counts == {a: 1, c: 2}
