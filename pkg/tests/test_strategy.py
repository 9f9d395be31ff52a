from __future__ import annotations

import keyword

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from refharness.corpus import ProjectSnapshot, enumerate_targets
from refharness.errors import StrategyError
from refharness.strategy import (
    KEYWORDS,
    RefactoringRequest,
    RefactoringType,
    StrategyKind,
    extract_region,
    generate_requests,
    keyword_pool,
    name_pool,
    requests_from_json,
    requests_to_json,
)


def _index(snap):
    return enumerate_targets(snap, ["method", "field", "class", "function"])


def test_keyword_pool_matches_reserved_words():
    assert len(keyword_pool("3.10")) == 35
    assert set(keyword_pool("3.10")) == set(keyword.kwlist)
    assert keyword_pool(override=["match", "case", "match"]) == ["case", "match"]
    with pytest.raises(StrategyError):
        keyword_pool("2.7")
    assert all(len(words) == 35 for words in KEYWORDS.values())


def test_name_pools(hermetic):
    index = _index(hermetic)
    methods = name_pool(index, StrategyKind.PROJECT_METHOD_NAMES)
    assert methods == ["__init__", "__lt__", "compare", "key"]
    assert name_pool(index, StrategyKind.PROJECT_FIELD_NAMES) == ["_marks"]


def test_generation_is_seeded_and_without_replacement(hermetic):
    index = _index(hermetic)
    a = generate_requests(index, "RenameMethod", "ProjectMethodNames", seed=3, limit=6)
    b = generate_requests(index, "RenameMethod", "ProjectMethodNames", seed=3, limit=6)
    assert requests_to_json(a) == requests_to_json(b)
    fingerprints = [r.fingerprint() for r in a]
    assert len(set(fingerprints)) == len(fingerprints) == 6
    assert all(r.new_name != r.target.identifier for r in a)
    assert [r.seed_tag.draw for r in a] == list(range(6))


def test_limit_larger_than_space_returns_whole_space(hermetic):
    index = _index(hermetic)
    everything = generate_requests(index, RefactoringType.RENAME_METHOD, StrategyKind.PROJECT_METHOD_NAMES, 1, 500)
    # four methods, four names, minus the four identity renames
    assert len(everything) == 12
    pairs = {(r.target.qualified_name, r.new_name) for r in everything}
    assert len(pairs) == 12


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=10_000), st.integers(min_value=1, max_value=20))
def test_any_seed_gives_a_valid_subset(seed, limit):
    snap = ProjectSnapshot.from_files({"m.py": "class A:\n    def f(self):\n        pass\n    def g(self):\n        pass\n"})
    requests = generate_requests(_index(snap), "RenameMethod", "Keywords", seed, limit)
    assert len(requests) == min(limit, 70)
    assert len({r.fingerprint() for r in requests}) == len(requests)
    assert all(keyword.iskeyword(r.new_name) for r in requests)


def test_generation_errors(hermetic):
    index = _index(hermetic)
    with pytest.raises(StrategyError):
        generate_requests(index, "RenameMethod", "Keywords", 1, 0)
    with pytest.raises(StrategyError):
        generate_requests(index, "ExtractMethod", "ProjectMethodNames", 1, 5)
    empty = enumerate_targets(ProjectSnapshot.from_files({"m.py": "x = 1\n"}), "method")
    with pytest.raises(StrategyError):
        generate_requests(empty, "RenameMethod", "Keywords", 1, 5)
    other = ProjectSnapshot.from_files({"m.py": "x = 1\n"})
    with pytest.raises(StrategyError):
        generate_requests(index, "ExtractMethod", "ProjectMethodNames", 1, 5, snapshot=other)


def test_move_destinations_are_other_classes(hermetic):
    snap = ProjectSnapshot.from_files({"m.py": "class A:\n    def f(self):\n        pass\nclass B:\n    pass\n"})
    requests = generate_requests(_index(snap), "MoveFieldMethod", "ProjectMethodNames", 1, 10)
    assert [(r.target.qualified_name, r.params["destination"]) for r in requests] == [("m.A.f", "m.B")]


def test_extract_region_skips_docstring_and_return():
    text = 'def f(x):\n    """Doc."""\n    a = x\n    b = a + 1\n    return b\n'
    snap = ProjectSnapshot.from_files({"m.py": text})
    target = _index(snap).of_kind("function")[0]
    start, end = extract_region(snap, target)
    assert text[start:end] == "a = x\n    b = a + 1"
    short = ProjectSnapshot.from_files({"m.py": "def f():\n    return 1\n"})
    assert extract_region(short, _index(short).of_kind("function")[0]) is None
    requests = generate_requests(_index(snap), "ExtractMethod", "Keywords", 1, 3, snapshot=snap)
    assert all(tuple(r.params["region"]) == (start, end) for r in requests)


def test_request_validation_and_round_trip(motivating):
    target = _index(motivating).of_kind("method")[0]
    with pytest.raises(ValueError):
        RefactoringRequest(RefactoringType.RENAME_METHOD, target, {})
    with pytest.raises(ValueError):
        RefactoringRequest(RefactoringType.EXTRACT_METHOD, target, {"extracted_name": "x", "region": (5, 5)})
    req = RefactoringRequest(RefactoringType.EXTRACT_METHOD, target, {"extracted_name": "x", "region": (5, 9)})
    assert requests_from_json(requests_to_json([req])) == [req]


def test_display_names():
    assert RefactoringType.MOVE_FIELD_METHOD.display == "Move Method/Field"
    assert StrategyKind.PROJECT_FIELD_NAMES.display == "Field names"
    assert RefactoringType.RENAME_CLASS.is_rename and not RefactoringType.INLINE_METHOD.is_rename


def test_single_field_single_method_has_one_pairing():
    snap = ProjectSnapshot.from_files({"m.py": "class A:\n    x = 1\n    def run(self):\n        pass\n"})
    requests = generate_requests(_index(snap), "RenameMethod", "ProjectFieldNames", 4, 10)
    assert [(r.target.qualified_name, r.new_name) for r in requests] == [("m.A.run", "x")]


def test_motivating_pairing_with_compare(hermetic):
    requests = generate_requests(_index(hermetic), "RenameMethod", "ProjectMethodNames", 1, 100)
    assert any(r.target.qualified_name == "mark.Mark.__lt__" and r.new_name == "compare" for r in requests)
