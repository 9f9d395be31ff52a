from __future__ import annotations

import ast
import itertools
import json

import pytest

from refharness.checker.codes import UNSUPPORTED_OPERAND
from refharness.corpus import ProjectSnapshot
from refharness.errors import ReduceError
from refharness.reduce import (
    ReductionOracle,
    enumerate_units,
    minimize,
    remove_unit,
    single_removals,
    write_reproduction,
)
from scenarios import EIGHT_STATEMENTS, NECESSARY, build_scenarios, eight_statement_scenario

OP = frozenset({UNSUPPORTED_OPERAND})


def _is_one_minimal(result, oracle) -> bool:
    return not any(c is not None and oracle(c) for _unit, c in single_removals(result.minimized))


@pytest.mark.parametrize("scenario", build_scenarios(), ids=lambda s: s.name)
def test_scenarios_reduce_to_one_minimal_programs(scenario, engine, checker):
    assert len(enumerate_units(scenario.snapshot)) <= 30
    result = minimize(scenario.snapshot, scenario.request, scenario.key_set, engine, checker)
    oracle = ReductionOracle(scenario.request, scenario.key_set, engine, checker)
    assert oracle(result.minimized)
    assert _is_one_minimal(result, oracle)
    assert result.request.target.qualified_name == scenario.request.target.qualified_name
    assert not result.partial and result.removals > 0
    assert result.minimized.line_count() < scenario.snapshot.line_count()


def test_motivating_reproduction_is_short(motivating, engine, checker):
    scenario = build_scenarios()[0]
    result = minimize(motivating, scenario.request, OP, engine, checker)
    assert result.minimized.line_count() <= 18
    text = result.minimized.files["mark.py"]
    assert "def __lt__" in text and "mark1 < mark2" in text


def test_oracle_examples(motivating, engine, checker):
    request = build_scenarios()[0].request
    oracle = ReductionOracle(request, OP, engine, checker)
    assert oracle(motivating)
    without_print = motivating.replace_files({"mark.py": motivating.files["mark.py"].replace("print(mark1 < mark2)\n", "")})
    assert not oracle(without_print)
    without_target = ProjectSnapshot.from_files({"mark.py": "class Mark(object):\n    pass\n"})
    assert not oracle(without_target)
    # superset of the key set is not good enough
    assert not ReductionOracle(request, OP | {next(iter(checker.check(motivating).diagnostics)).key}, engine,
                               checker)(motivating)


def _program(indices) -> ProjectSnapshot:
    return ProjectSnapshot.from_files({"prog.py": "\n".join(EIGHT_STATEMENTS[i] for i in indices) + "\n"})


def test_matches_exhaustive_subset_search(engine, checker):
    scenario = eight_statement_scenario()
    oracle = ReductionOracle(scenario.request, scenario.key_set, engine, checker)
    good = [frozenset(s) for n in range(9) for s in itertools.combinations(range(8), n) if oracle(_program(s))]
    minimal = [s for s in good if not any(o < s for o in good)]
    assert minimal == [NECESSARY]
    result = minimize(scenario.snapshot, scenario.request, scenario.key_set, engine, checker,
                      granularities=("module-statement", "import"))
    expected = ast.dump(ast.parse(_program(sorted(NECESSARY)).files["prog.py"]))
    assert ast.dump(ast.parse(result.minimized.files["prog.py"])) == expected


def test_already_minimal_input_is_unchanged(engine, checker):
    scenario = eight_statement_scenario()
    first = minimize(scenario.snapshot, scenario.request, scenario.key_set, engine, checker)
    again = minimize(first.minimized, first.request, scenario.key_set, engine, checker)
    assert again.removals == 0 and again.minimized == first.minimized


def test_rejects_bad_input(motivating, engine, checker):
    request = build_scenarios()[0].request
    with pytest.raises(ReduceError):
        minimize(motivating, request, frozenset(), engine, checker)
    with pytest.raises(ReduceError):
        minimize(motivating, request, OP, engine, checker, budget=0)
    with pytest.raises(ReduceError):
        minimize(motivating, request, OP, engine, checker, granularities=("line",))


def test_budget_exhaustion_is_partial(motivating, engine, checker):
    request = build_scenarios()[0].request
    result = minimize(motivating, request, OP, engine, checker, budget=3)
    assert result.partial and result.evaluations <= 3


def test_removal_keeps_programs_parsable():
    snap = ProjectSnapshot.from_files({"m.py": "def f():\n    x = 1\nif True:\n    y = 2\nelse:\n    z = 3\n"})
    units = enumerate_units(snap)
    for unit in units:
        candidate = remove_unit(snap, unit)
        assert candidate is not None
        ast.parse(candidate.files["m.py"])
    body_unit = next(u for u in units if u.path == (("body", 0), ("body", 0)))
    assert remove_unit(snap, body_unit).files["m.py"].startswith("def f():\n    pass\n")
    pass_only = ProjectSnapshot.from_files({"m.py": "def f():\n    pass\n"})
    assert [u.granularity for u in enumerate_units(pass_only)] == ["module-statement"]


def test_progress_each_removal_drops_units(engine, checker):
    for scenario in build_scenarios():
        snap = scenario.snapshot
        for unit, candidate in single_removals(snap):
            if candidate is not None:
                assert len(enumerate_units(candidate)) < len(enumerate_units(snap))


def test_write_reproduction(tmp_path, engine, checker):
    scenario = eight_statement_scenario()
    result = minimize(scenario.snapshot, scenario.request, scenario.key_set, engine, checker)
    dest = write_reproduction(result, tmp_path / "repro")
    manifest = json.loads((dest / "manifest.json").read_text())
    assert manifest["key_set"] == [["Unsupported operand", 58]]
    assert manifest["engine"]["name"] == "builtin-rename"
    assert (dest / "project" / "prog.py").read_text() == result.minimized.files["prog.py"]
