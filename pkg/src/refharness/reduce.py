"""Greedy delta debugging over syntax-tree units.

A unit is one statement in any suite, or one decorator.  Candidates are
regenerated with ``ast.unparse``, so comments and layout of edited files are
normalized; a suite left empty gets a ``pass``.  A lone ``pass`` is not a unit.
"""

from __future__ import annotations

import ast
import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator, Sequence

from .checker.adapters import CheckerAdapter, run_checker
from .checker.model import DiagnosticKey, normalize
from .corpus import ProjectSnapshot, resolve_span
from .diff import diff_reports
from .engine.base import Applied, EngineAdapter, apply_refactoring
from .errors import HarnessError, ReduceError
from .strategy import RefactoringRequest, extract_region
from .syntax import parse_source

log = logging.getLogger(__name__)

GRANULARITIES = ("import", "module-statement", "class-member", "function-body-statement", "decorator")
DEFAULT_BUDGET = 2000
_SUITES = ("body", "orelse", "finalbody")

Path_ = tuple[tuple[str, int], ...]


@dataclass(frozen=True, order=True)
class ReductionUnit:
    file: str
    path: Path_
    granularity: str

    def describe(self) -> str:
        return f"{self.file}:" + "/".join(f"{name}[{i}]" for name, i in self.path)


def _suites(node: ast.AST) -> Iterator[tuple[Path_, list]]:
    for name in _SUITES:
        block = getattr(node, name, None)
        if isinstance(block, list) and block and isinstance(block[0], ast.stmt):
            yield ((name, -1),), block
    for name in ("handlers", "cases"):
        for k, child in enumerate(getattr(node, name, None) or []):
            yield ((name, k), ("body", -1)), child.body


def _units_of(node: ast.AST, prefix: Path_, file: str, depth_kind: str) -> Iterator[ReductionUnit]:
    for k, decorator in enumerate(getattr(node, "decorator_list", None) or []):
        yield ReductionUnit(file, prefix + (("decorator_list", k),), "decorator")
    for steps, block in _suites(node):
        lone_pass = len(block) == 1 and isinstance(block[0], ast.Pass)
        for j, stmt in enumerate(block):
            path = prefix + steps[:-1] + ((steps[-1][0], j),)
            if not lone_pass:
                if isinstance(stmt, (ast.Import, ast.ImportFrom)):
                    granularity = "import"
                else:
                    granularity = depth_kind
                yield ReductionUnit(file, path, granularity)
            if isinstance(stmt, ast.ClassDef):
                inner = "class-member"
            else:
                inner = "function-body-statement"
            yield from _units_of(stmt, path, file, inner)


def enumerate_units(snapshot: ProjectSnapshot) -> list[ReductionUnit]:
    """All removable units in document order (files sorted, preorder within a file)."""
    units: list[ReductionUnit] = []
    for file in sorted(snapshot.files):
        if not file.endswith(".py"):
            continue
        try:
            tree = parse_source(snapshot.files[file])
        except (SyntaxError, ValueError):
            continue
        units.extend(_units_of(tree, (), file, "module-statement"))
    return units


def _locate(tree: ast.AST, path: Path_) -> tuple[list, int]:
    node = tree
    for name, index in path[:-1]:
        node = getattr(node, name)[index]
    name, index = path[-1]
    return getattr(node, name), index


def remove_unit(snapshot: ProjectSnapshot, unit: ReductionUnit) -> ProjectSnapshot | None:
    """Snapshot without ``unit``; None when the candidate would be incoherent."""
    try:
        tree = parse_source(snapshot.files[unit.file])
        container, index = _locate(tree, unit.path)
        del container[index]
    except (SyntaxError, ValueError, AttributeError, IndexError, KeyError):
        return None
    if not container and unit.path[-1][0] != "decorator_list":
        if unit.path[-1][0] == "orelse" or unit.path[-1][0] == "finalbody":
            pass  # an empty else/finally is simply dropped by unparse
        else:
            container.append(ast.Pass())
    text = ast.unparse(ast.fix_missing_locations(tree)) + "\n"
    try:
        parse_source(text)
    except SyntaxError:
        return None
    return snapshot.replace_files({unit.file: text})


class ReductionOracle:
    """Does the candidate still reproduce exactly the same introduced key set?"""

    def __init__(
        self,
        request: RefactoringRequest,
        key_set: frozenset[DiagnosticKey],
        engine: EngineAdapter,
        checker: CheckerAdapter,
    ):
        self.request = request
        self.key_set = frozenset(key_set)
        self.engine = engine
        self.checker = checker
        self.calls = 0

    def relocate(self, candidate: ProjectSnapshot) -> RefactoringRequest | None:
        target = self.request.target
        try:
            site = resolve_span(candidate, target.file, target.qualified_name)
        except HarnessError:
            return None
        if site.kind != target.kind:
            return None
        request = self.request.with_target(site)
        if "region" in request.params:
            region = extract_region(candidate, site)
            if region is None:
                return None
            request = RefactoringRequest(
                request.refactoring_type, site, {**request.params, "region": region}, request.seed_tag
            )
        return request

    def __call__(self, candidate: ProjectSnapshot) -> bool:
        self.calls += 1
        request = self.relocate(candidate)
        if request is None:
            return False
        try:
            outcome = apply_refactoring(self.engine, candidate, request)
            if not isinstance(outcome, Applied):
                return False
            before = normalize(run_checker(self.checker, candidate))
            after = normalize(run_checker(self.checker, outcome.refactored))
        except HarnessError as exc:
            log.debug("oracle false on %s: %s", candidate.snapshot_id[:12], exc)
            return False
        return diff_reports(before, after).key_set() == self.key_set


@dataclass(frozen=True)
class ReductionResult:
    original: ProjectSnapshot
    minimized: ProjectSnapshot
    request: RefactoringRequest
    key_set: frozenset[DiagnosticKey]
    iterations: int
    evaluations: int
    removals: int
    partial: bool = False
    engine: str = ""
    engine_version: str = ""
    checker: str = ""
    checker_version: str = ""

    def manifest(self) -> dict:
        return {
            "request": self.request.to_dict(),
            "key_set": [k.to_list() for k in sorted(self.key_set)],
            "engine": {"name": self.engine, "version": self.engine_version},
            "checker": {"name": self.checker, "version": self.checker_version},
            "oracle_evaluations": self.evaluations,
            "iterations": self.iterations,
            "removals": self.removals,
            "partial": self.partial,
            "original_snapshot": self.original.snapshot_id,
            "minimized_snapshot": self.minimized.snapshot_id,
            "lines": self.minimized.line_count(),
        }


def minimize(
    snapshot: ProjectSnapshot,
    request: RefactoringRequest,
    key_set: frozenset[DiagnosticKey],
    engine: EngineAdapter,
    checker: CheckerAdapter,
    budget: int = DEFAULT_BUDGET,
    granularities: Sequence[str] = GRANULARITIES,
) -> ReductionResult:
    """Remove units coarse to fine, keeping each removal the oracle still accepts.

    Full passes repeat until one removes nothing, which makes the result
    1-minimal over the chosen granularities, or until ``budget`` oracle
    evaluations are spent (the result is then flagged partial).
    """
    if budget < 1:
        raise ReduceError("budget must be >= 1")
    unknown = set(granularities) - set(GRANULARITIES)
    if unknown:
        raise ReduceError(f"unknown granularities: {sorted(unknown)}")
    oracle = ReductionOracle(request, frozenset(key_set), engine, checker)
    if not oracle(snapshot):
        raise ReduceError("the oracle rejects the initial snapshot; nothing to minimize")
    current, iterations, removals, partial = snapshot, 0, 0, False
    while not partial:
        iterations += 1
        removed = False
        for granularity in granularities:
            position = 0
            while True:
                units = [u for u in enumerate_units(current) if u.granularity == granularity]
                if position >= len(units):
                    break
                if oracle.calls >= budget:
                    partial = True
                    break
                candidate = remove_unit(current, units[position])
                if candidate is not None and oracle(candidate):
                    current = candidate
                    removals += 1
                    removed = True
                else:
                    position += 1
            if partial:
                break
        if not removed:
            break
    final_request = oracle.relocate(current)
    assert final_request is not None
    return ReductionResult(
        snapshot, current, final_request, frozenset(key_set), iterations, oracle.calls, removals, partial,
        engine.name, getattr(engine, "version", ""), checker.name, getattr(checker, "version", ""),
    )


def single_removals(snapshot: ProjectSnapshot, granularities: Sequence[str] = GRANULARITIES):
    """Every candidate obtained by removing one unit: ``(unit, candidate-or-None)``."""
    for unit in enumerate_units(snapshot):
        if unit.granularity in granularities:
            yield unit, remove_unit(snapshot, unit)


def write_reproduction(result: ReductionResult, dest: str | Path) -> Path:
    """Minimized project under ``dest/project`` plus ``dest/manifest.json``."""
    dest = Path(dest)
    result.minimized.materialize(dest / "project")
    (dest / "manifest.json").write_text(json.dumps(result.manifest(), indent=2, sort_keys=True) + "\n")
    return dest


__all__ = [
    "DEFAULT_BUDGET",
    "GRANULARITIES",
    "ReductionOracle",
    "ReductionResult",
    "ReductionUnit",
    "enumerate_units",
    "minimize",
    "remove_unit",
    "single_removals",
    "write_reproduction",
]
