from __future__ import annotations

from pathlib import Path

import pytest

from refharness.checker import MicroChecker
from refharness.corpus import load_project
from refharness.engine import BuiltinRenameEngine

FIXTURES = Path(__file__).parent / "fixtures"
PROJECTS = FIXTURES / "projects"


@pytest.fixture
def project_dir():
    return lambda name: PROJECTS / name


@pytest.fixture
def motivating():
    return load_project(PROJECTS / "motivating")


@pytest.fixture
def hermetic():
    return load_project(PROJECTS / "hermetic")


@pytest.fixture
def engine():
    return BuiltinRenameEngine()


@pytest.fixture
def checker():
    return MicroChecker()


_acceptance: list[tuple[str, str, float]] = []


def pytest_runtest_logreport(report):
    if "test_acceptance.py::" not in report.nodeid:
        return
    name = report.nodeid.split("::", 1)[1]
    if report.when == "call" or (report.when == "setup" and not report.passed):
        _acceptance.append((name, report.outcome.upper(), report.duration))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome, duration in _acceptance:
        terminalreporter.write_line(f"{outcome:<7} {name} ({duration:.2f}s)")
