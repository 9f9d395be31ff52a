"""Exception hierarchy shared by every harness module."""

from __future__ import annotations


class HarnessError(Exception):
    """Base class for all errors raised by refharness."""


class InputError(HarnessError):
    """A project, fixture or config file cannot be read."""


class ConfigError(HarnessError):
    """A run configuration is invalid."""


class AnalysisError(HarnessError):
    """Source analysis cannot proceed (e.g. nothing parses)."""


class NotFound(HarnessError):
    """A qualified name does not resolve to any definition."""


class Ambiguous(HarnessError):
    """A qualified name resolves to more than one definition."""

    def __init__(self, qualified_name: str, spans: list[tuple[int, int]]):
        self.qualified_name = qualified_name
        self.spans = list(spans)
        super().__init__(f"{qualified_name} is defined {len(spans)} times at spans {self.spans}")


class StrategyError(HarnessError):
    """Request generation is impossible with the given inputs."""


class ContractError(HarnessError):
    """A caller violated an adapter contract (not an engine refusal)."""


class CheckError(HarnessError):
    """A type checker failed to produce a report."""

    def __init__(self, message: str, raw_output: str = ""):
        super().__init__(message)
        self.raw_output = raw_output


class ParseError(HarnessError):
    """External checker output contains no recognizable diagnostics."""


class ReduceError(HarnessError):
    """Reduction cannot start."""


class ReportError(HarnessError):
    """A report or summary cannot be emitted."""


class StoreError(HarnessError):
    """A persisted run store is corrupted."""

    def __init__(self, message: str, path: str = ""):
        super().__init__(message)
        self.path = path
