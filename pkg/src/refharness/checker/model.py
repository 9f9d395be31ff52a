"""Diagnostics, type reports and their normalized (position-free) form."""

from __future__ import annotations

import json
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

PROJECT_FILE = "<project>"


@dataclass(frozen=True, order=True)
class DiagnosticKey:
    """Identity of a type error once file, line and message are stripped."""

    kind: str
    code: int

    def __post_init__(self) -> None:
        if not self.kind:
            raise ValueError("diagnostic kind must be non-empty")
        if self.code < 0:
            raise ValueError("diagnostic code must be non-negative")

    def __str__(self) -> str:
        return f"{self.kind} [{self.code}]"

    def to_list(self) -> list:
        return [self.kind, self.code]

    @classmethod
    def parse(cls, text: str) -> DiagnosticKey:
        """Inverse of ``str()``: ``"Unsupported operand [58]"``."""
        kind, _, rest = text.strip().rpartition(" [")
        if not kind or not rest.endswith("]"):
            raise ValueError(f"not a diagnostic key: {text!r}")
        return cls(kind, int(rest[:-1]))


@dataclass(frozen=True)
class Diagnostic:
    file: str
    line: int
    key: DiagnosticKey
    message: str = ""

    def __post_init__(self) -> None:
        if self.line < 1:
            raise ValueError(f"line must be >= 1, got {self.line}")

    def sort_key(self) -> tuple:
        return (self.file, self.line, self.key.kind, self.key.code, self.message)

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "line": self.line,
            "kind": self.key.kind,
            "code": self.key.code,
            "message": self.message,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> Diagnostic:
        return cls(data["file"], int(data["line"]), DiagnosticKey(data["kind"], int(data["code"])), data.get("message", ""))


@dataclass(frozen=True)
class TypeReport:
    snapshot_id: str
    checker: str
    version: str
    diagnostics: tuple[Diagnostic, ...]
    warnings: tuple[str, ...] = field(default=())

    @classmethod
    def build(cls, snapshot_id, checker, version, diagnostics: Iterable[Diagnostic], warnings=()) -> TypeReport:
        ordered = tuple(sorted(diagnostics, key=Diagnostic.sort_key))
        return cls(snapshot_id, checker, version, ordered, tuple(warnings))

    def __len__(self) -> int:
        return len(self.diagnostics)

    def to_dict(self) -> dict:
        return {
            "snapshot_id": self.snapshot_id,
            "checker": self.checker,
            "version": self.version,
            "diagnostics": [d.to_dict() for d in self.diagnostics],
            "warnings": list(self.warnings),
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> TypeReport:
        return cls.build(
            data["snapshot_id"],
            data["checker"],
            data.get("version", ""),
            [Diagnostic.from_dict(d) for d in data["diagnostics"]],
            data.get("warnings", ()),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n"

    def render(self) -> str:
        """Checker-style text: ``file:line:0 Kind [code]: message`` per diagnostic."""
        return "".join(f"{d.file}:{d.line}:0 {d.key}: {d.message}\n" for d in self.diagnostics)


class NormalizedReport:
    """Multiset of diagnostic keys (key -> multiplicity >= 1)."""

    __slots__ = ("_counts",)

    def __init__(self, counts: Mapping[DiagnosticKey, int] | Iterable[DiagnosticKey] = ()):
        counter = Counter(counts) if isinstance(counts, Mapping) else Counter(counts)
        for key, n in counter.items():
            if not isinstance(key, DiagnosticKey):
                raise TypeError(f"expected DiagnosticKey, got {key!r}")
            if n < 0:
                raise ValueError(f"negative multiplicity for {key}")
        self._counts = {k: counter[k] for k in sorted(counter) if counter[k] > 0}

    @property
    def counts(self) -> dict[DiagnosticKey, int]:
        return dict(self._counts)

    def __getitem__(self, key: DiagnosticKey) -> int:
        return self._counts.get(key, 0)

    def __iter__(self):
        return iter(self._counts)

    def __len__(self) -> int:
        return len(self._counts)

    def __bool__(self) -> bool:
        return bool(self._counts)

    def __eq__(self, other: object) -> bool:
        return isinstance(other, NormalizedReport) and other._counts == self._counts

    def __hash__(self) -> int:
        return hash(tuple(self._counts.items()))

    def __repr__(self) -> str:
        inner = ", ".join(f"{k}: {n}" for k, n in self._counts.items())
        return f"NormalizedReport({{{inner}}})"

    @property
    def total(self) -> int:
        return sum(self._counts.values())

    def keys(self) -> frozenset[DiagnosticKey]:
        return frozenset(self._counts)

    def elements(self) -> list[DiagnosticKey]:
        return [k for k, n in self._counts.items() for _ in range(n)]

    def to_list(self) -> list:
        return [[k.kind, k.code, n] for k, n in self._counts.items()]

    @classmethod
    def from_list(cls, rows: Iterable) -> NormalizedReport:
        return cls({DiagnosticKey(kind, int(code)): int(n) for kind, code, n in rows})


def normalize(report: TypeReport) -> NormalizedReport:
    """Drop file, line and message, keeping the multiset of keys."""
    return NormalizedReport(d.key for d in report.diagnostics)
