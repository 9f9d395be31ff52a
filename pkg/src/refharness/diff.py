"""Errors introduced by a refactoring: multiset difference of normalized reports."""

from __future__ import annotations

from dataclasses import dataclass, field

from .checker.model import DiagnosticKey, NormalizedReport


@dataclass(frozen=True)
class IntroducedErrors:
    errors: NormalizedReport
    before_id: str = ""
    after_id: str = ""
    disappeared: NormalizedReport = field(default_factory=NormalizedReport)

    def __bool__(self) -> bool:
        return bool(self.errors)

    def key_set(self) -> frozenset[DiagnosticKey]:
        """Set projection used for grouping and reduction."""
        return self.errors.keys()

    def to_dict(self) -> dict:
        return {
            "before": self.before_id,
            "after": self.after_id,
            "introduced": self.errors.to_list(),
            "disappeared": self.disappeared.to_list(),
        }

    @classmethod
    def from_dict(cls, data) -> IntroducedErrors:
        return cls(
            NormalizedReport.from_list(data["introduced"]),
            data.get("before", ""),
            data.get("after", ""),
            NormalizedReport.from_list(data.get("disappeared", [])),
        )


def _subtract(a: NormalizedReport, b: NormalizedReport) -> NormalizedReport:
    return NormalizedReport({k: a[k] - b[k] for k in a if a[k] > b[k]})


def diff_reports(
    before: NormalizedReport,
    after: NormalizedReport,
    *,
    before_id: str = "",
    after_id: str = "",
) -> IntroducedErrors:
    """Per key: max(0, after - before).  Disappeared keys are kept aside only."""
    return IntroducedErrors(_subtract(after, before), before_id, after_id, _subtract(before, after))
