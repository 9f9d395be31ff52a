"""Type reports: production, parsing and normalization."""

from .adapters import CheckerAdapter, ExternalChecker, MicroChecker, ReplayChecker, pyre_checker, run_checker
from .dialects import DIALECTS, parse_external_output, register_dialect
from .micro import micro_check
from .model import Diagnostic, DiagnosticKey, NormalizedReport, TypeReport, normalize

__all__ = [
    "CheckerAdapter",
    "DIALECTS",
    "Diagnostic",
    "DiagnosticKey",
    "ExternalChecker",
    "MicroChecker",
    "NormalizedReport",
    "ReplayChecker",
    "TypeReport",
    "micro_check",
    "normalize",
    "parse_external_output",
    "pyre_checker",
    "register_dialect",
    "run_checker",
]
