"""Parsers for raw checker output.

A dialect turns raw text into ``(diagnostics, warnings)``.  Lines a dialect
cannot read become warnings rather than errors; only input that is non-empty
yet yields no diagnostic at all is rejected.
"""

from __future__ import annotations

import json
import re
from typing import Callable

from ..errors import ParseError
from .model import Diagnostic, DiagnosticKey, TypeReport

Parsed = tuple[list[Diagnostic], list[str]]

# path:line:col Kind [code]: message
_PYRE_LINE = re.compile(
    r"^(?P<file>[^\s:][^:]*):(?P<line>\d+):(?P<col>\d+)\s+(?P<kind>[^\[\]:]+?)\s+\[(?P<code>\d+)\](?::\s?(?P<msg>.*))?$"
)
# File "path", line N, in scope: message [error-name]
_PYTYPE_LINE = re.compile(r'^File "(?P<file>[^"]+)", line (?P<line>\d+)(?:, in [^:]+)?: (?P<msg>.*) \[(?P<kind>[\w-]+)\]$')


def _relative(path: str, root: str | None) -> str:
    path = path.replace("\\", "/")
    if root:
        root = root.replace("\\", "/").rstrip("/") + "/"
        if path.startswith(root):
            path = path[len(root):]
    return path[2:] if path.startswith("./") else path


def parse_line_dialect(raw: str, root: str | None = None) -> Parsed:
    diagnostics, warnings = [], []
    for line in raw.splitlines():
        if not line.strip():
            continue
        match = _PYRE_LINE.match(line.strip())
        if match is None:
            warnings.append(f"unparsed line: {line}")
            continue
        diagnostics.append(
            Diagnostic(
                _relative(match["file"], root),
                max(1, int(match["line"])),
                DiagnosticKey(match["kind"].strip(), int(match["code"])),
                (match["msg"] or "").strip(),
            )
        )
    return diagnostics, warnings


def parse_pyre_json(raw: str, root: str | None = None) -> Parsed:
    if not raw.strip():
        return [], []
    try:
        records = json.loads(raw)
    except json.JSONDecodeError:
        # pyre sometimes prints banners before the JSON payload
        start = raw.find("[")
        if start < 0:
            return [], [f"unparsed line: {line}" for line in raw.splitlines() if line.strip()]
        try:
            records = json.loads(raw[start:])
        except json.JSONDecodeError:
            return [], [f"unparsed line: {line}" for line in raw.splitlines() if line.strip()]
    diagnostics, warnings = [], []
    for record in records:
        try:
            message = record.get("description", "")
            _, _, message = message.partition(": ")
            diagnostics.append(
                Diagnostic(
                    _relative(record["path"], root),
                    max(1, int(record["line"])),
                    DiagnosticKey(record["name"], int(record["code"])),
                    message,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            warnings.append(f"unparsed record: {record!r} ({exc})")
    return diagnostics, warnings


def parse_pytype(raw: str, root: str | None = None) -> Parsed:
    # pytype names errors but has no numeric codes; code 0 stands in
    diagnostics, warnings = [], []
    for line in raw.splitlines():
        if not line.strip():
            continue
        match = _PYTYPE_LINE.match(line.strip())
        if match is None:
            warnings.append(f"unparsed line: {line}")
            continue
        diagnostics.append(
            Diagnostic(
                _relative(match["file"], root),
                int(match["line"]),
                DiagnosticKey(match["kind"], 0),
                match["msg"],
            )
        )
    return diagnostics, warnings


DIALECTS: dict[str, Callable[..., Parsed]] = {
    "line": parse_line_dialect,
    "pyre-text": parse_line_dialect,
    "pyre-json": parse_pyre_json,
    "pytype": parse_pytype,
}


def register_dialect(name: str, parser: Callable[..., Parsed]) -> None:
    DIALECTS[name] = parser


def parse_external_output(
    raw: str,
    dialect: str = "line",
    *,
    snapshot_id: str = "",
    checker: str = "external",
    version: str = "",
    root: str | None = None,
) -> TypeReport:
    try:
        parser = DIALECTS[dialect]
    except KeyError:
        raise ParseError(f"unknown dialect {dialect!r}; known: {sorted(DIALECTS)}") from None
    diagnostics, warnings = parser(raw, root)
    if raw.strip() and not diagnostics and dialect != "pyre-json":
        raise ParseError(f"no parsable diagnostic in {len(raw.splitlines())} line(s) of {dialect} output")
    if dialect == "pyre-json" and warnings and not diagnostics:
        raise ParseError("pyre JSON output could not be parsed")
    return TypeReport.build(snapshot_id, checker, version, diagnostics, warnings)
