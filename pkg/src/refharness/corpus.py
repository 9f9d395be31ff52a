"""Project snapshots and refactoring target sites."""

from __future__ import annotations

import hashlib
import json
import logging
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path, PurePosixPath
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

from .errors import Ambiguous, AnalysisError, InputError, NotFound
from .syntax import ModuleModel, ProjectModel, collect_definitions

log = logging.getLogger(__name__)

TARGET_KINDS = ("method", "field", "class", "function")
DEFAULT_INCLUDE = ("**/*.py",)


def normalize_path(path: str) -> str:
    """Relative forward-slash path without ``.``/``..`` segments."""
    raw = str(path).replace("\\", "/")
    if raw.startswith("/") or (len(raw) > 1 and raw[1] == ":"):
        raise InputError(f"absolute path not allowed in snapshot: {path}")
    parts = [p for p in raw.split("/") if p not in ("", ".")]
    if not parts or ".." in parts:
        raise InputError(f"invalid snapshot path: {path!r}")
    return "/".join(parts)


def _content_hash(files: Mapping[str, str]) -> str:
    digest = hashlib.sha256()
    for path in sorted(files):
        text = files[path]
        encoded_path = path.encode("utf-8")
        encoded_text = text.encode("utf-8", errors="surrogatepass")
        digest.update(len(encoded_path).to_bytes(8, "big") + encoded_path)
        digest.update(len(encoded_text).to_bytes(8, "big") + encoded_text)
    return digest.hexdigest()


@dataclass(frozen=True, eq=False)
class ProjectSnapshot:
    """Immutable, content-addressed set of source files.

    Build instances with :meth:`from_files`; equality and hashing go through
    ``snapshot_id`` so equal file maps are interchangeable.
    """

    files: Mapping[str, str]
    snapshot_id: str

    @classmethod
    def from_files(cls, files: Mapping[str, str]) -> ProjectSnapshot:
        normalized: dict[str, str] = {}
        for path, text in files.items():
            key = normalize_path(path)
            if key in normalized:
                raise InputError(f"duplicate path after normalization: {key}")
            if not isinstance(text, str):
                raise InputError(f"file {key} content must be text")
            normalized[key] = text
        ordered = {p: normalized[p] for p in sorted(normalized)}
        return cls(MappingProxyType(ordered), _content_hash(ordered))

    def __eq__(self, other: object) -> bool:
        return isinstance(other, ProjectSnapshot) and other.snapshot_id == self.snapshot_id

    def __hash__(self) -> int:
        return hash(self.snapshot_id)

    def __repr__(self) -> str:
        return f"ProjectSnapshot({len(self.files)} files, id={self.snapshot_id[:12]})"

    def replace_files(self, changes: Mapping[str, str | None]) -> ProjectSnapshot:
        """New snapshot with files replaced (``None`` deletes the file)."""
        files = dict(self.files)
        for path, text in changes.items():
            key = normalize_path(path)
            if text is None:
                files.pop(key, None)
            else:
                files[key] = text
        return ProjectSnapshot.from_files(files)

    def line_count(self) -> int:
        return sum(len(text.splitlines()) for text in self.files.values())

    def materialize(self, dest: Path) -> Path:
        dest = Path(dest)
        dest.mkdir(parents=True, exist_ok=True)
        for path, text in self.files.items():
            target = dest / PurePosixPath(path)
            target.parent.mkdir(parents=True, exist_ok=True)
            target.write_bytes(text.encode("utf-8"))
        return dest

    def to_dict(self) -> dict:
        return {"snapshot_id": self.snapshot_id, "files": dict(self.files)}

    @classmethod
    def from_dict(cls, data: Mapping) -> ProjectSnapshot:
        try:
            snapshot = cls.from_files(data["files"])
        except (KeyError, TypeError, AttributeError) as exc:
            raise InputError(f"malformed snapshot record: {exc}") from exc
        expected = data.get("snapshot_id")
        if expected is not None and expected != snapshot.snapshot_id:
            raise InputError(f"snapshot content does not match id {expected}")
        return snapshot


def _hidden(rel: PurePosixPath) -> bool:
    return any(part.startswith(".") or part == "__pycache__" for part in rel.parts[:-1])


def load_project(root: str | Path, include_globs: Sequence[str] = DEFAULT_INCLUDE) -> ProjectSnapshot:
    """Read every file under ``root`` matching ``include_globs`` into a snapshot.

    Files inside hidden directories and ``__pycache__`` are skipped.
    """
    root = Path(root)
    if not root.is_dir():
        raise InputError(f"project root does not exist or is not a directory: {root}")
    files: dict[str, str] = {}
    for pattern in include_globs or DEFAULT_INCLUDE:
        for path in sorted(root.glob(pattern)):
            if not path.is_file():
                continue
            rel = PurePosixPath(path.relative_to(root).as_posix())
            if _hidden(rel):
                continue
            try:
                files[str(rel)] = path.read_bytes().decode("utf-8")
            except UnicodeDecodeError as exc:
                raise InputError(f"{rel}: not valid UTF-8 ({exc.reason})") from exc
    if not files:
        raise InputError(f"no files under {root} match {list(include_globs)}")
    return ProjectSnapshot.from_files(files)


@lru_cache(maxsize=128)
def project_model(snapshot: ProjectSnapshot) -> ProjectModel:
    """Parsed model of a snapshot, cached by snapshot id."""
    return ProjectModel(snapshot.files)


def module_model(snapshot: ProjectSnapshot, file: str) -> ModuleModel:
    if file not in snapshot.files:
        raise NotFound(f"file {file} is not in snapshot")
    model = project_model(snapshot)
    if file not in model.modules:
        raise AnalysisError(f"{file} does not parse: {model.errors.get(file)}")
    return model.modules[file]


@dataclass(frozen=True, order=True)
class TargetSite:
    file: str
    start: int
    end: int
    kind: str
    qualified_name: str

    def __post_init__(self) -> None:
        if self.kind not in TARGET_KINDS:
            raise ValueError(f"unknown target kind {self.kind!r}")
        if not 0 <= self.start < self.end:
            raise ValueError(f"invalid span ({self.start}, {self.end})")

    @property
    def span(self) -> tuple[int, int]:
        return self.start, self.end

    @property
    def identifier(self) -> str:
        return self.qualified_name.rsplit(".", 1)[-1]

    def to_dict(self) -> dict:
        return {
            "file": self.file,
            "kind": self.kind,
            "qualified_name": self.qualified_name,
            "start": self.start,
            "end": self.end,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> TargetSite:
        return cls(
            file=data["file"],
            start=int(data["start"]),
            end=int(data["end"]),
            kind=data["kind"],
            qualified_name=data["qualified_name"],
        )


@dataclass(frozen=True)
class TargetIndex:
    snapshot_id: str
    targets: tuple[TargetSite, ...]
    skipped: tuple[tuple[str, str], ...] = field(default=())

    def of_kind(self, *kinds: str) -> list[TargetSite]:
        return [t for t in self.targets if t.kind in kinds]

    def names(self, kind: str) -> list[str]:
        """Distinct identifiers of one kind, sorted."""
        return sorted({t.identifier for t in self.targets if t.kind == kind})

    def __len__(self) -> int:
        return len(self.targets)

    def to_records(self) -> list[dict]:
        return [{"snapshot_id": self.snapshot_id, **t.to_dict()} for t in self.targets]

    def to_json(self) -> str:
        return json.dumps(
            {
                "snapshot_id": self.snapshot_id,
                "targets": self.to_records(),
                "skipped": [{"file": f, "reason": r} for f, r in self.skipped],
            },
            indent=2,
            sort_keys=True,
        )


def enumerate_targets(snapshot: ProjectSnapshot, kind: str | Iterable[str]) -> TargetIndex:
    """All definition sites of the requested kind(s), sorted by (file, start)."""
    kinds = {kind} if isinstance(kind, str) else set(kind)
    unknown = kinds - set(TARGET_KINDS)
    if unknown:
        raise ValueError(f"unknown target kinds: {sorted(unknown)}")
    model = project_model(snapshot)
    python_files = [p for p in snapshot.files if p.endswith(".py")]
    if python_files and not model.modules:
        raise AnalysisError("no file in the snapshot parses")
    skipped = []
    for path, exc in sorted(model.errors.items()):
        log.warning("skipping unparsable file %s: %s", path, exc)
        skipped.append((path, f"{type(exc).__name__}: {exc}"))
    targets = []
    for path, module in model.modules.items():
        for d in collect_definitions(module):
            if d.kind in kinds:
                targets.append(TargetSite(path, d.start, d.end, d.kind, d.qualified_name))
    targets.sort(key=lambda t: (t.file, t.start, t.kind))
    return TargetIndex(snapshot.snapshot_id, tuple(targets), tuple(skipped))


def resolve_span(snapshot: ProjectSnapshot, file: str, qualified_name: str) -> TargetSite:
    """Locate the identifier token that defines ``qualified_name`` in ``file``."""
    module = module_model(snapshot, file)
    matches = [d for d in collect_definitions(module) if d.qualified_name == qualified_name]
    if not matches:
        raise NotFound(f"{qualified_name} is not defined in {file}")
    if len(matches) > 1:
        raise Ambiguous(qualified_name, [(d.start, d.end) for d in matches])
    d = matches[0]
    return TargetSite(file, d.start, d.end, d.kind, d.qualified_name)
