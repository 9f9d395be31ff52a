"""Refactoring requests and the name-selection strategies that generate them."""

from __future__ import annotations

import ast
import hashlib
import json
import keyword
import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Mapping, Sequence

from .corpus import ProjectSnapshot, TargetIndex, TargetSite, module_model
from .errors import StrategyError


class RefactoringType(str, Enum):
    RENAME_FIELD = "RenameField"
    RENAME_METHOD = "RenameMethod"
    RENAME_CLASS = "RenameClass"
    INLINE_METHOD = "InlineMethod"
    EXTRACT_METHOD = "ExtractMethod"
    MOVE_FIELD_METHOD = "MoveFieldMethod"
    USE_FUNCTION = "UseFunction"

    @property
    def display(self) -> str:
        return _DISPLAY[self]

    @property
    def is_rename(self) -> bool:
        return self in (RefactoringType.RENAME_FIELD, RefactoringType.RENAME_METHOD, RefactoringType.RENAME_CLASS)


_DISPLAY = {
    RefactoringType.RENAME_FIELD: "Rename Field",
    RefactoringType.RENAME_METHOD: "Rename Method",
    RefactoringType.RENAME_CLASS: "Rename Class",
    RefactoringType.INLINE_METHOD: "Inline Method",
    RefactoringType.EXTRACT_METHOD: "Extract Method",
    RefactoringType.MOVE_FIELD_METHOD: "Move Method/Field",
    RefactoringType.USE_FUNCTION: "Use Function",
}

# target kinds each refactoring can be applied to
TARGET_KINDS_FOR = {
    RefactoringType.RENAME_FIELD: ("field",),
    RefactoringType.RENAME_METHOD: ("method",),
    RefactoringType.RENAME_CLASS: ("class",),
    RefactoringType.INLINE_METHOD: ("method", "function"),
    RefactoringType.EXTRACT_METHOD: ("method", "function"),
    RefactoringType.MOVE_FIELD_METHOD: ("method", "field"),
    RefactoringType.USE_FUNCTION: ("function", "method"),
}


class StrategyKind(str, Enum):
    PROJECT_METHOD_NAMES = "ProjectMethodNames"
    PROJECT_FIELD_NAMES = "ProjectFieldNames"
    KEYWORDS = "Keywords"

    @property
    def display(self) -> str:
        return {
            StrategyKind.PROJECT_METHOD_NAMES: "Method names",
            StrategyKind.PROJECT_FIELD_NAMES: "Field names",
            StrategyKind.KEYWORDS: "Keywords",
        }[self]


# Reserved words per subject-language version.  The list has been stable
# since 3.7 (async/await became keywords); soft keywords are not reserved.
KEYWORDS: dict[str, tuple[str, ...]] = {
    "3.7": (
        "False", "None", "True", "and", "as", "assert", "async", "await", "break",
        "class", "continue", "def", "del", "elif", "else", "except", "finally", "for",
        "from", "global", "if", "import", "in", "is", "lambda", "nonlocal", "not", "or",
        "pass", "raise", "return", "try", "while", "with", "yield",
    ),
}
for _v in ("3.8", "3.9", "3.10", "3.11", "3.12", "3.13"):
    KEYWORDS[_v] = KEYWORDS["3.7"]
DEFAULT_LANGUAGE_VERSION = "3.10"


def keyword_pool(version: str = DEFAULT_LANGUAGE_VERSION, override: Sequence[str] | None = None) -> list[str]:
    if override:
        return sorted(set(override))
    try:
        return sorted(KEYWORDS[version])
    except KeyError:
        raise StrategyError(f"no keyword list for language version {version}") from None


def running_keywords() -> list[str]:
    """Reserved words of the interpreter running the harness."""
    return sorted(keyword.kwlist)


@dataclass(frozen=True)
class SeedTag:
    strategy: str
    seed: int
    draw: int

    def to_dict(self) -> dict:
        return {"strategy": self.strategy, "seed": self.seed, "draw": self.draw}

    @classmethod
    def from_dict(cls, data: Mapping) -> SeedTag:
        return cls(data["strategy"], int(data["seed"]), int(data["draw"]))


_REQUIRED = {
    RefactoringType.RENAME_FIELD: ("new_name",),
    RefactoringType.RENAME_METHOD: ("new_name",),
    RefactoringType.RENAME_CLASS: ("new_name",),
    RefactoringType.EXTRACT_METHOD: ("extracted_name", "region"),
    RefactoringType.MOVE_FIELD_METHOD: ("destination",),
    RefactoringType.INLINE_METHOD: (),
    RefactoringType.USE_FUNCTION: (),
}


@dataclass(frozen=True)
class RefactoringRequest:
    refactoring_type: RefactoringType
    target: TargetSite
    params: Mapping[str, Any] = field(default_factory=dict)
    seed_tag: SeedTag | None = None

    def __post_init__(self) -> None:
        object.__setattr__(self, "refactoring_type", RefactoringType(self.refactoring_type))
        for name in _REQUIRED[self.refactoring_type]:
            value = self.params.get(name)
            if value is None or value == "" or (isinstance(value, (list, tuple)) and not value):
                raise ValueError(f"{self.refactoring_type.value} requires parameter {name!r}")
        if "region" in self.params:
            start, end = self.params["region"]
            if not 0 <= start < end:
                raise ValueError(f"invalid region {self.params['region']}")

    @property
    def new_name(self) -> str | None:
        return self.params.get("new_name")

    @property
    def strategy(self) -> str:
        return self.seed_tag.strategy if self.seed_tag else ""

    def with_target(self, target: TargetSite) -> RefactoringRequest:
        return RefactoringRequest(self.refactoring_type, target, dict(self.params), self.seed_tag)

    def to_dict(self) -> dict:
        params = {k: (list(v) if isinstance(v, tuple) else v) for k, v in sorted(self.params.items())}
        return {
            "refactoring_type": self.refactoring_type.value,
            "target": self.target.to_dict(),
            "params": params,
            "seed_tag": self.seed_tag.to_dict() if self.seed_tag else None,
        }

    @classmethod
    def from_dict(cls, data: Mapping) -> RefactoringRequest:
        params = dict(data.get("params") or {})
        if "region" in params:
            params["region"] = tuple(params["region"])
        tag = data.get("seed_tag")
        return cls(
            RefactoringType(data["refactoring_type"]),
            TargetSite.from_dict(data["target"]),
            params,
            SeedTag.from_dict(tag) if tag else None,
        )

    def fingerprint(self) -> str:
        """Identity of the refactoring itself (the seed tag is not part of it)."""
        payload = {k: v for k, v in self.to_dict().items() if k != "seed_tag"}
        return hashlib.sha256(json.dumps(payload, sort_keys=True).encode("utf-8")).hexdigest()[:32]


def requests_to_json(requests: Sequence[RefactoringRequest]) -> str:
    return json.dumps([r.to_dict() for r in requests], indent=2, sort_keys=True) + "\n"


def requests_from_json(text: str) -> list[RefactoringRequest]:
    return [RefactoringRequest.from_dict(d) for d in json.loads(text)]


def name_pool(index: TargetIndex, strategy: StrategyKind, keywords: Sequence[str] | None = None,
              language_version: str = DEFAULT_LANGUAGE_VERSION) -> list[str]:
    strategy = StrategyKind(strategy)
    if strategy is StrategyKind.KEYWORDS:
        return keyword_pool(language_version, keywords)
    kind = "method" if strategy is StrategyKind.PROJECT_METHOD_NAMES else "field"
    return index.names(kind)


def extract_region(snapshot: ProjectSnapshot, target: TargetSite) -> tuple[int, int] | None:
    """Default Extract Method region: the body minus a final ``return``.

    A leading docstring is not part of the region.  Bodies with fewer than two
    remaining statements give no region.
    """
    module = module_model(snapshot, target.file)
    for node in ast.walk(module.tree):
        if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)) and node.name == target.identifier:
            start, _ = module.index.node_span(node)
            if not start <= target.start < target.end <= module.index.node_span(node)[1]:
                continue
            body = list(node.body)
            if body and isinstance(body[0], ast.Expr) and isinstance(getattr(body[0], "value", None), ast.Constant) \
                    and isinstance(body[0].value.value, str):
                body = body[1:]
            if len(body) < 2:
                return None
            if isinstance(body[-1], ast.Return):
                body = body[:-1]
            return module.index.node_span(body[0])[0], module.index.node_span(body[-1])[1]
    return None


def _class_of(target: TargetSite) -> str:
    return target.qualified_name.rsplit(".", 1)[0]


def generate_requests(
    index: TargetIndex,
    refactoring_type: RefactoringType | str,
    strategy: StrategyKind | str,
    seed: int,
    limit: int,
    *,
    snapshot: ProjectSnapshot | None = None,
    keywords: Sequence[str] | None = None,
    language_version: str = DEFAULT_LANGUAGE_VERSION,
) -> list[RefactoringRequest]:
    """Seeded uniform draw, without replacement, over the (target, value) space."""
    refactoring_type = RefactoringType(refactoring_type)
    strategy = StrategyKind(strategy)
    if limit < 1:
        raise StrategyError("limit must be >= 1")
    if refactoring_type in (RefactoringType.EXTRACT_METHOD,) and snapshot is None:
        raise StrategyError("Extract Method needs the snapshot to choose regions")
    if snapshot is not None and snapshot.snapshot_id != index.snapshot_id:
        raise StrategyError("index does not belong to the given snapshot")

    targets = index.of_kind(*TARGET_KINDS_FOR[refactoring_type])
    if not targets:
        kinds = ", ".join(TARGET_KINDS_FOR[refactoring_type])
        raise StrategyError(f"{refactoring_type.value} needs targets of kind {kinds}; the index has none")
    pool = name_pool(index, strategy, keywords, language_version)

    space: list[tuple[TargetSite, dict]] = []
    if refactoring_type.is_rename:
        if not pool:
            raise StrategyError(f"empty {strategy.value} pool")
        for target in targets:
            for name in pool:
                if name != target.identifier:
                    space.append((target, {"new_name": name}))
    elif refactoring_type is RefactoringType.EXTRACT_METHOD:
        if not pool:
            raise StrategyError(f"empty {strategy.value} pool")
        for target in targets:
            region = extract_region(snapshot, target)
            if region is None:
                continue
            for name in pool:
                space.append((target, {"extracted_name": name, "region": region}))
    elif refactoring_type is RefactoringType.MOVE_FIELD_METHOD:
        classes = index.of_kind("class")
        for target in targets:
            owner = _class_of(target)
            for cls in classes:
                if cls.file == target.file and cls.qualified_name != owner:
                    space.append((target, {"destination": cls.qualified_name}))
    else:
        space = [(target, {}) for target in targets]

    if not space:
        raise StrategyError(f"no applicable ({refactoring_type.value}, {strategy.value}) pairing")
    rng = random.Random(seed)
    draws = rng.sample(range(len(space)), min(limit, len(space)))
    return [
        RefactoringRequest(refactoring_type, space[i][0], space[i][1], SeedTag(strategy.value, seed, n))
        for n, i in enumerate(draws)
    ]
