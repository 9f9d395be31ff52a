"""Command-line entry point.

Exit codes: 0 run completed without failure groups, 2 failure groups exist,
1 configuration or input error.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import os
import re
import shlex
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from . import __version__
from .checker.adapters import ExternalChecker, MicroChecker, ReplayChecker, find_pyre_typeshed, pyre_checker
from .checker.model import NormalizedReport, TypeReport, normalize
from .corpus import TARGET_KINDS, enumerate_targets, load_project
from .diff import diff_reports
from .engine import BuiltinRenameEngine, ExternalEngine, rope_engine, replay_engine
from .errors import CheckError, ConfigError, HarnessError, InputError
from .pipeline import run_pipeline
from .reduce import DEFAULT_BUDGET, minimize, write_reproduction
from .report import emit_summary, load_run, persist_run, set_label
from .strategy import DEFAULT_LANGUAGE_VERSION, RefactoringType, StrategyKind, generate_requests
from .triage import Classification, TriageLabel

log = logging.getLogger("refharness")

ENGINES = ("builtin-rename", "rope", "replay", "external")
CHECKERS = ("micro", "pyre", "replay", "external")

# environment variables may only relocate adapter executables
ENV_ROPE_PYTHON = "REFHARNESS_ROPE_PYTHON"
ENV_PYRE = "REFHARNESS_PYRE"
ENV_PYRE_TYPESHED = "REFHARNESS_PYRE_TYPESHED"
ENV_ENGINE_COMMAND = "REFHARNESS_ENGINE_COMMAND"
ENV_CHECKER_COMMAND = "REFHARNESS_CHECKER_COMMAND"


def _squash(text: str) -> str:
    return re.sub(r"[^a-z]", "", text.lower())


def parse_refactoring(text: str) -> RefactoringType:
    for kind in RefactoringType:
        if _squash(text) in (_squash(kind.value), _squash(kind.display)):
            return kind
    raise ConfigError(f"unknown refactoring {text!r}; choose from {[k.value for k in RefactoringType]}")


def parse_strategy(text: str) -> StrategyKind:
    for kind in StrategyKind:
        if _squash(text) in (_squash(kind.value), _squash(kind.display)):
            return kind
    raise ConfigError(f"unknown strategy {text!r}; choose from {[k.value for k in StrategyKind]}")


@dataclass
class RunConfig:
    project_root: str = ""
    include: list[str] = field(default_factory=lambda: ["**/*.py"])
    engine: str = "builtin-rename"
    engine_bundle: str | None = None
    engine_command: list[str] | None = None
    checker: str = "micro"
    checker_bundle: str | None = None
    checker_command: list[str] | None = None
    checker_dialect: str = "line"
    refactoring: str = RefactoringType.RENAME_METHOD.value
    strategy: str = StrategyKind.PROJECT_METHOD_NAMES.value
    seed: int = 1
    limit: int = 20
    workers: int = 1
    engine_timeout: float = 120.0
    checker_timeout: float = 300.0
    store: str = "runs"
    reduce: bool = True
    reduce_budget: int = DEFAULT_BUDGET
    keywords: list[str] | None = None
    language_version: str = DEFAULT_LANGUAGE_VERSION

    @classmethod
    def from_file(cls, path: str | Path) -> RunConfig:
        path = Path(path)
        try:
            data = json.loads(path.read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"config {path} must be a JSON object")
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ConfigError(f"unknown config fields: {unknown}")
        config = cls(**data)
        base = path.parent
        for name in ("project_root", "store", "engine_bundle", "checker_bundle"):
            value = getattr(config, name)
            if value and not Path(value).is_absolute():
                setattr(config, name, str(base / value))
        return config

    def validate(self) -> None:
        if not self.project_root:
            raise ConfigError("project_root is required")
        if self.engine not in ENGINES:
            raise ConfigError(f"unknown engine {self.engine!r}; choose from {list(ENGINES)}")
        if self.checker not in CHECKERS:
            raise ConfigError(f"unknown checker {self.checker!r}; choose from {list(CHECKERS)}")
        parse_refactoring(self.refactoring)
        parse_strategy(self.strategy)
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.limit < 1:
            raise ConfigError("limit must be >= 1")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")
        if self.reduce_budget < 1:
            raise ConfigError("reduce_budget must be >= 1")
        if self.engine_timeout <= 0 or self.checker_timeout <= 0:
            raise ConfigError("timeouts must be positive")
        if self.engine == "replay" and not self.engine_bundle:
            raise ConfigError("the replay engine needs engine_bundle")
        if self.checker == "replay" and not self.checker_bundle:
            raise ConfigError("the replay checker needs checker_bundle")
        if self.engine == "external" and not (self.engine_command or os.environ.get(ENV_ENGINE_COMMAND)):
            raise ConfigError("the external engine needs engine_command")
        if self.checker == "external" and not (self.checker_command or os.environ.get(ENV_CHECKER_COMMAND)):
            raise ConfigError("the external checker needs checker_command")

    def to_dict(self) -> dict:
        return dataclasses.asdict(self)


def build_engine(config: RunConfig):
    try:
        if config.engine == "builtin-rename":
            return BuiltinRenameEngine()
        if config.engine == "rope":
            return rope_engine(os.environ.get(ENV_ROPE_PYTHON, sys.executable), timeout=config.engine_timeout)
        if config.engine == "replay":
            return replay_engine(config.engine_bundle)
        if config.engine == "external":
            command = shlex.split(os.environ[ENV_ENGINE_COMMAND]) if os.environ.get(ENV_ENGINE_COMMAND) \
                else config.engine_command
            return ExternalEngine("external", command, timeout=config.engine_timeout)
    except InputError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown engine {config.engine!r}")


def build_checker(config: RunConfig):
    try:
        if config.checker == "micro":
            return MicroChecker()
        if config.checker == "pyre":
            typeshed = os.environ.get(ENV_PYRE_TYPESHED) or find_pyre_typeshed()
            return pyre_checker(os.environ.get(ENV_PYRE, "pyre"), typeshed=typeshed, timeout=config.checker_timeout)
        if config.checker == "replay":
            return ReplayChecker.from_bundle(config.checker_bundle)
        if config.checker == "external":
            command = shlex.split(os.environ[ENV_CHECKER_COMMAND]) if os.environ.get(ENV_CHECKER_COMMAND) \
                else config.checker_command
            return ExternalChecker("external", command, dialect=config.checker_dialect,
                                   timeout=config.checker_timeout)
    except InputError as exc:
        raise ConfigError(str(exc)) from exc
    raise ConfigError(f"unknown checker {config.checker!r}")


def _config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_file(args.config) if args.config else RunConfig()
    overrides = {
        "project_root": args.project,
        "engine": args.engine,
        "checker": args.checker,
        "refactoring": args.refactoring,
        "strategy": args.strategy,
        "seed": args.seed,
        "limit": args.limit,
        "workers": args.workers,
        "reduce": args.reduce,
        "store": args.store,
        "engine_bundle": args.engine_bundle,
        "checker_bundle": args.checker_bundle,
    }
    for name, value in overrides.items():
        if value is not None:
            setattr(config, name, value)
    config.validate()
    return config


def cmd_detect(args: argparse.Namespace) -> int:
    config = _config_from_args(args)
    engine = build_engine(config)
    checker = build_checker(config)
    refactoring = parse_refactoring(config.refactoring)
    strategy = parse_strategy(config.strategy)
    snapshot = load_project(config.project_root, config.include)
    index = enumerate_targets(snapshot, TARGET_KINDS)
    requests = generate_requests(index, refactoring, strategy, config.seed, config.limit, snapshot=snapshot,
                                 keywords=config.keywords, language_version=config.language_version)
    result = run_pipeline(snapshot, requests, engine, checker, seed=config.seed, workers=config.workers,
                          reduce=config.reduce, budget=config.reduce_budget)
    store = persist_run(result, config.to_dict(), config.store)
    print(emit_summary(result.summary), end="")
    for group in result.groups:
        keys = ", ".join(str(k) for k in group.key)
        print(f"{group.group_id}: {{{keys}}} members={len(group.members)} representative=#{group.representative}")
    print(f"store: {store.path}")
    return 2 if result.groups else 0


def _load_report(path: str) -> NormalizedReport:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise InputError(f"cannot read report {path}: {exc}") from exc
    try:
        if isinstance(data, dict):
            return normalize(TypeReport.from_dict(data))
        return NormalizedReport.from_list(data)
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path} is neither a type report nor a normalized report: {exc}") from exc


def cmd_diff(args: argparse.Namespace) -> int:
    introduced = diff_reports(_load_report(args.before), _load_report(args.after))
    print(json.dumps(introduced.to_dict(), indent=2))
    return 0


def cmd_reduce(args: argparse.Namespace) -> int:
    attempt_dir = Path(args.attempt_dir)
    store = load_run(attempt_dir.parent.parent)
    record = store.record(int(attempt_dir.name))
    if record.classification is not Classification.FAILURE:
        print(f"attempt {record.attempt_id} is {record.classification.value}, not a failure", file=sys.stderr)
        return 1
    config = RunConfig(**store.config)
    for name in ("engine", "checker", "engine_bundle", "checker_bundle"):
        value = getattr(args, name)
        if value is not None:
            setattr(config, name, value)
    config.validate()
    engine, checker = build_engine(config), build_checker(config)
    snapshot = store.snapshot(record.snapshot_id)
    result = minimize(snapshot, record.request, record.key_set, engine, checker, args.budget)
    out = write_reproduction(result, Path(args.out) if args.out else attempt_dir / "reduction")
    print(json.dumps(result.manifest(), indent=2, sort_keys=True))
    print(f"reproduction: {out}")
    return 0


LABELS = {"false-positive": TriageLabel.FALSE_POSITIVE, "confirmed": TriageLabel.CONFIRMED,
          "unreviewed": TriageLabel.UNREVIEWED}


def cmd_triage(args: argparse.Namespace) -> int:
    store = load_run(args.run_dir)
    if args.label:
        attempt, label = args.label
        if label not in LABELS:
            raise ConfigError(f"unknown label {label!r}; choose from {sorted(LABELS)}")
        store = set_label(store, int(attempt), LABELS[label])
    print(emit_summary(store.summary), end="")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    store = load_run(args.run_dir)
    print(emit_summary(store.summary))
    name = "report.json" if args.format == "json" else "report.md"
    for group in store.groups:
        path = store.path / "bugs" / group.group_id / name
        try:
            print(path.read_text(encoding="utf-8"))
        except OSError as exc:
            raise InputError(f"missing bug report for {group.group_id}: {exc}") from exc
    if args.export_bundles:
        out = Path(args.export_bundles)
        out.mkdir(parents=True, exist_ok=True)
        (out / "engine.bundle.json").write_text(json.dumps(store.engine_bundle(), indent=2, sort_keys=True))
        (out / "checker.bundle.json").write_text(json.dumps(store.checker_bundle(), indent=2, sort_keys=True))
        print(f"bundles: {out}")
    return 0


def cmd_targets(args: argparse.Namespace) -> int:
    snapshot = load_project(args.project)
    print(enumerate_targets(snapshot, args.kind or TARGET_KINDS).to_json())
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="refharness", description="Differential testing of refactoring engines.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    detect = sub.add_parser("detect", help="run the full detection pipeline")
    detect.add_argument("--config", help="JSON run configuration")
    detect.add_argument("--project", help="project root (overrides config)")
    detect.add_argument("--engine", help=f"one of {', '.join(ENGINES)}")
    detect.add_argument("--checker", help=f"one of {', '.join(CHECKERS)}")
    detect.add_argument("--engine-bundle", help="recorded outcomes for the replay engine")
    detect.add_argument("--checker-bundle", help="recorded reports for the replay checker")
    detect.add_argument("--refactoring", help="e.g. RenameMethod")
    detect.add_argument("--strategy", help="ProjectMethodNames, ProjectFieldNames or Keywords")
    detect.add_argument("--seed", type=int)
    detect.add_argument("--limit", type=int, help="number of attempts")
    detect.add_argument("--workers", type=int)
    detect.add_argument("--reduce", action=argparse.BooleanOptionalAction, default=None,
                        help="minimize each failure group's representative")
    detect.add_argument("--store", help="directory that receives run-<id>/")
    detect.set_defaults(func=cmd_detect)

    diff = sub.add_parser("diff", help="introduced errors between two reports")
    diff.add_argument("before")
    diff.add_argument("after")
    diff.set_defaults(func=cmd_diff)

    reduce = sub.add_parser("reduce", help="minimize one failing attempt of a stored run")
    reduce.add_argument("attempt_dir")
    reduce.add_argument("--engine")
    reduce.add_argument("--checker")
    reduce.add_argument("--engine-bundle")
    reduce.add_argument("--checker-bundle")
    reduce.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    reduce.add_argument("--out", help="output directory (default: <attempt_dir>/reduction)")
    reduce.set_defaults(func=cmd_reduce)

    triage = sub.add_parser("triage", help="label attempts and reprint the summary")
    triage.add_argument("run_dir")
    triage.add_argument("--label", nargs=2, metavar=("ATTEMPT", "LABEL"),
                        help="false-positive, confirmed or unreviewed")
    triage.set_defaults(func=cmd_triage)

    report = sub.add_parser("report", help="print the summary and bug reports of a stored run")
    report.add_argument("run_dir")
    report.add_argument("--format", choices=("markdown", "json"), default="markdown")
    report.add_argument("--export-bundles", metavar="DIR", help="write replay bundles for the run")
    report.set_defaults(func=cmd_report)

    targets = sub.add_parser("targets", help="list refactoring targets of a project")
    targets.add_argument("project")
    targets.add_argument("--kind", action="append", choices=TARGET_KINDS)
    targets.set_defaults(func=cmd_targets)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ConfigError, InputError, CheckError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except HarnessError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
