from __future__ import annotations

import json
from pathlib import Path

import pytest

from refharness.cli import RunConfig, main
from refharness.errors import ConfigError

PROJECTS = Path(__file__).parent / "fixtures" / "projects"


def _detect(tmp_path, *extra, store="runs"):
    return main(["detect", "--project", str(PROJECTS / "hermetic"), "--store", str(tmp_path / store),
                 "--limit", "50", "--seed", "1", *extra])


def _run_dir(tmp_path, store="runs") -> Path:
    (run,) = (tmp_path / store).glob("run-*")
    return run


def test_detect_reports_one_group_and_exits_2(tmp_path, capsys):
    assert _detect(tmp_path) == 2
    out = capsys.readouterr().out
    assert "{Unsupported operand [58]} members=3" in out
    groups = json.loads((_run_dir(tmp_path) / "groups.json").read_text())
    assert [g["key"] for g in groups] == [[["Unsupported operand", 58]]]


def test_detect_clean_run_exits_0(tmp_path):
    assert main(["detect", "--project", str(PROJECTS / "dog"), "--store", str(tmp_path),
                 "--refactoring", "RenameClass", "--strategy", "ProjectMethodNames"]) == 0


def test_unknown_engine_fails_before_any_attempt(tmp_path, capsys):
    assert _detect(tmp_path, "--engine", "eclipse") == 1
    assert "unknown engine" in capsys.readouterr().err
    assert not (tmp_path / "runs").exists()


def test_invalid_numbers_are_rejected(tmp_path):
    assert _detect(tmp_path, "--limit", "0") == 1
    assert _detect(tmp_path, "--seed", "-4") == 1


def test_replay_fidelity(tmp_path):
    assert _detect(tmp_path, "--no-reduce") == 2
    original = _run_dir(tmp_path)
    assert main(["report", str(original), "--export-bundles", str(tmp_path / "bundles")]) == 0
    assert _detect(tmp_path, "--no-reduce", "--engine", "replay", "--checker", "replay",
                   "--engine-bundle", str(tmp_path / "bundles" / "engine.bundle.json"),
                   "--checker-bundle", str(tmp_path / "bundles" / "checker.bundle.json"), store="replayed") == 2
    replayed = _run_dir(tmp_path, "replayed")
    for name in ("attempts", "snapshots"):
        left = sorted(p.relative_to(original) for p in (original / name).rglob("*") if p.is_file())
        right = sorted(p.relative_to(replayed) for p in (replayed / name).rglob("*") if p.is_file())
        assert left == right
        for rel in left:
            assert (original / rel).read_bytes() == (replayed / rel).read_bytes(), rel
    for name in ("summary.json", "summary.txt", "groups.json"):
        assert (original / name).read_bytes() == (replayed / name).read_bytes()


def test_config_file_and_relative_paths(tmp_path):
    config = {"project_root": str(PROJECTS / "hermetic"), "store": "out", "limit": 5, "reduce": False,
              "strategy": "Keywords"}
    path = tmp_path / "run.json"
    path.write_text(json.dumps(config))
    assert main(["detect", "--config", str(path)]) == 2
    assert list((tmp_path / "out").glob("run-*"))
    path.write_text(json.dumps({**config, "colour": "blue"}))
    with pytest.raises(ConfigError):
        RunConfig.from_file(path)
    assert main(["detect", "--config", str(path)]) == 1


def test_triage_and_report_commands(tmp_path, capsys):
    _detect(tmp_path, "--no-reduce")
    run = _run_dir(tmp_path)
    member = json.loads((run / "groups.json").read_text())[0]["members"][0]
    assert main(["triage", str(run), "--label", str(member), "false-positive"]) == 0
    assert capsys.readouterr().out.strip().splitlines()[-1].split() == ["Total", "12", "0", "2", "1", "9"]
    assert main(["triage", str(run), "--label", str(member), "nonsense"]) == 1
    assert main(["report", str(run)]) == 0
    assert "# Rename Method introduces Unsupported operand [58]" in capsys.readouterr().out


def test_reduce_command(tmp_path, capsys):
    _detect(tmp_path, "--no-reduce")
    run = _run_dir(tmp_path)
    member = json.loads((run / "groups.json").read_text())[0]["representative"]
    assert main(["reduce", str(run / "attempts" / str(member)), "--out", str(tmp_path / "min")]) == 0
    manifest = json.loads((tmp_path / "min" / "manifest.json").read_text())
    assert manifest["key_set"] == [["Unsupported operand", 58]]
    assert manifest["lines"] <= 18
    correct = next(d for d in (run / "attempts").iterdir()
                   if json.loads((d / "outcome.json").read_text())["classification"] == "Correct")
    assert main(["reduce", str(correct)]) == 1


def test_diff_command(tmp_path, capsys):
    before = tmp_path / "before.json"
    after = tmp_path / "after.json"
    before.write_text(json.dumps([["A", 1, 2], ["B", 2, 1]]))
    after.write_text(json.dumps([["A", 1, 3], ["C", 3, 2]]))
    assert main(["diff", str(before), str(after)]) == 0
    assert json.loads(capsys.readouterr().out)["introduced"] == [["A", 1, 1], ["C", 3, 2]]
    assert main(["diff", str(before), str(tmp_path / "missing.json")]) == 1


def test_targets_command(capsys):
    assert main(["targets", str(PROJECTS / "motivating"), "--kind", "method"]) == 0
    names = [t["qualified_name"] for t in json.loads(capsys.readouterr().out)["targets"]]
    assert names == ["mark.Mark.__init__", "mark.Mark.key", "mark.Mark.__lt__"]
