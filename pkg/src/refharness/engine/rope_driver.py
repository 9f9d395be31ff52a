"""Child-process driver that performs one refactoring with Rope.

Usage: ``python -m refharness.engine.rope_driver <project> <request.json>``

Rope's own refusals (``RefactoringError``) are written to the refusal file and
the process exits 0; anything else propagates and exits nonzero.
"""

from __future__ import annotations

import json
import sys
from pathlib import Path


def _changes(project, resource, request: dict):
    from rope.refactor import extract, inline, move, rename, usefunction

    kind = request["refactoring_type"]
    params = request.get("params", {})
    offset = request["start"]
    if kind in ("RenameMethod", "RenameField", "RenameClass"):
        return rename.Rename(project, resource, offset).get_changes(params["new_name"])
    if kind == "InlineMethod":
        return inline.create_inline(project, resource, offset).get_changes()
    if kind == "ExtractMethod":
        start, end = params["region"]
        return extract.ExtractMethod(project, resource, start, end).get_changes(params["extracted_name"])
    if kind == "UseFunction":
        return usefunction.UseFunction(project, resource, offset).get_changes()
    if kind == "MoveFieldMethod":
        mover = move.create_move(project, resource, offset)
        destination = params["destination"]
        if isinstance(mover, move.MoveMethod):
            # rope moves a method onto an attribute of the receiver
            dest_attr = params.get("dest_attr") or destination.rsplit(".", 1)[-1]
            return mover.get_changes(dest_attr, params.get("new_name"))
        return mover.get_changes(destination)
    raise ValueError(f"unsupported refactoring {kind}")


def run(project_dir: str, request_file: str) -> int:
    from rope.base import libutils
    from rope.base.exceptions import RefactoringError
    from rope.base.project import Project

    request = json.loads(Path(request_file).read_text(encoding="utf-8"))
    project = Project(project_dir)
    try:
        resource = libutils.path_to_resource(project, str(Path(project_dir) / request["file"]))
        try:
            changes = _changes(project, resource, request)
        except RefactoringError as exc:
            Path(request["refusal_file"]).write_text(json.dumps({"reason": str(exc)}), encoding="utf-8")
            return 0
        project.do(changes)
    finally:
        project.close()
    return 0


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else argv
    if len(argv) != 2:
        print(__doc__, file=sys.stderr)
        return 2
    return run(argv[0], argv[1])


if __name__ == "__main__":
    sys.exit(main())
