"""Built-in rename engine.

It renames a declaration and every reference the lexical model can bind to
it, and checks nothing else: dunders, reserved words and name collisions are
all accepted.  That makes it a deterministic offline source of broken
refactorings.

What counts as a reference to member ``m`` of class ``C``:

* ``x.m`` where ``x`` is evidently an instance of exactly ``C`` (the receiver
  of one of ``C``'s methods, ``C(...)``, or a name bound only to those),
  ``cls.m`` inside a classmethod of ``C``, and ``C.m``;
* bare ``m`` in ``C``'s class body.

Subclass receivers are deliberately not followed.  A class rename covers
names bound to the class, ``from mod import C`` aliases and ``mod.C``.
"""

from __future__ import annotations

import ast
from collections import defaultdict

from .. import __version__
from ..corpus import ProjectSnapshot, project_model
from ..errors import ContractError
from ..strategy import RefactoringRequest, RefactoringType
from ..syntax import ClassInfo, ModuleModel, ProjectModel, class_level_field_targets, collect_definitions, identifier_span
from .base import Applied, CannotApply, EngineOutcome

NAME = "builtin-rename"
_KIND = {
    RefactoringType.RENAME_METHOD: "method",
    RefactoringType.RENAME_FIELD: "field",
    RefactoringType.RENAME_CLASS: "class",
}

Edits = dict[str, set[tuple[int, int]]]


class BuiltinRenameEngine:
    name = NAME
    version = __version__
    supported = frozenset(_KIND)
    reentrant = True

    def apply(self, snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
        return builtin_rename(snapshot, request)


def builtin_rename(snapshot: ProjectSnapshot, request: RefactoringRequest) -> EngineOutcome:
    if request.refactoring_type not in _KIND:
        raise ContractError(f"{NAME} cannot perform {request.refactoring_type.value}")
    target = request.target
    model = project_model(snapshot)
    module = model.modules.get(target.file)
    if module is None:
        return CannotApply(f"{target.file} is missing or does not parse", NAME)
    definition = next(
        (d for d in collect_definitions(module) if (d.start, d.end) == target.span and d.kind == _KIND[request.refactoring_type]),
        None,
    )
    if definition is None:
        return CannotApply(f"no {_KIND[request.refactoring_type]} declared at {target.file}{list(target.span)}", NAME)

    old = definition.qualified_name.rsplit(".", 1)[-1]
    new = request.new_name
    if old == new:
        return Applied(snapshot, True, NAME)
    if definition.kind == "class":
        edits = _class_edits(model, module.classes[definition.node])
    else:
        owner = _owner_class(module, definition.node)
        edits = _member_edits(model, owner, old)
    changes = {path: _splice(snapshot.files[path], spans, old, new) for path, spans in edits.items()}
    return Applied(snapshot.replace_files(changes), False, NAME)


def _owner_class(module: ModuleModel, node: ast.AST) -> ClassInfo:
    for info in module.classes.values():
        if node in info.node.body:
            return info
        if any(node in stores for stores in info.instance_stores.values()):
            return info
        if any(node in names for names in class_level_field_targets(info).values()):
            return info
    raise LookupError("member has no owning class")


def _member_edits(model: ProjectModel, info: ClassInfo, member: str) -> Edits:
    edits: Edits = defaultdict(set)
    home = info.module
    index = home.index
    for method in info.methods.get(member, []):
        edits[home.path].add(identifier_span(index, method))
    for name in class_level_field_targets(info).get(member, []):
        edits[home.path].add(identifier_span(index, name))
    for attr in info.instance_stores.get(member, []):
        edits[home.path].add(identifier_span(index, attr))
    for name, scope in home.analysis.names:
        if name.id == member and home.analysis.lookup(member, scope) is info.scope:
            edits[home.path].add(identifier_span(index, name))
    for module in model.modules.values():
        for attr, _scope in module.analysis.attributes:
            if attr.attr != member:
                continue
            value = attr.value
            if (
                module.instance_of(value) is info
                or module.receiver_class(value) is info
                or module.class_of_expr(value) is info
            ):
                edits[module.path].add(identifier_span(module.index, attr))
    return edits


def _class_edits(model: ProjectModel, info: ClassInfo) -> Edits:
    edits: Edits = defaultdict(set)
    old = info.name
    edits[info.module.path].add(identifier_span(info.module.index, info.node))
    for module in model.modules.values():
        renamed_aliases = set()
        for node in ast.walk(module.tree):
            if isinstance(node, ast.ImportFrom):
                for alias in node.names:
                    if alias.name == old and model.imported_class(module, alias) is info:
                        edits[module.path].add(identifier_span(module.index, alias))
                        if alias.asname is None:
                            renamed_aliases.add(alias)
        for name, scope in module.analysis.names:
            if name.id != old:
                continue
            owner = module.analysis.lookup(old, scope)
            bindings = owner.bindings.get(old, []) if owner is not None else []
            if any(b.node is info.node or b.node in renamed_aliases for b in bindings):
                edits[module.path].add(identifier_span(module.index, name))
        for attr, _scope in module.analysis.attributes:
            if attr.attr == old and module.class_of_expr(attr) is info:
                edits[module.path].add(identifier_span(module.index, attr))
    return edits


def _splice(text: str, spans: set[tuple[int, int]], old: str, new: str) -> str:
    ordered = sorted(spans)
    for (_, end), (start, _) in zip(ordered, ordered[1:]):
        if start < end:
            raise RuntimeError(f"overlapping rename edits at offset {start}")
    pieces, cursor = [], 0
    for start, end in ordered:
        if text[start:end] != old:
            raise RuntimeError(f"expected {old!r} at offset {start}, found {text[start:end]!r}")
        pieces += [text[cursor:start], new]
        cursor = end
    pieces.append(text[cursor:])
    return "".join(pieces)
