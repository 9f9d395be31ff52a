"""A deliberately tiny, hermetic type checker.

It knows five rules and nothing else:

* R1 parsing failure (suppresses every other rule for that file)
* R2 unbound name
* R3 undefined attribute on an instance of a snapshot class
* R4 unsupported ``< <= > >= +`` between instances of snapshot classes
* R5 missing return / parameter / initializer-attribute annotations

The rules were calibrated so that the motivating ``Mark`` program produces
the same normalized report a strict-mode external checker gives.  It is a test
oracle for the harness, not a general checker.
"""

from __future__ import annotations

import ast

from .. import __version__
from ..corpus import ProjectSnapshot, project_model
from ..syntax import BUILTIN_NAMES, ModuleModel, receiver_arg
from .codes import (
    MISSING_ATTRIBUTE_ANNOTATION,
    MISSING_PARAMETER_ANNOTATION,
    MISSING_RETURN_ANNOTATION,
    PARSING_FAILURE,
    UNBOUND_NAME,
    UNDEFINED_ATTRIBUTE,
    UNSUPPORTED_OPERAND,
)
from .model import Diagnostic, TypeReport

NAME = "micro"

# operator -> (dunder on the left operand, reflected dunder on the right, symbol)
OPERATORS = {
    ast.Lt: ("__lt__", "__gt__", "<"),
    ast.LtE: ("__le__", "__ge__", "<="),
    ast.Gt: ("__gt__", "__lt__", ">"),
    ast.GtE: ("__ge__", "__le__", ">="),
    ast.Add: ("__add__", "__radd__", "+"),
}


def micro_check(snapshot: ProjectSnapshot) -> TypeReport:
    model = project_model(snapshot)
    diagnostics: list[Diagnostic] = []
    for path, exc in model.errors.items():
        line = getattr(exc, "lineno", None) or 1
        message = getattr(exc, "msg", None) or str(exc)
        diagnostics.append(Diagnostic(path, max(1, line), PARSING_FAILURE, message))
    for module in model.modules.values():
        diagnostics.extend(_unbound_names(module))
        diagnostics.extend(_undefined_attributes(module))
        diagnostics.extend(_unsupported_operands(module))
        diagnostics.extend(_missing_annotations(module))
    return TypeReport.build(snapshot.snapshot_id, NAME, __version__, diagnostics)


def _unbound_names(module: ModuleModel):
    analysis = module.analysis
    if analysis.module.star_import:
        return
    for name, scope in analysis.names:
        if isinstance(name.ctx, ast.Store) or name.id in BUILTIN_NAMES:
            continue
        if analysis.lookup(name.id, scope) is not None:
            continue
        if name.id == "__class__" and scope.enclosing_class() is not None:
            continue
        yield Diagnostic(
            module.path,
            name.lineno,
            UNBOUND_NAME,
            f"Name `{name.id}` is used but not defined in the current scope.",
        )


def _undefined_attributes(module: ModuleModel):
    for attr, _scope in module.analysis.attributes:
        if not isinstance(attr.ctx, ast.Load):
            continue
        info = module.instance_of(attr.value)
        if info is None or info.defines(attr.attr) is not False:
            continue
        yield Diagnostic(
            module.path,
            attr.lineno,
            UNDEFINED_ATTRIBUTE,
            f"`{info.name}` has no attribute `{attr.attr}`.",
        )


def _operand_error(module: ModuleModel, left: ast.expr, right: ast.expr, op: type) -> str | None:
    dunder, reflected, symbol = OPERATORS[op]
    left_class = module.instance_of(left)
    if left_class is None:
        return None
    left_members = left_class.hierarchy_members()
    if left_members is None or dunder in left_members:
        return None
    right_class = module.instance_of(right)
    right_name = "unknown"
    if right_class is not None:
        right_members = right_class.hierarchy_members()
        if right_members is None or reflected in right_members:
            return None
        right_name = right_class.name
    return f"`{symbol}` is not supported for operand types `{left_class.name}` and `{right_name}`."


def _unsupported_operands(module: ModuleModel):
    for node in ast.walk(module.tree):
        if isinstance(node, ast.BinOp) and type(node.op) in OPERATORS:
            pairs = [(node.left, node.right, type(node.op))]
        elif isinstance(node, ast.Compare):
            operands = [node.left, *node.comparators]
            pairs = [
                (operands[i], operands[i + 1], type(op))
                for i, op in enumerate(node.ops)
                if type(op) in OPERATORS
            ]
        else:
            continue
        for left, right, op in pairs:
            message = _operand_error(module, left, right, op)
            if message:
                yield Diagnostic(module.path, node.lineno, UNSUPPORTED_OPERAND, message)


def _missing_annotations(module: ModuleModel):
    methods = {
        method
        for info in module.classes.values()
        for overloads in info.methods.values()
        for method in overloads
    }
    for node in ast.walk(module.tree):
        if not isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef)):
            continue
        if node.returns is None:
            yield Diagnostic(module.path, node.lineno, MISSING_RETURN_ANNOTATION, "Return type is not specified.")
        receiver = receiver_arg(node) if node in methods else None
        args = node.args
        for arg in [*args.posonlyargs, *args.args, *args.kwonlyargs, args.vararg, args.kwarg]:
            if arg is None or arg is receiver or arg.annotation is not None:
                continue
            yield Diagnostic(
                module.path,
                arg.lineno,
                MISSING_PARAMETER_ANNOTATION,
                f"Parameter `{arg.arg}` has no type specified.",
            )
    for info in module.classes.values():
        annotated = {
            stmt.target.id
            for stmt in info.node.body
            if isinstance(stmt, ast.AnnAssign) and isinstance(stmt.target, ast.Name)
        }
        for stmt in ast.walk(info.node):
            if isinstance(stmt, ast.AnnAssign) and isinstance(stmt.target, ast.Attribute):
                annotated.add(stmt.target.attr)
        for name, stores in info.initializer_stores.items():
            if name in annotated:
                continue
            first = min(stores, key=lambda n: (n.lineno, n.col_offset))
            yield Diagnostic(
                module.path,
                first.lineno,
                MISSING_ATTRIBUTE_ANNOTATION,
                f"Attribute `{name}` of class `{info.name}` has no type specified.",
            )
