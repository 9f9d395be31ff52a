"""Syntax-tree helpers shared by target enumeration, the rename engine and the
micro-checker.

Everything here is a flow-insensitive lexical model of a Python project:
scopes and their bindings, classes and their members, and a tiny instance
inference (``x = C(...)`` makes ``x`` an instance of ``C``).  Offsets handed
out by this module are character offsets into the decoded file text.
"""

from __future__ import annotations

import ast
import builtins
import re
import warnings
from dataclasses import dataclass, field
from pathlib import PurePosixPath
from typing import Iterator, Mapping

_NEWLINE = re.compile(r"\r\n|\r|\n")
_DEF_NAME = re.compile(r"(?:async\s+)?def\s+(\w+)")
_CLASS_NAME = re.compile(r"class\s+(\w+)")

BUILTIN_NAMES = frozenset(dir(builtins)) | {
    "__file__",
    "__name__",
    "__doc__",
    "__package__",
    "__spec__",
    "__loader__",
    "__builtins__",
    "__path__",
    "__annotations__",
}
OBJECT_MEMBERS = frozenset(dir(object)) | {"__dict__", "__module__", "__weakref__", "__slots__"}


class LineIndex:
    """Maps ``ast`` positions (1-based line, UTF-8 byte column) to character offsets."""

    def __init__(self, text: str):
        self.text = text
        self.starts = [0] + [m.end() for m in _NEWLINE.finditer(text)]

    def offset(self, lineno: int, col_byte: int) -> int:
        start = self.starts[lineno - 1]
        end = self.starts[lineno] if lineno < len(self.starts) else len(self.text)
        prefix = self.text[start:end].encode("utf-8")[:col_byte]
        return start + len(prefix.decode("utf-8", errors="ignore"))

    def node_span(self, node: ast.AST) -> tuple[int, int]:
        return (
            self.offset(node.lineno, node.col_offset),
            self.offset(node.end_lineno, node.end_col_offset),
        )

    def line_of(self, offset: int) -> int:
        lo, hi = 0, len(self.starts) - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.starts[mid] <= offset:
                lo = mid
            else:
                hi = mid - 1
        return lo + 1


def parse_source(text: str, filename: str = "<unknown>") -> ast.Module:
    """``ast.parse`` without the escape-sequence warnings of the code under test."""
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", (SyntaxWarning, DeprecationWarning))
        return ast.parse(text, filename=filename)


def module_name(path: str) -> str:
    """``pkg/sub/m.py`` -> ``pkg.sub.m``; ``pkg/__init__.py`` -> ``pkg``."""
    parts = list(PurePosixPath(path).with_suffix("").parts)
    if parts and parts[-1] == "__init__" and len(parts) > 1:
        parts.pop()
    return ".".join(parts)


def is_package_init(path: str) -> bool:
    return PurePosixPath(path).name == "__init__.py"


def identifier_span(index: LineIndex, node: ast.AST) -> tuple[int, int]:
    """Span of the name token of a def/class statement or an attribute/name node."""
    if isinstance(node, (ast.FunctionDef, ast.AsyncFunctionDef, ast.ClassDef)):
        pattern = _CLASS_NAME if isinstance(node, ast.ClassDef) else _DEF_NAME
        start = index.offset(node.lineno, node.col_offset)
        match = pattern.match(index.text, start)
        if match is None or match.group(1) != node.name:
            raise ValueError(f"cannot locate name token of {node.name!r}")
        return match.span(1)
    if isinstance(node, ast.Attribute):
        end = index.offset(node.end_lineno, node.end_col_offset)
        return end - len(node.attr), end
    if isinstance(node, ast.Name):
        return index.node_span(node)
    if isinstance(node, ast.alias):
        start = index.offset(node.lineno, node.col_offset)
        return start, start + len(node.name)
    raise TypeError(f"no identifier span for {type(node).__name__}")


# ---------------------------------------------------------------------------
# Scopes


@dataclass(eq=False)
class Binding:
    name: str
    node: ast.AST
    value: ast.expr | None = None


@dataclass(eq=False)
class Scope:
    kind: str  # module | class | function | lambda | comprehension
    node: ast.AST
    parent: Scope | None
    bindings: dict[str, list[Binding]] = field(default_factory=dict)
    global_names: set[str] = field(default_factory=set)
    nonlocal_names: set[str] = field(default_factory=set)
    star_import: bool = False

    def bind(self, name: str, node: ast.AST, value: ast.expr | None = None) -> None:
        self.bindings.setdefault(name, []).append(Binding(name, node, value))

    def enclosing_class(self) -> Scope | None:
        scope: Scope | None = self
        while scope is not None:
            if scope.kind == "class":
                return scope
            scope = scope.parent
        return None


class ScopeAnalysis(ast.NodeVisitor):
    """Builds the scope tree of one module and records every name/attribute use."""

    def __init__(self, tree: ast.Module):
        self.module = Scope("module", tree, None)
        self.scopes: dict[ast.AST, Scope] = {tree: self.module}
        self.names: list[tuple[ast.Name, Scope]] = []
        self.attributes: list[tuple[ast.Attribute, Scope]] = []
        self.scope_of_node: dict[ast.AST, Scope] = {}
        self._scope = self.module
        for stmt in tree.body:
            self.visit(stmt)
        self._hoist_globals()

    # -- traversal helpers
    def _in(self, scope: Scope, nodes) -> None:
        saved, self._scope = self._scope, scope
        try:
            for node in nodes:
                if node is not None:
                    self.visit(node)
        finally:
            self._scope = saved

    def _new_scope(self, kind: str, node: ast.AST) -> Scope:
        scope = Scope(kind, node, self._scope)
        self.scopes[node] = scope
        return scope

    def _bind_arguments(self, scope: Scope, args: ast.arguments) -> None:
        for arg in [*args.posonlyargs, *args.args, *args.kwonlyargs, args.vararg, args.kwarg]:
            if arg is not None:
                scope.bind(arg.arg, arg)

    def _visit_signature(self, args: ast.arguments) -> None:
        for default in [*args.defaults, *args.kw_defaults]:
            if default is not None:
                self.visit(default)
        for arg in [*args.posonlyargs, *args.args, *args.kwonlyargs, args.vararg, args.kwarg]:
            if arg is not None and arg.annotation is not None:
                self.visit(arg.annotation)

    def generic_visit(self, node: ast.AST) -> None:
        self.scope_of_node[node] = self._scope
        super().generic_visit(node)

    # -- definitions
    def visit_FunctionDef(self, node: ast.FunctionDef) -> None:
        self.scope_of_node[node] = self._scope
        self._scope.bind(node.name, node)
        for decorator in node.decorator_list:
            self.visit(decorator)
        self._visit_signature(node.args)
        if node.returns is not None:
            self.visit(node.returns)
        scope = self._new_scope("function", node)
        self._bind_arguments(scope, node.args)
        self._in(scope, node.body)

    visit_AsyncFunctionDef = visit_FunctionDef

    def visit_Lambda(self, node: ast.Lambda) -> None:
        self.scope_of_node[node] = self._scope
        self._visit_signature(node.args)
        scope = self._new_scope("lambda", node)
        self._bind_arguments(scope, node.args)
        self._in(scope, [node.body])

    def visit_ClassDef(self, node: ast.ClassDef) -> None:
        self.scope_of_node[node] = self._scope
        self._scope.bind(node.name, node)
        for expr in [*node.decorator_list, *node.bases, *(k.value for k in node.keywords)]:
            self.visit(expr)
        scope = self._new_scope("class", node)
        self._in(scope, node.body)

    def _visit_comprehension(self, node, elements) -> None:
        self.scope_of_node[node] = self._scope
        generators = node.generators
        self.visit(generators[0].iter)
        scope = self._new_scope("comprehension", node)
        saved, self._scope = self._scope, scope
        try:
            for i, gen in enumerate(generators):
                if i:
                    self.visit(gen.iter)
                self.visit(gen.target)
                for cond in gen.ifs:
                    self.visit(cond)
            for element in elements:
                self.visit(element)
        finally:
            self._scope = saved

    def visit_ListComp(self, node: ast.ListComp) -> None:
        self._visit_comprehension(node, [node.elt])

    visit_SetComp = visit_ListComp
    visit_GeneratorExp = visit_ListComp

    def visit_DictComp(self, node: ast.DictComp) -> None:
        self._visit_comprehension(node, [node.key, node.value])

    # -- bindings
    def visit_Global(self, node: ast.Global) -> None:
        self._scope.global_names.update(node.names)

    def visit_Nonlocal(self, node: ast.Nonlocal) -> None:
        self._scope.nonlocal_names.update(node.names)

    def visit_Assign(self, node: ast.Assign) -> None:
        self.scope_of_node[node] = self._scope
        self.visit(node.value)
        for target in node.targets:
            if isinstance(target, ast.Name):
                self._name(target, value=node.value)
            else:
                self.visit(target)

    def visit_AnnAssign(self, node: ast.AnnAssign) -> None:
        self.scope_of_node[node] = self._scope
        self.visit(node.annotation)
        if node.value is not None:
            self.visit(node.value)
        if isinstance(node.target, ast.Name):
            self._name(node.target, value=node.value)
        else:
            self.visit(node.target)

    def visit_NamedExpr(self, node: ast.NamedExpr) -> None:
        self.scope_of_node[node] = self._scope
        self.visit(node.value)
        scope = self._scope
        while scope.kind == "comprehension" and scope.parent is not None:
            scope = scope.parent
        scope.bind(node.target.id, node.target, node.value)
        self.names.append((node.target, self._scope))

    def visit_Name(self, node: ast.Name) -> None:
        self._name(node)

    def _name(self, node: ast.Name, value: ast.expr | None = None) -> None:
        self.scope_of_node[node] = self._scope
        if not isinstance(node.ctx, ast.Load):
            self._scope.bind(node.id, node, value)
        self.names.append((node, self._scope))

    def visit_Attribute(self, node: ast.Attribute) -> None:
        self.scope_of_node[node] = self._scope
        self.attributes.append((node, self._scope))
        self.visit(node.value)

    def visit_Import(self, node: ast.Import) -> None:
        self.scope_of_node[node] = self._scope
        for alias in node.names:
            self._scope.bind(alias.asname or alias.name.split(".")[0], alias)

    def visit_ImportFrom(self, node: ast.ImportFrom) -> None:
        self.scope_of_node[node] = self._scope
        for alias in node.names:
            if alias.name == "*":
                self._scope.star_import = True
            else:
                self._scope.bind(alias.asname or alias.name, alias)

    def visit_ExceptHandler(self, node: ast.ExceptHandler) -> None:
        if node.name:
            self._scope.bind(node.name, node)
        self.generic_visit(node)

    def visit_MatchAs(self, node) -> None:
        if node.name:
            self._scope.bind(node.name, node)
        self.generic_visit(node)

    def visit_MatchStar(self, node) -> None:
        if node.name:
            self._scope.bind(node.name, node)
        self.generic_visit(node)

    def visit_MatchMapping(self, node) -> None:
        if node.rest:
            self._scope.bind(node.rest, node)
        self.generic_visit(node)

    def _hoist_globals(self) -> None:
        for scope in self.scopes.values():
            if scope is self.module:
                continue
            for name in scope.global_names:
                for binding in scope.bindings.pop(name, []):
                    self.module.bindings.setdefault(name, []).append(binding)

    # -- lookup
    def lookup(self, name: str, scope: Scope) -> Scope | None:
        """Return the scope that binds ``name`` as seen from ``scope`` (None: builtin/unbound)."""
        current: Scope | None = scope
        first = True
        while current is not None:
            if name in current.global_names:
                return self.module if name in self.module.bindings else None
            if first or current.kind != "class":
                if name in current.nonlocal_names:
                    current = current.parent
                    while current is not None and current.kind not in ("function", "lambda"):
                        current = current.parent
                    first = False
                    continue
                if name in current.bindings:
                    return current
            current = current.parent
            first = False
        return None


# ---------------------------------------------------------------------------
# Classes and modules


def _decorator_names(node: ast.FunctionDef | ast.AsyncFunctionDef) -> set[str]:
    names = set()
    for dec in node.decorator_list:
        target = dec.func if isinstance(dec, ast.Call) else dec
        if isinstance(target, ast.Name):
            names.add(target.id)
        elif isinstance(target, ast.Attribute):
            names.add(target.attr)
    return names


def method_kind(node: ast.FunctionDef | ast.AsyncFunctionDef) -> str:
    decorators = _decorator_names(node)
    if "staticmethod" in decorators:
        return "static"
    if "classmethod" in decorators:
        return "class"
    return "instance"


def receiver_arg(node: ast.FunctionDef | ast.AsyncFunctionDef) -> ast.arg | None:
    """First positional parameter of a method, unless it is a staticmethod."""
    if method_kind(node) == "static":
        return None
    positional = [*node.args.posonlyargs, *node.args.args]
    return positional[0] if positional else None


@dataclass(eq=False)
class ClassInfo:
    node: ast.ClassDef
    qualname: str
    module: ModuleModel
    scope: Scope
    methods: dict[str, list[ast.FunctionDef | ast.AsyncFunctionDef]] = field(default_factory=dict)
    # receiver attribute stores (self.x = ...) inside the class's own methods
    instance_stores: dict[str, list[ast.Attribute]] = field(default_factory=dict)
    initializer_stores: dict[str, list[ast.Attribute]] = field(default_factory=dict)

    @property
    def name(self) -> str:
        return self.node.name

    @property
    def class_members(self) -> set[str]:
        return set(self.scope.bindings)

    def own_members(self) -> set[str]:
        return self.class_members | set(self.instance_stores)

    def local_bases(self) -> list[ClassInfo] | None:
        """Base classes as ClassInfo; None when any base is not a snapshot class."""
        node = self.node
        if node.keywords or node.decorator_list:
            return None
        bases: list[ClassInfo] = []
        outer = self.module.analysis.scope_of_node.get(node, self.module.analysis.module)
        for base in node.bases:
            if isinstance(base, ast.Name) and base.id == "object":
                if self.module.analysis.lookup("object", outer) is None:
                    continue
            info = self.module.class_of_expr(base, outer)
            if info is None:
                return None
            bases.append(info)
        return bases

    def hierarchy(self) -> list[ClassInfo] | None:
        """This class plus all ancestors, or None when the hierarchy is not fully local."""
        seen: list[ClassInfo] = []
        pending = [self]
        while pending:
            info = pending.pop(0)
            if info in seen:
                continue
            seen.append(info)
            bases = info.local_bases()
            if bases is None:
                return None
            pending.extend(bases)
        return seen

    def hierarchy_members(self) -> set[str] | None:
        """Members defined anywhere in the (fully local) hierarchy, excluding ``object``."""
        hierarchy = self.hierarchy()
        if hierarchy is None:
            return None
        members: set[str] = set()
        for info in hierarchy:
            members |= info.own_members()
        return members

    def defines(self, member: str) -> bool | None:
        """Whether ``member`` exists on instances; None if unknowable."""
        members = self.hierarchy_members()
        if members is None or "__getattr__" in members or "__getattribute__" in members:
            return None
        return member in members or member in OBJECT_MEMBERS


class ModuleModel:
    """Parsed file plus scope analysis and class table."""

    def __init__(self, project: ProjectModel, path: str, text: str, tree: ast.Module):
        self.project = project
        self.path = path
        self.text = text
        self.tree = tree
        self.name = module_name(path)
        self.index = LineIndex(text)
        self.analysis = ScopeAnalysis(tree)
        self.classes: dict[ast.ClassDef, ClassInfo] = {}
        self.receivers: dict[ast.arg, ClassInfo] = {}
        self.class_receivers: dict[ast.arg, ClassInfo] = {}
        self._collect_classes()

    def _qualname(self, node: ast.AST) -> str:
        parts = []
        scope = self.analysis.scope_of_node.get(node)
        while scope is not None and scope.kind != "module":
            owner = scope.node
            parts.append(getattr(owner, "name", "<lambda>"))
            scope = scope.parent
        return ".".join([self.name, *reversed(parts), node.name])

    def _collect_classes(self) -> None:
        for node in ast.walk(self.tree):
            if not isinstance(node, ast.ClassDef):
                continue
            info = ClassInfo(node, self._qualname(node), self, self.analysis.scopes[node])
            self.classes[node] = info
            for stmt in node.body:
                if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
                    info.methods.setdefault(stmt.name, []).append(stmt)
                    receiver = receiver_arg(stmt)
                    if receiver is None:
                        continue
                    if method_kind(stmt) == "class":
                        self.class_receivers[receiver] = info
                        continue
                    self.receivers[receiver] = info
                    for attr in _receiver_stores(stmt, receiver.arg):
                        info.instance_stores.setdefault(attr.attr, []).append(attr)
                        if stmt.name == "__init__":
                            info.initializer_stores.setdefault(attr.attr, []).append(attr)

    # -- resolution
    def binding_of(self, name: ast.Name) -> list[Binding] | None:
        scope = self.analysis.scope_of_node.get(name)
        if scope is None:
            return None
        owner = self.analysis.lookup(name.id, scope)
        if owner is None:
            return None
        return owner.bindings.get(name.id)

    def class_of_binding(self, binding: Binding) -> ClassInfo | None:
        if isinstance(binding.node, ast.ClassDef):
            return self.classes.get(binding.node)
        if isinstance(binding.node, ast.alias):
            return self.project.imported_class(self, binding.node)
        return None

    def class_of_expr(self, expr: ast.expr, scope: Scope | None = None) -> ClassInfo | None:
        """The snapshot class an expression names (``C`` or ``mod.C``), if any."""
        if isinstance(expr, ast.Name):
            if scope is not None:
                owner = self.analysis.lookup(expr.id, scope)
                bindings = owner.bindings.get(expr.id) if owner else None
            else:
                bindings = self.binding_of(expr)
            if not bindings or len(bindings) != 1:
                return None
            return self.class_of_binding(bindings[0])
        if isinstance(expr, ast.Attribute) and isinstance(expr.value, ast.Name):
            bindings = self.binding_of(expr.value)
            if bindings and len(bindings) == 1 and isinstance(bindings[0].node, ast.alias):
                module = self.project.imported_module(self, bindings[0].node)
                if module is not None:
                    return module.top_level_class(expr.attr)
        return None

    def top_level_class(self, name: str) -> ClassInfo | None:
        bindings = self.analysis.module.bindings.get(name)
        if bindings and len(bindings) == 1 and isinstance(bindings[0].node, ast.ClassDef):
            return self.classes.get(bindings[0].node)
        return None

    def instance_of(self, expr: ast.expr, _depth: int = 0) -> ClassInfo | None:
        """Snapshot class whose instance ``expr`` evaluates to, when evident."""
        if _depth > 8:
            return None
        if isinstance(expr, ast.Call):
            return self.class_of_expr(expr.func)
        if isinstance(expr, ast.Name):
            bindings = self.binding_of(expr)
            if not bindings:
                return None
            found: ClassInfo | None = None
            for binding in bindings:
                if isinstance(binding.node, ast.arg):
                    info = self.receivers.get(binding.node)
                elif binding.value is not None:
                    info = self.instance_of(binding.value, _depth + 1)
                else:
                    info = None
                if info is None or (found is not None and info is not found):
                    return None
                found = info
            return found
        return None

    def receiver_class(self, expr: ast.expr) -> ClassInfo | None:
        """Class when ``expr`` is the ``cls`` parameter of a classmethod."""
        if isinstance(expr, ast.Name):
            bindings = self.binding_of(expr)
            if bindings and len(bindings) == 1 and isinstance(bindings[0].node, ast.arg):
                return self.class_receivers.get(bindings[0].node)
        return None


def _receiver_stores(method: ast.AST, receiver: str) -> Iterator[ast.Attribute]:
    stack = list(ast.iter_child_nodes(method))
    while stack:
        node = stack.pop()
        if isinstance(node, ast.ClassDef):
            continue
        if (
            isinstance(node, ast.Attribute)
            and isinstance(node.ctx, ast.Store)
            and isinstance(node.value, ast.Name)
            and node.value.id == receiver
        ):
            yield node
        stack.extend(ast.iter_child_nodes(node))


class ProjectModel:
    """All parsable modules of a snapshot, with cross-module class resolution."""

    def __init__(self, files: Mapping[str, str]):
        self.modules: dict[str, ModuleModel] = {}
        self.errors: dict[str, SyntaxError | ValueError] = {}
        self.by_name: dict[str, ModuleModel] = {}
        for path in sorted(files):
            if not path.endswith(".py"):
                continue
            text = files[path]
            try:
                tree = parse_source(text, path)
            except (SyntaxError, ValueError) as exc:
                self.errors[path] = exc
                continue
            model = ModuleModel(self, path, text, tree)
            self.modules[path] = model
            self.by_name.setdefault(model.name, model)

    def _resolve_module(self, importer: ModuleModel, module: str | None, level: int) -> str | None:
        if level == 0:
            return module
        package = importer.name.split(".")
        if not is_package_init(importer.path):
            package = package[:-1]
        if level - 1 > len(package):
            return None
        base = package[: len(package) - (level - 1)]
        return ".".join([*base, module] if module else base)

    def imported_class(self, importer: ModuleModel, alias: ast.alias) -> ClassInfo | None:
        node = _import_statement(importer.tree, alias)
        if not isinstance(node, ast.ImportFrom):
            return None
        name = self._resolve_module(importer, node.module, node.level)
        target = self.by_name.get(name) if name else None
        if target is None or target is importer:
            return None
        return target.top_level_class(alias.name)

    def imported_module(self, importer: ModuleModel, alias: ast.alias) -> ModuleModel | None:
        node = _import_statement(importer.tree, alias)
        if isinstance(node, ast.Import):
            if alias.asname is None and "." in alias.name:
                return None
            return self.by_name.get(alias.name)
        if isinstance(node, ast.ImportFrom):
            base = self._resolve_module(importer, node.module, node.level)
            if base is None:
                return None
            return self.by_name.get(f"{base}.{alias.name}" if base else alias.name)
        return None

    def all_classes(self) -> Iterator[ClassInfo]:
        for model in self.modules.values():
            yield from model.classes.values()

    def class_by_qualname(self, qualname: str) -> ClassInfo | None:
        for info in self.all_classes():
            if info.qualname == qualname:
                return info
        return None


def _import_statement(tree: ast.Module, alias: ast.alias) -> ast.AST | None:
    return _import_parents(tree).get(id(alias))


def _import_parents(tree: ast.Module) -> dict[int, ast.AST]:
    cached = getattr(tree, "_refharness_import_parents", None)
    if cached is None:
        cached = {}
        for node in ast.walk(tree):
            if isinstance(node, (ast.Import, ast.ImportFrom)):
                for alias in node.names:
                    cached[id(alias)] = node
        tree._refharness_import_parents = cached  # type: ignore[attr-defined]
    return cached


# ---------------------------------------------------------------------------
# Definition sites


@dataclass(frozen=True)
class Definition:
    kind: str  # class | method | function | field
    qualified_name: str
    start: int
    end: int
    node: ast.AST


def collect_definitions(model: ModuleModel) -> list[Definition]:
    """Definition sites of one module in document order.

    Fields yield a single canonical site: the first class-level assignment,
    else the first receiver store in ``__init__``, else the first receiver
    store anywhere in the class's own methods.
    """
    index = model.index
    found: list[Definition] = []
    for node in ast.walk(model.tree):
        if isinstance(node, ast.ClassDef):
            info = model.classes[node]
            start, end = identifier_span(index, node)
            found.append(Definition("class", info.qualname, start, end, node))
            for stmt in node.body:
                if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
                    start, end = identifier_span(index, stmt)
                    found.append(Definition("method", f"{info.qualname}.{stmt.name}", start, end, stmt))
            found.extend(_field_definitions(info))
    for stmt in model.tree.body:
        if isinstance(stmt, (ast.FunctionDef, ast.AsyncFunctionDef)):
            start, end = identifier_span(index, stmt)
            found.append(Definition("function", f"{model.name}.{stmt.name}", start, end, stmt))
    found.sort(key=lambda d: (d.start, d.kind))
    return found


def class_level_field_targets(info: ClassInfo) -> dict[str, list[ast.Name]]:
    targets: dict[str, list[ast.Name]] = {}
    for stmt in info.node.body:
        if isinstance(stmt, ast.Assign):
            names = [t for t in stmt.targets if isinstance(t, ast.Name)]
        elif isinstance(stmt, ast.AnnAssign) and isinstance(stmt.target, ast.Name):
            names = [stmt.target]
        else:
            continue
        for name in names:
            targets.setdefault(name.id, []).append(name)
    return targets


def _field_definitions(info: ClassInfo) -> list[Definition]:
    index = info.module.index
    sites: dict[str, ast.AST] = {}
    for name, nodes in class_level_field_targets(info).items():
        sites[name] = nodes[0]
    for name, nodes in info.initializer_stores.items():
        sites.setdefault(name, min(nodes, key=lambda n: (n.lineno, n.col_offset)))
    for name, nodes in info.instance_stores.items():
        sites.setdefault(name, min(nodes, key=lambda n: (n.lineno, n.col_offset)))
    result = []
    for name, node in sites.items():
        start, end = identifier_span(index, node)
        result.append(Definition("field", f"{info.qualname}.{name}", start, end, node))
    return result
