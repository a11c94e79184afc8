"""Closure-compiling interpreter and the per-session execution environment.

Every AST node compiles to a Python closure ``ev(frame)``; each evaluation
of a node costs one step against the environment's budget. Collection-building
operations additionally charge one step per produced element so memory use
stays proportional to the budget.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from typing import Any, Callable

from . import parser as ast
from .parser import BQLSyntaxError, parse
from .values import Builtin, Function, format_value, type_name

DEFAULT_STEP_BUDGET = 1_000_000
DEFAULT_OUTPUT_LIMIT = 4_000
MAX_CALL_DEPTH = 64
TRUNCATION_MARKER = "\n[output truncated]"
_INT_LIMIT = 2 ** 63


class BQLRuntimeError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line


class BudgetExceeded(Exception):
    pass


class ToolLoadError(Exception):
    def __init__(self, message: str, line: int | None = None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.message = message
        self.line = line


class _Return(Exception):
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


class Frame:
    __slots__ = ("vars", "parent")

    def __init__(self, vars: dict, parent: "Frame | None" = None):
        self.vars = vars
        self.parent = parent


@dataclass
class ExecResult:
    printed: str
    error: str | None
    steps_used: int
    error_kind: str | None = None  # ParseError / RuntimeError / BudgetExceeded
    error_line: int | None = None

    @property
    def ok(self) -> bool:
        return self.error is None

    def feedback(self) -> str:
        """Text handed back to the agent as the execution observation."""
        parts = []
        if self.printed:
            parts.append(self.printed)
        if self.error is not None:
            where = f" (line {self.error_line})" if self.error_line else ""
            parts.append(f"{self.error_kind or 'Error'}{where}: {self.error}")
        return "\n".join(parts) if parts else "(no output)"

    def to_dict(self) -> dict:
        return {
            "printed": self.printed, "error": self.error, "steps_used": self.steps_used,
            "error_kind": self.error_kind, "error_line": self.error_line,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ExecResult":
        return cls(d["printed"], d.get("error"), d.get("steps_used", 0), d.get("error_kind"), d.get("error_line"))


class _Ctx:
    """Mutable per-call counters shared by every compiled closure of one environment."""
    __slots__ = ("steps", "limit", "depth", "chunks", "out_len", "out_limit", "truncated")

    def __init__(self):
        self.reset(DEFAULT_STEP_BUDGET, DEFAULT_OUTPUT_LIMIT)

    def reset(self, limit: int, out_limit: int) -> None:
        self.steps = 0
        self.limit = limit
        self.depth = 0
        self.chunks: list[str] = []
        self.out_len = 0
        self.out_limit = out_limit
        self.truncated = False

    def charge(self, n: int) -> None:
        self.steps += n
        if self.steps > self.limit:
            raise BudgetExceeded()

    def write(self, text: str) -> None:
        if self.truncated:
            return
        room = self.out_limit - self.out_len
        if len(text) > room:
            text = text[:room]
            self.truncated = True
        self.chunks.append(text)
        self.out_len += len(text)

    def printed(self) -> str:
        s = "".join(self.chunks)
        return s + TRUNCATION_MARKER if self.truncated else s


def _is_num(v) -> bool:
    return (type(v) is int) or (type(v) is float)


def _check_int(v, line):
    if type(v) is int and not -_INT_LIMIT < v < _INT_LIMIT:
        raise BQLRuntimeError("integer overflow", line)
    return v


def values_equal(a, b) -> bool:
    if isinstance(a, bool) or isinstance(b, bool):
        return type(a) is type(b) and a == b
    if _is_num(a) and _is_num(b):
        return a == b
    if type(a) is not type(b):
        return False
    if isinstance(a, list):
        return len(a) == len(b) and all(values_equal(x, y) for x, y in zip(a, b))
    if isinstance(a, dict):
        return a.keys() == b.keys() and all(values_equal(a[k], b[k]) for k in a)
    return a == b


class Compiler:
    def __init__(self, ctx: _Ctx, tools: dict, builtins: dict, caller: Callable):
        self.ctx = ctx
        self.tools = tools
        self.builtins = builtins
        self.call = caller

    def block(self, stmts: list) -> Callable:
        compiled = [self.stmt(s) for s in stmts]
        if not compiled:
            return lambda fr: None
        if len(compiled) == 1:
            return compiled[0]

        def run(fr):
            value = None
            for s in compiled:
                value = s(fr)
            return value
        return run

    # -- statements ---------------------------------------------------------
    def stmt(self, node) -> Callable:
        c = self.ctx
        if isinstance(node, ast.ExprStmt):
            return self.expr(node.expr)
        if isinstance(node, ast.Let):
            name, val = node.name, self.expr(node.value)

            def let(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                fr.vars[name] = val(fr)
            return let
        if isinstance(node, ast.Assign):
            name, val, line = node.name, self.expr(node.value), node.line

            def assign(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                v = val(fr)
                f = fr
                while f is not None:
                    if name in f.vars:
                        f.vars[name] = v
                        return
                    f = f.parent
                raise BQLRuntimeError(f"unknown identifier: {name}", line)
            return assign
        if isinstance(node, ast.IndexAssign):
            tgt, idx, val, line = self.expr(node.target), self.expr(node.index), self.expr(node.value), node.line

            def index_assign(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                container, key, v = tgt(fr), idx(fr), val(fr)
                if isinstance(container, list):
                    if type(key) is not int:
                        raise BQLRuntimeError(f"type mismatch: list index must be int, got {type_name(key)}", line)
                    if not -len(container) <= key < len(container):
                        raise BQLRuntimeError("index out of range", line)
                    container[key] = v
                elif isinstance(container, dict):
                    if not isinstance(key, str):
                        raise BQLRuntimeError(f"type mismatch: map key must be str, got {type_name(key)}", line)
                    container[key] = v
                else:
                    raise BQLRuntimeError(f"type mismatch: cannot assign into {type_name(container)}", line)
            return index_assign
        if isinstance(node, ast.FnDecl):
            name, make = node.name, self.lambda_(node.fn)

            def decl(fr):
                fr.vars[name] = make(fr)
            return decl
        if isinstance(node, ast.If):
            cond, then = self.expr(node.cond), self.block(node.then)
            orelse = self.block(node.orelse) if node.orelse is not None else None
            line = node.line

            def if_(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                t = cond(fr)
                if type(t) is not bool:
                    raise BQLRuntimeError(f"type mismatch: condition must be bool, got {type_name(t)}", line)
                if t:
                    return then(fr)
                if orelse is not None:
                    return orelse(fr)
                return None
            return if_
        if isinstance(node, ast.For):
            var, it, body, line = node.var, self.expr(node.iterable), self.block(node.body), node.line

            def for_(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                seq = it(fr)
                if isinstance(seq, list):
                    items = list(seq)
                elif isinstance(seq, dict):
                    items = list(seq.keys())
                elif isinstance(seq, str):
                    items = list(seq)
                else:
                    raise BQLRuntimeError(f"type mismatch: cannot iterate over {type_name(seq)}", line)
                vars_ = fr.vars
                for x in items:
                    vars_[var] = x
                    body(fr)
            return for_
        if isinstance(node, ast.Return):
            val = self.expr(node.value) if node.value is not None else (lambda fr: None)
            line = node.line

            def ret(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                if c.depth == 0:
                    raise BQLRuntimeError("return outside function", line)
                raise _Return(val(fr))
            return ret
        raise BQLRuntimeError(f"unsupported statement {type(node).__name__}", node.line)

    # -- expressions --------------------------------------------------------
    def lambda_(self, node: ast.Lambda) -> Callable:
        body = self.block(node.body)
        params, name = list(node.params), node.name
        c = self.ctx

        def make(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            return Function(name, params, body, fr)
        return make

    def expr(self, node) -> Callable:
        c = self.ctx
        if isinstance(node, ast.Literal):
            value = node.value

            def lit(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                return value
            return lit
        if isinstance(node, ast.Name):
            return self.name(node)
        if isinstance(node, ast.ListLit):
            items = [self.expr(i) for i in node.items]

            def list_(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                return [i(fr) for i in items]
            return list_
        if isinstance(node, ast.MapLit):
            entries = [(self.expr(k), self.expr(v)) for k, v in node.entries]
            line = node.line

            def map_(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                out = {}
                for k, v in entries:
                    key = k(fr)
                    if not isinstance(key, str):
                        raise BQLRuntimeError(f"type mismatch: map key must be str, got {type_name(key)}", line)
                    out[key] = v(fr)
                return out
            return map_
        if isinstance(node, ast.Unary):
            return self.unary(node)
        if isinstance(node, ast.Binary):
            return self.binary(node)
        if isinstance(node, ast.Logical):
            return self.logical(node)
        if isinstance(node, ast.Call):
            return self.call_expr(node)
        if isinstance(node, ast.Index):
            return self.index(node)
        if isinstance(node, ast.Lambda):
            return self.lambda_(node)
        raise BQLRuntimeError(f"unsupported expression {type(node).__name__}", node.line)

    def name(self, node: ast.Name) -> Callable:
        c, name, line = self.ctx, node.name, node.line
        tools, builtins = self.tools, self.builtins

        def lookup(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            f = fr
            while f is not None:
                v = f.vars
                if name in v:
                    return v[name]
                f = f.parent
            if name in tools:
                return tools[name]
            if name in builtins:
                return builtins[name]
            raise BQLRuntimeError(f"unknown identifier: {name}", line)
        return lookup

    def unary(self, node: ast.Unary) -> Callable:
        c, operand, line = self.ctx, self.expr(node.operand), node.line
        if node.op == "-":
            def neg(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                v = operand(fr)
                if not _is_num(v):
                    raise BQLRuntimeError(f"type mismatch: cannot negate {type_name(v)}", line)
                return _check_int(-v, line)
            return neg

        def not_(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            v = operand(fr)
            if type(v) is not bool:
                raise BQLRuntimeError(f"type mismatch: 'not' needs bool, got {type_name(v)}", line)
            return not v
        return not_

    def logical(self, node: ast.Logical) -> Callable:
        c, left, right, line, is_and = self.ctx, self.expr(node.left), self.expr(node.right), node.line, node.op == "and"

        def logic(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            a = left(fr)
            if type(a) is not bool:
                raise BQLRuntimeError(f"type mismatch: '{node.op}' needs bool, got {type_name(a)}", line)
            if a is not is_and:
                return a
            b = right(fr)
            if type(b) is not bool:
                raise BQLRuntimeError(f"type mismatch: '{node.op}' needs bool, got {type_name(b)}", line)
            return b
        return logic

    def binary(self, node: ast.Binary) -> Callable:
        c, left, right, op, line = self.ctx, self.expr(node.left), self.expr(node.right), node.op, node.line

        def mismatch(a, b):
            return BQLRuntimeError(f"type mismatch: {type_name(a)} {op} {type_name(b)}", line)

        if op == "+":
            def add(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                a, b = left(fr), right(fr)
                if _is_num(a) and _is_num(b):
                    return _check_int(a + b, line)
                if isinstance(a, str) or isinstance(b, str):
                    if isinstance(a, str) and isinstance(b, str):
                        s = a + b
                    else:
                        s = (a if isinstance(a, str) else format_value(a)) + (b if isinstance(b, str) else format_value(b))
                    c.charge(len(s) // 64)
                    return s
                if isinstance(a, list) and isinstance(b, list):
                    c.charge(len(a) + len(b))
                    return a + b
                raise mismatch(a, b)
            return add

        if op in ("-", "*", "/", "%"):
            def arith(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                a, b = left(fr), right(fr)
                if not (_is_num(a) and _is_num(b)):
                    raise mismatch(a, b)
                if op == "-":
                    return _check_int(a - b, line)
                if op == "*":
                    return _check_int(a * b, line)
                if b == 0:
                    raise BQLRuntimeError("division by zero", line)
                if op == "/":
                    return a / b
                return a % b
            return arith

        if op in ("==", "!="):
            want = op == "=="

            def eq(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                return values_equal(left(fr), right(fr)) is want
            return eq

        import operator
        cmp = {"<": operator.lt, "<=": operator.le, ">": operator.gt, ">=": operator.ge}[op]

        def compare(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            a, b = left(fr), right(fr)
            if (_is_num(a) and _is_num(b)) or (isinstance(a, str) and isinstance(b, str)):
                return cmp(a, b)
            raise mismatch(a, b)
        return compare

    def index(self, node: ast.Index) -> Callable:
        c, tgt, idx, line = self.ctx, self.expr(node.target), self.expr(node.index), node.line

        def index(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            container, key = tgt(fr), idx(fr)
            if isinstance(container, (list, str)):
                if type(key) is not int:
                    raise BQLRuntimeError(f"type mismatch: index must be int, got {type_name(key)}", line)
                if not -len(container) <= key < len(container):
                    raise BQLRuntimeError(f"index out of range: {key}", line)
                return container[key]
            if isinstance(container, dict):
                if not isinstance(key, str):
                    raise BQLRuntimeError(f"type mismatch: map key must be str, got {type_name(key)}", line)
                return container.get(key)
            raise BQLRuntimeError(f"type mismatch: cannot index {type_name(container)}", line)
        return index

    def call_expr(self, node: ast.Call) -> Callable:
        c, args, line, call = self.ctx, [self.expr(a) for a in node.args], node.line, self.call
        if isinstance(node.callee, ast.Name):
            name = node.callee.name
            tools, builtins = self.tools, self.builtins

            def call_named(fr):
                c.steps += 1
                if c.steps > c.limit:
                    raise BudgetExceeded()
                f = fr
                fn = None
                while f is not None:
                    if name in f.vars:
                        fn = f.vars[name]
                        break
                    f = f.parent
                else:
                    fn = tools.get(name) or builtins.get(name)
                    if fn is None:
                        raise BQLRuntimeError(f"unknown builtin: {name}", line)
                return call(fn, [a(fr) for a in args], line)
            return call_named
        callee = self.expr(node.callee)

        def call_value(fr):
            c.steps += 1
            if c.steps > c.limit:
                raise BudgetExceeded()
            return call(callee(fr), [a(fr) for a in args], line)
        return call_value


class ExecEnvironment:
    """Persistent, sandboxed interpreter state for one exploration session.

    ``bindings`` survive across :meth:`execute` calls; the step counter and
    printed output are per call.
    """

    def __init__(self, graph, step_budget: int = DEFAULT_STEP_BUDGET, output_limit: int = DEFAULT_OUTPUT_LIMIT,
                 docs: Callable[[str], str] | None = None):
        from .builtins import make_builtins

        if step_budget <= 0 or output_limit <= 0:
            raise ValueError("step_budget and output_limit must be positive")
        self.graph = graph
        self.step_budget = step_budget
        self.output_limit = output_limit
        self.bindings: dict[str, Any] = {}
        self.installed_tools: dict[str, Function] = {}
        self.tool_sources: dict[str, str] = {}
        self.executions = 0
        self._ctx = _Ctx()
        self.builtins: dict[str, Builtin] = make_builtins(self, docs=docs)
        self._compiler = Compiler(self._ctx, self.installed_tools, self.builtins, self.call)

    # -- calling convention -------------------------------------------------
    def call(self, fn, args: list, line: int | None = None):
        c = self._ctx
        if isinstance(fn, Builtin):
            if not fn.min_args <= len(args) <= fn.max_args:
                want = str(fn.min_args) if fn.min_args == fn.max_args else f"{fn.min_args}-{fn.max_args}"
                raise BQLRuntimeError(f"arity: {fn.name} takes {want} argument(s), got {len(args)}", line)
            try:
                return fn.impl(*args)
            except BQLRuntimeError as e:
                if e.line is None:
                    e.line = line
                raise
        if isinstance(fn, Function):
            if len(args) != len(fn.params):
                raise BQLRuntimeError(
                    f"arity: {fn.name} takes {len(fn.params)} argument(s), got {len(args)}", line)
            c.depth += 1
            try:
                if c.depth > MAX_CALL_DEPTH:
                    raise BQLRuntimeError("recursion depth exceeded", line)
                try:
                    return fn.body(Frame(dict(zip(fn.params, args)), fn.frame))
                except _Return as r:
                    return r.value
            finally:
                c.depth -= 1
        raise BQLRuntimeError(f"type mismatch: {type_name(fn)} is not callable", line)

    @property
    def ctx(self) -> _Ctx:
        return self._ctx

    def type_of(self, eid: int) -> str:
        from ..ifc.schema import canonical_name
        return canonical_name(self.graph.entities[eid].ifc_type)

    def format(self, value) -> str:
        return format_value(value, self.type_of)

    # -- public API ---------------------------------------------------------
    def install_tool(self, tool) -> None:
        """Install a tool (anything with ``name`` and ``source``, or a source string)."""
        if isinstance(tool, str):
            source, expected = tool, None
        else:
            source, expected = tool.source, getattr(tool, "name", None)
        try:
            stmts = parse(source)
        except BQLSyntaxError as e:
            raise ToolLoadError(e.message, e.line) from None
        decls = [s for s in stmts if isinstance(s, ast.FnDecl)]
        if len(stmts) != 1 or len(decls) != 1:
            raise ToolLoadError("tool source must contain exactly one 'fn name(...) { ... }' definition",
                                stmts[0].line if stmts else 1)
        decl = decls[0]
        if expected and decl.name != expected:
            raise ToolLoadError(f"tool is named {expected!r} but source defines {decl.name!r}", decl.line)
        if decl.name in self.builtins:
            raise ToolLoadError(f"tool name {decl.name!r} collides with a builtin", decl.line)
        make = self._compiler.lambda_(decl.fn)
        self._ctx.reset(self.step_budget, self.output_limit)
        fn = make(Frame({}))
        fn.is_tool = True
        self.installed_tools[decl.name] = fn
        self.tool_sources[decl.name] = source

    def enable_docs(self, docs: Callable[[str], str]) -> None:
        """Expose a documentation lookup to programs as the ``docs(query)`` builtin."""
        from .builtins import make_builtins
        self.builtins["docs"] = make_builtins(self, docs=docs)["docs"]

    def uninstall_tool(self, name: str) -> None:
        self.installed_tools.pop(name, None)
        self.tool_sources.pop(name, None)

    def execute(self, code: str) -> ExecResult:
        self.executions += 1
        c = self._ctx
        c.reset(self.step_budget, self.output_limit)
        try:
            stmts = parse(code)
        except BQLSyntaxError as e:
            return ExecResult("", e.message, 0, "ParseError", e.line)
        except RecursionError:
            return ExecResult("", "nesting too deep", 0, "ParseError", None)
        old_limit = sys.getrecursionlimit()
        if old_limit < 12000:
            sys.setrecursionlimit(12000)
        error = kind = line = None
        try:
            program = self._compiler.block(stmts)
            program(Frame(self.bindings))
        except BudgetExceeded:
            error, kind = "step budget exceeded", "BudgetExceeded"
        except BQLRuntimeError as e:
            error, kind, line = e.message, "RuntimeError", e.line
        except _Return:
            error, kind = "return outside function", "RuntimeError"
        except RecursionError:
            error, kind = "recursion depth exceeded", "RuntimeError"
        except MemoryError:
            error, kind = "out of memory", "RuntimeError"
        except Exception as e:  # error-as-data: nothing escapes to the harness
            error, kind = f"internal error: {type(e).__name__}: {e}", "RuntimeError"
        finally:
            sys.setrecursionlimit(old_limit)
        steps = min(c.steps, c.limit)
        return ExecResult(c.printed(), error, steps, kind, line)
