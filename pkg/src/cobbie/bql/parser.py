"""Lexer and recursive-descent parser for BQL, the agent's action language."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Any

MAX_NESTING = 64


class BQLSyntaxError(Exception):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"line {line}, column {column}: {message}")
        self.message = message
        self.line = line
        self.column = column


KEYWORDS = {"let", "fn", "if", "else", "for", "in", "return", "true", "false", "null", "and", "or", "not"}

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+)
  | (?P<comment>(?://|\#)[^\n]*)
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<string>"(?:[^"\\\n]|\\.)*"|'(?:[^'\\\n]|\\.)*')
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<op>==|!=|<=|>=|&&|\|\||[-+*/%<>=!(){}\[\],;:.])
    """,
    re.VERBOSE,
)

_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "\\": "\\", '"': '"', "'": "'", "0": "\0"}


@dataclass(frozen=True)
class Token:
    kind: str  # number, string, ident, kw, op, eof
    value: Any
    line: int
    col: int


def _unescape(body: str, line: int, col: int) -> str:
    out = []
    i = 0
    while i < len(body):
        ch = body[i]
        if ch == "\\":
            nxt = body[i + 1]
            if nxt not in _ESCAPES:
                raise BQLSyntaxError(f"unknown escape \\{nxt}", line, col + i)
            out.append(_ESCAPES[nxt])
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def tokenize(src: str) -> list[Token]:
    tokens: list[Token] = []
    pos, line, line_start = 0, 1, 0
    n = len(src)
    while pos < n:
        m = _TOKEN_RE.match(src, pos)
        col = pos - line_start + 1
        if m is None:
            ch = src[pos]
            if ch in "\"'":
                raise BQLSyntaxError("unterminated string", line, col)
            raise BQLSyntaxError(f"unexpected character {ch!r}", line, col)
        kind = m.lastgroup
        text = m.group()
        if kind == "number":
            value = float(text) if any(c in text for c in ".eE") else int(text)
            tokens.append(Token("number", value, line, col))
        elif kind == "string":
            tokens.append(Token("string", _unescape(text[1:-1], line, col + 1), line, col))
        elif kind == "ident":
            tokens.append(Token("kw" if text in KEYWORDS else "ident", text, line, col))
        elif kind == "op":
            tokens.append(Token("op", text, line, col))
        newlines = text.count("\n")
        if newlines:
            line += newlines
            line_start = pos + text.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("eof", None, line, pos - line_start + 1))
    return tokens


# -- AST --------------------------------------------------------------------

@dataclass
class Node:
    line: int = field(default=0, kw_only=True)


@dataclass
class Literal(Node):
    value: Any


@dataclass
class Name(Node):
    name: str


@dataclass
class ListLit(Node):
    items: list


@dataclass
class MapLit(Node):
    entries: list  # [(key expr, value expr)]


@dataclass
class Unary(Node):
    op: str
    operand: Node


@dataclass
class Binary(Node):
    op: str
    left: Node
    right: Node


@dataclass
class Logical(Node):
    op: str  # and / or
    left: Node
    right: Node


@dataclass
class Call(Node):
    callee: Node
    args: list


@dataclass
class Index(Node):
    target: Node
    index: Node


@dataclass
class Lambda(Node):
    params: list
    body: list
    name: str = "<lambda>"


@dataclass
class Let(Node):
    name: str
    value: Node


@dataclass
class Assign(Node):
    name: str
    value: Node


@dataclass
class IndexAssign(Node):
    target: Node
    index: Node
    value: Node


@dataclass
class FnDecl(Node):
    name: str
    fn: Lambda


@dataclass
class If(Node):
    cond: Node
    then: list
    orelse: list | None


@dataclass
class For(Node):
    var: str
    iterable: Node
    body: list


@dataclass
class Return(Node):
    value: Node | None


@dataclass
class ExprStmt(Node):
    expr: Node


# -- parser -----------------------------------------------------------------

class Parser:
    def __init__(self, src: str):
        self.tokens = tokenize(src)
        self.pos = 0
        self.depth = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        if t.kind != "eof":
            self.pos += 1
        return t

    def error(self, message: str, tok: Token | None = None) -> BQLSyntaxError:
        t = tok or self.tok
        return BQLSyntaxError(message, t.line, t.col)

    def at(self, kind: str, value: Any = None) -> bool:
        t = self.tok
        return t.kind == kind and (value is None or t.value == value)

    def at_op(self, *ops: str) -> bool:
        return self.tok.kind == "op" and self.tok.value in ops

    def accept_op(self, op: str) -> bool:
        if self.at_op(op):
            self.pos += 1
            return True
        return False

    def expect_op(self, op: str) -> Token:
        if not self.at_op(op):
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.value)
            raise self.error(f"expected '{op}', found {found}")
        return self.advance()

    def expect_ident(self) -> str:
        if self.tok.kind != "ident":
            found = "end of input" if self.tok.kind == "eof" else repr(self.tok.value)
            raise self.error(f"expected identifier, found {found}")
        return self.advance().value

    def nest(self):
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error("nesting too deep")

    # statements
    def program(self) -> list[Node]:
        stmts = []
        while self.tok.kind != "eof":
            if self.accept_op(";"):
                continue
            stmts.append(self.statement())
        return stmts

    def block(self) -> list[Node]:
        self.expect_op("{")
        self.nest()
        stmts = []
        while not self.at_op("}"):
            if self.tok.kind == "eof":
                raise self.error("expected '}', found end of input")
            if self.accept_op(";"):
                continue
            stmts.append(self.statement())
        self.advance()
        self.depth -= 1
        return stmts

    def statement(self) -> Node:
        t = self.tok
        if t.kind == "kw":
            if t.value == "let":
                self.advance()
                name = self.expect_ident()
                self.expect_op("=")
                return Let(name, self.expression(), line=t.line)
            if t.value == "fn" and self.tokens[self.pos + 1].kind == "ident":
                self.advance()
                name = self.advance().value
                fn = self.function_rest(name, t)
                return FnDecl(name, fn, line=t.line)
            if t.value == "if":
                return self.if_statement()
            if t.value == "for":
                self.advance()
                var = self.expect_ident()
                if not self.at("kw", "in"):
                    raise self.error("expected 'in'")
                self.advance()
                iterable = self.expression()
                return For(var, iterable, self.block(), line=t.line)
            if t.value == "return":
                self.advance()
                if self.at_op(";", "}") or self.tok.kind == "eof":
                    return Return(None, line=t.line)
                return Return(self.expression(), line=t.line)
        expr = self.expression()
        if self.at_op("="):
            eq = self.advance()
            value = self.expression()
            if isinstance(expr, Name):
                return Assign(expr.name, value, line=t.line)
            if isinstance(expr, Index):
                return IndexAssign(expr.target, expr.index, value, line=t.line)
            raise self.error("invalid assignment target", eq)
        return ExprStmt(expr, line=t.line)

    def if_statement(self) -> If:
        t = self.advance()
        cond = self.expression()
        then = self.block()
        orelse = None
        if self.at("kw", "else"):
            self.advance()
            orelse = [self.if_statement()] if self.at("kw", "if") else self.block()
        return If(cond, then, orelse, line=t.line)

    def function_rest(self, name: str, start: Token) -> Lambda:
        self.expect_op("(")
        params: list[str] = []
        if not self.at_op(")"):
            while True:
                p = self.expect_ident()
                if p in params:
                    raise self.error(f"duplicate parameter {p}")
                params.append(p)
                if not self.accept_op(","):
                    break
        self.expect_op(")")
        return Lambda(params, self.block(), name, line=start.line)

    # expressions, lowest precedence first
    def expression(self) -> Node:
        self.nest()
        node = self.or_expr()
        self.depth -= 1
        return node

    def or_expr(self) -> Node:
        node = self.and_expr()
        while self.at("kw", "or") or self.at_op("||"):
            t = self.advance()
            node = Logical("or", node, self.and_expr(), line=t.line)
        return node

    def and_expr(self) -> Node:
        node = self.not_expr()
        while self.at("kw", "and") or self.at_op("&&"):
            t = self.advance()
            node = Logical("and", node, self.not_expr(), line=t.line)
        return node

    def not_expr(self) -> Node:
        if self.at("kw", "not") or self.at_op("!"):
            t = self.advance()
            self.nest()
            node = Unary("not", self.not_expr(), line=t.line)
            self.depth -= 1
            return node
        return self.comparison()

    def comparison(self) -> Node:
        node = self.additive()
        while self.at_op("==", "!=", "<", "<=", ">", ">="):
            t = self.advance()
            node = Binary(t.value, node, self.additive(), line=t.line)
        return node

    def additive(self) -> Node:
        node = self.term()
        while self.at_op("+", "-"):
            t = self.advance()
            node = Binary(t.value, node, self.term(), line=t.line)
        return node

    def term(self) -> Node:
        node = self.unary()
        while self.at_op("*", "/", "%"):
            t = self.advance()
            node = Binary(t.value, node, self.unary(), line=t.line)
        return node

    def unary(self) -> Node:
        if self.at_op("-"):
            t = self.advance()
            self.nest()
            node = Unary("-", self.unary(), line=t.line)
            self.depth -= 1
            return node
        return self.postfix()

    def postfix(self) -> Node:
        node = self.primary()
        while True:
            if self.at_op("("):
                t = self.advance()
                args = []
                if not self.at_op(")"):
                    while True:
                        args.append(self.expression())
                        if not self.accept_op(","):
                            break
                self.expect_op(")")
                node = Call(node, args, line=t.line)
            elif self.at_op("["):
                t = self.advance()
                idx = self.expression()
                self.expect_op("]")
                node = Index(node, idx, line=t.line)
            else:
                return node

    def primary(self) -> Node:
        t = self.tok
        if t.kind == "number" or t.kind == "string":
            self.advance()
            return Literal(t.value, line=t.line)
        if t.kind == "ident":
            self.advance()
            return Name(t.value, line=t.line)
        if t.kind == "kw":
            if t.value in ("true", "false", "null"):
                self.advance()
                return Literal({"true": True, "false": False, "null": None}[t.value], line=t.line)
            if t.value == "fn":
                self.advance()
                return self.function_rest("<lambda>", t)
        if t.kind == "op":
            if t.value == "(":
                self.advance()
                node = self.expression()
                self.expect_op(")")
                return node
            if t.value == "[":
                self.advance()
                items = []
                while not self.at_op("]"):
                    items.append(self.expression())
                    if not self.accept_op(","):
                        break
                self.expect_op("]")
                return ListLit(items, line=t.line)
            if t.value == "{":
                self.advance()
                entries = []
                while not self.at_op("}"):
                    if self.tok.kind == "ident":
                        key: Node = Literal(self.advance().value, line=t.line)
                    else:
                        key = self.expression()
                    self.expect_op(":")
                    entries.append((key, self.expression()))
                    if not self.accept_op(","):
                        break
                self.expect_op("}")
                return MapLit(entries, line=t.line)
        if t.kind == "eof":
            raise self.error("unexpected end of input")
        raise self.error(f"unexpected {t.value!r}")


def parse(src: str) -> list[Node]:
    return Parser(src).program()


def called_names(src: str) -> set[str]:
    """Names used in call position anywhere in ``src`` (empty if unparseable)."""
    try:
        stmts = parse(src)
    except BQLSyntaxError:
        return set()
    found: set[str] = set()

    def visit(obj):
        if isinstance(obj, Call) and isinstance(obj.callee, Name):
            found.add(obj.callee.name)
        if isinstance(obj, Node):
            for v in vars(obj).values():
                visit(v)
        elif isinstance(obj, (list, tuple)):
            for v in obj:
                visit(v)

    visit(stmts)
    return found
