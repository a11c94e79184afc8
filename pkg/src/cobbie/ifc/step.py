"""ISO 10303-21 (STEP Physical File) reader.

Parses the HEADER and DATA sections of an ``.ifc`` file into plain entity
records. Reference resolution is deferred to :mod:`cobbie.ifc.graph`, so
forward references are legal.
"""
from __future__ import annotations

import bisect
import re
from dataclasses import dataclass, field
from typing import Any, Union


class ParseError(Exception):
    def __init__(self, line: int, column: int, message: str):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column
        self.message = message


# -- attribute values -------------------------------------------------------

@dataclass(frozen=True)
class Ref:
    id: int

    def __repr__(self) -> str:
        return f"#{self.id}"


@dataclass(frozen=True)
class EnumValue:
    token: str


@dataclass(frozen=True)
class Typed:
    """A typed scalar such as ``IFCLENGTHMEASURE(0.885)``."""
    type_tag: str
    value: Any


@dataclass(frozen=True)
class Binary:
    hex: str


class _Marker:
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name

    def __repr__(self) -> str:
        return self.name

    def __reduce__(self):
        return self.name


DERIVED = _Marker("DERIVED")
UNKNOWN = _Marker("UNKNOWN")  # logical .U.

# None is Null; bool is Boolean; tuple is List.
AttributeValue = Union[None, _Marker, int, float, str, EnumValue, bool, Ref, Typed, Binary, tuple]


# -- string escapes ---------------------------------------------------------

_ESCAPE_RE = re.compile(
    r"\\X2\\((?:[0-9A-Fa-f]{4})*)\\X0\\"
    r"|\\X4\\((?:[0-9A-Fa-f]{8})*)\\X0\\"
    r"|\\X\\([0-9A-Fa-f]{2})"
    r"|\\S\\(.)"
    r"|\\P[A-I]\\"
    r"|\\\\",
    re.DOTALL,
)


def _decode_escape(m: re.Match) -> str:
    if m.group(1) is not None:
        raw = bytes.fromhex(m.group(1))
        return raw.decode("utf-16-be", errors="surrogatepass")
    if m.group(2) is not None:
        h = m.group(2)
        return "".join(chr(int(h[i:i + 8], 16)) for i in range(0, len(h), 8))
    if m.group(3) is not None:
        return chr(int(m.group(3), 16))
    if m.group(4) is not None:
        return chr(ord(m.group(4)) + 128)
    if m.group(0) == "\\\\":
        return "\\"
    return ""  # code page switch directive


def decode_string(body: str) -> str:
    """Decode the inside of a STEP string literal (quotes already stripped)."""
    body = body.replace("''", "'")
    if "\\" not in body:
        return body
    return _ESCAPE_RE.sub(_decode_escape, body)


def encode_string(text: str) -> str:
    """Inverse of :func:`decode_string`; non-ASCII goes through ``\\X2\\``."""
    out: list[str] = []
    pending: list[str] = []

    def flush():
        if pending:
            raw = "".join(pending).encode("utf-16-be", errors="surrogatepass")
            out.append("\\X2\\" + raw.hex().upper() + "\\X0\\")
            pending.clear()

    for ch in text:
        if 32 <= ord(ch) < 127:
            flush()
            if ch == "'":
                out.append("''")
            elif ch == "\\":
                out.append("\\\\")
            else:
                out.append(ch)
        else:
            pending.append(ch)
    flush()
    return "".join(out)


# -- tokenizer --------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>/\*.*?\*/)
  | (?P<string>'(?:[^']|'')*')
  | (?P<ref>\#\d+)
  | (?P<enum>\.[A-Za-z_][A-Za-z0-9_]*\.)
  | (?P<real>[+-]?\d+\.\d*(?:[eE][+-]?\d+)?)
  | (?P<int>[+-]?\d+)
  | (?P<binary>"[0-9A-Fa-f]*")
  | (?P<keyword>!?[A-Za-z_][A-Za-z0-9_\-]*)
  | (?P<punct>[(),;=$*])
    """,
    re.VERBOSE | re.DOTALL,
)


@dataclass
class RawEntity:
    id: int
    type: str
    attributes: tuple
    line: int


@dataclass
class StepFile:
    schema_id: str
    header: dict[str, tuple] = field(default_factory=dict)
    entities: list[RawEntity] = field(default_factory=list)
    duplicates: list[int] = field(default_factory=list)


MAX_NESTING = 256


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.depth = 0
        self._line_starts = [0] + [m.end() for m in re.finditer("\n", text)]
        self.tokens: list[tuple[str, str, int]] = []
        self._tokenize()
        self.pos = 0

    def where(self, offset: int) -> tuple[int, int]:
        i = bisect.bisect_right(self._line_starts, offset) - 1
        return i + 1, offset - self._line_starts[i] + 1

    def error(self, message: str, offset: int | None = None) -> ParseError:
        if offset is None:
            offset = self.tokens[self.pos][2] if self.pos < len(self.tokens) else len(self.text)
        line, col = self.where(offset)
        return ParseError(line, col, message)

    def _tokenize(self) -> None:
        text = self.text
        pos = 0
        n = len(text)
        append = self.tokens.append
        match = _TOKEN_RE.match
        while pos < n:
            m = match(text, pos)
            if m is None:
                raise self.error(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            if kind not in ("ws", "comment"):
                append((kind, m.group(), pos))
            pos = m.end()

    # token helpers
    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def next(self) -> tuple[str, str, int]:
        if self.pos >= len(self.tokens):
            raise self.error("unexpected end of file")
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, off = self.next()
        if text != value:
            raise self.error(f"expected {value!r}, found {text!r}", off)

    def keyword(self, value: str) -> bool:
        tok = self.peek()
        if tok and tok[0] == "keyword" and tok[1].upper() == value:
            self.pos += 1
            return True
        return False

    # grammar
    def parse_file(self) -> StepFile:
        if not self.keyword("ISO-10303-21"):
            raise self.error("expected ISO-10303-21")
        self.expect(";")
        if not self.keyword("HEADER"):
            raise self.error("expected HEADER section")
        self.expect(";")
        header: dict[str, tuple] = {}
        while not self.keyword("ENDSEC"):
            kind, name, off = self.next()
            if kind != "keyword":
                raise self.error(f"expected header entity, found {name!r}", off)
            header[name.upper()] = self.parse_params()
            self.expect(";")
        self.expect(";")
        sf = StepFile(schema_id=_schema_from_header(header), header=header)
        seen: set[int] = set()
        while self.keyword("DATA"):
            if self.peek() and self.peek()[1] == "(":
                self.parse_params()
            self.expect(";")
            while not self.keyword("ENDSEC"):
                ent = self.parse_instance()
                if ent.id in seen:
                    sf.duplicates.append(ent.id)
                    continue
                seen.add(ent.id)
                sf.entities.append(ent)
            self.expect(";")
        if not self.keyword("END-ISO-10303-21"):
            raise self.error("expected DATA section or END-ISO-10303-21")
        self.expect(";")
        if self.peek() is not None:
            raise self.error("trailing content after END-ISO-10303-21")
        return sf

    def parse_instance(self) -> RawEntity:
        kind, text, off = self.next()
        if kind != "ref":
            raise self.error(f"expected entity instance name, found {text!r}", off)
        eid = int(text[1:])
        line, _ = self.where(off)
        self.expect("=")
        tok = self.peek()
        if tok and tok[1] == "(":
            # complex instance: (TYPEA(...) TYPEB(...))
            self.next()
            parts: list[str] = []
            attrs: list = []
            while True:
                k, t, o = self.next()
                if t == ")":
                    break
                if k != "keyword":
                    raise self.error(f"expected entity type, found {t!r}", o)
                parts.append(t.upper())
                attrs.extend(self.parse_params())
            if not parts:
                raise self.error("empty complex entity instance", off)
            etype = parts[0]
            attributes = tuple(attrs)
        else:
            k, t, o = self.next()
            if k != "keyword":
                raise self.error(f"expected entity type, found {t!r}", o)
            etype = t.upper()
            attributes = self.parse_params()
        self.expect(";")
        return RawEntity(eid, etype, attributes, line)

    def parse_params(self) -> tuple:
        self.expect("(")
        self.depth += 1
        if self.depth > MAX_NESTING:
            raise self.error("nesting too deep")
        try:
            return self._param_items()
        finally:
            self.depth -= 1

    def _param_items(self) -> tuple:
        items: list = []
        tok = self.peek()
        if tok and tok[1] == ")":
            self.next()
            return ()
        while True:
            items.append(self.parse_value())
            kind, text, off = self.next()
            if text == ")":
                return tuple(items)
            if text != ",":
                raise self.error(f"expected ',' or ')', found {text!r}", off)

    def parse_value(self) -> AttributeValue:
        kind, text, off = self.next()
        if kind == "string":
            return decode_string(text[1:-1])
        if kind == "ref":
            return Ref(int(text[1:]))
        if kind == "int":
            return int(text)
        if kind == "real":
            return float(text)
        if kind == "enum":
            tok = text[1:-1].upper()
            if tok == "T":
                return True
            if tok == "F":
                return False
            if tok == "U":
                return UNKNOWN
            return EnumValue(text[1:-1])
        if kind == "binary":
            return Binary(text[1:-1])
        if kind == "punct":
            if text == "$":
                return None
            if text == "*":
                return DERIVED
            if text == "(":
                self.pos -= 1
                return self.parse_params()
        if kind == "keyword":
            args = self.parse_params()
            if len(args) != 1:
                raise self.error(f"typed parameter {text} takes one value", off)
            return Typed(text.upper(), args[0])
        raise self.error(f"unexpected token {text!r}", off)


def _schema_from_header(header: dict[str, tuple]) -> str:
    fs = header.get("FILE_SCHEMA")
    if fs and fs[0] and isinstance(fs[0], tuple) and isinstance(fs[0][0], str):
        return fs[0][0].upper()
    return ""


def parse_text(text: str) -> StepFile:
    p = _Parser(text)
    try:
        return p.parse_file()
    except RecursionError:
        raise p.error("nesting too deep") from None


def parse_bytes(data: bytes) -> StepFile:
    # ISO 10303-21 is 7-bit; tolerate stray latin-1 bytes from sloppy exporters
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        text = data.decode("latin-1")
    return parse_text(text)
