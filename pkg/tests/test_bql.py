import random
import time

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cobbie.bql import (
    CATALOGUE,
    TRUNCATION_MARKER,
    BQLSyntaxError,
    ExecEnvironment,
    ExecResult,
    ToolLoadError,
    called_names,
    format_value,
    grammar_text,
    parse,
)
from cobbie.ifc import load_model

from conftest import MODELS

INFINITE = "fn f(n){ if n > 60 { return 0 } f(n+1) + f(n+1) }\nf(0)"


@pytest.fixture
def env():
    return ExecEnvironment(load_model(MODELS / "two_walls.ifc"))


def run(env, code):
    return env.execute(code)


def out(env, code):
    r = env.execute(code)
    assert r.ok, r.feedback()
    return r.printed


# --- semantics -------------------------------------------------------------

@pytest.mark.parametrize("code, expected", [
    ("print(1 + 2 * 3)", "7\n"),
    ("print((1 + 2) * 3)", "9\n"),
    ("print(7 % 3, 7 / 2, 6 / 3, -7 % 3, 2.5 * 2)", "1 3.5 2 2 5\n"),
    ("print([1] + [2])", "[1, 2]\n"),
    ('print("a" + "b")', "ab\n"),
    ("print(null == null, 1 == 1.0, [1] == [1])", "true true true\n"),
    ("print(1 < 2 and not false, false or true, !true || false && true)", "true true false\n"),
    ("fn d(x){ x * 2 } print(d(4))", "8\n"),
    ("fn f(){ return } print(f())", "null\n"),
    ("let i = 0\nfor x in [1,2] { i = i + x }\nprint(i)", "3\n"),
    ('for c in "ab" { print(c) }', "a\nb\n"),
    ("let f = fn(x){ x + 1 }; print(map([1,2], f))", "[2, 3]\n"),
    ('let m = {a: 1, "b c": [1]}; m["a"] = 5; print(m["a"], m["b c"])', "5 [1]\n"),
    ("let l = [1, 2]; l[0] = 9; print(l)", "[9, 2]\n"),
    ("if 1 > 2 { print(1) } else { print(2) }", "2\n"),
    ("// comment\n# another\nprint(3)", "3\n"),
    ('print("a\\nb")', "a\nb\n"),
    ("print(filter([1,2,3,4], fn(x){ x % 2 == 0 }))", "[2, 4]\n"),
    ("print(sum([1, 2.5]), min([3, 1]), max([3, 1]), unique([1, 1, 2]))", "3.5 1 3 [1, 2]\n"),
])
def test_semantics(env, code, expected):
    assert out(env, code) == expected


def test_for_iterates_a_snapshot(env):
    assert out(env, "let l = [1]\nfor x in l { l = l + [x] }\nprint(count(l))") == "2\n"


def test_bindings_persist_across_executions(env):
    assert out(env, "let z = 3") == ""
    assert out(env, "print(z)") == "3\n"
    assert env.executions == 2


def test_model_builtins(env):
    assert out(env, 'print(count(by_type("IfcWall")), name_of(by_type("IfcWall")[0]))') == "2 Wall A\n"


# --- in-band errors ----------------------------------------------------------

@pytest.mark.parametrize("code, kind, message, line", [
    ("let x = 1\nlet y = (2\nprint(y)", "ParseError", "expected ')', found 'print'", 3),
    ("print(y)", "RuntimeError", "unknown identifier: y", 1),
    ("\n\nprint(1/0)", "RuntimeError", "division by zero", 3),
    ("print(1.0/0)", "RuntimeError", "division by zero", 1),
    ("let a = [1]; print(a[5])", "RuntimeError", "index out of range: 5", 1),
    ('print(1 < "a")', "RuntimeError", "type mismatch: int < str", 1),
    ("if 1 { print(1) }", "RuntimeError", "type mismatch: condition must be bool, got int", 1),
    ("print(count(1,2))", "RuntimeError", "arity: count takes 1 argument(s), got 2", 1),
    ("print(typeof(1))", "RuntimeError", "type mismatch: typeof expects an entity, got int", 1),
    ("print(9223372036854775807 + 1)", "RuntimeError", "integer overflow", 1),
    ("print(2 * 4611686018427387904)", "RuntimeError", "integer overflow", 1),
    ("fn f(n){ f(n+1) } f(0)", "RuntimeError", "recursion depth exceeded", 1),
    ('print(source("x"))', "RuntimeError", "no tool named 'x'", 1),
])
def test_errors(env, code, kind, message, line):
    r = run(env, code)
    assert (r.error_kind, r.error, r.error_line) == (kind, message, line)
    assert r.feedback().endswith(f"{kind} (line {line}): {message}")


def test_unknown_attribute_lists_available(env):
    r = run(env, 'print(attr(by_type("IfcWall")[0], "Foo"))')
    assert r.error.startswith("IfcWall has no attribute 'Foo'; available: GlobalId,")


def test_output_before_error_is_kept(env):
    r = run(env, "print(1)\nprint(1/0)")
    assert r.printed == "1\n" and r.feedback() == "1\n\nRuntimeError (line 2): division by zero"


def test_infinite_program_trips_budget_quickly(env):
    t = time.perf_counter()
    r = run(env, INFINITE)
    assert time.perf_counter() - t < 1.0
    assert r.error_kind == "BudgetExceeded" and r.error == "step budget exceeded"


def test_small_budget():
    e = ExecEnvironment(load_model(MODELS / "two_walls.ifc"), step_budget=50)
    assert e.execute("let s = 0\nfor x in [1,2,3,4,5,6,7,8,9,10,11,12,13,14,15,16,17,18,19,20] { s = s + x }").error \
        == "step budget exceeded"
    with pytest.raises(ValueError):
        ExecEnvironment(load_model(MODELS / "two_walls.ifc"), step_budget=0)


def test_output_truncation():
    e = ExecEnvironment(load_model(MODELS / "two_walls.ifc"), output_limit=10)
    r = e.execute('print("0123456789abcdef")')
    assert r.ok and r.printed == "0123456789" + TRUNCATION_MARKER


def test_empty_program(env):
    r = run(env, "")
    assert r.ok and r.feedback() == "(no output)"


def test_result_roundtrip(env):
    r = run(env, "print(1)\nprint(y)")
    assert ExecResult.from_dict(r.to_dict()) == r


# --- tools ---------------------------------------------------------------------

@pytest.mark.parametrize("src, message", [
    ("fn a(){1} fn b(){2}", "tool source must contain exactly one 'fn name(...) { ... }' definition"),
    ("let x = 1", "tool source must contain exactly one 'fn name(...) { ... }' definition"),
    ("fn count(x){x}", "tool name 'count' collides with a builtin"),
    ("fn ok(x) { x", "expected '}', found end of input"),
])
def test_tool_install_errors(env, src, message):
    with pytest.raises(ToolLoadError) as ei:
        env.install_tool(src)
    assert str(ei.value).endswith(message)


def test_tool_install_and_source(env):
    env.install_tool("fn t1(x){ x + 1 }")
    assert out(env, "print(t1(1))") == "2\n"
    assert "fn t1" in out(env, 'print(source("t1"))')
    env.uninstall_tool("t1")
    assert run(env, "print(t1(1))").error == "unknown builtin: t1"


def test_called_names():
    assert {"by_type", "count", "helper"} <= called_names('helper(count(by_type("IfcWall")))')
    assert called_names("fn (") == set()


def test_grammar_mentions_every_builtin():
    text = grammar_text()
    for name in CATALOGUE:
        assert name in text


def test_format_value():
    assert format_value([1, "a", None, True, 2.0]) == '[1, "a", null, true, 2]'


def test_parse_error_type():
    with pytest.raises(BQLSyntaxError):
        parse("let = 1")


# --- fuzzing -------------------------------------------------------------------

SEEDS = [
    'print(count(by_type("IfcWall")))',
    "let x = [1, 2, 3]\nfor i in x { print(i * 2) }",
    'fn f(a, b) { if a > b { return a } else { return b } }\nprint(f(1, 2))',
    'let m = {k: 1}\nm["k"] = m["k"] + 1\nprint(m)',
    'let w = by_type("IfcWall")\nprint(map(w, fn(e){ name_of(e) }))',
    "print(psets(by_type(\"IfcWall\")[0]))",
    INFINITE,
    "fn g(n){ g(n) } g(1)",
    'print(attr(by_type("IfcWallStandardCase")[0], "Name"))',
]
ATOMS = ["(", ")", "{", "}", "[", "]", ",", ";", "\n", "fn", "let", "for", "in", "if", "else", "return",
         "1", "0", "-1", "9223372036854775807", "1.5e308", '"s"', '"', "x", "by_type", "print", "+", "*",
         "/", "%", "==", "<", "and", "not", "null", "true", ":", "#", "//", "=", ".", "\\", "\x00", "é"]


def mutate(rng: random.Random, code: str) -> str:
    chars = list(code)
    for _ in range(rng.randint(1, 4)):
        op = rng.randrange(4)
        pos = rng.randint(0, len(chars))
        if op == 0 and chars:
            del chars[pos % len(chars)]
        elif op == 1:
            chars[pos:pos] = list(rng.choice(ATOMS))
        elif op == 2 and chars:
            a = rng.randrange(len(chars))
            chars[a:a + rng.randint(1, 8)] = []
        else:
            chars[pos:pos] = list(" ".join(rng.choice(ATOMS) for _ in range(rng.randint(1, 6))))
    return "".join(chars)


def adversarial_corpus(n: int) -> list[str]:
    rng = random.Random(1234)
    corpus = [
        "(" * 5000 + ")" * 5000,
        "[" * 3000,
        "print(" + "1+" * 4000 + "1)",
        "let x = " + "-" * 3000 + "1",
        "fn " * 200,
        "\"" + "a" * 100000,
        "print(" + ",".join(["1"] * 5000) + ")",
    ]
    while len(corpus) < n:
        corpus.append(mutate(rng, rng.choice(SEEDS + corpus[-20:] if corpus else SEEDS)))
    return corpus


def test_fuzz_corpus_only_in_band_errors():
    e = ExecEnvironment(load_model(MODELS / "two_walls.ifc"), step_budget=20_000)
    kinds = {None, "ParseError", "RuntimeError", "BudgetExceeded"}
    seen = set()
    for code in adversarial_corpus(1200):
        r = e.execute(code)
        assert isinstance(r, ExecResult)
        assert r.error_kind in kinds
        assert (r.error is None) == (r.error_kind is None)
        seen.add(r.error_kind)
    assert {"ParseError", "RuntimeError"} <= seen


@settings(max_examples=300, deadline=None)
@given(st.lists(st.sampled_from(ATOMS + list("abc xyz09")), max_size=40).map(" ".join))
def test_random_token_soup_is_in_band(code):
    e = ExecEnvironment(load_model(MODELS / "two_walls.ifc"), step_budget=5_000)
    r = e.execute(code)
    assert r.error_kind in {None, "ParseError", "RuntimeError", "BudgetExceeded"}


@settings(max_examples=200, deadline=None)
@given(st.integers(-10**6, 10**6), st.integers(-10**6, 10**6))
def test_integer_arithmetic_matches_python(a, b):
    e = ExecEnvironment(load_model(MODELS / "two_walls.ifc"))
    got = e.execute(f"print({a} + {b}, {a} * {b}, {a} - {b})").printed
    assert got == f"{a + b} {a * b} {a - b}\n"
