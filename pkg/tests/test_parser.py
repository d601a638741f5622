import pytest
from hypothesis import HealthCheck, given, settings

from codegraph.errors import ParseError, ResolveError
from codegraph.lang import parse_source, pretty_print
from codegraph.lang.syntax import NODE_KINDS

from conftest import corpus_sources
from strategies import programs

EXPRESSION_KINDS = {"IntLit", "FloatLit", "BoolLit", "NullLit", "Name", "Index", "Field", "Unary", "Binary",
                    "Call", "Cast"}


def test_minimal_program():
    prog = parse_source("int main() { return 0; }")
    fns = [n for n in prog.children if n.kind == "FunctionDecl"]
    assert len(fns) == 1
    body = fns[0].children[-1]
    assert [s.kind for s in body.children] == ["Return"]
    ret = body.children[0].children[0]
    assert (ret.kind, ret.value) == ("IntLit", "0")


def test_if_else_has_two_branches():
    prog = parse_source("int f(int a){ if(a<0) return 0; else return a; }")
    node = next(n for n in prog.walk() if n.kind == "If")
    assert node.children[0].kind == "Binary"
    assert [c.kind for c in node.children[1:]] == ["Return", "Return"]


def test_undeclared_call_is_rejected():
    with pytest.raises(ResolveError):
        parse_source("int f(){ return g(); }")


@pytest.mark.parametrize("src", [
    "int f(int a){ int a = 1; return a; }",
    "int f(){ int x = 1; int x = 2; return x; }",
    "int f(){ return 1; } int f(){ return 2; }",
])
def test_duplicate_declarations_are_rejected(src):
    with pytest.raises(ResolveError):
        parse_source(src)


def test_arity_mismatch_is_rejected():
    with pytest.raises(ResolveError):
        parse_source("int g(int x){ return x; } int f(){ return g(1, 2); }")


def test_type_mismatch_is_rejected():
    with pytest.raises(ResolveError):
        parse_source("int f(){ bool p = 1; return 0; }")


def test_parse_error_lists_expected_tokens():
    with pytest.raises(ParseError) as info:
        parse_source("int f() { return 0 }")
    assert "';'" in info.value.expected
    assert "error" in info.value.diagnostic()


def test_diagnostic_format():
    with pytest.raises(ResolveError) as info:
        parse_source("int f(){\n  return y;\n}", "demo.mini")
    assert info.value.diagnostic().startswith("demo.mini:2:10: error:")


def test_nesting_limit():
    deep = "int f(){ return " + "(" * 600 + "1" + ")" * 600 + "; }"
    with pytest.raises(ParseError):
        parse_source(deep)


def test_negative_literal_folds():
    prog = parse_source("int f(){ return -5; }")
    lit = next(n for n in prog.walk() if n.kind == "IntLit")
    assert lit.value == "-5"


def _check_invariants(prog):
    for node in prog.walk():
        assert node.kind in NODE_KINDS
        for child in node.children:
            assert child.parent is node
        if node.kind in EXPRESSION_KINDS:
            assert node.type is not None
        if node.kind == "Name":
            assert node.scope in ("local", "param", "global")
    assert prog.parent is None


@pytest.mark.parametrize("path", corpus_sources(), ids=lambda p: p.name)
def test_corpus_round_trip(path):
    prog = parse_source(path.read_text())
    _check_invariants(prog)
    again = parse_source(pretty_print(prog))
    assert again.structure() == prog.structure()


@settings(max_examples=150, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(programs())
def test_generated_round_trip(src):
    prog = parse_source(src)
    _check_invariants(prog)
    printed = pretty_print(prog)
    assert parse_source(printed).structure() == prog.structure()
    assert pretty_print(parse_source(printed)) == printed


@settings(max_examples=30, deadline=None)
@given(programs(depth=1))
def test_parsing_is_deterministic(src):
    assert parse_source(src).structure() == parse_source(src).structure()
