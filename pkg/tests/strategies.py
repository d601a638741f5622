"""Hypothesis strategies for well-typed MiniLang programs."""

from functools import lru_cache

from hypothesis import strategies as st

INT_VARS = ["a", "b", "c", "n"]
BOOL_VARS = ["p"]
FLOAT_VARS = ["f"]

PRELUDE = """\
type PointList {
    int size;
    float data[];
}
int helper(int v) {
    return v + 1;
}
"""

LOCALS = """\
    int a = 1;
    int b = 2;
    int c = 0;
    bool p = true;
    int arr[4];
    PointList pl;
"""


@lru_cache(maxsize=None)
def int_expr(depth: int = 2):
    leaves = st.one_of(
        st.integers(0, 999).map(str),
        st.sampled_from(INT_VARS),
        st.sampled_from(["arr[0]", "arr[a]", "pl.size"]),
    )
    if depth <= 0:
        return leaves
    sub = int_expr(depth - 1)
    return st.one_of(
        leaves,
        st.tuples(sub, st.sampled_from(["+", "-", "*", "/", "%"]), sub).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        sub.map(lambda e: f"(-{e})"),
        sub.map(lambda e: f"helper({e})"),
        float_expr(depth - 1).map(lambda e: f"((int) {e})"),
    )


@lru_cache(maxsize=None)
def float_expr(depth: int = 1):
    leaves = st.one_of(st.sampled_from(["0.5", "2.25", "10.0"]), st.sampled_from(FLOAT_VARS))
    if depth <= 0:
        return leaves
    sub = float_expr(depth - 1)
    return st.one_of(
        leaves,
        st.tuples(sub, st.sampled_from(["+", "-", "*"]), sub).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        int_expr(depth - 1).map(lambda e: f"((float) {e})"),
    )


@lru_cache(maxsize=None)
def bool_expr(depth: int = 2):
    leaves = st.one_of(st.sampled_from(["true", "false"]), st.sampled_from(BOOL_VARS))
    cmp = st.tuples(int_expr(1), st.sampled_from(["<", "<=", ">", ">=", "==", "!="]), int_expr(1)).map(
        lambda t: f"({t[0]} {t[1]} {t[2]})")
    if depth <= 0:
        return st.one_of(leaves, cmp)
    sub = bool_expr(depth - 1)
    return st.one_of(
        leaves, cmp,
        st.tuples(sub, st.sampled_from(["&&", "||"]), sub).map(lambda t: f"({t[0]} {t[1]} {t[2]})"),
        sub.map(lambda e: f"(!{e})"),
    )


def _indent(lines: list[str]) -> list[str]:
    return ["    " + line for line in lines]


@lru_cache(maxsize=None)
def statements(depth: int = 2):
    simple = st.one_of(
        st.tuples(st.sampled_from(INT_VARS), int_expr()).map(lambda t: [f"{t[0]} = {t[1]};"]),
        st.tuples(st.sampled_from(["arr[1]", "arr[c]", "pl.size"]), int_expr(1)).map(lambda t: [f"{t[0]} = {t[1]};"]),
        bool_expr(1).map(lambda e: [f"p = {e};"]),
        float_expr(1).map(lambda e: [f"f = {e};"]),
        int_expr(1).map(lambda e: [f"helper({e});"]),
    )
    if depth <= 0:
        return st.lists(simple, min_size=1, max_size=3).map(lambda ls: [l for s in ls for l in s])
    body = statements(depth - 1)
    compound = st.one_of(
        simple,
        st.tuples(bool_expr(), body).map(lambda t: [f"if ({t[0]}) {{", *_indent(t[1]), "}"]),
        st.tuples(bool_expr(), body, body).map(
            lambda t: [f"if ({t[0]}) {{", *_indent(t[1]), "} else {", *_indent(t[2]), "}"]),
        st.tuples(bool_expr(1), body).map(lambda t: [f"while ({t[0]}) {{", *_indent(t[1]), "}"]),
        st.tuples(int_expr(1), body).map(
            lambda t: [f"for (c = 0; c < {t[0]}; c = c + 1) {{", *_indent(t[1]), "}"]),
        st.tuples(int_expr(1), st.lists(st.tuples(st.integers(-3, 9), body), min_size=1, max_size=3,
                                        unique_by=lambda arm: arm[0]), body).map(_switch),
    )
    return st.lists(compound, min_size=1, max_size=4).map(lambda ls: [l for s in ls for l in s])


def _switch(t) -> list[str]:
    scrutinee, arms, default = t
    lines = [f"switch ({scrutinee}) {{"]
    for value, body in arms:
        lines.append(f"case {value}:")
        lines.extend(_indent(body))
    lines.append("default:")
    lines.extend(_indent(default))
    lines.append("}")
    return lines


@st.composite
def programs(draw, depth: int = 2) -> str:
    body = draw(statements(depth))
    ret = draw(int_expr(1))
    lines = [PRELUDE + "int main(int n, float f) {", LOCALS.rstrip("\n"), *_indent(body), f"    return {ret};", "}"]
    return "\n".join(lines) + "\n"
