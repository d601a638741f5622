"""Pretty-printer producing re-parseable MiniLang text."""

from __future__ import annotations

from codegraph.lang.syntax import Node, function_body, function_params


def _decl(ty, name: str) -> str:
    return f"{ty} {name}"


def expr_text(node: Node) -> str:
    kind = node.kind
    if kind in ("IntLit", "FloatLit", "BoolLit"):
        return node.value
    if kind == "NullLit":
        return "null"
    if kind == "Name":
        return node.value
    if kind == "Index":
        return f"{expr_text(node.children[0])}[{expr_text(node.children[1])}]"
    if kind == "Field":
        return f"{expr_text(node.children[0])}.{node.value}"
    if kind == "Unary":
        return f"({node.value}{expr_text(node.children[0])})"
    if kind == "Binary":
        left, right = node.children
        return f"({expr_text(left)} {node.value} {expr_text(right)})"
    if kind == "Call":
        return f"{node.value}({', '.join(expr_text(a) for a in node.children)})"
    if kind == "Cast":
        return f"(({node.type}) {expr_text(node.children[0])})"
    if kind == "NewArray":
        return f"[{expr_text(node.children[0])}]"
    raise ValueError(f"not an expression: {kind}")


def _simple(node: Node) -> str:
    if node.kind == "VarDecl":
        if node.children and node.children[0].kind == "NewArray":
            return f"{node.type.element} {node.value}{expr_text(node.children[0])}"
        head = _decl(node.type, node.value)
        return f"{head} = {expr_text(node.children[0])}" if node.children else head
    if node.kind == "Assign":
        return f"{expr_text(node.children[0])} = {expr_text(node.children[1])}"
    if node.kind == "ExprStmt":
        return expr_text(node.children[0])
    if node.kind == "Compound" and not node.children:
        return ""
    raise ValueError(f"not a simple statement: {node.kind}")


def _body(head: str, node: Node, indent: int, out: list[str]) -> None:
    """Emit ``head`` followed by a nested statement, keeping braces on the head line."""
    pad = "    " * indent
    if node.kind == "Compound":
        out.append(f"{pad}{head} {{")
        for s in node.children:
            _stmt(s, indent + 1, out)
        out.append(pad + "}")
    else:
        out.append(pad + head)
        _stmt(node, indent + 1, out)


def _stmt(node: Node, indent: int, out: list[str]) -> None:
    pad = "    " * indent
    kind = node.kind
    if kind == "Compound":
        out.append(pad + "{")
        for s in node.children:
            _stmt(s, indent + 1, out)
        out.append(pad + "}")
    elif kind in ("VarDecl", "Assign", "ExprStmt"):
        out.append(pad + _simple(node) + ";")
    elif kind == "If":
        _body(f"if ({expr_text(node.children[0])})", node.children[1], indent, out)
        if len(node.children) > 2:
            _body("else", node.children[2], indent, out)
    elif kind == "While":
        _body(f"while ({expr_text(node.children[0])})", node.children[1], indent, out)
    elif kind == "For":
        init, cond, update, body = node.children
        _body(f"for ({_simple(init)}; {expr_text(cond)}; {_simple(update)})", body, indent, out)
    elif kind == "Switch":
        out.append(pad + f"switch ({expr_text(node.children[0])}) {{")
        for arm in node.children[1:]:
            out.append(pad + (f"case {arm.value}:" if arm.kind == "Case" else "default:"))
            for s in arm.children:
                _stmt(s, indent + 1, out)
        out.append(pad + "}")
    elif kind == "Return":
        out.append(pad + ("return " + expr_text(node.children[0]) + ";" if node.children else "return;"))
    else:
        raise ValueError(f"not a statement: {kind}")


def pretty_print(program: Node) -> str:
    out: list[str] = []
    for item in program.children:
        if item.kind == "TypeDecl":
            out.append(f"type {item.value} {{")
            for f in item.children:
                out.append(f"    {_decl(f.type, f.value)};")
            out.append("}")
        elif item.kind == "GlobalDecl":
            head = _decl(item.type, item.value)
            out.append(f"{head} = {expr_text(item.children[0])};" if item.children else head + ";")
        elif item.kind == "FunctionDecl":
            params = ", ".join(_decl(p.type, p.value) for p in function_params(item))
            sig = f"{item.type} {item.value}({params})"
            body = function_body(item)
            if body is None:
                out.append(sig + ";")
            else:
                _body(sig, body, 0, out)
    return "\n".join(out) + "\n"
