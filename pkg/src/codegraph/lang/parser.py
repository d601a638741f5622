"""Recursive-descent parser for MiniLang.

Statements are parsed by straightforward recursive descent; expressions use
precedence climbing. The first error aborts the parse.
"""

from __future__ import annotations

import sys

from codegraph.errors import ParseError
from codegraph.lang.lexer import Token, TokenKind, tokenize
from codegraph.lang.syntax import BASIC_TYPES, Node, Type

MAX_DEPTH = 512

# Each nesting level costs several Python frames here and in the later tree
# passes, so the interpreter default would overflow well before MAX_DEPTH.
if sys.getrecursionlimit() < 20000:
    sys.setrecursionlimit(20000)

# binary operator -> (precedence, left-assoc); higher binds tighter
BINARY_PRECEDENCE = {
    "||": 1,
    "&&": 2,
    "==": 3, "!=": 3,
    "<": 4, "<=": 4, ">": 4, ">=": 4,
    "+": 5, "-": 5,
    "*": 6, "/": 6, "%": 6,
}

_EOF = Token(TokenKind.EOF, "<eof>", 0, 0)


class Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0
        self.depth = 0
        # Record names are needed up front to tell `(T) e` from `(e)` and
        # `T x;` from `x = ...;`.
        self.type_names = {
            tokens[i + 1].text
            for i in range(len(tokens) - 1)
            if tokens[i].is_(TokenKind.KEYWORD, "type") and tokens[i + 1].kind == TokenKind.IDENTIFIER
        }

    # -- token helpers -------------------------------------------------

    def peek(self, offset: int = 0) -> Token:
        i = self.pos + offset
        if i < len(self.tokens):
            return self.tokens[i]
        last = self.tokens[-1] if self.tokens else None
        if last is None:
            return Token(TokenKind.EOF, "<eof>", 1, 1)
        return Token(TokenKind.EOF, "<eof>", last.line, last.column + len(last.text))

    def advance(self) -> Token:
        tok = self.peek()
        self.pos += 1
        return tok

    def at(self, text: str, offset: int = 0) -> bool:
        tok = self.peek(offset)
        return tok.kind in (TokenKind.KEYWORD, TokenKind.OPERATOR, TokenKind.PUNCT) and tok.text == text

    def accept(self, text: str) -> Token | None:
        if self.at(text):
            return self.advance()
        return None

    def expect(self, text: str) -> Token:
        if self.at(text):
            return self.advance()
        self.fail(f"unexpected {self.peek().text!r}", (repr(text),))

    def expect_ident(self) -> Token:
        tok = self.peek()
        if tok.kind == TokenKind.IDENTIFIER:
            return self.advance()
        self.fail(f"unexpected {tok.text!r}", ("identifier",))

    def fail(self, message: str, expected: tuple[str, ...] = ()):
        tok = self.peek()
        raise ParseError(message, tok.line, tok.column, expected)

    def enter(self) -> None:
        self.depth += 1
        if self.depth > MAX_DEPTH:
            self.fail(f"nesting deeper than {MAX_DEPTH}")

    def leave(self) -> None:
        self.depth -= 1

    # -- types ---------------------------------------------------------

    def at_type(self, offset: int = 0) -> bool:
        tok = self.peek(offset)
        if tok.kind == TokenKind.KEYWORD:
            return tok.text in BASIC_TYPES
        return tok.kind == TokenKind.IDENTIFIER and tok.text in self.type_names

    def parse_type(self) -> Type:
        tok = self.advance()
        if not (tok.kind == TokenKind.KEYWORD and tok.text in BASIC_TYPES) and not (
            tok.kind == TokenKind.IDENTIFIER and tok.text in self.type_names
        ):
            self.pos -= 1
            self.fail(f"unexpected {tok.text!r}", ("type",))
        array = False
        if self.at("[") and self.at("]", 1):
            self.advance()
            self.advance()
            array = True
        return Type(tok.text, array)

    def array_suffix(self, ty: Type) -> Type:
        """Apply a C-style ``name[]`` declarator suffix."""
        if self.at("[") and self.at("]", 1):
            if ty.array:
                self.fail("arrays are one-dimensional")
            self.advance()
            self.advance()
            return Type(ty.name, True)
        return ty

    # -- top level -----------------------------------------------------

    def parse_program(self) -> Node:
        items: list[Node] = []
        while self.peek().kind != TokenKind.EOF:
            if self.at("type"):
                items.append(self.parse_typedecl())
            elif self.at_type():
                items.append(self.parse_global_or_function())
            else:
                self.fail(f"unexpected {self.peek().text!r}", ("'type'", "type"))
        return Node("Program", items, line=1, column=1)

    def parse_typedecl(self) -> Node:
        kw = self.expect("type")
        name = self.expect_ident()
        self.expect("{")
        fields: list[Node] = []
        while not self.at("}"):
            start = self.peek()
            ty = self.parse_type()
            fname = self.expect_ident()
            ty = self.array_suffix(ty)
            self.expect(";")
            fields.append(Node("FieldDecl", value=fname.text, type=ty, line=start.line, column=start.column))
        self.expect("}")
        return Node("TypeDecl", fields, value=name.text, type=Type(name.text), line=kw.line, column=kw.column)

    def parse_global_or_function(self) -> Node:
        start = self.peek()
        ty = self.parse_type()
        name = self.expect_ident()
        if self.accept("("):
            params: list[Node] = []
            if not self.at(")"):
                while True:
                    pstart = self.peek()
                    pty = self.parse_type()
                    pname = self.expect_ident()
                    pty = self.array_suffix(pty)
                    params.append(Node("Param", value=pname.text, type=pty, line=pstart.line, column=pstart.column))
                    if not self.accept(","):
                        break
            self.expect(")")
            children = list(params)
            if not self.accept(";"):
                children.append(self.parse_compound())
            return Node("FunctionDecl", children, value=name.text, type=ty, line=start.line, column=start.column)
        ty = self.array_suffix(ty)
        children = []
        if self.accept("="):
            children.append(self.parse_expr())
        self.expect(";")
        return Node("GlobalDecl", children, value=name.text, type=ty, line=start.line, column=start.column)

    # -- statements ----------------------------------------------------

    def parse_compound(self) -> Node:
        brace = self.expect("{")
        stmts: list[Node] = []
        while not self.at("}"):
            if self.peek().kind == TokenKind.EOF:
                self.fail("unexpected end of input", ("'}'",))
            stmts.append(self.parse_statement())
        self.expect("}")
        return Node("Compound", stmts, line=brace.line, column=brace.column)

    def parse_statement(self) -> Node:
        self.enter()
        try:
            tok = self.peek()
            if self.at("{"):
                return self.parse_compound()
            if self.at("if"):
                return self.parse_if()
            if self.at("while"):
                self.advance()
                self.expect("(")
                cond = self.parse_expr()
                self.expect(")")
                body = self.parse_statement()
                return Node("While", [cond, body], line=tok.line, column=tok.column)
            if self.at("for"):
                return self.parse_for()
            if self.at("switch"):
                return self.parse_switch()
            if self.at("return"):
                self.advance()
                children = [] if self.at(";") else [self.parse_expr()]
                self.expect(";")
                return Node("Return", children, line=tok.line, column=tok.column)
            if self.at_type() and self.peek(1).kind == TokenKind.IDENTIFIER or (
                self.at_type() and self.at("[", 1) and self.at("]", 2)
            ):
                node = self.parse_vardecl()
                self.expect(";")
                return node
            node = self.parse_simple()
            self.expect(";")
            return node
        finally:
            self.leave()

    def parse_if(self) -> Node:
        tok = self.expect("if")
        self.expect("(")
        cond = self.parse_expr()
        self.expect(")")
        then = self.parse_statement()
        children = [cond, then]
        if self.accept("else"):
            children.append(self.parse_statement())
        return Node("If", children, line=tok.line, column=tok.column)

    def parse_for(self) -> Node:
        tok = self.expect("for")
        self.expect("(")
        empty_init = Node("Compound", line=tok.line, column=tok.column)
        if self.at(";"):
            init = empty_init
        elif self.at_type() and (self.peek(1).kind == TokenKind.IDENTIFIER or self.at("[", 1)):
            init = self.parse_vardecl()
        else:
            init = self.parse_simple()
        self.expect(";")
        cond = self.parse_expr()
        self.expect(";")
        update = Node("Compound", line=tok.line, column=tok.column) if self.at(")") else self.parse_simple()
        self.expect(")")
        body = self.parse_statement()
        return Node("For", [init, cond, update, body], line=tok.line, column=tok.column)

    def parse_switch(self) -> Node:
        tok = self.expect("switch")
        self.expect("(")
        scrutinee = self.parse_expr()
        self.expect(")")
        self.expect("{")
        arms: list[Node] = [scrutinee]
        seen_default = False
        while not self.at("}"):
            arm_tok = self.peek()
            if self.accept("case"):
                if seen_default:
                    self.fail("case after default")
                negative = self.accept("-") is not None
                lit = self.peek()
                if lit.kind != TokenKind.INTEGER:
                    self.fail(f"unexpected {lit.text!r}", ("integer literal",))
                self.advance()
                label = str(-int(lit.text) if negative else int(lit.text))
                self.expect(":")
                arms.append(Node("Case", self.parse_arm_body(), value=label, line=arm_tok.line, column=arm_tok.column))
            elif self.accept("default"):
                if seen_default:
                    self.fail("duplicate default")
                seen_default = True
                self.expect(":")
                arms.append(Node("Default", self.parse_arm_body(), line=arm_tok.line, column=arm_tok.column))
            else:
                self.fail(f"unexpected {arm_tok.text!r}", ("'case'", "'default'", "'}'"))
        self.expect("}")
        return Node("Switch", arms, line=tok.line, column=tok.column)

    def parse_arm_body(self) -> list[Node]:
        stmts = []
        while not (self.at("case") or self.at("default") or self.at("}")):
            if self.peek().kind == TokenKind.EOF:
                self.fail("unexpected end of input", ("'}'",))
            stmts.append(self.parse_statement())
        return stmts

    def parse_vardecl(self) -> Node:
        start = self.peek()
        ty = self.parse_type()
        name = self.expect_ident()
        if self.at("[") and not self.at("]", 1):
            if ty.array:
                self.fail("arrays are one-dimensional")
            bracket = self.advance()
            size = self.parse_expr()
            self.expect("]")
            ty = Type(ty.name, True)
            alloc = Node("NewArray", [size], type=ty, line=bracket.line, column=bracket.column)
            return Node("VarDecl", [alloc], value=name.text, type=ty, line=start.line, column=start.column)
        ty = self.array_suffix(ty)
        children = []
        if self.accept("="):
            children.append(self.parse_expr())
        return Node("VarDecl", children, value=name.text, type=ty, line=start.line, column=start.column)

    def parse_simple(self) -> Node:
        """Assignment or expression statement (without the trailing ';')."""
        start = self.peek()
        expr = self.parse_expr()
        if self.at("="):
            eq = self.advance()
            if expr.kind not in ("Name", "Index", "Field"):
                raise ParseError("left side of assignment is not assignable", eq.line, eq.column)
            value = self.parse_expr()
            return Node("Assign", [expr, value], line=start.line, column=start.column)
        return Node("ExprStmt", [expr], line=start.line, column=start.column)

    # -- expressions ---------------------------------------------------

    def parse_expr(self, min_prec: int = 1) -> Node:
        self.enter()
        try:
            left = self.parse_unary()
            while True:
                tok = self.peek()
                prec = BINARY_PRECEDENCE.get(tok.text) if tok.kind == TokenKind.OPERATOR else None
                if prec is None or prec < min_prec:
                    return left
                self.advance()
                right = self.parse_expr(prec + 1)
                left = Node("Binary", [left, right], value=tok.text, line=tok.line, column=tok.column)
        finally:
            self.leave()

    def parse_unary(self) -> Node:
        tok = self.peek()
        if self.at("-") or self.at("!"):
            self.advance()
            self.enter()
            try:
                operand = self.parse_unary()
            finally:
                self.leave()
            if tok.text == "-" and operand.kind in ("IntLit", "FloatLit") and not operand.value.startswith("-"):
                # fold into a negative literal
                return Node(operand.kind, value="-" + operand.value, line=tok.line, column=tok.column)
            return Node("Unary", [operand], value=tok.text, line=tok.line, column=tok.column)
        if self.at("(") and self.at_type(1) and (self.at(")", 2) or (self.at("[", 2) and self.at("]", 3) and self.at(")", 4))):
            self.advance()
            ty = self.parse_type()
            self.expect(")")
            self.enter()
            try:
                operand = self.parse_unary()
            finally:
                self.leave()
            return Node("Cast", [operand], type=ty, line=tok.line, column=tok.column)
        return self.parse_postfix(self.parse_primary())

    def parse_postfix(self, node: Node) -> Node:
        while True:
            tok = self.peek()
            if self.accept("["):
                index = self.parse_expr()
                self.expect("]")
                node = Node("Index", [node, index], line=tok.line, column=tok.column)
            elif self.accept("."):
                name = self.expect_ident()
                node = Node("Field", [node], value=name.text, line=tok.line, column=tok.column)
            else:
                return node

    def parse_primary(self) -> Node:
        tok = self.peek()
        if tok.kind == TokenKind.INTEGER:
            self.advance()
            return Node("IntLit", value=str(int(tok.text)), line=tok.line, column=tok.column)
        if tok.kind == TokenKind.FLOAT:
            self.advance()
            return Node("FloatLit", value=tok.text, line=tok.line, column=tok.column)
        if self.at("true") or self.at("false"):
            self.advance()
            return Node("BoolLit", value=tok.text, line=tok.line, column=tok.column)
        if self.at("null"):
            self.advance()
            return Node("NullLit", line=tok.line, column=tok.column)
        if tok.kind == TokenKind.IDENTIFIER:
            self.advance()
            if self.accept("("):
                args: list[Node] = []
                if not self.at(")"):
                    while True:
                        args.append(self.parse_expr())
                        if not self.accept(","):
                            break
                self.expect(")")
                return Node("Call", args, value=tok.text, line=tok.line, column=tok.column)
            return Node("Name", value=tok.text, line=tok.line, column=tok.column)
        if self.accept("("):
            inner = self.parse_expr()
            self.expect(")")
            return inner
        self.fail(f"unexpected {tok.text!r}", ("expression",))


def parse(tokens: list[Token]) -> Node:
    """Parse and resolve a token stream into a ProgramAst."""
    from codegraph.lang.resolve import resolve

    program = Parser(tokens).parse_program()
    program.link_parents()
    resolve(program)
    return program


def parse_source(source: str, filename: str = "<input>") -> Node:
    from codegraph.errors import SourceError

    try:
        return parse(tokenize(source))
    except SourceError as exc:
        exc.filename = filename
        raise
