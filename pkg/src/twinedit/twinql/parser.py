"""Tokenizer and recursive-descent parser; grammar in docs/query_language.md."""

from __future__ import annotations

from dataclasses import dataclass

from .ast import MAX_DEPTH, BinOp, Call, Comprehension, Expr, Literal, Name, UnaryOp, depth
from .errors import QlSyntaxError

_KEYWORDS = {"for", "in", "if", "and", "or", "not", "true", "false"}
_TWO_CHAR = ("==", "!=", "<=", ">=")
_ONE_CHAR = "+-*/<>()[],="


@dataclass(frozen=True)
class Token:
    kind: str  # NUMBER FLOAT STRING IDENT KW OP EOF
    text: str
    line: int
    col: int


def tokenize(source: str) -> list[Token]:
    tokens: list[Token] = []
    i, line, col = 0, 1, 1
    n = len(source)
    while i < n:
        ch = source[i]
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        start_col = col
        if ch.isdigit() or (ch == "." and i + 1 < n and source[i + 1].isdigit()):
            j = i
            seen_dot = False
            while j < n and (source[j].isdigit() or (source[j] == "." and not seen_dot)):
                seen_dot = seen_dot or source[j] == "."
                j += 1
            text = source[i:j]
            tokens.append(Token("FLOAT" if "." in text else "NUMBER", text, line, start_col))
            col += j - i
            i = j
            continue
        if ch.isalpha() or ch == "_":
            j = i
            while j < n and (source[j].isalnum() or source[j] == "_"):
                j += 1
            text = source[i:j]
            tokens.append(Token("KW" if text in _KEYWORDS else "IDENT", text, line, start_col))
            col += j - i
            i = j
            continue
        if ch == '"':
            j = i + 1
            buf = []
            while j < n and source[j] != '"':
                if source[j] == "\\" and j + 1 < n:
                    esc = source[j + 1]
                    buf.append({"n": "\n", "t": "\t", '"': '"', "\\": "\\"}.get(esc, esc))
                    j += 2
                else:
                    buf.append(source[j])
                    j += 1
            if j >= n:
                raise QlSyntaxError(line, start_col, "closing '\"'")
            tokens.append(Token("STRING", "".join(buf), line, start_col))
            col += j + 1 - i
            i = j + 1
            continue
        if source[i : i + 2] in _TWO_CHAR:
            tokens.append(Token("OP", source[i : i + 2], line, start_col))
            i += 2
            col += 2
            continue
        if ch in _ONE_CHAR:
            tokens.append(Token("OP", ch, line, start_col))
            i += 1
            col += 1
            continue
        raise QlSyntaxError(line, start_col, f"a token (found {ch!r})")
    tokens.append(Token("EOF", "", line, col))
    return tokens


class _Parser:
    def __init__(self, tokens: list[Token]):
        self.tokens = tokens
        self.pos = 0

    @property
    def cur(self) -> Token:
        return self.tokens[self.pos]

    def _fail(self, expected: str):
        raise QlSyntaxError(self.cur.line, self.cur.col, expected)

    def _accept_op(self, *ops: str) -> Token | None:
        if self.cur.kind == "OP" and self.cur.text in ops:
            tok = self.cur
            self.pos += 1
            return tok
        return None

    def _expect_op(self, op: str) -> None:
        if not self._accept_op(op):
            self._fail(f"'{op}'")

    def _accept_kw(self, kw: str) -> bool:
        if self.cur.kind == "KW" and self.cur.text == kw:
            self.pos += 1
            return True
        return False

    def parse(self) -> Expr:
        node = self.or_expr()
        if self.cur.kind != "EOF":
            self._fail("end of input")
        return node

    def or_expr(self) -> Expr:
        node = self.and_expr()
        while self._accept_kw("or"):
            node = BinOp("or", node, self.and_expr())
        return node

    def and_expr(self) -> Expr:
        node = self.not_expr()
        while self._accept_kw("and"):
            node = BinOp("and", node, self.not_expr())
        return node

    def not_expr(self) -> Expr:
        if self._accept_kw("not"):
            return UnaryOp("not", self.not_expr())
        return self.comparison()

    def comparison(self) -> Expr:
        node = self.additive()
        tok = self._accept_op("==", "!=", "<", "<=", ">", ">=")
        if tok:
            node = BinOp(tok.text, node, self.additive())
        return node

    def additive(self) -> Expr:
        node = self.term()
        while True:
            tok = self._accept_op("+", "-")
            if not tok:
                return node
            node = BinOp(tok.text, node, self.term())

    def term(self) -> Expr:
        node = self.unary()
        while True:
            tok = self._accept_op("*", "/")
            if not tok:
                return node
            node = BinOp(tok.text, node, self.unary())

    def unary(self) -> Expr:
        if self._accept_op("-"):
            return UnaryOp("-", self.unary())
        return self.primary()

    def primary(self) -> Expr:
        tok = self.cur
        if tok.kind == "NUMBER":
            self.pos += 1
            return Literal(int(tok.text))
        if tok.kind == "FLOAT":
            self.pos += 1
            return Literal(float(tok.text))
        if tok.kind == "STRING":
            self.pos += 1
            return Literal(tok.text)
        if tok.kind == "KW" and tok.text in ("true", "false"):
            self.pos += 1
            return Literal(tok.text == "true")
        if tok.kind == "IDENT":
            self.pos += 1
            if self.cur.kind == "OP" and self.cur.text == "(":
                return self.call(tok.text)
            return Name(tok.text)
        if self._accept_op("("):
            node = self.or_expr()
            self._expect_op(")")
            return node
        if self.cur.kind == "OP" and self.cur.text == "[":
            return self.comprehension()
        self._fail("an expression")

    def call(self, func: str) -> Expr:
        self._expect_op("(")
        args: list[Expr] = []
        kwargs: list[tuple[str, Expr]] = []
        if not self._accept_op(")"):
            while True:
                if (
                    self.cur.kind == "IDENT"
                    and self.tokens[self.pos + 1].kind == "OP"
                    and self.tokens[self.pos + 1].text == "="
                ):
                    key = self.cur.text
                    self.pos += 2
                    kwargs.append((key, self.or_expr()))
                else:
                    if kwargs:
                        self._fail("keyword argument")
                    args.append(self.or_expr())
                if self._accept_op(")"):
                    break
                if not self._accept_op(","):
                    self._fail("')'")
        return Call(func, tuple(args), tuple(kwargs))

    def comprehension(self) -> Expr:
        self._expect_op("[")
        body = self.or_expr()
        if not self._accept_kw("for"):
            self._fail("'for'")
        if self.cur.kind != "IDENT":
            self._fail("an identifier")
        var = self.cur.text
        self.pos += 1
        if not self._accept_kw("in"):
            self._fail("'in'")
        iterable = self.or_expr()
        cond = None
        if self._accept_kw("if"):
            cond = self.or_expr()
        self._expect_op("]")
        return Comprehension(body, var, iterable, cond)


def parse_program(source: str) -> Expr:
    """Parse query source into an AST; depth is capped at 32."""
    ast = _Parser(tokenize(source)).parse()
    if depth(ast) > MAX_DEPTH:
        raise QlSyntaxError(1, 1, f"expression depth <= {MAX_DEPTH}")
    return ast
