"""Recursive-descent parser for the corpus polynomial grammar.

Grammar (EBNF; whitespace and ``# ...`` comments are ignored)::

    expr    = term , { ("+" | "-") , term } ;
    term    = unary , { ("*" | "/") , unary } ;
    unary   = ("+" | "-") , unary | power ;
    power   = atom , [ "^" , integer ] ;
    atom    = integer | name | "(" , expr , ")" ;
    integer = digit , { digit } ;
    name    = letter , { letter | digit | "_" } ;

``/`` only divides by a nonzero constant, so ``3/2*tau`` is a rational
coefficient.  ``-x^2`` means ``-(x^2)``.  Juxtaposition (``2x``) is a
syntax error.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

from ..poly import Polynomial, PolynomialError
from ..rings import Ring


class ParseError(ValueError):
    def __init__(self, message: str, line: int, col: int):
        super().__init__(f"{message} at line {line}, column {col}")
        self.message = message
        self.line = line
        self.col = col


@dataclass(frozen=True)
class Token:
    kind: str  # INT, NAME, OP, LPAREN, RPAREN, END
    text: str
    line: int
    col: int


_TOKEN_RE = re.compile(r"\s+|#[^\n]*|(?P<INT>\d+)|(?P<NAME>[A-Za-z][A-Za-z0-9_]*)|(?P<OP>[-+*/^()])")


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos = 0
    line, line_start = 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1)
        col = pos - line_start + 1
        if m.lastgroup == "INT":
            tokens.append(Token("INT", m.group(), line, col))
        elif m.lastgroup == "NAME":
            tokens.append(Token("NAME", m.group(), line, col))
        elif m.lastgroup == "OP":
            ch = m.group()
            kind = {"(": "LPAREN", ")": "RPAREN"}.get(ch, "OP")
            tokens.append(Token(kind, ch, line, col))
        chunk = m.group()
        nl = chunk.count("\n")
        if nl:
            line += nl
            line_start = pos + chunk.rindex("\n") + 1
        pos = m.end()
    tokens.append(Token("END", "", line, pos - line_start + 1))
    return tokens


# -- AST --------------------------------------------------------------------

@dataclass(frozen=True)
class Node:
    line: int = field(default=0, compare=False)
    col: int = field(default=0, compare=False)


@dataclass(frozen=True)
class Integer(Node):
    value: int = 0


@dataclass(frozen=True)
class RationalLit(Node):
    value: Fraction = Fraction(0)


@dataclass(frozen=True)
class Variable(Node):
    name: str = ""


@dataclass(frozen=True)
class Add(Node):
    left: "Expr" = None
    right: "Expr" = None
    subtract: bool = False


@dataclass(frozen=True)
class Mul(Node):
    left: "Expr" = None
    right: "Expr" = None
    divide: bool = False


@dataclass(frozen=True)
class Pow(Node):
    base: "Expr" = None
    exponent: int = 1


@dataclass(frozen=True)
class Neg(Node):
    operand: "Expr" = None


Expr = Union[Integer, RationalLit, Variable, Add, Mul, Pow, Neg]


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.i = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col)

    def advance(self) -> Token:
        t = self.tokens[self.i]
        self.i += 1
        return t

    def parse(self) -> Expr:
        if self.tok.kind == "END":
            self.error("empty expression")
        node = self.expr()
        if self.tok.kind != "END":
            if self.tok.kind in ("INT", "NAME", "LPAREN"):
                self.error("implicit multiplication is not allowed; use '*'")
            self.error(f"unexpected {self.tok.text!r}")
        return node

    def expr(self) -> Expr:
        node = self.term()
        while self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.advance()
            node = Add(op.line, op.col, node, self.term(), op.text == "-")
        return node

    def term(self) -> Expr:
        node = self.unary()
        while True:
            if self.tok.kind == "OP" and self.tok.text in "*/":
                op = self.advance()
                rhs = self.unary()
                if (op.text == "/" and isinstance(node, (Integer, RationalLit))
                        and isinstance(rhs, Integer) and rhs.value != 0):
                    value = Fraction(node.value) / rhs.value
                    node = RationalLit(node.line, node.col, value)
                else:
                    node = Mul(op.line, op.col, node, rhs, op.text == "/")
            elif self.tok.kind in ("INT", "NAME", "LPAREN"):
                self.error("implicit multiplication is not allowed; use '*'")
            else:
                return node

    def unary(self) -> Expr:
        if self.tok.kind == "OP" and self.tok.text in "+-":
            op = self.advance()
            inner = self.unary()
            return Neg(op.line, op.col, inner) if op.text == "-" else inner
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.tok.kind == "OP" and self.tok.text == "^":
            op = self.advance()
            if self.tok.kind == "OP" and self.tok.text == "-":
                self.error("negative exponents are not allowed")
            if self.tok.kind != "INT":
                self.error("exponent must be a non-negative integer literal")
            exp = int(self.advance().text)
            if self.tok.kind == "OP" and self.tok.text == "^":
                self.error("chained exponents are ambiguous; add parentheses")
            return Pow(op.line, op.col, base, exp)
        return base

    def atom(self) -> Expr:
        t = self.tok
        if t.kind == "INT":
            self.advance()
            return Integer(t.line, t.col, int(t.text))
        if t.kind == "NAME":
            self.advance()
            return Variable(t.line, t.col, t.text)
        if t.kind == "LPAREN":
            self.advance()
            node = self.expr()
            if self.tok.kind != "RPAREN":
                self.error("expected ')'")
            self.advance()
            return node
        if t.kind == "END":
            self.error("unexpected end of input")
        self.error(f"unexpected {t.text!r}")


def parse_ast(text: str) -> Expr:
    return _Parser(text).parse()


def to_polynomial(node: Expr, ring: Ring) -> Polynomial:
    if isinstance(node, Integer):
        return ring.const(node.value)
    if isinstance(node, RationalLit):
        return ring.const(node.value)
    if isinstance(node, Variable):
        try:
            return ring.resolve(node.name)
        except PolynomialError:
            raise ParseError(f"unknown variable {node.name!r} for ring {ring.name}",
                             node.line, node.col) from None
    if isinstance(node, Neg):
        return -to_polynomial(node.operand, ring)
    if isinstance(node, Add):
        a, b = to_polynomial(node.left, ring), to_polynomial(node.right, ring)
        return a - b if node.subtract else a + b
    if isinstance(node, Mul):
        a, b = to_polynomial(node.left, ring), to_polynomial(node.right, ring)
        if not node.divide:
            return a * b
        if not b.is_constant() or b.is_zero():
            raise ParseError("can only divide by a nonzero constant", node.line, node.col)
        return a / b.constant_value()
    if isinstance(node, Pow):
        return to_polynomial(node.base, ring) ** node.exponent
    raise TypeError(f"unknown node {node!r}")


def parse_expr(text: str, ring: Ring) -> Polynomial:
    """Parse ``text`` into an exact polynomial of ``ring``."""
    return to_polynomial(parse_ast(text), ring)
