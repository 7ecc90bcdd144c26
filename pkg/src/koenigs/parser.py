"""Recursive-descent parser for map expressions.

Grammar::

    expr     := term (('+' | '-') term)*
    term     := unary (('*' | '/') unary)*
    unary    := ('+' | '-') unary | factor
    factor   := base ('^' exponent)?
    exponent := ('+' | '-') exponent | factor
    base     := number | 'i' | 'pi' | 'z' | '(' expr ')'
              | ('exp' | 'log') '(' expr ')'
              | 'mobius' '(' expr ',' expr ',' expr ',' expr ',' expr ')'

The four Mobius coefficients must be constant. Constant subexpressions are
folded while parsing, so ``"1.5 - 2*i"`` yields a single constant node.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

from . import expressions as ex


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, expected: tuple[str, ...] = ()):
        self.line = line
        self.column = column
        self.expected = expected
        where = f"line {line}, column {column}"
        hint = f" (expected {' or '.join(expected)})" if expected else ""
        super().__init__(f"{message} at {where}{hint}")


class UnknownIdentifierError(ParseError):
    pass


class ArityError(ParseError):
    pass


@dataclass(frozen=True)
class Token:
    kind: str  # number, ident, op, end
    text: str
    line: int
    column: int


_TOKEN_RE = re.compile(r"""
    (?P<ws>[ \t\r]+)
  | (?P<nl>\n)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
""", re.VERBOSE)

_FUNCTIONS = {"exp": 1, "log": 1, "mobius": 5}
_NAMES = {"i", "pi", "z"}


def tokenize(text: str) -> list[Token]:
    tokens = []
    pos, line, line_start = 0, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        col = pos - line_start + 1
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        if kind == "nl":
            line += 1
            line_start = m.end()
        elif kind != "ws":
            tokens.append(Token(kind, m.group(), line, col))
        pos = m.end()
    tokens.append(Token("end", "", line, pos - line_start + 1))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = tokenize(text)
        self.pos = 0

    @property
    def tok(self) -> Token:
        return self.tokens[self.pos]

    def advance(self) -> Token:
        t = self.tokens[self.pos]
        self.pos += 1
        return t

    def error(self, message, *expected, cls=ParseError, tok=None):
        tok = tok or self.tok
        raise cls(message, tok.line, tok.column, tuple(expected))

    def expect_op(self, op: str) -> Token:
        if self.tok.kind == "op" and self.tok.text == op:
            return self.advance()
        found = self.tok.text or "end of input"
        self.error(f"unexpected {found!r}", repr(op))

    def at_op(self, *ops) -> bool:
        return self.tok.kind == "op" and self.tok.text in ops

    def parse(self) -> ex.HolomorphicMap:
        node = self.expr()
        if self.tok.kind != "end":
            self.error(f"unexpected {self.tok.text!r}", "operator", "end of input")
        return node

    def expr(self):
        node = self.term()
        while self.at_op("+", "-"):
            op = self.advance().text
            rhs = self.term()
            node = ex.add(node, rhs) if op == "+" else ex.sub(node, rhs)
        return node

    def term(self):
        node = self.unary()
        while self.at_op("*", "/"):
            op_tok = self.advance()
            rhs = self.unary()
            if op_tok.text == "*":
                node = ex.mul(node, rhs)
            else:
                try:
                    node = ex.div(node, rhs)
                except ZeroDivisionError:
                    self.error("division by the constant zero", tok=op_tok)
        return node

    def unary(self):
        if self.at_op("-"):
            self.advance()
            return ex.mul(ex.Const(-1.0), self.unary())
        if self.at_op("+"):
            self.advance()
            return self.unary()
        return self.factor()

    def exponent(self):
        if self.at_op("-"):
            self.advance()
            return ex.mul(ex.Const(-1.0), self.exponent())
        if self.at_op("+"):
            self.advance()
            return self.exponent()
        return self.factor()

    def factor(self):
        node = self.base()
        if self.at_op("^"):
            op_tok = self.advance()
            e = self.exponent()
            try:
                node = ex.power(node, e)
            except (ZeroDivisionError, ValueError, OverflowError) as exc:
                self.error(f"invalid power: {exc}", tok=op_tok)
        return node

    def base(self):
        tok = self.tok
        if tok.kind == "number":
            self.advance()
            return ex.Const(float(tok.text))
        if tok.kind == "op" and tok.text == "(":
            self.advance()
            node = self.expr()
            self.expect_op(")")
            return node
        if tok.kind == "ident":
            name = tok.text
            if name in _FUNCTIONS:
                self.advance()
                return self.call(name, tok)
            if name not in _NAMES:
                self.error(f"unknown identifier {name!r}", "z", "i", "pi",
                           "exp", "log", "mobius", cls=UnknownIdentifierError)
            self.advance()
            if name == "z":
                return ex.Z
            if name == "i":
                return ex.Const(1j)
            return ex.Const(math.pi)
        found = tok.text or "end of input"
        self.error(f"unexpected {found!r}", "number", "'z'", "'i'", "'pi'", "'('", "function")

    def call(self, name: str, name_tok: Token):
        self.expect_op("(")
        args = [self.expr()]
        while self.at_op(","):
            self.advance()
            args.append(self.expr())
        self.expect_op(")")
        arity = _FUNCTIONS[name]
        if len(args) != arity:
            self.error(f"{name} takes {arity} argument(s), got {len(args)}",
                       cls=ArityError, tok=name_tok)
        if name == "exp":
            return ex.exp(args[0])
        if name == "log":
            try:
                return ex.log(args[0])
            except ex.EvaluationError as exc:
                self.error(str(exc), tok=name_tok)
        coeffs = []
        for a in args[:4]:
            if not isinstance(a, ex.Const):
                self.error("mobius coefficients must be constant", tok=name_tok)
            coeffs.append(a.value)
        try:
            return ex.Mobius(*coeffs, args[4])
        except ValueError as exc:
            self.error(str(exc), tok=name_tok)


def parse(text: str) -> ex.HolomorphicMap:
    """Parse an expression in ``z`` into a :class:`HolomorphicMap`."""
    return _Parser(text).parse()
