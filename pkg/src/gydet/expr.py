"""Recursive-descent parser for scalar expressions in one variable ``t``.

Grammar::

    expr    := term (('+' | '-') term)*
    term    := unary (('*' | '/') unary)*
    unary   := ('-' | '+') unary | power
    power   := primary ('^' unary)?
    primary := NUMBER | 't' | 'pi' | 'e' | FUNC '(' expr ')' | '(' expr ')'

``^`` is right-associative and binds tighter than unary minus, so
``-t^2`` is ``-(t^2)``. The parsed tree is a nest of tuples, so it is
immutable and hashable, and evaluates elementwise on numpy arrays.
"""

import math
import re

import numpy as np

from .errors import ProfileSyntaxError

__all__ = ["parse_expression", "evaluate", "FUNCTIONS", "CONSTANTS"]


def _sech(x):
    return 1.0 / np.cosh(x)


FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "tan": np.tan,
    "sinh": np.sinh,
    "cosh": np.cosh,
    "tanh": np.tanh,
    "sech": _sech,
    "exp": np.exp,
    "log": np.log,
    "sqrt": np.sqrt,
    "abs": np.abs,
}

CONSTANTS = {"pi": math.pi, "e": math.e}

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^()])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN.match(text, pos)
        if match is None:
            raise ProfileSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = match.lastgroup
        if kind != "ws":
            value = match.group(kind)
            if value == "**":
                value = "^"
            tokens.append((kind, value, pos))
        pos = match.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        kind, got, pos = self.take()
        if got != value:
            found = "end of input" if kind == "end" else repr(got)
            raise ProfileSyntaxError(f"expected {value!r}, found {found}", pos)

    def parse(self):
        node = self.expr()
        kind, value, pos = self.peek()
        if kind != "end":
            raise ProfileSyntaxError(f"unexpected token {value!r}", pos)
        return node

    def expr(self):
        node = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            node = ("bin", op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while self.peek()[1] in ("*", "/") and self.peek()[0] == "op":
            op = self.take()[1]
            node = ("bin", op, node, self.unary())
        return node

    def unary(self):
        kind, value, _ = self.peek()
        if kind == "op" and value in ("-", "+"):
            self.take()
            operand = self.unary()
            return ("neg", operand) if value == "-" else operand
        return self.power()

    def power(self):
        base = self.primary()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return ("bin", "^", base, self.unary())
        return base

    def primary(self):
        kind, value, pos = self.take()
        if kind == "num":
            number = float(value)
            if not math.isfinite(number):
                raise ProfileSyntaxError(f"non-finite literal {value!r}", pos)
            return ("num", number)
        if kind == "name":
            if value == "t":
                return ("var",)
            if value in CONSTANTS:
                return ("num", CONSTANTS[value])
            if value in FUNCTIONS:
                self.expect("(")
                arg = self.expr()
                self.expect(")")
                return ("call", value, arg)
            raise ProfileSyntaxError(f"unknown identifier {value!r}", pos)
        if kind == "op" and value == "(":
            node = self.expr()
            self.expect(")")
            return node
        found = "end of input" if kind == "end" else repr(value)
        raise ProfileSyntaxError(f"unexpected {found}", pos)


def parse_expression(text):
    """Parse `text` into an expression tree.

    Raises
    ------
    ProfileSyntaxError
        On malformed input, unknown names or non-finite literals; the
        exception carries the character position.
    """
    if not isinstance(text, str):
        raise ProfileSyntaxError(f"expression must be a string, got {type(text).__name__}")
    return _Parser(text).parse()


def evaluate(node, t):
    """Evaluate an expression tree at `t` (scalar or array)."""
    tag = node[0]
    if tag == "num":
        return node[1] + 0.0 * t
    if tag == "var":
        return t + 0.0
    if tag == "neg":
        return -evaluate(node[1], t)
    if tag == "call":
        return FUNCTIONS[node[1]](evaluate(node[2], t))
    _, op, left, right = node
    a = evaluate(left, t)
    b = evaluate(right, t)
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        return a / b
    return a**b
