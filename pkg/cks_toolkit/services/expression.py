"""Recursive-descent parser for user-supplied growth functions.

Grammar (whitespace insignificant)::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := base ('^' base)?
    base   := number | 'r' | '(' expr ')' | func '(' expr ')'
    func   := 'exp' | 'log' | 'sqrt'
"""
import re
from dataclasses import dataclass
from typing import List, Tuple, Union

import numpy as np

from cks_toolkit.core.exceptions import NonPositive, ParseError
from cks_toolkit.core.logging import logger
from cks_toolkit.models.growth import GrowthFunction

FUNCTIONS = ("exp", "log", "sqrt")
CHECK_POINTS = (0.0, 1.0, 10.0)
BASE_START = {"number", "'r'", "'('", "'exp'", "'log'", "'sqrt'"}

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)|(?P<name>[A-Za-z_]\w*)|(?P<op>[-+*/^()]))"
)


@dataclass(frozen=True)
class Token:
    kind: str  # number | name | op | eof
    text: str
    pos: int


def tokenize(text: str) -> List[Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        match = _TOKEN_RE.match(text, pos)
        if match is None or match.end() == pos:
            raise ParseError(f"unexpected character {text[pos]!r}", pos, BASE_START | {"'+'", "'-'", "'*'", "'/'", "'^'", "')'"})
        kind = match.lastgroup
        start = match.start(kind)
        tokens.append(Token(kind, match.group(kind), start))
        pos = match.end()
    tokens.append(Token("eof", "", len(text)))
    return tokens


@dataclass(frozen=True)
class Num:
    value: float

    def evaluate(self, r):
        return np.full_like(r, self.value, dtype=float) if isinstance(r, np.ndarray) else self.value


@dataclass(frozen=True)
class Var:
    def evaluate(self, r):
        return r


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Node"
    right: "Node"

    def evaluate(self, r):
        a = self.left.evaluate(r)
        b = self.right.evaluate(r)
        if self.op == "+":
            return np.add(a, b)
        if self.op == "-":
            return np.subtract(a, b)
        if self.op == "*":
            return np.multiply(a, b)
        if self.op == "/":
            return np.divide(a, b)
        return np.power(a, b)


@dataclass(frozen=True)
class Func:
    name: str
    arg: "Node"

    def evaluate(self, r):
        x = self.arg.evaluate(r)
        if self.name == "exp":
            return np.exp(x)
        if self.name == "log":
            return np.log(x)
        return np.sqrt(x)


Node = Union[Num, Var, BinOp, Func]


class _Parser:
    """Parser context: token stream, cursor and open-parenthesis stack."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.index = 0
        self.open_parens: List[int] = []

    @property
    def current(self) -> Token:
        return self.tokens[self.index]

    def advance(self) -> Token:
        token = self.current
        self.index += 1
        return token

    def fail(self, message: str, expected) -> None:
        token = self.current
        if token.kind == "eof" and self.open_parens:
            raise ParseError(f"unexpected end of input inside '('", self.open_parens[-1], expected)
        found = "end of input" if token.kind == "eof" else repr(token.text)
        raise ParseError(f"{message}, found {found}", token.pos, expected)

    def expect_op(self, op: str) -> Token:
        if self.current.kind == "op" and self.current.text == op:
            return self.advance()
        self.fail(f"expected '{op}'", {f"'{op}'"})

    def parse(self) -> Node:
        node = self.expr()
        if self.current.kind != "eof":
            self.fail("unexpected token", {"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"})
        return node

    def expr(self) -> Node:
        node = self.term()
        while self.current.kind == "op" and self.current.text in "+-":
            op = self.advance().text
            node = BinOp(op, node, self.term())
        return node

    def term(self) -> Node:
        node = self.factor()
        while self.current.kind == "op" and self.current.text in "*/":
            op = self.advance().text
            node = BinOp(op, node, self.factor())
        return node

    def factor(self) -> Node:
        node = self.base()
        if self.current.kind == "op" and self.current.text == "^":
            self.advance()
            node = BinOp("^", node, self.base())
        return node

    def base(self) -> Node:
        token = self.current
        if token.kind == "number":
            self.advance()
            return Num(float(token.text))
        if token.kind == "name":
            if token.text == "r":
                self.advance()
                return Var()
            if token.text in FUNCTIONS:
                self.advance()
                return Func(token.text, self.group())
            raise ParseError(f"unknown identifier {token.text!r}", token.pos, BASE_START)
        if token.kind == "op" and token.text == "(":
            return self.group()
        self.fail("expected an operand", BASE_START)

    def group(self) -> Node:
        start = self.expect_op("(")
        self.open_parens.append(start.pos)
        node = self.expr()
        self.expect_op(")")
        self.open_parens.pop()
        return node


def parse_expression(text: str) -> Node:
    """Parse ``text`` into an expression tree."""
    return _Parser(text).parse()


def _log_evaluator(root: Node):
    if isinstance(root, Func) and root.name == "exp":
        inner = root.arg

        def log_eval(r):
            with np.errstate(all="ignore"):
                return inner.evaluate(r)
    else:
        def log_eval(r):
            with np.errstate(all="ignore"):
                return np.log(root.evaluate(r))
    return log_eval


def parse_growth(expr: str) -> GrowthFunction:
    """
    Build a GrowthFunction from a textual expression in the variable r.

    When the root node is exp(.), log u is the inner expression itself.

    Raises:
        ParseError: malformed text
        NonPositive: u(r) <= 0 at one of the check points 0, 1, 10
    """
    root = parse_expression(expr)
    outer_exp = isinstance(root, Func) and root.name == "exp"
    if not outer_exp:
        for r in CHECK_POINTS:
            with np.errstate(all="ignore"):
                value = float(root.evaluate(r))
            if not value > 0:
                raise NonPositive(f"u({r:g}) = {value:g} is not positive for '{expr}'")

    logger.debug(f"Parsed growth expression '{expr}' (outer exp: {outer_exp})")
    return GrowthFunction(
        name="custom",
        expression=expr.strip(),
        log_eval=_log_evaluator(root),
    )
