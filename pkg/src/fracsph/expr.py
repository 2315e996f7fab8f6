"""Tiny arithmetic language for test functions ``f(x)`` and orders ``alpha(x)``.

Grammar (``^`` and ``**`` are synonyms, right-associative, binding tighter
than unary minus)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | "+" unary | power
    power  := atom (("^" | "**") unary)?
    atom   := NUMBER | "x" | "pi" | FUNC "(" expr ("," expr)* ")" | "(" expr ")"

Functions: sin, cos, exp, abs, sqrt (one argument) and pow (two).
Evaluation accepts floats or numpy arrays.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

import numpy as np

from fracsph.errors import EvaluationError, FracSPHError

__all__ = [
    "Binary",
    "Call",
    "Const",
    "Expr",
    "Num",
    "ParseError",
    "Unary",
    "Var",
    "evaluate",
    "parse",
    "to_source",
]

FUNCTIONS = {"sin": 1, "cos": 1, "exp": 1, "abs": 1, "sqrt": 1, "pow": 2}
CONSTANTS = {"pi": math.pi}
VARIABLE = "x"


class ParseError(FracSPHError, ValueError):
    """Syntax error at byte ``offset``; ``expected`` lists acceptable tokens."""

    def __init__(self, message: str, offset: int, expected=()):
        self.offset = offset
        self.expected = frozenset(expected)
        detail = f"; expected one of {', '.join(sorted(self.expected))}" if expected else ""
        super().__init__(f"{message} at offset {offset}{detail}")


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str = VARIABLE


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Unary:
    op: str
    operand: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    args: tuple


Expr = Union[Num, Var, Const, Unary, Binary, Call]

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<num>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<name>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>\*\*|[-+*/^(),])
    """,
    re.VERBOSE,
)

_START = frozenset({"number", "x", "pi", "function", "(", "-", "+"})
_AFTER_OPERAND = frozenset({"+", "-", "*", "/", "^", "**"})


@dataclass(frozen=True)
class _Tok:
    kind: str  # "num", "name", "op", "end"
    text: str
    offset: int


def _tokenize(src: str) -> list:
    tokens = []
    pos = 0
    while pos < len(src):
        m = _TOKEN.match(src, pos)
        if m is None:
            raise ParseError(f"unexpected character {src[pos]!r}", _byte_offset(src, pos))
        if m.lastgroup != "ws":
            tokens.append(_Tok(m.lastgroup, m.group(), _byte_offset(src, pos)))
        pos = m.end()
    tokens.append(_Tok("end", "", _byte_offset(src, len(src))))
    return tokens


def _byte_offset(src: str, pos: int) -> int:
    return len(src[:pos].encode("utf-8"))


class _Parser:
    def __init__(self, src: str):
        self.tokens = _tokenize(src)
        self.pos = 0

    @property
    def tok(self) -> _Tok:
        return self.tokens[self.pos]

    def advance(self) -> _Tok:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def accept(self, *ops):
        if self.tok.kind == "op" and self.tok.text in ops:
            return self.advance().text
        return None

    def expect(self, op: str, expected=None):
        if self.accept(op) is None:
            raise ParseError(self._describe(), self.tok.offset, expected or {op})

    def _describe(self) -> str:
        if self.tok.kind == "end":
            return "unexpected end of input"
        return f"unexpected token {self.tok.text!r}"

    def parse(self):
        node = self.expr()
        if self.tok.kind != "end":
            raise ParseError(self._describe(), self.tok.offset, _AFTER_OPERAND | {"end"})
        return node

    def expr(self):
        node = self.term()
        while (op := self.accept("+", "-")) is not None:
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.unary()
        while (op := self.accept("*", "/")) is not None:
            node = Binary(op, node, self.unary())
        return node

    def unary(self):
        op = self.accept("-", "+")
        if op == "-":
            return Unary("-", self.unary())
        if op == "+":
            return self.unary()
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^", "**") is not None:
            return Binary("^", base, self.unary())
        return base

    def atom(self):
        tok = self.tok
        if tok.kind == "num":
            self.advance()
            return Num(float(tok.text))
        if tok.kind == "name":
            self.advance()
            if tok.text == VARIABLE:
                return Var()
            if tok.text in CONSTANTS:
                return Const(tok.text)
            if tok.text in FUNCTIONS:
                return self.call(tok)
            raise ParseError(f"unknown identifier {tok.text!r}", tok.offset, _START)
        if self.accept("(") is not None:
            node = self.expr()
            self.expect(")", _AFTER_OPERAND | {")"})
            return node
        raise ParseError(self._describe(), tok.offset, _START)

    def call(self, name_tok: _Tok):
        self.expect("(")
        args = [self.expr()]
        while self.accept(",") is not None:
            args.append(self.expr())
        self.expect(")", _AFTER_OPERAND | {",", ")"})
        arity = FUNCTIONS[name_tok.text]
        if len(args) != arity:
            raise ParseError(
                f"{name_tok.text} takes {arity} argument(s), got {len(args)}",
                name_tok.offset,
            )
        return Call(name_tok.text, tuple(args))


def parse(src: str) -> Expr:
    if not src or not src.strip():
        raise ParseError("empty expression", 0, _START)
    return _Parser(src).parse()


def to_source(e: Expr) -> str:
    """Canonical, fully parenthesised text that parses back to ``e``."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, Var):
        return VARIABLE
    if isinstance(e, Const):
        return e.name
    if isinstance(e, Unary):
        return f"(-{to_source(e.operand)})"
    if isinstance(e, Binary):
        return f"({to_source(e.left)} {e.op} {to_source(e.right)})"
    if isinstance(e, Call):
        return f"{e.name}({', '.join(to_source(a) for a in e.args)})"
    raise TypeError(f"not an expression node: {e!r}")


def is_constant(e: Expr) -> bool:
    """True when ``e`` does not reference ``x``."""
    if isinstance(e, Var):
        return False
    if isinstance(e, Unary):
        return is_constant(e.operand)
    if isinstance(e, Binary):
        return is_constant(e.left) and is_constant(e.right)
    if isinstance(e, Call):
        return all(is_constant(a) for a in e.args)
    return True


def _power(base, expo):
    base, expo = np.broadcast_arrays(np.asarray(base, float), np.asarray(expo, float))
    bad = (base < 0) & (expo != np.round(expo))
    if np.any(bad):
        raise EvaluationError("negative base raised to a non-integer power")
    if np.any((base == 0) & (expo < 0)):
        raise EvaluationError("division by zero: zero raised to a negative power")
    return np.power(base, expo)


def _eval(e: Expr, x):
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return x
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Unary):
        return -_eval(e.operand, x)
    if isinstance(e, Binary):
        left = _eval(e.left, x)
        right = _eval(e.right, x)
        if e.op == "+":
            return np.add(left, right)
        if e.op == "-":
            return np.subtract(left, right)
        if e.op == "*":
            return np.multiply(left, right)
        if e.op == "/":
            if np.any(np.asarray(right) == 0):
                raise EvaluationError("division by zero")
            return np.divide(left, right)
        return _power(left, right)
    if isinstance(e, Call):
        args = [_eval(a, x) for a in e.args]
        if e.name == "sqrt":
            if np.any(np.asarray(args[0]) < 0):
                raise EvaluationError("square root of a negative number")
            return np.sqrt(args[0])
        if e.name == "pow":
            return _power(*args)
        return {"sin": np.sin, "cos": np.cos, "exp": np.exp, "abs": np.abs}[e.name](args[0])
    raise TypeError(f"not an expression node: {e!r}")


def evaluate(e: Expr, x):
    """Evaluate ``e`` at ``x`` (float or array); returns the same shape."""
    with np.errstate(over="ignore", invalid="ignore"):
        out = _eval(e, np.asarray(x, dtype=float) if np.ndim(x) else float(x))
    if np.ndim(x) == 0:
        return float(out)
    return np.broadcast_to(np.asarray(out, dtype=float), np.shape(x)).copy()
