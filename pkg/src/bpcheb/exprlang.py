"""Small arithmetic expression language for problem files.

Grammar (whitespace-insensitive, no implicit multiplication):

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | IDENT | IDENT '(' expr ')' | '(' expr ')'

Unary minus binds tighter than '*' but looser than '^', so "-t^2" means
-(t^2) and "-(t-1)^2" negates the whole square.  Variables are t (time) and
s (kernel integration variable); functions exp, sin, cos, sqrt, ln, abs;
constants pi and e.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

__all__ = [
    "Expr",
    "Num",
    "Var",
    "Const",
    "Neg",
    "BinOp",
    "Call",
    "ExprSyntaxError",
    "ExprEvalError",
    "parse",
    "evaluate",
    "to_str",
    "variables",
    "as_function",
]

FUNCTIONS = {
    "exp": math.exp,
    "sin": math.sin,
    "cos": math.cos,
    "sqrt": math.sqrt,
    "ln": math.log,
    "abs": abs,
}
CONSTANTS = {"pi": math.pi, "e": math.e}
VARIABLES = ("t", "s")


class ExprSyntaxError(Exception):
    """Malformed source; carries the byte offset and the expected tokens."""

    def __init__(self, message: str, offset: int, expected: tuple[str, ...] = ()):
        self.offset = offset
        self.expected = expected
        hint = f" (expected one of: {', '.join(expected)})" if expected else ""
        super().__init__(f"{message} at offset {offset}{hint}")


class ExprEvalError(Exception):
    """Domain failure during evaluation (reports the variable values)."""


@dataclass(frozen=True)
class Num:
    value: float


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    func: str
    arg: "Expr"


Expr = Union[Num, Var, Const, Neg, BinOp, Call]

_NUMBER = re.compile(r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?")
_IDENT = re.compile(r"[A-Za-z_][A-Za-z_0-9]*")


class _Parser:
    def __init__(self, src: str):
        self.src = src
        self.pos = 0

    def _skip_ws(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self._skip_ws()
        return self.src[self.pos] if self.pos < len(self.src) else ""

    def expect(self, char: str):
        if self.peek() != char:
            raise ExprSyntaxError(
                f"unexpected {self.describe_here()}", self.pos, (repr(char),)
            )
        self.pos += 1

    def describe_here(self) -> str:
        return repr(self.src[self.pos]) if self.pos < len(self.src) else "end of input"

    def parse_expr(self) -> Expr:
        node = self.parse_term()
        while self.peek() in ("+", "-"):
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.parse_term())
        return node

    def parse_term(self) -> Expr:
        node = self.parse_unary()
        while self.peek() in ("*", "/"):
            op = self.src[self.pos]
            self.pos += 1
            node = BinOp(op, node, self.parse_unary())
        return node

    def parse_unary(self) -> Expr:
        if self.peek() == "-":
            self.pos += 1
            return Neg(self.parse_unary())
        return self.parse_power()

    def parse_power(self) -> Expr:
        base = self.parse_atom()
        if self.peek() == "^":
            self.pos += 1
            return BinOp("^", base, self.parse_unary())
        return base

    def parse_atom(self) -> Expr:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            node = self.parse_expr()
            self.expect(")")
            return node
        m = _NUMBER.match(self.src, self.pos)
        if m:
            self.pos = m.end()
            return Num(float(m.group()))
        m = _IDENT.match(self.src, self.pos)
        if m:
            name = m.group()
            self.pos = m.end()
            if self.peek() == "(":
                if name not in FUNCTIONS:
                    raise ExprSyntaxError(f"unknown function {name!r}", m.start())
                self.pos += 1
                arg = self.parse_expr()
                self.expect(")")
                return Call(name, arg)
            if name in VARIABLES:
                return Var(name)
            if name in CONSTANTS:
                return Const(name)
            raise ExprSyntaxError(f"unknown identifier {name!r}", m.start())
        raise ExprSyntaxError(
            f"unexpected {self.describe_here()}",
            self.pos,
            ("number", "identifier", "'('", "'-'"),
        )


def parse(src: str) -> Expr:
    """Parse source text into an expression tree."""
    p = _Parser(src)
    node = p.parse_expr()
    if p.peek():
        raise ExprSyntaxError(
            f"trailing input {p.describe_here()}", p.pos, ("operator", "end of input")
        )
    return node


def evaluate(e: Expr, t: float, s: float = 0.0) -> float:
    """IEEE double evaluation with t and s bound."""
    try:
        return _eval(e, t, s)
    except ExprEvalError:
        raise
    except (ValueError, ZeroDivisionError, OverflowError) as exc:
        raise ExprEvalError(f"{exc} while evaluating {to_str(e)!r} at t={t}, s={s}") from exc


def _eval(e: Expr, t: float, s: float) -> float:
    if isinstance(e, Num):
        return e.value
    if isinstance(e, Var):
        return t if e.name == "t" else s
    if isinstance(e, Const):
        return CONSTANTS[e.name]
    if isinstance(e, Neg):
        return -_eval(e.operand, t, s)
    if isinstance(e, Call):
        arg = _eval(e.arg, t, s)
        try:
            return float(FUNCTIONS[e.func](arg))
        except ValueError as exc:
            raise ExprEvalError(
                f"domain error in {e.func}({arg}) at t={t}, s={s}"
            ) from exc
    if isinstance(e, BinOp):
        a = _eval(e.left, t, s)
        b = _eval(e.right, t, s)
        if e.op == "+":
            return a + b
        if e.op == "-":
            return a - b
        if e.op == "*":
            return a * b
        if e.op == "/":
            if b == 0.0:
                raise ExprEvalError(f"division by zero in {to_str(e)!r} at t={t}, s={s}")
            return a / b
        try:
            return math.pow(a, b)
        except (ValueError, OverflowError) as exc:
            raise ExprEvalError(f"{a}^{b} undefined at t={t}, s={s}") from exc
    raise TypeError(f"not an expression node: {e!r}")


# precedences used by the printer; Neg sits between '*' and '^'
_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "^": 4}
_NEG_PREC = 3


def _prec(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _PREC[e.op]
    if isinstance(e, Neg):
        return _NEG_PREC
    return 9


def to_str(e: Expr) -> str:
    """Render with minimal parentheses; parse(to_str(e)) == e."""
    if isinstance(e, Num):
        return repr(e.value)
    if isinstance(e, (Var, Const)):
        return e.name
    if isinstance(e, Call):
        return f"{e.func}({to_str(e.arg)})"
    if isinstance(e, Neg):
        inner = to_str(e.operand)
        if _prec(e.operand) < _NEG_PREC:
            inner = f"({inner})"
        return f"-{inner}"
    if isinstance(e, BinOp):
        lp, rp = _prec(e.left), _prec(e.right)
        left, right = to_str(e.left), to_str(e.right)
        if e.op == "^":
            # base must be an atom; exponent is a unary
            if lp <= _PREC["^"]:
                left = f"({left})"
            if rp < _NEG_PREC:
                right = f"({right})"
        else:
            # left-associative: right children of equal precedence keep parens
            if lp < _PREC[e.op]:
                left = f"({left})"
            if rp <= _PREC[e.op]:
                right = f"({right})"
        return f"{left}{e.op}{right}"
    raise TypeError(f"not an expression node: {e!r}")


def variables(e: Expr) -> set[str]:
    """Names of the variables the expression references."""
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Neg):
        return variables(e.operand)
    if isinstance(e, Call):
        return variables(e.arg)
    if isinstance(e, BinOp):
        return variables(e.left) | variables(e.right)
    return set()


def as_function(e: Expr):
    """Compile to a plain (t, s) -> float callable."""
    return lambda t, s=0.0: evaluate(e, t, s)
