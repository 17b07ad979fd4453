"""Arithmetic expressions with parameters: parser, printer, exact evaluator.

Grammar (whitespace ignored)::

    expr  := term (("+" | "-") term)*
    term  := unary (("*" | "/") unary)*
    unary := "-" unary | power
    power := atom ("^" unary)?
    atom  := INT | NAME | "sqrt" "(" expr ")" | "(" expr ")"

``+ - * /`` associate to the left; ``^`` binds tighter than unary minus and
associates to the right.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Union

from ..errors import DivisionByZero, ExprSyntaxError, ExprValueError, UnboundParameter
from ..exactalg import Scalar


@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Neg:
    operand: Expr


@dataclass(frozen=True)
class Add:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div:
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow:
    base: Expr
    exponent: Expr


@dataclass(frozen=True)
class Sqrt:
    operand: Expr


Expr = Union[Num, Var, Neg, Add, Sub, Mul, Div, Pow, Sqrt]

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(.)", re.S)


def tokenize(text: str):
    tokens = []
    pos = 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        start = pos
        if m.group(1):
            tokens.append(("num", m.group(1), start))
        elif m.group(2):
            tokens.append(("name", m.group(2), start))
        elif m.group(3):
            ch = m.group(3)
            if ch not in "+-*/^(),":
                raise ExprSyntaxError(f"unexpected character {ch!r}", start)
            tokens.append(("op", ch, start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value):
        tok = self.take()
        if tok[1] != value or tok[0] not in ("op",):
            raise ExprSyntaxError(f"expected {value!r}, found {tok[1] or 'end of input'!r}", tok[2])
        return tok

    def parse(self) -> Expr:
        e = self.expr()
        tok = self.peek()
        if tok[0] != "end":
            raise ExprSyntaxError(f"unexpected {tok[1]!r}", tok[2])
        return e

    def expr(self) -> Expr:
        left = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            right = self.term()
            left = Add(left, right) if op == "+" else Sub(left, right)
        return left

    def term(self) -> Expr:
        left = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in "*/":
            op = self.take()[1]
            right = self.unary()
            left = Mul(left, right) if op == "*" else Div(left, right)
        return left

    def unary(self) -> Expr:
        tok = self.peek()
        if tok[0] == "op" and tok[1] == "-":
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            return Pow(base, self.unary())
        return base

    def atom(self) -> Expr:
        tok = self.take()
        kind, val, pos = tok
        if kind == "num":
            return Num(int(val))
        if kind == "name":
            if val == "sqrt":
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return Sqrt(inner)
            return Var(val)
        if kind == "op" and val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExprSyntaxError(f"unexpected {val or 'end of input'!r}", pos)


def parse_expr(text: str) -> Expr:
    """Parse text into an expression tree; raises ExprSyntaxError."""
    return _Parser(text).parse()


# --- printing ---------------------------------------------------------------

_PREC = {Add: 1, Sub: 1, Mul: 2, Div: 2, Neg: 3, Pow: 4, Num: 5, Var: 5, Sqrt: 5}
_SYM = {Add: "+", Sub: "-", Mul: "*", Div: "/"}


def to_text(e: Expr) -> str:
    """Canonical text with minimal parentheses; parse(to_text(e)) == e."""
    t = type(e)
    if t is Num:
        return str(e.value)
    if t is Var:
        return e.name
    if t is Sqrt:
        return f"sqrt({to_text(e.operand)})"
    if t is Neg:
        return "-" + _wrap(e.operand, 3)
    if t is Pow:
        return _wrap(e.base, 5) + "^" + _wrap(e.exponent, 3)
    p = _PREC[t]
    return _wrap(e.left, p) + _SYM[t] + _wrap(e.right, p + 1)


def _wrap(e: Expr, min_prec: int) -> str:
    s = to_text(e)
    return s if _PREC[type(e)] >= min_prec else f"({s})"


# --- evaluation -------------------------------------------------------------

def eval_expr(e: Expr, env: Mapping[str, object]) -> Scalar:
    """Evaluate exactly; sqrt follows the quadratic-tower rules."""
    t = type(e)
    if t is Num:
        return Scalar(e.value)
    if t is Var:
        try:
            return Scalar.coerce(env[e.name])
        except KeyError:
            raise UnboundParameter(e.name) from None
    if t is Neg:
        return -eval_expr(e.operand, env)
    if t is Add:
        return eval_expr(e.left, env) + eval_expr(e.right, env)
    if t is Sub:
        return eval_expr(e.left, env) - eval_expr(e.right, env)
    if t is Mul:
        return eval_expr(e.left, env) * eval_expr(e.right, env)
    if t is Div:
        den = eval_expr(e.right, env)
        if den.is_zero():
            raise DivisionByZero(f"division by zero in {to_text(e)}")
        return eval_expr(e.left, env) / den
    if t is Pow:
        ex = eval_expr(e.exponent, env)
        if ex.d is not None or ex.a.denominator != 1:
            raise ExprValueError(f"non-integer exponent in {to_text(e)}")
        base = eval_expr(e.base, env)
        if base.is_zero() and ex.a < 0:
            raise DivisionByZero(f"division by zero in {to_text(e)}")
        return base ** int(ex.a)
    if t is Sqrt:
        return eval_expr(e.operand, env).sqrt()
    raise TypeError(f"not an expression: {e!r}")


def free_names(e: Expr) -> set[str]:
    t = type(e)
    if t is Var:
        return {e.name}
    if t is Num:
        return set()
    if t in (Neg, Sqrt):
        return free_names(e.operand)
    if t is Pow:
        return free_names(e.base) | free_names(e.exponent)
    return free_names(e.left) | free_names(e.right)


def linear_split(e: Expr, basis: set[str]) -> dict[str, Expr]:
    """Coefficients of a linear combination of basis symbols.

    ``(l+1)*u1 - l*e1 + u2/2`` -> {"u1": l+1, "e1": -l, "u2": 1/2}.  Raises
    ValueError if e is not linear in the basis or has a constant term.
    """
    out = _linear(e, basis)
    if None in out:
        raise ExprValueError(f"constant term in linear combination {to_text(e)}")
    return out


def _linear(e: Expr, basis: set[str]) -> dict:
    t = type(e)
    if not (free_names(e) & basis):
        return {None: e}
    if t is Var:
        return {e.name: Num(1)}
    if t is Neg:
        return {k: _neg(v) for k, v in _linear(e.operand, basis).items()}
    if t in (Add, Sub):
        a = _linear(e.left, basis)
        b = _linear(e.right, basis)
        for k, v in b.items():
            v = v if t is Add else _neg(v)
            a[k] = Add(a[k], v) if k in a else v
        return a
    if t is Mul:
        if free_names(e.left) & basis and free_names(e.right) & basis:
            raise ExprValueError(f"product of basis symbols in {to_text(e)}")
        if free_names(e.left) & basis:
            return {k: _mul(v, e.right) for k, v in _linear(e.left, basis).items()}
        return {k: _mul(e.left, v) for k, v in _linear(e.right, basis).items()}
    if t is Div:
        if free_names(e.right) & basis:
            raise ExprValueError(f"division by a basis symbol in {to_text(e)}")
        return {k: Div(v, e.right) for k, v in _linear(e.left, basis).items()}
    raise ExprValueError(f"non-linear use of basis symbols in {to_text(e)}")


def _neg(v: Expr) -> Expr:
    return v.operand if type(v) is Neg else Neg(v)


def _mul(a: Expr, b: Expr) -> Expr:
    if a == Num(1):
        return b
    if b == Num(1):
        return a
    return Mul(a, b)


def scalar_text(x) -> str:
    return str(Scalar.coerce(x))


def parse_scalar(text: str) -> Scalar:
    """Inverse of str(Scalar): parse and evaluate a parameter-free expression."""
    return eval_expr(parse_expr(text), {})


def parse_rational(text: str) -> Fraction:
    v = parse_scalar(text)
    return v.to_fraction()
