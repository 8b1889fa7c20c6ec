"""Scalar expressions over coordinate names.

A tiny expression language used by manifests to describe frame components,
structure tensors and embeddings::

    exp(z) * (x + 2*y)^2 - log(1 + x^2) / 3

Trees are immutable, evaluate vectorised over numpy arrays and are closed
under symbolic differentiation with respect to any variable.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

FUNCTIONS = ("exp", "sin", "cos", "log")


class ExpressionError(ValueError):
    pass


class ParseError(ExpressionError):
    """Syntax error carrying a 1-based line and column."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.reason = message
        self.line = line
        self.column = column


class DomainError(ExpressionError):
    """Raised when evaluation leaves the domain of a function (log, division)."""


# ---------------------------------------------------------------------------
# AST


class ScalarExpr:
    """Base class of expression nodes."""

    precedence = 100

    def evaluate(self, env: Mapping[str, np.ndarray | float]) -> np.ndarray:
        raise NotImplementedError

    def diff(self, var: str) -> ScalarExpr:
        raise NotImplementedError

    def variables(self) -> frozenset[str]:
        raise NotImplementedError

    @property
    def is_constant(self) -> bool:
        return not self.variables()

    def constant_value(self) -> float:
        if not self.is_constant:
            raise ExpressionError(f"expression {self} is not constant")
        return float(self.evaluate({}))

    def __call__(self, **env) -> np.ndarray:
        return self.evaluate(env)

    def _wrap(self, child: ScalarExpr, right: bool = False) -> str:
        s = str(child)
        if child.precedence < self.precedence or (right and child.precedence == self.precedence):
            return f"({s})"
        return s


@dataclass(frozen=True, repr=False)
class Num(ScalarExpr):
    value: float

    def evaluate(self, env):
        return np.float64(self.value)

    def diff(self, var):
        return ZERO

    def variables(self):
        return frozenset()

    def __str__(self):
        v = self.value
        if v == int(v) and abs(v) < 1e15:
            s = str(int(v))
        else:
            s = repr(v)
        return s if v >= 0 else f"({s})"

    def __repr__(self):
        return f"Num({self.value!r})"


@dataclass(frozen=True, repr=False)
class Var(ScalarExpr):
    name: str

    def evaluate(self, env):
        try:
            return np.asarray(env[self.name], dtype=float)
        except KeyError:
            raise ExpressionError(f"unbound variable {self.name!r}") from None

    def diff(self, var):
        return ONE if var == self.name else ZERO

    def variables(self):
        return frozenset((self.name,))

    def __str__(self):
        return self.name

    def __repr__(self):
        return f"Var({self.name!r})"


@dataclass(frozen=True, repr=False)
class Neg(ScalarExpr):
    arg: ScalarExpr
    precedence = 3

    def evaluate(self, env):
        return -self.arg.evaluate(env)

    def diff(self, var):
        return neg(self.arg.diff(var))

    def variables(self):
        return self.arg.variables()

    def __str__(self):
        return f"-{self._wrap(self.arg)}"


@dataclass(frozen=True, repr=False)
class Add(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr
    precedence = 1

    def evaluate(self, env):
        return self.left.evaluate(env) + self.right.evaluate(env)

    def diff(self, var):
        return add(self.left.diff(var), self.right.diff(var))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"{self._wrap(self.left)} + {self._wrap(self.right, True)}"


@dataclass(frozen=True, repr=False)
class Sub(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr
    precedence = 1

    def evaluate(self, env):
        return self.left.evaluate(env) - self.right.evaluate(env)

    def diff(self, var):
        return sub(self.left.diff(var), self.right.diff(var))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"{self._wrap(self.left)} - {self._wrap(self.right, True)}"


@dataclass(frozen=True, repr=False)
class Mul(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr
    precedence = 2

    def evaluate(self, env):
        return self.left.evaluate(env) * self.right.evaluate(env)

    def diff(self, var):
        return add(mul(self.left.diff(var), self.right), mul(self.left, self.right.diff(var)))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"{self._wrap(self.left)}*{self._wrap(self.right, True)}"


@dataclass(frozen=True, repr=False)
class Div(ScalarExpr):
    left: ScalarExpr
    right: ScalarExpr
    precedence = 2

    def evaluate(self, env):
        den = self.right.evaluate(env)
        if np.any(den == 0):
            raise DomainError(f"division by zero in {self}")
        return self.left.evaluate(env) / den

    def diff(self, var):
        num = sub(mul(self.left.diff(var), self.right), mul(self.left, self.right.diff(var)))
        return div(num, power(self.right, 2))

    def variables(self):
        return self.left.variables() | self.right.variables()

    def __str__(self):
        return f"{self._wrap(self.left)}/{self._wrap(self.right, True)}"


@dataclass(frozen=True, repr=False)
class Pow(ScalarExpr):
    """Integer power ``base^exponent``."""

    base: ScalarExpr
    exponent: int
    precedence = 4

    def evaluate(self, env):
        b = self.base.evaluate(env)
        if self.exponent < 0 and np.any(b == 0):
            raise DomainError(f"zero raised to a negative power in {self}")
        return np.power(np.asarray(b, dtype=float), self.exponent)

    def diff(self, var):
        db = self.base.diff(var)
        return mul(mul(Num(float(self.exponent)), power(self.base, self.exponent - 1)), db)

    def variables(self):
        return self.base.variables()

    def __str__(self):
        e = str(self.exponent) if self.exponent >= 0 else f"({self.exponent})"
        return f"{self._wrap(self.base, True)}^{e}"


@dataclass(frozen=True, repr=False)
class Call(ScalarExpr):
    func: str
    arg: ScalarExpr
    precedence = 5

    def evaluate(self, env):
        x = self.arg.evaluate(env)
        if self.func == "exp":
            return np.exp(x)
        if self.func == "sin":
            return np.sin(x)
        if self.func == "cos":
            return np.cos(x)
        if self.func == "log":
            if np.any(np.asarray(x) <= 0):
                raise DomainError(f"log of a non-positive value in {self}")
            return np.log(x)
        raise ExpressionError(f"unknown function {self.func!r}")

    def diff(self, var):
        da = self.arg.diff(var)
        if da == ZERO:
            return ZERO
        if self.func == "exp":
            outer = self
        elif self.func == "sin":
            outer = call("cos", self.arg)
        elif self.func == "cos":
            outer = neg(call("sin", self.arg))
        else:  # log
            return div(da, self.arg)
        return mul(outer, da)

    def variables(self):
        return self.arg.variables()

    def __str__(self):
        return f"{self.func}({self.arg})"


ZERO = Num(0.0)
ONE = Num(1.0)


# ---------------------------------------------------------------------------
# smart constructors: constant folding and the obvious identities only


def _num(e: ScalarExpr) -> float | None:
    return e.value if isinstance(e, Num) else None


def neg(a: ScalarExpr) -> ScalarExpr:
    if isinstance(a, Num):
        return Num(-a.value)
    if isinstance(a, Neg):
        return a.arg
    return Neg(a)


def add(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    x, y = _num(a), _num(b)
    if x is not None and y is not None:
        return Num(x + y)
    if x == 0:
        return b
    if y == 0:
        return a
    if isinstance(b, Neg):
        return Sub(a, b.arg)
    return Add(a, b)


def sub(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    x, y = _num(a), _num(b)
    if x is not None and y is not None:
        return Num(x - y)
    if y == 0:
        return a
    if x == 0:
        return neg(b)
    return Sub(a, b)


def mul(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    x, y = _num(a), _num(b)
    if x is not None and y is not None:
        return Num(x * y)
    if x == 0 or y == 0:
        return ZERO
    if x == 1:
        return b
    if y == 1:
        return a
    if x == -1:
        return neg(b)
    if y == -1:
        return neg(a)
    return Mul(a, b)


def div(a: ScalarExpr, b: ScalarExpr) -> ScalarExpr:
    x, y = _num(a), _num(b)
    if y == 0:
        raise DomainError("division by the constant zero")
    if x == 0:
        return ZERO
    if x is not None and y is not None:
        return Num(x / y)
    if y == 1:
        return a
    return Div(a, b)


def power(a: ScalarExpr, k: int) -> ScalarExpr:
    if k == 0:
        return ONE
    if k == 1:
        return a
    x = _num(a)
    if x is not None:
        if x == 0 and k < 0:
            raise DomainError("zero raised to a negative power")
        return Num(x**k)
    return Pow(a, k)


def call(func: str, a: ScalarExpr) -> ScalarExpr:
    x = _num(a)
    if x is not None:
        return Num(float(Call(func, a).evaluate({})))
    return Call(func, a)


def const(value: float) -> Num:
    return Num(float(value))


def as_expr(value: ScalarExpr | float | int | str) -> ScalarExpr:
    if isinstance(value, ScalarExpr):
        return value
    if isinstance(value, str):
        return parse_expression(value)
    return Num(float(value))


# ---------------------------------------------------------------------------
# parser

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t]+)
  | (?P<number>(?:\d+\.\d*|\.\d+|\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^(),])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Token:
    kind: str
    text: str
    column: int


def _tokenize(text: str, line: int, col0: int) -> list[_Token]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col0 + pos)
        kind = m.lastgroup
        if kind != "ws":
            tokens.append(_Token(kind, m.group(), col0 + pos))
        pos = m.end()
    tokens.append(_Token("end", "", col0 + len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: Sequence[str] | None, line: int, col0: int):
        self.tokens = _tokenize(text, line, col0)
        self.i = 0
        self.line = line
        self.variables = None if variables is None else set(variables)

    @property
    def tok(self) -> _Token:
        return self.tokens[self.i]

    def error(self, message: str, tok: _Token | None = None):
        tok = tok or self.tok
        shown = "end of input" if tok.kind == "end" else repr(tok.text)
        return ParseError(f"{message} (found {shown})", self.line, tok.column)

    def eat(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def parse(self) -> ScalarExpr:
        if self.tok.kind == "end":
            raise self.error("empty expression")
        e = self.expr()
        if self.tok.kind != "end":
            raise self.error("unexpected token")
        return e

    def expr(self) -> ScalarExpr:
        e = self.term()
        while True:
            if self.eat("+"):
                e = add(e, self.term())
            elif self.eat("-"):
                e = sub(e, self.term())
            else:
                return e

    def term(self) -> ScalarExpr:
        e = self.unary()
        while True:
            if self.eat("*"):
                e = mul(e, self.unary())
            elif self.eat("/"):
                tok = self.tok
                d = self.unary()
                if d == ZERO:
                    raise self.error("division by zero", tok)
                e = div(e, d)
            else:
                return e

    def unary(self) -> ScalarExpr:
        if self.eat("-"):
            return neg(self.unary())
        if self.eat("+"):
            return self.unary()
        return self.power()

    def power(self) -> ScalarExpr:
        base = self.atom()
        if not self.eat("^"):
            return base
        sign = -1 if self.eat("-") else 1
        tok = self.tok
        if tok.kind != "number" or not tok.text.isdigit():
            raise self.error("exponent must be an integer literal", tok)
        self.i += 1
        if self.tok.kind == "op" and self.tok.text == "^":
            raise self.error("chained powers need parentheses")
        return power(base, sign * int(tok.text))

    def atom(self) -> ScalarExpr:
        tok = self.tok
        if tok.kind == "number":
            self.i += 1
            return Num(float(tok.text))
        if tok.kind == "ident":
            self.i += 1
            if tok.text in FUNCTIONS:
                if not self.eat("("):
                    raise self.error(f"expected '(' after {tok.text}")
                arg = self.expr()
                if not self.eat(")"):
                    raise self.error("expected ')'")
                return call(tok.text, arg)
            if self.variables is not None and tok.text not in self.variables:
                raise self.error("unknown identifier", tok)
            return Var(tok.text)
        if self.eat("("):
            e = self.expr()
            if not self.eat(")"):
                raise self.error("expected ')'")
            return e
        raise self.error("expected a number, identifier or '('")


def parse_expression(
    text: str,
    variables: Sequence[str] | None = None,
    *,
    line: int = 1,
    column: int = 1,
) -> ScalarExpr:
    """Parse ``text`` into a :class:`ScalarExpr`.

    ``variables`` restricts the admissible identifiers; ``line``/``column``
    locate ``text`` inside a larger document for error messages.
    """
    return _Parser(text, variables, line, column).parse()


def evaluate_all(exprs, env: Mapping[str, np.ndarray], shape: tuple[int, ...]) -> np.ndarray:
    """Evaluate a nested sequence of expressions into one array.

    The result has shape ``shape + nested_shape``; ``shape`` is the batch
    shape of the variables in ``env``.
    """
    arr = np.asarray(exprs, dtype=object)
    out = np.empty(shape + arr.shape)
    for idx in np.ndindex(arr.shape):
        value = arr[idx].evaluate(env)
        out[(Ellipsis,) + idx] = value
    if not np.all(np.isfinite(out)):
        raise DomainError("expression evaluated to a non-finite value")
    return out


def is_close_to_integer(x: float) -> bool:
    return math.isfinite(x) and abs(x - round(x)) < 1e-12
