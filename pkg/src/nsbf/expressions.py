"""Small arithmetic expression language for potentials and boundary coefficients.

Grammar (whitespace insignificant)::

    expr   := term (('+' | '-') term)*
    term   := unary (('*' | '/') unary)*
    unary  := '-' unary | power
    power  := atom ('^' unary)?          # right-associative
    atom   := NUMBER | CONST | VAR | FUNC '(' expr ')' | '(' expr ')'

Functions: sin cos tan exp log sqrt abs sinh cosh tanh sech.
Constants: pi, e, i.  One designated variable symbol per context ("x" for
potentials, "w" for boundary coefficients).  All arithmetic is complex.
"""

from __future__ import annotations

import cmath
from dataclasses import dataclass

import numpy as np

from .errors import ExpressionError
from .grid import Grid, SampledFunction

__all__ = ["Expr", "parse", "evaluate", "sample", "to_string", "parse_constant"]

_FUNCTIONS = {
    "sin": cmath.sin,
    "cos": cmath.cos,
    "tan": cmath.tan,
    "exp": cmath.exp,
    "log": cmath.log,
    "sqrt": cmath.sqrt,
    "abs": lambda z: complex(abs(z)),
    "sinh": cmath.sinh,
    "cosh": cmath.cosh,
    "tanh": cmath.tanh,
    "sech": lambda z: 1.0 / cmath.cosh(z),
}

_CONSTANTS = {"pi": complex(cmath.pi), "e": complex(cmath.e), "i": 1j}


class Expr:
    """Base AST node."""

    __slots__ = ()


@dataclass(frozen=True)
class Num(Expr):
    __slots__ = ("value",)
    value: complex


@dataclass(frozen=True)
class Var(Expr):
    __slots__ = ("name",)
    name: str


@dataclass(frozen=True)
class Neg(Expr):
    __slots__ = ("arg",)
    arg: Expr


@dataclass(frozen=True)
class BinOp(Expr):
    __slots__ = ("op", "left", "right")
    op: str
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Call(Expr):
    __slots__ = ("func", "arg")
    func: str
    arg: Expr


class _Tokenizer:
    def __init__(self, text):
        self.text = text
        self.pos = 0
        self.tokens = []
        self._run()
        self.idx = 0

    def _run(self):
        text = self.text
        i = 0
        while i < len(text):
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "+-*/^()":
                self.tokens.append((ch, ch, i))
                i += 1
                continue
            if ch.isdigit() or ch == ".":
                j = i
                while j < len(text) and (text[j].isdigit() or text[j] == "."):
                    j += 1
                if j < len(text) and text[j] in "eE":
                    k = j + 1
                    if k < len(text) and text[k] in "+-":
                        k += 1
                    if k < len(text) and text[k].isdigit():
                        while k < len(text) and text[k].isdigit():
                            k += 1
                        j = k
                try:
                    val = float(text[i:j])
                except ValueError:
                    raise ExpressionError(f"bad number {text[i:j]!r}", i)
                self.tokens.append(("num", val, i))
                i = j
                continue
            if ch.isalpha() or ch == "_":
                j = i
                while j < len(text) and (text[j].isalnum() or text[j] == "_"):
                    j += 1
                self.tokens.append(("name", text[i:j], i))
                i = j
                continue
            raise ExpressionError(f"unexpected character {ch!r}", i)
        self.tokens.append(("end", None, len(text)))

    def peek(self):
        return self.tokens[self.idx]

    def next(self):
        tok = self.tokens[self.idx]
        self.idx += 1
        return tok


class _Parser:
    def __init__(self, text, variable):
        if not text or not text.strip():
            raise ExpressionError("empty expression")
        self.toks = _Tokenizer(text)
        self.variable = variable

    def parse(self):
        node = self._expr()
        kind, val, pos = self.toks.peek()
        if kind != "end":
            raise ExpressionError(f"unexpected {val!r}", pos)
        return node

    def _expr(self):
        node = self._term()
        while self.toks.peek()[0] in ("+", "-"):
            op = self.toks.next()[0]
            node = BinOp(op, node, self._term())
        return node

    def _term(self):
        node = self._unary()
        while self.toks.peek()[0] in ("*", "/"):
            op = self.toks.next()[0]
            node = BinOp(op, node, self._unary())
        return node

    def _unary(self):
        if self.toks.peek()[0] == "-":
            self.toks.next()
            return Neg(self._unary())
        return self._power()

    def _power(self):
        base = self._atom()
        if self.toks.peek()[0] == "^":
            self.toks.next()
            return BinOp("^", base, self._unary())
        return base

    def _atom(self):
        kind, val, pos = self.toks.next()
        if kind == "num":
            return Num(complex(val))
        if kind == "(":
            node = self._expr()
            k, v, p = self.toks.next()
            if k != ")":
                raise ExpressionError("expected ')'", p)
            return node
        if kind == "name":
            if val in _FUNCTIONS:
                k, v, p = self.toks.next()
                if k != "(":
                    raise ExpressionError(f"{val} expects '('", p)
                arg = self._expr()
                k, v, p = self.toks.next()
                if k != ")":
                    raise ExpressionError("expected ')'", p)
                return Call(val, arg)
            if val in _CONSTANTS:
                return Num(_CONSTANTS[val])
            if val == self.variable:
                return Var(val)
            raise ExpressionError(f"unknown identifier {val!r}", pos)
        raise ExpressionError(f"unexpected {val!r}", pos)


def parse(text: str, variable: str = "x") -> Expr:
    """Parse ``text`` into an AST with the given variable symbol."""
    return _Parser(text, variable).parse()


def evaluate(expr: Expr, value: complex = 0j) -> complex:
    """Evaluate the AST at the given variable value (complex arithmetic)."""
    if isinstance(expr, Num):
        return expr.value
    if isinstance(expr, Var):
        return complex(value)
    if isinstance(expr, Neg):
        r = -evaluate(expr.arg, value)
        # keep the imaginary part's zero unsigned so sqrt/log of negated
        # reals stay on the principal branch
        return complex(r.real, 0.0) if r.imag == 0 else r
    if isinstance(expr, Call):
        arg = evaluate(expr.arg, value)
        try:
            return _FUNCTIONS[expr.func](arg)
        except (ValueError, OverflowError) as exc:
            raise ExpressionError(f"{expr.func}({arg}): {exc}") from exc
    if isinstance(expr, BinOp):
        a = evaluate(expr.left, value)
        b = evaluate(expr.right, value)
        if expr.op == "+":
            return a + b
        if expr.op == "-":
            return a - b
        if expr.op == "*":
            return a * b
        if expr.op == "/":
            if b == 0:
                raise ExpressionError("division by zero")
            return a / b
        if expr.op == "^":
            try:
                return a**b
            except (ValueError, OverflowError, ZeroDivisionError) as exc:
                raise ExpressionError(f"({a})^({b}): {exc}") from exc
    raise ExpressionError(f"malformed AST node {expr!r}")


def sample(expr: Expr, grid: Grid) -> SampledFunction:
    """Evaluate the expression at every grid node."""
    vals = np.empty(grid.n, dtype=complex)
    for i, xi in enumerate(grid.nodes):
        try:
            vals[i] = evaluate(expr, xi)
        except ExpressionError as exc:
            raise ExpressionError(f"at node {i} (x = {xi}): {exc}") from exc
    return SampledFunction(grid, vals)


_PREC = {"+": 1, "-": 1, "*": 2, "/": 2, "neg": 3, "^": 4}


def to_string(expr: Expr) -> str:
    """Print the AST back to parseable text (diagnostics; round-trips)."""

    def fmt_num(z):
        if z.imag == 0:
            return repr(z.real)
        if z == 1j:
            return "i"
        return f"({z.real!r}+{z.imag!r}*i)" if z.real else f"({z.imag!r}*i)"

    def go(node, parent_prec):
        if isinstance(node, Num):
            s = fmt_num(node.value)
            return f"({s})" if s.startswith("-") and parent_prec > 1 else s
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Neg):
            inner = go(node.arg, _PREC["neg"])
            s = f"-{inner}"
            return f"({s})" if parent_prec > _PREC["neg"] else s
        if isinstance(node, Call):
            return f"{node.func}({go(node.arg, 0)})"
        if isinstance(node, BinOp):
            p = _PREC[node.op]
            left = go(node.left, p if node.op != "^" else p + 1)
            right = go(node.right, p + 1 if node.op != "^" else p)
            s = f"{left}{node.op}{right}"
            return f"({s})" if p < parent_prec else s
        raise ExpressionError(f"malformed AST node {node!r}")

    return go(expr, 0)


def parse_constant(text: str) -> complex:
    """Parse and evaluate a variable-free expression (e.g. "pi", "2+3*i")."""
    return evaluate(parse(text, variable="\x00"), 0j)
