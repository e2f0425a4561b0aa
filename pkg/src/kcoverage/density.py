"""Density construction for scenarios: closed-form expressions parsed by a
small recursive-descent parser, and grid-sampled densities with bilinear
interpolation.

Expression grammar (whitespace-insensitive)::

    expr   := term (('+' | '-') term)*
    term   := factor (('*' | 'x') factor)*      # 'x' only as infix times when
    factor := unary ('^' factor)?               # written as '×'; see tokens
    unary  := '-' unary | atom
    atom   := NUMBER | 'x' | 'y' | 'exp' '(' expr ')' | '(' expr ')'
"""

from __future__ import annotations

import re

import numpy as np

from .quadrature import DensityField


class ExpressionError(ValueError):
    pass


_TOKEN = re.compile(
    r"\s*(?:(?P<num>\d+\.?\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?)"
    r"|(?P<name>exp|x|y)"
    r"|(?P<op>[-+*^()×−]))"
)


def _tokenize(text):
    pos = 0
    out = []
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExpressionError(f"bad character at {text[pos:]!r}")
        if m.group("num"):
            out.append(("num", float(m.group("num"))))
        elif m.group("name"):
            out.append(("name", m.group("name")))
        else:
            op = m.group("op")
            op = {"×": "*", "−": "-"}.get(op, op)
            out.append(("op", op))
        pos = m.end()
    out.append(("end", None))
    return out


class _Parser:
    def __init__(self, tokens):
        self.tokens = tokens
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self, kind=None, value=None):
        tok = self.tokens[self.i]
        if kind is not None and tok[0] != kind:
            raise ExpressionError(f"expected {kind}, got {tok}")
        if value is not None and tok[1] != value:
            raise ExpressionError(f"expected {value!r}, got {tok}")
        self.i += 1
        return tok

    def expr(self):
        node = self.term()
        while self.peek() == ("op", "+") or self.peek() == ("op", "-"):
            op = self.take()[1]
            rhs = self.term()
            node = (lambda a, b: (lambda x, y: a(x, y) + b(x, y)))(node, rhs) if op == "+" else (
                lambda a, b: (lambda x, y: a(x, y) - b(x, y))
            )(node, rhs)
        return node

    def term(self):
        node = self.factor()
        while self.peek() == ("op", "*"):
            self.take()
            rhs = self.factor()
            node = (lambda a, b: (lambda x, y: a(x, y) * b(x, y)))(node, rhs)
        return node

    def factor(self):
        base = self.unary()
        if self.peek() == ("op", "^"):
            self.take()
            expo = self.factor()  # right-associative
            return lambda x, y: base(x, y) ** expo(x, y)
        return base

    def unary(self):
        if self.peek() == ("op", "-"):
            self.take()
            inner = self.unary()
            return lambda x, y: -inner(x, y)
        return self.atom()

    def atom(self):
        kind, val = self.peek()
        if kind == "num":
            self.take()
            return lambda x, y, v=val: np.full_like(x, v)
        if kind == "name":
            self.take()
            if val == "x":
                return lambda x, y: x
            if val == "y":
                return lambda x, y: y
            self.take("op", "(")
            inner = self.expr()
            self.take("op", ")")
            return lambda x, y: np.exp(inner(x, y))
        if (kind, val) == ("op", "("):
            self.take()
            inner = self.expr()
            self.take("op", ")")
            return inner
        raise ExpressionError(f"unexpected token {self.tokens[self.i]}")


def parse_expression(text):
    """Compile an expression into a vectorized (x, y) -> values callable."""
    parser = _Parser(_tokenize(text))
    fn = parser.expr()
    parser.take("end")
    return fn


def expression_density(text) -> DensityField:
    fn = parse_expression(text)
    return DensityField(lambda pts: fn(pts[:, 0], pts[:, 1]), name=f"expr({text})")


def grid_density(values, extent) -> DensityField:
    """Bilinear interpolation of a sampled grid.

    values: (ny, nx) array of samples at cell nodes spanning the extent
    (x0, x1, y0, y1); points outside clamp to the nearest node.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 2 or values.shape[0] < 2 or values.shape[1] < 2:
        raise ValueError("grid density needs a 2-D array with >= 2 nodes per axis")
    if np.any(values < 0):
        raise ValueError("density samples must be nonnegative")
    x0, x1, y0, y1 = map(float, extent)
    ny, nx = values.shape

    def evaluate(pts):
        gx = np.clip((pts[:, 0] - x0) / (x1 - x0) * (nx - 1), 0, nx - 1 - 1e-12)
        gy = np.clip((pts[:, 1] - y0) / (y1 - y0) * (ny - 1), 0, ny - 1 - 1e-12)
        ix = gx.astype(int)
        iy = gy.astype(int)
        fx = gx - ix
        fy = gy - iy
        v00 = values[iy, ix]
        v01 = values[iy, ix + 1]
        v10 = values[iy + 1, ix]
        v11 = values[iy + 1, ix + 1]
        return (
            v00 * (1 - fx) * (1 - fy)
            + v01 * fx * (1 - fy)
            + v10 * (1 - fx) * fy
            + v11 * fx * fy
        )

    return DensityField(evaluate, name="grid")


def load_grid_density(path) -> DensityField:
    """Load an .npz with arrays 'values' (ny, nx) and 'extent' (x0, x1, y0, y1)."""
    data = np.load(path)
    return grid_density(data["values"], data["extent"])
