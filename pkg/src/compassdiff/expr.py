"""A small nonsmooth expression language with exact directional derivatives.

Expressions are finite trees over the grammar (prefix, fully parenthesised)::

    expr := (var INDEX)
          | (const NUMBER)
          | (add expr expr ...)        n-ary sum
          | (sub expr expr)
          | (mul expr expr)
          | (scale NUMBER expr)
          | (neg expr)                 sugar for (scale -1 expr)
          | (abs expr)
          | (max expr expr ...)        n-ary pointwise max
          | (min expr expr ...)
          | (norm expr expr ...)       Euclidean norm of the child values

Every expression supports exact forward-tangent evaluation of the one-sided
directional derivative f'(x; d):

* linear nodes propagate tangents linearly, ``mul`` uses the product rule;
* ``abs(u)``: sign(u) * u' away from zero, |u'| at u = 0;
* ``max``/``min``: the tangent of the unique extremal child, or the
  max/min of tangents over all tied extremal children;
* ``norm``: <values, tangents> / ||values|| away from zero, ||tangents||
  at the origin.

The tie rules make the tangent the true one-sided derivative of the
composite, not a subgradient selection: they agree with the limit of
difference quotients whenever the children do.

Printing via :func:`format_expr` and re-parsing via :func:`parse_expr`
round-trips to an identical tree.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .oracle import DirectionalOracle

_NARY = {"add", "max", "min", "norm"}
_BINARY = {"sub", "mul"}
_UNARY = {"abs"}


class ExprParseError(ValueError):
    """Raised on malformed expression text; ``position`` is the character offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class NonsmoothExpr:
    """One node of an expression tree.  Immutable; construct via the helpers."""

    kind: str
    children: tuple["NonsmoothExpr", ...] = ()
    index: int = 0      # variable index, for kind == "var"
    coeff: float = 0.0  # literal value for "const", factor for "scale"

    def __post_init__(self):
        if self.kind == "var" and self.index < 0:
            raise ValueError("variable index must be nonnegative")
        if self.kind in _NARY and len(self.children) < 1:
            raise ValueError(f"{self.kind} needs at least one child")
        if self.kind in _BINARY and len(self.children) != 2:
            raise ValueError(f"{self.kind} needs exactly two children")
        if self.kind in _UNARY and len(self.children) != 1:
            raise ValueError(f"{self.kind} needs exactly one child")
        if self.kind == "scale" and len(self.children) != 1:
            raise ValueError("scale needs exactly one child")


def var(i: int) -> NonsmoothExpr:
    return NonsmoothExpr("var", index=i)


def const(c: float) -> NonsmoothExpr:
    return NonsmoothExpr("const", coeff=float(c))


def add(*es: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("add", tuple(es))


def sub(a: NonsmoothExpr, b: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("sub", (a, b))


def mul(a: NonsmoothExpr, b: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("mul", (a, b))


def scale(c: float, e: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("scale", (e,), coeff=float(c))


def neg(e: NonsmoothExpr) -> NonsmoothExpr:
    return scale(-1.0, e)


def abs_(e: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("abs", (e,))


def max_(*es: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("max", tuple(es))


def min_(*es: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("min", tuple(es))


def norm(*es: NonsmoothExpr) -> NonsmoothExpr:
    return NonsmoothExpr("norm", tuple(es))


def dimension(expr: NonsmoothExpr) -> int:
    """Smallest input dimension the expression can be evaluated on."""
    if expr.kind == "var":
        return expr.index + 1
    if not expr.children:
        return 0
    return max(dimension(c) for c in expr.children)


# ---------------------------------------------------------------------------
# evaluation

def eval_value(expr: NonsmoothExpr, x) -> float | np.ndarray:
    """Evaluate the expression at ``x``.

    ``x`` may be a single point of shape (n,) or a batch of shape (N, n);
    batches evaluate vectorised and return shape (N,).
    """
    x = np.asarray(x, dtype=float)
    if x.shape[-1] < dimension(expr):
        raise ValueError(
            f"dimension mismatch: expression needs {dimension(expr)} variables, point has {x.shape[-1]}"
        )
    out = _value(expr, x)
    if x.ndim == 1:
        return float(out)
    return out


def _value(e: NonsmoothExpr, x: np.ndarray):
    k = e.kind
    if k == "var":
        return x[..., e.index]
    if k == "const":
        return np.broadcast_to(e.coeff, x.shape[:-1]) if x.ndim > 1 else e.coeff
    if k == "add":
        out = _value(e.children[0], x)
        for c in e.children[1:]:
            out = out + _value(c, x)
        return out
    if k == "sub":
        return _value(e.children[0], x) - _value(e.children[1], x)
    if k == "mul":
        return _value(e.children[0], x) * _value(e.children[1], x)
    if k == "scale":
        return e.coeff * _value(e.children[0], x)
    if k == "abs":
        return np.abs(_value(e.children[0], x))
    if k == "max":
        out = _value(e.children[0], x)
        for c in e.children[1:]:
            out = np.maximum(out, _value(c, x))
        return out
    if k == "min":
        out = _value(e.children[0], x)
        for c in e.children[1:]:
            out = np.minimum(out, _value(c, x))
        return out
    if k == "norm":
        sq = _value(e.children[0], x) ** 2
        for c in e.children[1:]:
            sq = sq + _value(c, x) ** 2
        return np.sqrt(sq)
    raise ValueError(f"unknown node kind {k!r}")


def eval_dir_deriv(expr: NonsmoothExpr, x, d) -> float:
    """Exact one-sided directional derivative of the expression at x along d."""
    x = np.asarray(x, dtype=float)
    d = np.asarray(d, dtype=float)
    n = dimension(expr)
    if x.size < n or d.size < n:
        raise ValueError(
            f"dimension mismatch: expression needs {n} variables, got point of size {x.size} and direction of size {d.size}"
        )
    _, tangent = _value_and_tangent(expr, x, d)
    return tangent


def _value_and_tangent(e: NonsmoothExpr, x: np.ndarray, d: np.ndarray) -> tuple[float, float]:
    k = e.kind
    if k == "var":
        return float(x[e.index]), float(d[e.index])
    if k == "const":
        return e.coeff, 0.0
    if k == "add":
        v, t = 0.0, 0.0
        for c in e.children:
            cv, ct = _value_and_tangent(c, x, d)
            v += cv
            t += ct
        return v, t
    if k == "sub":
        av, at = _value_and_tangent(e.children[0], x, d)
        bv, bt = _value_and_tangent(e.children[1], x, d)
        return av - bv, at - bt
    if k == "mul":
        av, at = _value_and_tangent(e.children[0], x, d)
        bv, bt = _value_and_tangent(e.children[1], x, d)
        return av * bv, at * bv + av * bt
    if k == "scale":
        cv, ct = _value_and_tangent(e.children[0], x, d)
        return e.coeff * cv, e.coeff * ct
    if k == "abs":
        cv, ct = _value_and_tangent(e.children[0], x, d)
        if cv > 0.0:
            return cv, ct
        if cv < 0.0:
            return -cv, -ct
        return 0.0, abs(ct)
    if k in ("max", "min"):
        pairs = [_value_and_tangent(c, x, d) for c in e.children]
        values = [p[0] for p in pairs]
        extremum = max(values) if k == "max" else min(values)
        tied = [p[1] for p in pairs if p[0] == extremum]
        tangent = max(tied) if k == "max" else min(tied)
        return extremum, tangent
    if k == "norm":
        pairs = [_value_and_tangent(c, x, d) for c in e.children]
        nv = math.sqrt(sum(v * v for v, _ in pairs))
        if nv > 0.0:
            return nv, sum(v * t for v, t in pairs) / nv
        return 0.0, math.sqrt(sum(t * t for _, t in pairs))
    raise ValueError(f"unknown node kind {k!r}")


def as_oracle(expr: NonsmoothExpr, dim: int | None = None) -> DirectionalOracle:
    """Wrap an expression as a :class:`DirectionalOracle` of dimension ``dim``."""
    need = dimension(expr)
    if dim is None:
        dim = need
    if dim < need:
        raise ValueError(f"expression uses variable indices up to {need - 1}, beyond dimension {dim}")

    def value(x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != dim:
            raise ValueError(f"dimension mismatch: oracle expects {dim}, got {x.shape[-1]}")
        return eval_value(expr, x)

    def dir_deriv(x, d):
        x = np.asarray(x, dtype=float)
        d = np.asarray(d, dtype=float)
        if x.size != dim or d.size != dim:
            raise ValueError(f"dimension mismatch: oracle expects {dim}, got {x.size}/{d.size}")
        return eval_dir_deriv(expr, x, d)

    return DirectionalOracle(value=value, dir_deriv=dir_deriv, dim=dim)


# ---------------------------------------------------------------------------
# text form

def format_expr(e: NonsmoothExpr) -> str:
    """Canonical prefix text; ``parse_expr(format_expr(e))`` returns an equal tree."""
    k = e.kind
    if k == "var":
        return f"(var {e.index})"
    if k == "const":
        return f"(const {e.coeff!r})"
    if k == "scale":
        return f"(scale {e.coeff!r} {format_expr(e.children[0])})"
    inner = " ".join(format_expr(c) for c in e.children)
    return f"({k} {inner})"


def _tokenize(text: str) -> list[tuple[str, int]]:
    tokens = []
    i = 0
    while i < len(text):
        ch = text[i]
        if ch.isspace():
            i += 1
        elif ch in "()":
            tokens.append((ch, i))
            i += 1
        else:
            j = i
            while j < len(text) and not text[j].isspace() and text[j] not in "()":
                j += 1
            tokens.append((text[i:j], i))
            i = j
    return tokens


def parse_expr(text: str) -> NonsmoothExpr:
    """Parse the prefix syntax; raises :class:`ExprParseError` with a position."""
    tokens = _tokenize(text)
    if not tokens:
        raise ExprParseError("empty expression", 0)
    expr, rest = _parse(tokens, 0)
    if rest != len(tokens):
        raise ExprParseError("unexpected trailing input", tokens[rest][1])
    return expr


def _parse(tokens: list[tuple[str, int]], i: int) -> tuple[NonsmoothExpr, int]:
    tok, pos = tokens[i]
    if tok != "(":
        raise ExprParseError(f"expected '(', found {tok!r}", pos)
    i += 1
    if i >= len(tokens):
        raise ExprParseError("unexpected end of input", pos)
    head, head_pos = tokens[i]
    i += 1
    if head == "var":
        tok, pos = _next_atom(tokens, i, "variable index")
        try:
            index = int(tok)
        except ValueError:
            raise ExprParseError(f"bad variable index {tok!r}", pos) from None
        if index < 0:
            raise ExprParseError(f"variable index must be nonnegative, got {index}", pos)
        return _close(tokens, i + 1, var(index))
    if head == "const":
        tok, pos = _next_atom(tokens, i, "numeric literal")
        return _close(tokens, i + 1, const(_number(tok, pos)))
    if head == "scale":
        tok, pos = _next_atom(tokens, i, "numeric factor")
        factor = _number(tok, pos)
        child, i = _parse(tokens, i + 1)
        return _close(tokens, i, scale(factor, child))
    if head == "neg":
        child, i = _parse(tokens, i)
        return _close(tokens, i, neg(child))
    if head in _UNARY:
        child, i = _parse(tokens, i)
        return _close(tokens, i, NonsmoothExpr(head, (child,)))
    if head in _NARY or head in _BINARY:
        children = []
        while i < len(tokens) and tokens[i][0] == "(":
            child, i = _parse(tokens, i)
            children.append(child)
        if head in _BINARY and len(children) != 2:
            raise ExprParseError(f"{head} takes exactly two operands, found {len(children)}", head_pos)
        if not children:
            raise ExprParseError(f"{head} needs at least one operand", head_pos)
        return _close(tokens, i, NonsmoothExpr(head, tuple(children)))
    raise ExprParseError(f"unknown operator {head!r}", head_pos)


def _next_atom(tokens, i, what) -> tuple[str, int]:
    if i >= len(tokens) or tokens[i][0] in "()":
        pos = tokens[i][1] if i < len(tokens) else tokens[-1][1]
        raise ExprParseError(f"expected {what}", pos)
    return tokens[i]


def _number(tok: str, pos: int) -> float:
    try:
        return float(tok)
    except ValueError:
        raise ExprParseError(f"bad numeric literal {tok!r}", pos) from None


def _close(tokens, i, expr) -> tuple[NonsmoothExpr, int]:
    if i >= len(tokens):
        raise ExprParseError("missing ')'", tokens[-1][1])
    tok, pos = tokens[i]
    if tok != ")":
        raise ExprParseError(f"expected ')', found {tok!r}", pos)
    return expr, i + 1
