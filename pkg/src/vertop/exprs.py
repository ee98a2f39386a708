"""A small language for fields, its parser, renderer and evaluator.

    expr := "id" | atom | "nprod(" expr "," expr "," int ")" | "d(" expr ")"
    atom := "beta[" int "]" | "gamma[" int "]" | "sp[" kind "," int "," int "]"
          | "current[" int "," int "]" | "cartan[" int "," int "]"
    kind := "bb" | "gg" | "bg"

``current[u,v]`` is the field of E_uv and ``cartan[u,v]`` that of E_uu - E_vv.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .scalar import ONE, ZERO, Scalar, render_scalar

__all__ = [
    "ExprError",
    "ParseError",
    "Identity",
    "Beta",
    "Gamma",
    "Sp",
    "Current",
    "Cartan",
    "Nprod",
    "Deriv",
    "parse_expr",
    "render_expr",
    "validate",
    "expr_family",
    "build_field",
    "identify_field",
]


class ExprError(ValueError):
    pass


class ParseError(ExprError):
    """Syntax error at a byte offset, with the set of tokens that would have fit."""

    def __init__(self, message, offset, expected=()):
        self.offset = offset
        self.expected = tuple(sorted(set(expected)))
        exp = f"; expected one of {', '.join(self.expected)}" if self.expected else ""
        super().__init__(f"{message} at offset {offset}{exp}")


@dataclass(frozen=True)
class Identity:
    pass


@dataclass(frozen=True)
class Beta:
    i: int


@dataclass(frozen=True)
class Gamma:
    i: int


@dataclass(frozen=True)
class Sp:
    kind: str
    i: int
    j: int


@dataclass(frozen=True)
class Current:
    u: int
    v: int


@dataclass(frozen=True)
class Cartan:
    u: int
    v: int


@dataclass(frozen=True)
class Nprod:
    a: "Expr"
    b: "Expr"
    n: int


@dataclass(frozen=True)
class Deriv:
    a: "Expr"


Expr = Union[Identity, Beta, Gamma, Sp, Current, Cartan, Nprod, Deriv]

_KINDS = ("bb", "gg", "bg")
_TOKEN = re.compile(r"[A-Za-z_]+|-?\d+|[\[\](),]")


class _Parser:
    def __init__(self, src):
        self.src = src
        self.pos = 0

    def _skip(self):
        while self.pos < len(self.src) and self.src[self.pos].isspace():
            self.pos += 1

    def peek(self):
        self._skip()
        m = _TOKEN.match(self.src, self.pos)
        if m:
            return m.group(0), self.pos
        if self.pos >= len(self.src):
            return None, self.pos
        return self.src[self.pos], self.pos

    def take(self, expected):
        tok, at = self.peek()
        if tok not in expected:
            what = "end of input" if tok is None else repr(tok)
            raise ParseError(f"unexpected {what}", at, expected)
        self.pos = at + len(tok)
        return tok

    def integer(self):
        tok, at = self.peek()
        if tok is None or not re.fullmatch(r"-?\d+", tok):
            what = "end of input" if tok is None else repr(tok)
            raise ParseError(f"unexpected {what}", at, ("<int>",))
        self.pos = at + len(tok)
        return int(tok), at

    def index(self):
        value, at = self.integer()
        if value < 1:
            raise ParseError(f"index {value} out of range (indices start at 1)", at)
        return value

    def expr(self):
        heads = ("id", "beta", "gamma", "sp", "current", "cartan", "nprod", "d")
        head = self.take(heads)
        if head == "id":
            return Identity()
        if head in ("beta", "gamma"):
            self.take(("[",))
            i = self.index()
            self.take(("]",))
            return Beta(i) if head == "beta" else Gamma(i)
        if head == "sp":
            self.take(("[",))
            kind = self.take(_KINDS)
            self.take((",",))
            i = self.index()
            self.take((",",))
            j = self.index()
            self.take(("]",))
            return Sp(kind, i, j)
        if head in ("current", "cartan"):
            self.take(("[",))
            _, at = self.peek()
            u = self.index()
            self.take((",",))
            v = self.index()
            self.take(("]",))
            if u == v:
                raise ParseError(f"{head}[{u},{v}] needs two distinct indices", at)
            return Current(u, v) if head == "current" else Cartan(u, v)
        if head == "nprod":
            self.take(("(",))
            a = self.expr()
            self.take((",",))
            b = self.expr()
            self.take((",",))
            n, _ = self.integer()
            self.take((")",))
            return Nprod(a, b, n)
        self.take(("(",))
        a = self.expr()
        self.take((")",))
        return Deriv(a)


def parse_expr(src, g=None, n=None):
    """Parse ``src``; with ``g`` or ``n`` given, indices are also range-checked."""
    p = _Parser(src)
    e = p.expr()
    tok, at = p.peek()
    if tok is not None:
        raise ParseError(f"trailing input {tok!r}", at, ("<end>",))
    if g is not None or n is not None:
        validate(e, g, n)
    return e


def render_expr(e):
    if isinstance(e, Identity):
        return "id"
    if isinstance(e, Beta):
        return f"beta[{e.i}]"
    if isinstance(e, Gamma):
        return f"gamma[{e.i}]"
    if isinstance(e, Sp):
        return f"sp[{e.kind},{e.i},{e.j}]"
    if isinstance(e, Current):
        return f"current[{e.u},{e.v}]"
    if isinstance(e, Cartan):
        return f"cartan[{e.u},{e.v}]"
    if isinstance(e, Nprod):
        return f"nprod({render_expr(e.a)},{render_expr(e.b)},{e.n})"
    if isinstance(e, Deriv):
        return f"d({render_expr(e.a)})"
    raise TypeError(f"not an expression: {e!r}")


def _family(e):
    """'betagamma', 'affine' or None (identity only) for the atoms of e."""
    if isinstance(e, (Beta, Gamma, Sp)):
        return {"betagamma"}
    if isinstance(e, (Current, Cartan)):
        return {"affine"}
    if isinstance(e, Nprod):
        return _family(e.a) | _family(e.b)
    if isinstance(e, Deriv):
        return _family(e.a)
    return set()


def expr_family(e):
    """{'betagamma'}, {'affine'}, both, or the empty set for pure identity expressions."""
    return _family(e)


def validate(e, g=None, n=None):
    fam = _family(e)
    if len(fam) > 1:
        raise ExprError("expression mixes beta-gamma fields with sl_n currents")

    def walk(x):
        if isinstance(x, (Beta, Gamma)) and g is not None and x.i > g:
            raise ExprError(f"{render_expr(x)}: index out of range 1..{g}")
        if isinstance(x, Sp) and g is not None and max(x.i, x.j) > g:
            raise ExprError(f"{render_expr(x)}: index out of range 1..{g}")
        if isinstance(x, (Current, Cartan)) and n is not None and max(x.u, x.v) > n:
            raise ExprError(f"{render_expr(x)}: index out of range 1..{n}")
        if isinstance(x, Nprod):
            walk(x.a)
            walk(x.b)
        if isinstance(x, Deriv):
            walk(x.a)

    walk(e)
    return e


# ---------------------------------------------------------------------------
# evaluation


def build_field(e, bg_cfg=None, sl_cfg=None, cache=None):
    """Field denoted by ``e`` on the beta-gamma model or the phi_c model."""
    from .affine import E, current_field
    from .betagamma import beta_field, gamma_field, sp_quadratic_field
    from .fields import DerivativeField, IdentityField, NProductField

    fam = _family(e)
    validate(e, bg_cfg.g if bg_cfg else None, sl_cfg.n if sl_cfg else None)
    if "affine" in fam:
        if sl_cfg is None:
            raise ExprError("current fields need an sl_n configuration")
        space = sl_cfg.space
    else:
        if bg_cfg is None:
            raise ExprError("beta-gamma fields need a symplectic configuration")
        space = bg_cfg.space
    cache = {} if cache is None else cache

    def go(x):
        hit = cache.get(x)
        if hit is not None:
            return hit
        if isinstance(x, Identity):
            f = IdentityField(space)
        elif isinstance(x, Beta):
            f = beta_field(bg_cfg, x.i)
        elif isinstance(x, Gamma):
            f = gamma_field(bg_cfg, x.i)
        elif isinstance(x, Sp):
            f = sp_quadratic_field(bg_cfg, x.kind, x.i, x.j)
        elif isinstance(x, Current):
            f = current_field(sl_cfg, E(x.u, x.v), name=render_expr(x))
        elif isinstance(x, Cartan):
            f = current_field(sl_cfg, {(x.u, x.u): ONE, (x.v, x.v): -ONE}, name=render_expr(x))
        elif isinstance(x, Nprod):
            f = NProductField(go(x.a), go(x.b), x.n, name=render_expr(x))
        else:
            f = DerivativeField(go(x.a))
        cache[x] = f
        return f

    return go(e)


def _features(f, window, probes, N):
    """Coefficients of every mode image on every probe, keyed by position."""
    out = {}
    for k in range(window[0], window[1] + 1):
        op = f.mode(k)
        M = op.need(N)
        for pi, p in enumerate(probes):
            v = op.apply(p.at(M), N)
            for m, c in v.terms.items():
                out[(k, pi, m)] = c
    return out


def _solve(target, columns):
    """Exact solution of target = sum x_i columns[i] over sparse dict vectors, or None."""
    keys = sorted(set(target).union(*[set(c) for c in columns]), key=repr)
    rows = [[col.get(k, ZERO) for col in columns] + [target.get(k, ZERO)] for k in keys]
    ncol = len(columns)
    pivots = []
    r = 0
    for c in range(ncol):
        piv = next((i for i in range(r, len(rows)) if rows[i][c]), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        inv = rows[r][c].inverse()
        rows[r] = [x * inv for x in rows[r]]
        for i in range(len(rows)):
            if i != r and rows[i][c]:
                f = rows[i][c]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    for i in range(r, len(rows)):
        if rows[i][ncol]:
            return None
    x = [ZERO] * ncol
    for i, c in enumerate(pivots):
        x[c] = rows[i][ncol]
    return x


def identify_field(f, candidates, probes, N, window=(-3, 3)):
    """Express ``f`` as a combination of named candidate fields on the probes.

    Returns a rendering such as ``"tau * id"`` or None when no combination
    matches.
    """
    target = _features(f, window, probes, N)
    if not target:
        return "0"
    names = list(candidates)
    cols = [_features(candidates[nm], window, probes, N) for nm in names]
    x = _solve(target, cols)
    if x is None:
        return None
    parts = []
    for nm, c in zip(names, x):
        if not c:
            continue
        cs = render_scalar(c)
        if cs == "1":
            parts.append(nm)
        elif cs == "-1":
            parts.append(f"-{nm}")
        else:
            parts.append(f"{cs} * {nm}")
    return " + ".join(parts) if parts else "0"
