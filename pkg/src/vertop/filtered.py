"""Model spaces, the depth filtration and precision-tracked vectors.

A model space has ``d`` species of coordinates ``x[s,-n]`` (species ``s``,
depth ``n >= 1``).  Its basis vectors are monomials, optionally multiplied
by a fixed Gaussian factor ``exp(-a * sum x^2)`` (the *twist* ``a``).

``U_N`` is the span of basis vectors containing a coordinate of depth > N,
i.e. the kernel of restriction to the first ``N`` depths.  A
:class:`FilteredVector` at precision ``N`` is a class modulo ``U_N``; it only
stores monomials of maximal depth ``<= N``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Mapping, Optional

from gmpy2 import mpq

from .scalar import ONE, RHO, ZERO, Scalar, as_scalar

__all__ = [
    "PrecisionError",
    "UnsupportedModelError",
    "ModelSpace",
    "plain_space",
    "gaussian_space",
    "phi_space",
    "Monomial",
    "monomial",
    "maxdepth",
    "filtration_degree",
    "render_monomial",
    "FilteredVector",
    "vector",
    "truncate",
    "linear_combine",
    "PrimitiveOp",
    "Mult",
    "Deriv",
    "PiT",
    "apply_primitive",
    "primitive_need",
    "gaussian_moment",
    "basis_monomials",
    "Probe",
]


class PrecisionError(ValueError):
    """Raised when a result would need more precision than is known."""

    def __init__(self, message, required=None):
        super().__init__(message)
        self.required = required


class UnsupportedModelError(ValueError):
    pass


# ---------------------------------------------------------------------------
# monomials
#
# A monomial is a sorted tuple of ((species, depth), exponent) pairs; the
# empty tuple is the constant 1.

Monomial = tuple


def monomial(*factors):
    """Build a monomial from ``(species, depth)`` or ``((species, depth), exp)`` items."""
    exps = {}
    for f in factors:
        if isinstance(f[0], tuple):
            var, e = f
        else:
            var, e = f, 1
        exps[var] = exps.get(var, 0) + e
    return tuple(sorted((v, e) for v, e in exps.items() if e))


def maxdepth(m):
    return max((v[1] for v, _ in m), default=0)


def filtration_degree(m):
    """Largest n with m in U_n (0 when m lies in no U_n, n >= 1)."""
    return max(maxdepth(m) - 1, 0)


def degree(m):
    return sum(e for _, e in m)


def mono_mul(m, var, k=1):
    out = []
    done = False
    for v, e in m:
        if not done and v == var:
            out.append((v, e + k))
            done = True
        elif not done and v > var:
            out.append((var, k))
            out.append((v, e))
            done = True
        else:
            out.append((v, e))
    if not done:
        out.append((var, k))
    return tuple(out)


def mono_times(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    exps = dict(m1)
    for v, e in m2:
        exps[v] = exps.get(v, 0) + e
    return tuple(sorted(exps.items()))


def mono_exponent(m, var):
    for v, e in m:
        if v == var:
            return e
    return 0


def mono_lower(m, var):
    """Remove one power of var (var must divide m)."""
    out = []
    for v, e in m:
        if v == var:
            if e > 1:
                out.append((v, e - 1))
        else:
            out.append((v, e))
    return tuple(out)


def render_monomial(m):
    if not m:
        return "1"
    parts = []
    for (s, n), e in m:
        parts.append(f"x[{s},-{n}]" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


# ---------------------------------------------------------------------------
# model spaces


class ModelSpace:
    """Polynomial model with ``d`` species and Gaussian twist ``a``.

    ``twist`` is 0 (plain polynomials), 1/2 (the ``exp(-x^2/2)`` model) or
    ``rho*c`` with ``c`` a positive rational square (the ``phi_c`` model).
    Instances are interned, so identity and equality agree.
    """

    __slots__ = ("d", "twist", "c", "sigma", "kind", "_two_a", "_kernels", "__weakref__")

    def __init__(self, d, twist, c=None, sigma=None, kind="plain"):
        self.d = d
        self.twist = twist
        self.c = c
        self.sigma = sigma
        self.kind = kind
        self._two_a = twist * 2
        self._kernels = {}

    def __repr__(self):
        if self.kind == "phi":
            return f"ModelSpace(d={self.d}, twist=rho*{self.c})"
        return f"ModelSpace(d={self.d}, twist={self.twist})"

    def basis_name(self):
        return {"plain": "", "gaussian": "G", "phi": "phi"}[self.kind]

    def check_var(self, var):
        s, n = var
        if not (1 <= s <= self.d) or n < 1:
            raise IndexError(f"variable x[{s},-{n}] outside model with {self.d} species")


@lru_cache(maxsize=None)
def plain_space(d):
    return ModelSpace(d, ZERO, kind="plain")


@lru_cache(maxsize=None)
def gaussian_space(d):
    return ModelSpace(d, Scalar.from_rational(mpq(1, 2)), kind="gaussian")


def _rational_sqrt(q):
    import gmpy2

    num, den = q.numerator, q.denominator
    rn, en = gmpy2.iroot(num, 2)
    rd, ed = gmpy2.iroot(den, 2)
    if not (en and ed):
        raise ValueError(f"c = {q} is not the square of a rational")
    return mpq(rn, rd)


@lru_cache(maxsize=None)
def _phi_space(d, c):
    sigma = 1 / _rational_sqrt(c)
    return ModelSpace(d, RHO * Scalar.from_rational(c), c=c, sigma=sigma, kind="phi")


def phi_space(d, c):
    """Model of ``phi_c = exp(-pi c sum x^2)`` times polynomials."""
    c = mpq(c)
    if c <= 0:
        raise ValueError("c must be positive")
    return _phi_space(d, c)


def basis_monomials(d, max_degree, max_depth, min_degree=0):
    """All monomials in ``d`` species with degree and depth bounds."""
    variables = [(s, n) for n in range(1, max_depth + 1) for s in range(1, d + 1)]
    variables.sort()
    out = []

    def rec(start, remaining, acc):
        if sum(e for _, e in acc) >= min_degree:
            out.append(tuple(acc))
        if remaining == 0:
            return
        for idx in range(start, len(variables)):
            v = variables[idx]
            for e in range(1, remaining + 1):
                acc.append((v, e))
                rec(idx + 1, remaining - e, acc)
                acc.pop()

    rec(0, max_degree, [])
    return out


# ---------------------------------------------------------------------------
# vectors


class FilteredVector:
    """Finite combination of basis monomials, known modulo ``U_precision``.

    ``precision=None`` means the vector is known exactly.  Treat instances
    as immutable.
    """

    __slots__ = ("terms", "precision")

    def __init__(self, terms=None, precision=None, _clean=False):
        if terms is None:
            terms = {}
        elif not _clean:
            terms = {m: as_scalar(c) for m, c in dict(terms).items()}
            terms = {m: c for m, c in terms.items() if c}
            if precision is not None:
                terms = {m: c for m, c in terms.items() if maxdepth(m) <= precision}
        self.terms = terms
        self.precision = precision

    def is_exact(self):
        return self.precision is None

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __len__(self):
        return len(self.terms)

    def coefficient(self, m):
        return self.terms.get(m, ZERO)

    def __eq__(self, other):
        if not isinstance(other, FilteredVector):
            return NotImplemented
        return self.precision == other.precision and self.terms == other.terms

    def __hash__(self):
        return hash((self.precision, frozenset(self.terms.items())))

    def agrees(self, other, N):
        """Equality modulo U_N."""
        return truncate(self, N).terms == truncate(other, N).terms

    def __add__(self, other):
        return linear_combine([(ONE, self), (ONE, other)])

    def __sub__(self, other):
        return linear_combine([(ONE, self), (-ONE, other)])

    def __neg__(self):
        return FilteredVector({m: -c for m, c in self.terms.items()}, self.precision, _clean=True)

    def scale(self, c):
        c = as_scalar(c)
        if not c:
            return FilteredVector({}, self.precision, _clean=True)
        return FilteredVector({m: c * v for m, v in self.terms.items()}, self.precision, _clean=True)

    def maxdepth(self):
        return max((maxdepth(m) for m in self.terms), default=0)

    def render(self, basis=""):
        return render_vector(self, basis)

    def __repr__(self):
        return f"FilteredVector({render_vector(self)})"


def vector(terms, precision=None):
    """Build a vector from ``{monomial: coefficient}``."""
    return FilteredVector(terms, precision)


def render_vector(v, basis=""):
    if not v.terms:
        body = "0"
    else:
        parts = []
        for m in sorted(v.terms, key=_mono_sort_key):
            c = v.terms[m]
            ms = render_monomial(m)
            if basis:
                ms = basis if ms == "1" else f"{ms}*{basis}"
            cs = str(c)
            if ms == "1":
                parts.append(cs)
            elif cs == "1":
                parts.append(ms)
            elif cs == "-1":
                parts.append(f"-{ms}")
            else:
                parts.append(f"({cs})*{ms}")
        body = " + ".join(parts)
    return body if v.precision is None else f"{body} @ precision {v.precision}"


def _mono_sort_key(m):
    return (degree(m), m)


def truncate(v, N):
    """Reduce ``v`` modulo ``U_N``."""
    if v.precision is not None and N > v.precision:
        raise PrecisionError(f"vector known mod U_{v.precision}, requested U_{N}", required=N)
    terms = {m: c for m, c in v.terms.items() if maxdepth(m) <= N}
    return FilteredVector(terms, N, _clean=True)


def _min_precision(precs):
    known = [p for p in precs if p is not None]
    return min(known) if known else None


def linear_combine(pairs):
    """Sum of ``c * v``; the result precision is the minimum input precision."""
    pairs = list(pairs)
    prec = _min_precision(v.precision for _, v in pairs)
    acc = {}
    for c, v in pairs:
        c = as_scalar(c)
        if not c:
            continue
        for m, x in v.terms.items():
            if prec is not None and maxdepth(m) > prec:
                continue
            y = acc.get(m)
            acc[m] = c * x if y is None else y + c * x
    return FilteredVector({m: x for m, x in acc.items() if x}, prec, _clean=True)


def accumulate(acc, c, terms, limit=None):
    """In place ``acc += c * terms`` on raw term dicts (``limit`` drops deeper monomials)."""
    for m, x in terms.items():
        if limit is not None and maxdepth(m) > limit:
            continue
        y = acc.get(m)
        if y is None:
            acc[m] = x * c
        else:
            z = y + x * c
            if z:
                acc[m] = z
            else:
                del acc[m]


# ---------------------------------------------------------------------------
# primitive operators


@dataclass(frozen=True)
class PrimitiveOp:
    kind: str  # "mult" | "deriv" | "pit"
    var: Optional[tuple] = None

    def __str__(self):
        if self.kind == "pit":
            return "pi_t"
        s, n = self.var
        return f"x[{s},-{n}]" if self.kind == "mult" else f"d/dx[{s},-{n}]"


def Mult(species, depth):
    return PrimitiveOp("mult", (species, depth))


def Deriv(species, depth):
    return PrimitiveOp("deriv", (species, depth))


PiT = PrimitiveOp("pit")


def primitive_need(op, N):
    """Input precision needed for an output known mod U_N."""
    if op.kind == "mult":
        return N
    if op.kind == "deriv":
        return max(N, op.var[1])
    return N + 1


def primitive_output_precision(op, M):
    if M is None:
        return None
    if op.kind == "mult":
        return M
    if op.kind == "deriv":
        if M < op.var[1]:
            raise PrecisionError(
                f"{op} needs input precision >= {op.var[1]}, got {M}", required=op.var[1]
            )
        return M
    if M < 1:
        raise PrecisionError("pi_t needs input precision >= 1", required=1)
    return M - 1


_DOUBLE_FACT = {-1: 1, 0: 1}


def _double_factorial(k):
    if k not in _DOUBLE_FACT:
        _DOUBLE_FACT[k] = k * _double_factorial(k - 2)
    return _DOUBLE_FACT[k]


def gaussian_moment(space, e):
    """Integral of y^e exp(-pi c y^2) dy with pi written as rho."""
    if e % 2:
        return ZERO
    k = e // 2
    base = space._two_a ** (-k) if k else ONE  # (2 rho c)^(-k)
    return base * Scalar.from_rational(_double_factorial(2 * k - 1) * space.sigma)


def _kernel(op, space, m):
    """Image of one basis monomial as a tuple of (monomial, Scalar) pairs (exact)."""
    key = (op, m)
    cache = space._kernels
    hit = cache.get(key)
    if hit is not None:
        return hit
    if op.kind == "mult":
        out = ((mono_mul(m, op.var), ONE),)
    elif op.kind == "deriv":
        var = op.var
        e = mono_exponent(m, var)
        out = []
        if e:
            out.append((mono_lower(m, var), Scalar.from_rational(e)))
        if space.kind != "plain":
            out.append((mono_mul(m, var), -space._two_a))
        out = tuple(out)
    else:
        if space.kind != "phi":
            raise UnsupportedModelError("pi_t is only defined on the phi_c model")
        shallow = {}
        deep = []
        for (s, n), e in m:
            if n == 1:
                shallow[s] = e
            else:
                deep.append(((s, n - 1), e))
        factor = ONE
        for s in range(1, space.d + 1):
            factor = factor * gaussian_moment(space, shallow.get(s, 0))
            if not factor:
                break
        out = ((tuple(deep), factor),) if factor else ()
    cache[key] = out
    return out


def apply_primitive(op, v, space):
    """Apply a primitive operator; the output precision follows the transfer rule."""
    if op.kind != "pit":
        space.check_var(op.var)
    elif space.kind != "phi":
        raise UnsupportedModelError("pi_t is only defined on the phi_c model")
    out_prec = primitive_output_precision(op, v.precision)
    acc = {}
    for m, c in v.terms.items():
        for m2, k in _kernel(op, space, m):
            if out_prec is not None and maxdepth(m2) > out_prec:
                continue
            y = acc.get(m2)
            acc[m2] = c * k if y is None else y + c * k
    return FilteredVector({m: x for m, x in acc.items() if x}, out_prec, _clean=True)


# ---------------------------------------------------------------------------
# probes


class Probe:
    """A test vector available at any requested precision.

    Exact vectors are returned unchanged; lazily defined vectors (e.g. an
    infinite series truncated on demand) are computed and memoized per
    precision.
    """

    def __init__(self, name, at: Callable[[int], FilteredVector] = None, exact: FilteredVector = None):
        self.name = name
        self._at = at
        self._exact = exact
        self._memo = {}

    @classmethod
    def exact(cls, v, name=None):
        return cls(name or render_vector(v), exact=v)

    def at(self, N):
        if self._exact is not None:
            return self._exact
        hit = self._memo.get(N)
        if hit is None:
            hit = self._memo[N] = self._at(N)
        return hit

    def __repr__(self):
        return f"Probe({self.name})"
