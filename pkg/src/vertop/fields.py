"""Operators, fields and their n-th normal products on filtered model spaces.

An :class:`Operator` acts on basis monomials with an explicit continuity
transfer ``need(N)``: the input precision that determines the output modulo
``U_N``.  Images of single monomials are memoized, so applying an operator to
a vector is a linear combination of cached images.

A :class:`Field` is a family of operators ``mode(k)`` (the coefficient of
``z^(-k-1)``) together with a deep-image certificate ``deep(N)``: for every
``k >= deep(N)`` the image of ``mode(-k)`` lies in ``U_N``.
"""

from __future__ import annotations

import itertools
import threading
from math import comb
from typing import Iterable, Sequence

from .filtered import (
    FilteredVector,
    PrecisionError,
    Probe,
    _kernel,
    accumulate,
    basis_monomials,
    maxdepth,
    primitive_need,
    render_vector,
    truncate,
)
from .report import Entry, timed
from .scalar import ONE, ZERO, Scalar, as_scalar

__all__ = [
    "Operator",
    "ZeroOperator",
    "ScaledIdentity",
    "PrimTerm",
    "OperatorSeries",
    "LinComb",
    "Field",
    "FreeField",
    "IdentityField",
    "LinearField",
    "DerivativeField",
    "NProductField",
    "apply_mode",
    "nproduct",
    "derivative",
    "binomial",
    "commutator",
    "check_locality",
    "find_locality_order",
    "check_field_axioms",
    "DualFunctional",
    "dual_mode",
    "commutator_formula_mode",
]


def binomial(n, i):
    """Generalized binomial coefficient for integer n (possibly negative)."""
    if i < 0:
        return 0
    if n >= 0:
        return comb(n, i) if i <= n else 0
    # C(n, i) = (-1)^i C(i - n - 1, i)
    return (-1) ** i * comb(i - n - 1, i)


class Operator:
    """Continuous linear operator on a model space."""

    is_zero = False

    def __init__(self, space):
        self.space = space
        self._cache = {}
        self._lock = threading.Lock()

    def need(self, N):
        raise NotImplementedError

    def _compute(self, m, N):
        raise NotImplementedError

    def image(self, m, N):
        """Image of the basis monomial ``m`` modulo ``U_N`` as a term dict."""
        key = (m, N)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._compute(m, N)
            with self._lock:
                self._cache[key] = hit
        return hit

    def apply(self, v, N, skip_deep=True):
        """Apply to ``v`` modulo ``U_N``.

        With ``skip_deep`` the monomials of ``v`` lying in ``U_need(N)`` are
        skipped; continuity guarantees they contribute nothing mod ``U_N``.
        """
        M = self.need(N)
        if v.precision is not None and v.precision < M:
            raise PrecisionError(
                f"operator needs input precision {M} for output U_{N}, got {v.precision}",
                required=M,
            )
        acc = {}
        if self.is_zero:
            return FilteredVector(acc, N, _clean=True)
        for m, c in v.terms.items():
            if skip_deep and maxdepth(m) > M:
                continue
            accumulate(acc, c, self.image(m, N))
        return FilteredVector(acc, N, _clean=True)

    def __call__(self, v, N):
        return self.apply(v, N)


class ZeroOperator(Operator):
    is_zero = True

    def need(self, N):
        return N

    def _compute(self, m, N):
        return {}


class ScaledIdentity(Operator):
    def __init__(self, space, coef=ONE):
        super().__init__(space)
        self.coef = as_scalar(coef)
        self.is_zero = not self.coef

    def need(self, N):
        return N

    def _compute(self, m, N):
        if maxdepth(m) > N or not self.coef:
            return {}
        return {m: self.coef}


class PrimTerm(Operator):
    """``coef * ops[0] o ops[1] o ... o ops[-1]`` (rightmost applied first)."""

    def __init__(self, space, coef, ops):
        super().__init__(space)
        self.coef = as_scalar(coef)
        self.ops = tuple(ops)
        self.is_zero = not self.coef

    def targets(self, N):
        t = [N]
        for op in self.ops[:-1]:
            t.append(primitive_need(op, t[-1]))
        return t

    def need(self, N):
        if not self.ops:
            return N
        t = self.targets(N)
        return primitive_need(self.ops[-1], t[-1])

    def _compute(self, m, N):
        if not self.coef:
            return {}
        terms = {m: self.coef}
        t = self.targets(N)
        space = self.space
        for idx in range(len(self.ops) - 1, -1, -1):
            op = self.ops[idx]
            limit = t[idx]
            acc = {}
            for mm, c in terms.items():
                for m2, k in _kernel(op, space, mm):
                    if maxdepth(m2) > limit:
                        continue
                    y = acc.get(m2)
                    if y is None:
                        acc[m2] = c * k
                    else:
                        z = y + c * k
                        if z:
                            acc[m2] = z
                        else:
                            del acc[m2]
            terms = acc
            if not terms:
                break
        if not self.ops:
            terms = {mm: c for mm, c in terms.items() if maxdepth(mm) <= N}
        return terms

    def __repr__(self):
        body = " o ".join(str(op) for op in self.ops) or "id"
        return f"({self.coef})*{body}"


class OperatorSeries(Operator):
    """Infinite sum of :class:`PrimTerm` with a sound finite cutoff.

    ``terms(N)`` yields the terms that can contribute modulo ``U_N``; every
    omitted term maps the whole space into ``U_N``.  ``need(N)`` is the
    continuity transfer of the whole series.  ``post`` optionally composes
    on the left with a fixed operator (used for ``pi_t^j`` prefactors).
    """

    def __init__(self, space, terms, need, label=""):
        super().__init__(space)
        self._terms = terms
        self._need = need
        self.label = label
        self._term_cache = {}

    def terms(self, N):
        hit = self._term_cache.get(N)
        if hit is None:
            hit = self._term_cache[N] = tuple(self._terms(N))
        return hit

    def need(self, N):
        return self._need(N)

    def _compute(self, m, N):
        acc = {}
        for term in self.terms(N):
            accumulate(acc, ONE, term.image(m, N))
        return acc

    def __repr__(self):
        return f"OperatorSeries({self.label})"


class LinComb(Operator):
    """Finite linear combination of operators."""

    def __init__(self, space, pairs):
        super().__init__(space)
        self.pairs = [(as_scalar(c), op) for c, op in pairs if as_scalar(c) and not op.is_zero]
        self.is_zero = not self.pairs

    def need(self, N):
        return max((op.need(N) for _, op in self.pairs), default=N)

    def _compute(self, m, N):
        acc = {}
        for c, op in self.pairs:
            accumulate(acc, c, op.image(m, N))
        return acc


class Composite(Operator):
    """``outer o inner``."""

    def __init__(self, outer, inner):
        super().__init__(outer.space)
        self.outer = outer
        self.inner = inner
        self.is_zero = outer.is_zero or inner.is_zero

    def need(self, N):
        return self.inner.need(self.outer.need(N))

    def _compute(self, m, N):
        if self.is_zero:
            return {}
        P = self.outer.need(N)
        w = FilteredVector(self.inner.image(m, P), P, _clean=True)
        return self.outer.apply(w, N).terms


def commutator(A, B):
    return LinComb(A.space, [(ONE, Composite(A, B)), (-ONE, Composite(B, A))])


# ---------------------------------------------------------------------------
# fields


class Field:
    """Lazy family of modes with a deep-image certificate."""

    name = "field"

    def __init__(self, space):
        self.space = space
        self._modes = {}

    def mode(self, k):
        hit = self._modes.get(k)
        if hit is None:
            hit = self._modes[k] = self._make_mode(k)
        return hit

    def _make_mode(self, k):
        raise NotImplementedError

    def deep(self, N):
        """K(N): Im mode(-k) is contained in U_N for all k >= K(N)."""
        raise NotImplementedError

    def __repr__(self):
        return f"<{type(self).__name__} {self.name}>"


class FreeField(Field):
    """Field whose every mode is ``coef * primitive`` (free-field generators).

    ``table(k)`` returns ``(coef, PrimitiveOp)`` or None for a zero mode.
    Negative modes ``-n`` must be multiplications by depth-``n``
    coordinates, which gives the certificate ``K(N) = N + 1``.
    """

    def __init__(self, space, table, name):
        super().__init__(space)
        self.table = table
        self.name = name

    def _make_mode(self, k):
        entry = self.table(k)
        if entry is None:
            return ZeroOperator(self.space)
        coef, op = entry
        return PrimTerm(self.space, coef, (op,))

    def deep(self, N):
        return N + 1


class IdentityField(Field):
    """Y(1, z) = Id: mode -1 is the identity, every other mode vanishes."""

    name = "id"

    def _make_mode(self, k):
        if k == -1:
            return ScaledIdentity(self.space, ONE)
        return ZeroOperator(self.space)

    def deep(self, N):
        return 2


class LinearField(Field):
    def __init__(self, space, pairs, name=None):
        super().__init__(space)
        self.pairs = [(as_scalar(c), f) for c, f in pairs]
        self.name = name or " + ".join(f"({c})*{f.name}" for c, f in self.pairs)

    def _make_mode(self, k):
        return LinComb(self.space, [(c, f.mode(k)) for c, f in self.pairs])

    def deep(self, N):
        return max((f.deep(N) for _, f in self.pairs), default=1)


class DerivativeField(Field):
    """d/dz of a field: mode j is ``-j * a.mode(j - 1)``."""

    def __init__(self, a):
        super().__init__(a.space)
        self.a = a
        self.name = f"d({a.name})"

    def _make_mode(self, j):
        if j == 0:
            return ZeroOperator(self.space)
        return LinComb(self.space, [(Scalar.from_rational(-j), self.a.mode(j - 1))])

    def deep(self, N):
        return max(self.a.deep(N) - 1, 1)


class NProductMode(Operator):
    """Mode ``j`` of ``a_(n) b``, evaluated lazily from the two infinite sums."""

    def __init__(self, a, b, n, j, slack=0):
        super().__init__(a.space)
        self.a, self.b, self.n, self.j = a, b, n, j
        self.slack = slack
        self._plan = {}

    def plan(self, N):
        """Finite list of (coef, outer, inner) with outer o inner contributing mod U_N."""
        hit = self._plan.get(N)
        if hit is not None:
            return hit
        a, b, n, j = self.a, self.b, self.n, self.j
        out = []
        last1 = n if n >= 0 else n + a.deep(N) - 1 + self.slack
        for i in range(0, last1 + 1):
            c = (-1) ** i * binomial(n, i)
            if c:
                A, B = a.mode(n - i), b.mode(i + j)
                if not (A.is_zero or B.is_zero):
                    out.append((Scalar.from_rational(c), A, B))
        last2 = n + j + b.deep(N) - 1 + self.slack
        if n >= 0:
            last2 = min(last2, n)
        for i in range(0, last2 + 1):
            c = -((-1) ** ((n + i) % 2)) * binomial(n, i)
            if c:
                B, A = b.mode(n - i + j), a.mode(i)
                if not (A.is_zero or B.is_zero):
                    out.append((Scalar.from_rational(c), B, A))
        self._plan[N] = out
        return out

    def need(self, N):
        return max((inner.need(outer.need(N)) for _, outer, inner in self.plan(N)), default=N)

    def _compute(self, m, N):
        acc = {}
        for c, outer, inner in self.plan(N):
            P = outer.need(N)
            w = inner.image(m, P)
            if not w:
                continue
            r = outer.apply(FilteredVector(w, P, _clean=True), N)
            accumulate(acc, c, r.terms)
        return acc


class NProductField(Field):
    """``a(z)_(n) b(z)`` with certificates derived from the operands."""

    def __init__(self, a, b, n, slack=0, name=None):
        if a.space is not b.space:
            raise ValueError("n-th product of fields on different spaces")
        super().__init__(a.space)
        self.a, self.b, self.n = a, b, n
        self.slack = slack
        self.name = name or f"nprod({a.name},{b.name},{n})"
        self._deep = {}

    def _make_mode(self, j):
        return NProductMode(self.a, self.b, self.n, j, self.slack)

    def deep(self, N):
        hit = self._deep.get(N)
        if hit is not None:
            return hit
        a, b, n = self.a, self.b, self.n
        K = n + b.deep(N)
        last1 = n if n >= 0 else n + a.deep(N) - 1
        for i in range(0, last1 + 1):
            if binomial(n, i) == 0:
                continue
            A = a.mode(n - i)
            if A.is_zero:
                continue
            K = max(K, i + b.deep(A.need(N)))
        K = max(K, 1)
        self._deep[N] = K
        return K


def apply_mode(f, k, v, N):
    """``f_(k) v`` modulo ``U_N``."""
    return f.mode(k).apply(v, N)


def nproduct(a, b, n, slack=0):
    return NProductField(a, b, n, slack=slack)


def derivative(a):
    return DerivativeField(a)


def commutator_formula_mode(a, b, n, j):
    """Mode j of a_(n) b for n >= 0 via sum_i C(n,i)(-1)^(n-i) [a_(i), b_(j-i+n)]."""
    if n < 0:
        raise ValueError("the finite commutator formula needs n >= 0")
    pairs = []
    for i in range(n + 1):
        c = comb(n, i) * (-1) ** (n - i)
        pairs.append((Scalar.from_rational(c), commutator(a.mode(i), b.mode(j - i + n))))
    return LinComb(a.space, pairs)


# ---------------------------------------------------------------------------
# checks


def _probe_at(p, M):
    return p.at(M) if isinstance(p, Probe) else p


def _probe_name(p):
    return p.name if isinstance(p, Probe) else render_vector(p)


def _locality_sum(a, b, order, m, k):
    pairs = []
    for s in range(order + 1):
        c = (-1) ** s * comb(order, s)
        pairs.append((Scalar.from_rational(c), commutator(a.mode(m - s), b.mode(k + s))))
    return LinComb(a.space, pairs)


def check_locality(a, b, order, probes, N, window=(-4, 4), name="locality"):
    """Vanishing of sum_s (-1)^s C(order,s) [a_(m-s), b_(k+s)] on probes mod U_N."""
    entry = Entry(name, {"a": a.name, "b": b.name, "order": order, "N": N, "window": list(window)})
    with timed(entry):
        lo, hi = window
        for m in range(lo, hi + 1):
            for k in range(lo, hi + 1):
                op = _locality_sum(a, b, order, m, k)
                if op.is_zero:
                    continue
                M = op.need(N)
                for p in probes:
                    r = op.apply(_probe_at(p, M), N)
                    if r:
                        entry.fail(f"m={m}, k={k}, probe={_probe_name(p)}: {r.render()}")
                        return entry
    return entry


def find_locality_order(a, b, probes, N, window=(-3, 3), max_order=6):
    """Smallest order at which the locality check passes, or None."""
    for r in range(max_order + 1):
        if check_locality(a, b, r, probes, N, window).ok:
            return r
    return None


def check_field_axioms(
    a,
    probes,
    N_range=range(1, 6),
    margin=3,
    window=(-3, 3),
    continuity_probes=None,
    extra=3,
    expect_sharp=False,
    name="field-axioms",
):
    """Def 2.1 on probes.

    Condition (2): for each N, ``mode(-k) p`` lies in ``U_N`` for
    ``k`` from ``deep(N)`` to ``deep(N) + margin``.  Condition (1): for each
    mode in the window, applying it to a probe truncated at ``need(N)``
    agrees mod ``U_N`` with the full application to the probe known
    ``extra`` levels deeper.  With ``expect_sharp`` the certificate must
    also be tight: some probe has a nonzero image under ``mode(-(K-1))``.
    """
    N_range = list(N_range)
    entry = Entry(
        name,
        {"field": a.name, "N": [min(N_range), max(N_range)], "margin": margin, "window": list(window)},
    )
    continuity_probes = probes if continuity_probes is None else continuity_probes
    certs = {}
    with timed(entry):
        for N in N_range:
            K = a.deep(N)
            certs[N] = K
            for k in range(K, K + margin + 1):
                op = a.mode(-k)
                M = op.need(N)
                for p in probes:
                    r = op.apply(_probe_at(p, M), N)
                    if r:
                        entry.fail(f"condition (2): N={N}, K={K}, mode={-k}, probe={_probe_name(p)}")
                        return entry
            if expect_sharp and K > 1:
                op = a.mode(-(K - 1))
                M = op.need(N)
                if not any(op.apply(_probe_at(p, M), N) for p in probes):
                    entry.fail(f"certificate not sharp at N={N}: mode {-(K - 1)} also lands in U_{N}")
                    return entry
        lo, hi = window
        N = max(N_range)
        for k in range(lo, hi + 1):
            op = a.mode(k)
            M = op.need(N)
            for p in continuity_probes:
                r1 = op.apply(truncate(_probe_at(p, M), M), N)
                r2 = op.apply(_probe_at(p, M + extra), N, skip_deep=False)
                if r1 != r2:
                    entry.fail(f"condition (1): mode={k}, N={N}, need={M}, probe={_probe_name(p)}")
                    return entry
        entry.data["certificates"] = {str(N): K for N, K in certs.items()}
    return entry


class DualFunctional:
    """Continuous functional: a finite coefficient table killing ``U_vanishing_depth``."""

    def __init__(self, support, vanishing_depth):
        support = {m: as_scalar(c) for m, c in dict(support).items()}
        self.support = {m: c for m, c in support.items() if c}
        for m in self.support:
            if maxdepth(m) > vanishing_depth:
                raise ValueError("support monomial deeper than the vanishing depth")
        self.vanishing_depth = vanishing_depth

    def __call__(self, v):
        if v.precision is not None and v.precision < self.vanishing_depth:
            raise PrecisionError("pairing not determined at this precision", required=self.vanishing_depth)
        total = ZERO
        for m, c in self.support.items():
            x = v.terms.get(m)
            if x is not None:
                total = total + c * x
        return total

    def is_zero(self):
        return not self.support

    def __eq__(self, other):
        return isinstance(other, DualFunctional) and self.support == other.support

    def __repr__(self):
        return f"DualFunctional({render_vector(FilteredVector(self.support, _clean=True))}; kills U_{self.vanishing_depth})"


def dual_mode(a, n, phi, degree=3):
    """``phi o a_(n)`` restricted to monomials of degree <= ``degree``.

    The result kills ``U_M`` with ``M = a.mode(n).need(phi.vanishing_depth)``.
    """
    op = a.mode(n)
    N = phi.vanishing_depth
    M = op.need(N)
    support = {}
    if not op.is_zero:
        for m in basis_monomials(a.space.d, degree, M):
            val = phi(FilteredVector(op.image(m, N), N, _clean=True))
            if val:
                support[m] = val
    return DualFunctional(support, M)
