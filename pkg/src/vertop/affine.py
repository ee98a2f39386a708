"""Affine sl_n currents on the phi_c model.

The model has ``n`` species of coordinates with Gaussian factor
``phi_c = exp(-pi c sum x^2)``.  ``pi_t`` integrates out the depth-1
coordinates and shifts the others up one level; ``phi_c`` is an eigenvector
with eigenvalue ``lambda = c^(-n/2)``.  For ``A`` in gl_n and ``j >= 0``

    pi(A t^j)  = - sum_{u,v} A_uv sum_{i>=1} x^v_{i+j} d/dx^u_i
    pi(A t^-j) = - lambda^-j pi_t^j sum_{u,v} A_uv sum_{i>=1} x^v_i d/dx^u_{i+j}

which realize the affine algebra at level 1 on the ``lambda`` eigenspace.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq

from .fields import Composite, Field, Operator, OperatorSeries, PrimTerm, ZeroOperator
from .filtered import (
    Deriv,
    FilteredVector,
    Mult,
    PiT,
    Probe,
    basis_monomials,
    gaussian_moment,
    mono_lower,
    mono_mul,
    linear_combine,
    maxdepth,
    phi_space,
    render_monomial,
    truncate,
)
from .report import Entry, timed
from .scalar import ONE, ZERO, Scalar, as_scalar

__all__ = [
    "SlnConfig",
    "Matrix",
    "E",
    "H",
    "sl_basis",
    "matrix_bracket",
    "trace_form",
    "sln_mode",
    "sln_mode_series",
    "CurrentMode",
    "current_field",
    "probe_budget",
    "pi_t_power",
    "eigen_probes",
    "check_eigen_relation",
    "check_affine_bracket",
    "check_pit_relations",
    "check_pit_eigenvalue",
]


@dataclass(frozen=True)
class SlnConfig:
    n: int = 2
    c: Fraction = Fraction(1)

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be >= 1")
        object.__setattr__(self, "c", Fraction(self.c))

    @property
    def space(self):
        return phi_space(self.n, mpq(self.c.numerator, self.c.denominator))

    @property
    def lam(self):
        """Eigenvalue sigma^n of pi_t on phi_c."""
        return Scalar.from_rational(self.space.sigma ** self.n)


# ---------------------------------------------------------------------------
# matrices: sparse dicts {(u, v): Scalar}

Matrix = dict


def E(u, v):
    return {(u, v): ONE}


def H(u):
    return {(u, u): ONE, (u + 1, u + 1): -ONE}


def sl_basis(n):
    """Named basis of sl_n: E_uv off the diagonal and H_u = E_uu - E_(u+1)(u+1)."""
    out = []
    for u in range(1, n + 1):
        for v in range(1, n + 1):
            if u != v:
                out.append((f"E{u}{v}", E(u, v)))
    for u in range(1, n):
        out.append((f"H{u}", H(u)))
    return out


def _clean(a):
    return {k: c for k, c in a.items() if c}


def matrix_product(a, b):
    out = {}
    for (u, w), x in a.items():
        for (w2, v), y in b.items():
            if w == w2:
                out[(u, v)] = out.get((u, v), ZERO) + x * y
    return _clean(out)


def matrix_bracket(a, b):
    ab, ba = matrix_product(a, b), matrix_product(b, a)
    out = dict(ab)
    for k, c in ba.items():
        out[k] = out.get(k, ZERO) - c
    return _clean(out)


def trace_form(a, b):
    return sum((c for (u, v), c in matrix_product(a, b).items() if u == v), ZERO)


def _matrix_check(cfg, a):
    for (u, v) in a:
        if not (1 <= u <= cfg.n and 1 <= v <= cfg.n):
            raise IndexError(f"matrix entry ({u},{v}) outside {cfg.n}x{cfg.n}")


# ---------------------------------------------------------------------------
# modes


def pi_t_power(cfg, j, coef=ONE):
    return PrimTerm(cfg.space, coef, (PiT,) * j)


def sln_mode_series(cfg, a, k):
    """pi(a t^k) assembled from primitive terms (reference route)."""
    _matrix_check(cfg, a)
    space = cfg.space
    entries = [(as_scalar(c), u, v) for (u, v), c in a.items() if c]
    if not entries:
        return ZeroOperator(space)
    if k >= 0:
        j = k

        def terms(N):
            for c, u, v in entries:
                for i in range(1, N - j + 1):
                    yield PrimTerm(space, -c, (Mult(v, i + j), Deriv(u, i)))

        return OperatorSeries(space, terms, lambda N: N, label=f"pi(a t^{k})")
    j = -k

    def inner_terms(N):
        # x_i d/dx_(i+j) with i > N maps into U_N
        for c, u, v in entries:
            for i in range(1, N + 1):
                yield PrimTerm(space, c, (Mult(v, i), Deriv(u, i + j)))

    inner = OperatorSeries(space, inner_terms, lambda N: N + j, label=f"inner(a, {j})")
    outer = pi_t_power(cfg, j, -(cfg.lam ** (-j)))
    return Composite(outer, inner)



class CurrentMode(Operator):
    """pi(a t^k) with a direct formula for the image of one monomial.

    Equal by construction to :func:`sln_mode_series`; the two routes are
    compared in the tests.
    """

    def __init__(self, cfg, a, k):
        super().__init__(cfg.space)
        self.cfg = cfg
        self.k = k
        self.entries = [(as_scalar(c), u, v) for (u, v), c in a.items() if c]
        self.is_zero = not self.entries
        j = abs(k)
        self.prefactor = -ONE if k >= 0 else -(cfg.lam ** (-j))
        self._moments = {}

    def need(self, N):
        return N if self.k >= 0 else N + 2 * (-self.k)

    def _compute(self, m, N):
        if self.is_zero:
            return {}
        k = self.k
        j = abs(k)
        two_a = -self.space._two_a
        acc = {}
        # sum_i x^v_(i+j) d/dx^u_i  (k >= 0)  or  sum_i x^v_i d/dx^u_(i+j)  (k < 0)
        top = N if k >= 0 else N + j
        shift = j if k >= 0 else -j
        for c, u, v in self.entries:
            for (s, n), e in m:
                if s != u:
                    continue
                i2 = n + shift
                if i2 < 1 or i2 > top:
                    continue
                mm = mono_mul(mono_lower(m, (u, n)), (v, i2))
                _add(acc, mm, c * _small(e))
            # derivative of the Gaussian factor
            cc = c * two_a
            for i in range(1, top - j + 1):
                lo_, hi_ = (i, i + j) if k >= 0 else (i + j, i)
                mm = mono_mul(mono_mul(m, (u, lo_)), (v, hi_))
                _add(acc, mm, cc)
        pre = self.prefactor
        if k >= 0:
            return {mm: pre * c for mm, c in acc.items() if maxdepth(mm) <= N}
        out = {}
        for mm, c in acc.items():
            shallow = []
            rest = []
            deep = False
            for (s, n), e in mm:
                if n <= j:
                    shallow.append(((s, n), e))
                elif n - j > N:
                    deep = True
                    break
                else:
                    rest.append(((s, n - j), e))
            if deep:
                continue
            factor = self._integral(tuple(shallow), j)
            if factor:
                _add(out, tuple(rest), c * factor)
        return out

    def _integral(self, shallow, j):
        """prefactor times the Gaussian integral over the first j depths."""
        key = (shallow, j)
        hit = self._moments.get(key)
        if hit is None:
            exps = dict(shallow)
            factor = self.prefactor
            for n in range(1, j + 1):
                for s in range(1, self.space.d + 1):
                    factor = factor * gaussian_moment(self.space, exps.get((s, n), 0))
                    if not factor:
                        break
            hit = self._moments[key] = factor
        return hit

_SMALL = {}


def _small(e):
    hit = _SMALL.get(e)
    if hit is None:
        hit = _SMALL[e] = Scalar.from_rational(e)
    return hit


def _add(acc, m, c):
    y = acc.get(m)
    if y is None:
        acc[m] = c
    else:
        z = y + c
        if z:
            acc[m] = z
        else:
            del acc[m]


def sln_mode(cfg, a, k):
    """pi(a t^k) as a continuous operator on the phi_c model."""
    _matrix_check(cfg, a)
    return CurrentMode(cfg, a, k)


class CurrentField(Field):
    """The field sum_k pi(a t^k) z^(-k-1) of a matrix ``a``.

    No certificate uniform over the eigenspace is available: on
    ``pi(b t^-d) phi`` the image of ``pi(a t^-k)`` only reaches ``U_N`` once
    ``k >= N + d``.  The certificate is therefore relative to a probe family
    whose negative modes have total depth at most ``budget``:
    ``K(N) = N + 1 + budget``.
    """

    def __init__(self, cfg, a, name=None, budget=0):
        super().__init__(cfg.space)
        _matrix_check(cfg, a)
        self.cfg = cfg
        self.a = _clean(dict(a))
        self.name = name or _matrix_name(self.a)
        self.budget = budget

    def _make_mode(self, k):
        return sln_mode(self.cfg, self.a, k)

    def deep(self, N):
        return N + 1 + self.budget


def _matrix_name(a):
    parts = []
    for (u, v), c in sorted(a.items()):
        parts.append(f"{c}*E{u}{v}" if c != ONE else f"E{u}{v}")
    return " + ".join(parts) or "0"


def current_field(cfg, a, name=None, budget=0):
    return CurrentField(cfg, a, name, budget)


def probe_budget(generation, window):
    """Total depth of negative modes used to build :func:`eigen_probes`."""
    return generation * max(0, -window[0])


# ---------------------------------------------------------------------------
# probes in the lambda eigenspace


def _phi(cfg):
    return FilteredVector({(): ONE}, _clean=True)


def eigen_probes(cfg, generation=1, window=(-2, 2)):
    """phi_c and vectors obtained from it by up to ``generation`` modes.

    Generation 0 is ``[phi_c]``; generation ``g`` adds ``pi(b t^k) p`` for
    every basis element ``b``, ``k`` in ``window`` and every probe ``p`` of
    generation ``g - 1``.  Deeper vectors are infinite series; they are
    computed on demand at the requested precision.
    """
    phi = Probe.exact(_phi(cfg), "phi")
    layers = [[phi]]
    basis = sl_basis(cfg.n)
    lo, hi = window
    for _ in range(generation):
        nxt = []
        for p in layers[-1]:
            for bname, b in basis:
                for k in range(lo, hi + 1):
                    nxt.append(_mode_probe(cfg, b, bname, k, p))
        layers.append(nxt)
    return [p for layer in layers for p in layer]


def _mode_probe(cfg, b, bname, k, p):
    op = sln_mode(cfg, b, k)
    return Probe(f"{bname}({k}) {p.name}", at=lambda N: op.apply(p.at(op.need(N)), N))


def check_eigen_relation(cfg, probes, N=4):
    """pi_t p = lambda p modulo U_N on every probe."""
    entry = Entry("eigen-relation", {"n": cfg.n, "c": str(cfg.c), "N": N})
    op = pi_t_power(cfg, 1)
    with timed(entry):
        for p in probes:
            v = p.at(op.need(N))
            if op.apply(v, N) != truncate(v, N).scale(cfg.lam):
                entry.fail(f"pi_t {p.name} != lambda {p.name} mod U_{N}")
                break
        entry.data["lambda"] = str(cfg.lam)
        entry.data["probes"] = len(probes)
    return entry


def check_pit_eigenvalue(cfg, N=4):
    """pi_t phi_c = lambda phi_c with lambda compared against c^(-n/2) computed independently."""
    from fractions import Fraction
    from math import isqrt

    c = cfg.c
    root = Fraction(isqrt(c.numerator), isqrt(c.denominator))
    if root * root != c:
        raise ValueError(f"c = {c} is not a rational square")
    expected = Scalar.from_rational(mpq(1, 1) / mpq(root.numerator, root.denominator) ** cfg.n)
    entry = check_eigen_relation(cfg, [Probe.exact(FilteredVector({(): ONE}, _clean=True), "phi")], N)
    entry.name = "pi-t-eigenvalue"
    entry.data["expected"] = str(expected)
    if entry.status == "pass" and cfg.lam != expected:
        entry.fail(f"lambda = {cfg.lam}, expected {expected}")
    return entry


def check_affine_bracket(cfg, window=(-2, 2), generation=1, N=3, probes=None, exploratory=False, probe_window=None):
    """[pi(a t^m), pi(b t^k)] = pi([a,b] t^(m+k)) + m d_(m+k,0) tr(ab) on probes.

    With ``exploratory`` the probes are plain monomials times ``phi_c``
    (outside the eigenspace) and the entry reports how many brackets fail
    rather than failing.
    """
    if probes is None:
        if exploratory:
            probes = [
                Probe.exact(FilteredVector({m: ONE}, _clean=True), render_monomial(m) + "*phi")
                for m in basis_monomials(cfg.n, 1, 1)
            ]
        else:
            probes = eigen_probes(cfg, generation, probe_window or window)
    name = "affine-bracket-exploratory" if exploratory else "affine-bracket"
    entry = Entry(name, {"n": cfg.n, "c": str(cfg.c), "N": N, "window": list(window), "generation": generation})
    basis = sl_basis(cfg.n)
    lo, hi = window
    ms = range(lo, hi + 1)
    modes = {(bn, k): sln_mode(cfg, b, k) for bn, b in basis for k in ms}
    units = [(u, v) for u in range(1, cfg.n + 1) for v in range(1, cfg.n + 1)]
    unit_modes = {}
    brackets = {(an, bn): matrix_bracket(a, b) for an, a in basis for bn, b in basis}
    mismatches = 0
    total = 0
    first = None
    with timed(entry):
        for p in probes:
            # every mode applied once at the precision any other mode needs
            need_A = max(op.need(N) for op in modes.values())
            img = {key: op.apply(p.at(op.need(need_A)), need_A) for key, op in modes.items()}
            products = {}
            for ka, A in modes.items():
                for kb in modes:
                    products[(ka, kb)] = A.apply(img[kb], N)
            # pi(E_uv t^s) p for the right hand side, combined linearly
            unit_img = {}
            for s_ in range(2 * lo, 2 * hi + 1):
                for uv in units:
                    op = unit_modes.get((uv, s_))
                    if op is None:
                        op = unit_modes[(uv, s_)] = sln_mode(cfg, E(*uv), s_)
                    unit_img[(uv, s_)] = op.apply(p.at(op.need(N)), N)
            pN = truncate(p.at(N), N)
            rhs_cache = {}
            for an, a in basis:
                for m in ms:
                    for bn, b in basis:
                        for k in ms:
                            lhs = products[((an, m), (bn, k))] - products[((bn, k), (an, m))]
                            key = (an, bn, m + k)
                            rhs = rhs_cache.get(key)
                            if rhs is None:
                                pairs = [(c, unit_img[(uv, m + k)]) for uv, c in brackets[(an, bn)].items()]
                                rhs = linear_combine(pairs) if pairs else FilteredVector({}, N, _clean=True)
                                rhs_cache[key] = rhs
                            if m + k == 0 and m:
                                rhs = rhs + pN.scale(trace_form(a, b) * m)
                            total += 1
                            if lhs != rhs:
                                mismatches += 1
                                if first is None:
                                    first = f"[{an}({m}), {bn}({k})] on {p.name}: difference {(lhs - rhs).render()}"
                                if not exploratory:
                                    entry.fail(first)
                                    return entry
        entry.data["brackets"] = total
        if exploratory:
            entry.status = "info"
            entry.data["mismatches"] = mismatches
            if first:
                entry.data["first_mismatch"] = first
    return entry


# ---------------------------------------------------------------------------
# pi_t relations


def check_pit_relations(cfg, depth=4, degree=3, N=None):
    """x_(-i) pi_t = pi_t x_(-i-1), d_(-i) pi_t = pi_t d_(-i-1), pi_t^j d_(-i) = 0 for i <= j.

    Every monomial of degree <= ``degree`` and depth <= ``depth`` is a probe.
    """
    space = cfg.space
    N = depth if N is None else N
    entry = Entry("pi-t-relations", {"n": cfg.n, "c": str(cfg.c), "depth": depth, "degree": degree, "N": N})
    monos = basis_monomials(space.d, degree, depth)
    probes = [FilteredVector({m: ONE}, _clean=True) for m in monos]
    count = 0
    with timed(entry):
        for s in range(1, space.d + 1):
            for i in range(1, depth + 1):
                for kind in ("mult", "deriv"):
                    P = Mult if kind == "mult" else Deriv
                    left = PrimTerm(space, ONE, (P(s, i), PiT))
                    right = PrimTerm(space, ONE, (PiT, P(s, i + 1)))
                    for v in probes:
                        if left.apply(v, N) != right.apply(v, N):
                            entry.fail(f"{kind} relation at species {s}, depth {i} on {v.render()}")
                            return entry
                        count += 1
                for j in range(i, depth + 1):
                    op = PrimTerm(space, ONE, (PiT,) * j + (Deriv(s, i),))
                    for v in probes:
                        if op.apply(v, N):
                            entry.fail(f"pi_t^{j} d/dx[{s},-{i}] nonzero on {v.render()}")
                            return entry
                        count += 1
        entry.data["checks"] = count
    return entry
