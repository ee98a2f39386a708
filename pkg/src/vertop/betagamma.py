"""Free-field realization of the beta-gamma system on polynomial models.

Coordinates ``x[j,-n]`` (``1 <= j <= 2g``) carry the symplectic basis
``e_1..e_2g`` with ``<e_i, e_{g+i}> = 1``.  The Heisenberg Lie algebra acts by

    e_j t^{-n}     ->  d/dx[j,-n]                      (n >= 1)
    e_j t^{n-1}    -> -tau x[g+j,-n]                    (j <= g)
    e_{g+j} t^{n-1} -> tau x[j,-n]
    center c       ->  tau c Id

with ``tau = 2*i*rho`` the exact stand-in for 2 pi i, and the generating
fields are

    beta_i(n-1) = d/dx[i+g,-n],   beta_i(-n)  = -tau x[i,-n],
    gamma_i(n-1) = d/dx[i,-n],    gamma_i(-n) =  tau x[i+g,-n].

The plain model (twist 0) stands for the smooth functions and the twist-1/2
model ``poly * exp(-sum x^2 / 2)`` for the Schwartz space.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Dict, Tuple

from .fields import (
    FreeField,
    LinComb,
    LinearField,
    NProductField,
    PrimTerm,
    ScaledIdentity,
    ZeroOperator,
    commutator,
)
from .filtered import (
    Deriv,
    FilteredVector,
    Mult,
    Probe,
    _kernel,
    basis_monomials,
    gaussian_space,
    maxdepth,
    plain_space,
    render_monomial,
    render_vector,
    truncate,
)
from .report import Entry, timed
from .scalar import ONE, TAU, ZERO, Scalar, as_scalar

__all__ = [
    "SymplecticConfig",
    "HeisenbergElement",
    "beta_field",
    "gamma_field",
    "heisenberg_action",
    "check_heisenberg_relations",
    "sp_quadratic_field",
    "sp_generators",
    "check_sp_bracket_closure",
    "monomial_probes",
    "dual_field_check",
    "random_functionals",
]

_TAU_INV = TAU.inverse()


@dataclass(frozen=True)
class SymplecticConfig:
    g: int = 1
    twist: str = "0"  # "0" or "1/2"

    def __post_init__(self):
        if self.g < 1:
            raise ValueError("g must be >= 1")
        if self.twist not in ("0", "1/2"):
            raise ValueError("twist must be '0' or '1/2'")

    @property
    def space(self):
        d = 2 * self.g
        return plain_space(d) if self.twist == "0" else gaussian_space(d)

    def pairing(self, a, b):
        """<e_a, e_b> for the fixed symplectic basis."""
        g = self.g
        if b == a + g and a <= g:
            return 1
        if a == b + g and b <= g:
            return -1
        return 0


def _check_index(cfg, i):
    if not (1 <= i <= cfg.g):
        raise IndexError(f"index {i} out of range 1..{cfg.g}")


def beta_field(cfg, i):
    _check_index(cfg, i)
    g = cfg.g

    def table(k):
        if k >= 0:
            return ONE, Deriv(i + g, k + 1)
        return -TAU, Mult(i, -k)

    return FreeField(cfg.space, table, f"beta[{i}]")


def gamma_field(cfg, i):
    _check_index(cfg, i)
    g = cfg.g

    def table(k):
        if k >= 0:
            return ONE, Deriv(i, k + 1)
        return TAU, Mult(i + g, -k)

    return FreeField(cfg.space, table, f"gamma[{i}]")


@dataclass
class HeisenbergElement:
    """Finite combination of ``e_j t^m`` plus a central part."""

    terms: Dict[Tuple[int, int], Scalar] = field(default_factory=dict)
    center: Scalar = ZERO

    @classmethod
    def basis(cls, j, m):
        return cls({(j, m): ONE})

    @classmethod
    def central(cls, c=ONE):
        return cls({}, as_scalar(c))


def heisenberg_action(cfg, h):
    """Operator of a Heisenberg Lie algebra element on the model space."""
    g = cfg.g
    space = cfg.space
    pairs = []
    for (j, m), c in h.terms.items():
        if not (1 <= j <= 2 * g):
            raise IndexError(f"e_{j} outside 1..{2 * g}")
        if m <= -1:
            op = PrimTerm(space, ONE, (Deriv(j, -m),))
        elif j <= g:
            op = PrimTerm(space, -TAU, (Mult(g + j, m + 1),))
        else:
            op = PrimTerm(space, TAU, (Mult(j - g, m + 1),))
        pairs.append((as_scalar(c), op))
    if h.center:
        pairs.append((ONE, ScaledIdentity(space, TAU * h.center)))
    return LinComb(space, pairs)


def monomial_probes(space, max_degree, max_depth):
    return [Probe.exact(FilteredVector({m: ONE}, _clean=True), render_monomial(m)) for m in basis_monomials(space.d, max_degree, max_depth)]


# ---------------------------------------------------------------------------
# commutation relations


def _integral(c):
    """Scalar -> int when it is a rational integer, else None."""
    if not c:
        return 0
    if not c.is_constant():
        return None
    z = c.constant()
    if z.im or z.re.denominator != 1:
        return None
    return int(z.re)


_INT_KERNELS = {}


def _int_kernel(op, space, m):
    out = []
    for m2, k in _kernel(op, space, m):
        ki = _integral(k)
        if ki is None:
            return None
        out.append((m2, ki))
    return tuple(out)


def _int_table(space, op):
    """Lazily filled ``monomial -> integer kernel`` table for one primitive."""
    key = (space, op)
    tab = _INT_KERNELS.get(key)
    if tab is None:
        tab = _INT_KERNELS[key] = {}
    return tab


def _int_image(tab, op, space, m):
    hit = tab.get(m)
    if hit is None:
        hit = _int_kernel(op, space, m)
        tab[m] = hit if hit is not None else False
    return hit if hit is not False else None


def _bracket_monomials(space, P, Q, monos, N):
    """Yield ``(m, [P, Q] m)`` for unit primitives with integer kernels.

    Yields ``(m, None)`` and stops as soon as a kernel is not integral.
    """
    tp, tq = _int_table(space, P), _int_table(space, Q)
    shallow = all(op.kind == "pit" or op.var[1] <= N for op in (P, Q))
    for m in monos:
        acc = {}
        for t1, o1, t2, o2, sign in ((tq, Q, tp, P, 1), (tp, P, tq, Q, -1)):
            inner = _int_image(t1, o1, space, m)
            if inner is None:
                yield m, None
                return
            for m1, k1 in inner:
                outer = _int_image(t2, o2, space, m1)
                if outer is None:
                    yield m, None
                    return
                for m2, k2 in outer:
                    if not shallow and maxdepth(m2) > N:
                        continue
                    acc[m2] = acc.get(m2, 0) + sign * k1 * k2
        yield m, {mm: c for mm, c in acc.items() if c}


def _relation_pairs(cfg):
    g = cfg.g
    out = []
    for k in range(1, g + 1):
        for j in range(k, g + 1):
            out.append(("beta", k, "beta", j))
            out.append(("gamma", k, "gamma", j))
    for k in range(1, g + 1):
        for j in range(1, g + 1):
            out.append(("beta", k, "gamma", j))
    return out


def check_heisenberg_relations(cfg, window=(-4, 4), probes=None, N=5, max_degree=3, fast=True):
    """[beta,beta] = [gamma,gamma] = 0 and [beta_k(m), gamma_j(n)] = tau d_kj d_{m+n+1,0}.

    ``probes`` defaults to every basis monomial of degree <= ``max_degree``
    and depth <= ``N``.  On monomial probes with integral primitive kernels
    the bracket of ``s P`` and ``t Q`` is evaluated as ``s t [P, Q]`` with
    exact integer arithmetic.
    """
    space = cfg.space
    entry = Entry(
        "heisenberg-relations",
        {"g": cfg.g, "twist": cfg.twist, "N": N, "window": list(window), "degree": max_degree},
    )
    fields = {}
    for kind, build in (("beta", beta_field), ("gamma", gamma_field)):
        for i in range(1, cfg.g + 1):
            fields[(kind, i)] = build(cfg, i)
    if probes is None:
        monos = basis_monomials(space.d, max_degree, N)
        probes = None
    else:
        monos = None
    lo, hi = window
    checked = 0
    with timed(entry):
        for ka, ia, kb, ib in _relation_pairs(cfg):
            A, B = fields[(ka, ia)], fields[(kb, ib)]
            for m in range(lo, hi + 1):
                for n in range(lo, hi + 1):
                    expected = TAU if (ka, kb) == ("beta", "gamma") and ia == ib and m + n + 1 == 0 else ZERO
                    opA, opB = A.mode(m), B.mode(n)
                    label = f"[{A.name}({m}), {B.name}({n})]"
                    if monos is not None and fast:
                        ratio = expected / (opA.coef * opB.coef)
                        r = _integral(ratio)
                        P, Q = opA.ops[0], opB.ops[0]
                        bad = False
                        for mono, got in _bracket_monomials(space, P, Q, monos, N):
                            if got is None:
                                bad = True
                                break
                            want = {mono: r} if r and maxdepth(mono) <= N else {}
                            if r is None or got != want:
                                entry.fail(f"{label} on {render_monomial(mono)}")
                                return entry
                            checked += 1
                        if not bad:
                            continue
                    # generic path
                    op = commutator(opA, opB)
                    plist = probes or monomial_probes(space, max_degree, N)
                    for p in plist:
                        v = p.at(op.need(N))
                        got = op.apply(v, N)
                        if got != truncate(v.scale(expected), N):
                            entry.fail(f"{label} on {p.name}: got {got.render()}")
                            return entry
                        checked += 1
        entry.data["checks"] = checked
    return entry


# ---------------------------------------------------------------------------
# quadratic sp_2g currents

_KINDS = ("bb", "gg", "bg")


def sp_quadratic_field(cfg, kind, i, j, slack=0):
    """tau^-1 times the normally ordered product of two generators."""
    if kind not in _KINDS:
        raise ValueError(f"kind must be one of {_KINDS}")
    _check_index(cfg, i)
    _check_index(cfg, j)
    a = beta_field(cfg, i) if kind[0] == "b" else gamma_field(cfg, i)
    b = beta_field(cfg, j) if kind[1] == "b" else gamma_field(cfg, j)
    prod = NProductField(a, b, -1, slack=slack)
    return LinearField(cfg.space, [(_TAU_INV, prod)], name=f"sp[{kind},{i},{j}]")


def _phi_label(x):
    kind, i = x
    return ("b" if kind == "beta" else "g", i)


def sp_generators(cfg):
    """Normalized quadratic generators keyed by an unordered pair of generator labels."""
    g = cfg.g
    labels = [("beta", i) for i in range(1, g + 1)] + [("gamma", i) for i in range(1, g + 1)]
    gens = {}
    for ai, a in enumerate(labels):
        for b in labels[ai:]:
            (ka, ia), (kb, ib) = _phi_label(a), _phi_label(b)
            gens[(a, b)] = sp_quadratic_field(cfg, ka + kb, ia, ib)
    return labels, gens


def _eps(a, b):
    """Simple-pole coefficient of phi_a(z) phi_b(w) divided by tau."""
    (ka, ia), (kb, ib) = a, b
    if ia != ib or ka == kb:
        return 0
    return 1 if ka == "beta" else -1


def _key(labels, a, b):
    return (a, b) if labels.index(a) <= labels.index(b) else (b, a)


def check_sp_bracket_closure(cfg, window=(-2, 2), probes=None, N=3, max_degree=2, probe_depth=3):
    """Brackets of normalized quadratic modes close up to one central scalar.

    For ``Q_ab = tau^-1 :phi_a phi_b:`` the predicted bracket is
    ``[Q_ab(m), Q_cd(k)] = (e_bc Q_ad + e_bd Q_ac + e_ac Q_bd + e_ad Q_bc)(m+k)
    + kappa * m * d_{m+k,0} * (e_ac e_bd + e_ad e_bc)`` where ``e`` is the
    normalized simple-pole pairing.  ``kappa`` is measured on every probe and
    mode pair and must come out the same everywhere.
    """
    space = cfg.space
    labels, gens = sp_generators(cfg)
    if probes is None:
        probes = monomial_probes(space, max_degree, probe_depth)
    entry = Entry("sp-closure", {"g": cfg.g, "twist": cfg.twist, "N": N, "window": list(window)})
    kappas = set()
    lo, hi = window
    with timed(entry):
        for (a, b), X in gens.items():
            for (c, d), Y in gens.items():
                struct = {}
                for coef, (p, q) in (
                    (_eps(b, c), (a, d)),
                    (_eps(b, d), (a, c)),
                    (_eps(a, c), (b, d)),
                    (_eps(a, d), (b, c)),
                ):
                    if coef:
                        key = _key(labels, p, q)
                        struct[key] = struct.get(key, 0) + coef
                form = _eps(a, c) * _eps(b, d) + _eps(a, d) * _eps(b, c)
                for m in range(lo, hi + 1):
                    for k in range(lo, hi + 1):
                        br = commutator(X.mode(m), Y.mode(k))
                        pred = LinComb(
                            space,
                            [(Scalar.from_rational(s), gens[z].mode(m + k)) for z, s in struct.items() if s],
                        )
                        label = f"[{X.name}({m}), {Y.name}({k})]"
                        for pr in probes:
                            M = max(br.need(N), pred.need(N))
                            v = pr.at(M)
                            resid = br.apply(v, N) - pred.apply(v, N)
                            if m + k != 0 or m == 0 or form == 0:
                                if resid:
                                    entry.fail(f"{label} on {pr.name}: residual {resid.render()}")
                                    return entry
                                continue
                            vt = v
                            lead = next((mm for mm in vt.terms if maxdepth(mm) <= N), None)
                            if lead is None:
                                continue
                            mu = resid.coefficient(lead) / vt.terms[lead]
                            if resid != truncate(vt, N).scale(mu):
                                entry.fail(f"{label} on {pr.name}: residual not central: {resid.render()}")
                                return entry
                            kappas.add(mu / Scalar.from_rational(m * form))
        if len(kappas) > 1:
            entry.fail("inconsistent central scalars: " + ", ".join(sorted(str(k) for k in kappas)))
        entry.data["central_scalar"] = str(next(iter(kappas))) if len(kappas) == 1 else None
        entry.data["generators"] = [gens[k].name for k in gens]
    return entry


# ---------------------------------------------------------------------------
# dual fields


def random_functionals(space, count, max_depth, seed=0, max_degree=2):
    """Seeded coefficient functionals with vanishing depth in 1..max_depth."""
    from .fields import DualFunctional

    rng = random.Random(seed)
    out = []
    for _ in range(count):
        vd = rng.randint(1, max_depth)
        monos = basis_monomials(space.d, max_degree, vd)
        support = {}
        for m in rng.sample(monos, min(len(monos), rng.randint(1, 4))):
            support[m] = Scalar.from_rational(rng.choice([-3, -2, -1, 1, 2, 3]))
        out.append(DualFunctional(support, vd))
    return out


def dual_field_check(g=1, seed=0, count=20, max_depth=4, margin=3, twists=("0", "1/2")):
    """phi o a_(-k) vanishes for k from the certificate bound to bound + margin."""
    from .fields import dual_mode

    entries = []
    for tw in twists:
        cfg = SymplecticConfig(g, tw)
        phis = random_functionals(cfg.space, count, max_depth, seed)
        fields = [beta_field(cfg, i) for i in range(1, g + 1)] + [gamma_field(cfg, i) for i in range(1, g + 1)]
        for f in fields:
            entry = Entry("dual-field", {"field": f.name, "twist": tw, "functionals": count, "margin": margin, "seed": seed})
            with timed(entry):
                bounds = []
                for idx, phi in enumerate(phis):
                    K = f.deep(phi.vanishing_depth)
                    bounds.append(K)
                    for k in range(K, K + margin + 1):
                        d = dual_mode(f, -k, phi)
                        if not d.is_zero():
                            entry.fail(f"functional #{idx} ({phi!r}): dual mode {-k} is {d!r}")
                            break
                    if entry.status != "pass":
                        break
                entry.data["bounds"] = sorted(set(bounds))
            entries.append(entry)
    return entries
