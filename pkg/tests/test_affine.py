"""The level-1 current action on the phi_c model."""

import pytest
import sympy as sp
from hypothesis import given
from hypothesis import strategies as st

from conftest import RHO_SYM, scalar_to_sympy
from vertop.affine import (
    E,
    H,
    SlnConfig,
    check_affine_bracket,
    check_eigen_relation,
    check_pit_eigenvalue,
    check_pit_relations,
    current_field,
    eigen_probes,
    probe_budget,
    sl_basis,
    sln_mode,
    sln_mode_series,
    trace_form,
)
from vertop.fields import check_field_axioms, commutator
from vertop.filtered import FilteredVector, basis_monomials, monomial, truncate
from vertop.scalar import ONE, RHO, Scalar

PHI = FilteredVector({(): ONE})


def test_zero_mode_of_e12_on_phi():
    for c in (1, 4):
        cfg = SlnConfig(2, c)
        out = sln_mode(cfg, E(1, 2), 0).apply(PHI, 3)
        coef = Scalar.from_rational(2 * c) * RHO
        expected = {monomial((1, i), (2, i)): coef for i in (1, 2, 3)}
        assert out.terms == expected and out.precision == 3


def test_positive_mode_shifts_depth():
    cfg = SlnConfig(2, 1)
    out = sln_mode(cfg, E(1, 2), 2).apply(PHI, 5)
    coef = Scalar.from_rational(2) * RHO
    assert out.terms == {monomial((1, i), (2, i + 2)): coef for i in (1, 2, 3)}


def test_cartan_zero_mode_on_phi():
    cfg = SlnConfig(2, 1)
    out = sln_mode(cfg, H(1), 0).apply(PHI, 2)
    coef = Scalar.from_rational(2) * RHO
    expected = {}
    for i in (1, 2):
        expected[monomial(((1, i), 2))] = coef
        expected[monomial(((2, i), 2))] = -coef
    assert out.terms == expected


def _oracle_negative_mode(c, u, v, j, m, N):
    """pi(E_uv t^-j)(m phi) mod U_N by direct differentiation and sympy integration."""
    n = 2
    D = N + j + 1
    X = {(s, d): sp.Symbol(f"x{s}_{d}", real=True) for s in range(1, n + 1) for d in range(1, D + 1)}
    cc = sp.Integer(c)
    weight = sp.pi * cc
    # f = P * phi with P polynomial; d/dx (P phi) = (dP/dx - 2 weight x P) phi
    P = sp.Mul(*[X[var] ** e for var, e in m])
    Q = 0
    for i in range(1, D - j + 1):
        xd = X[(u, i + j)]
        Q += X[(v, i)] * (sp.diff(P, xd) - 2 * weight * xd * P)
    Q = sp.expand(Q)
    out = 0
    # integrate out the first j depths against the Gaussian, then shift depths by j
    for term in sp.Add.make_args(Q):
        val = term
        for d in range(1, j + 1):
            for s in range(1, n + 1):
                y = X[(s, d)]
                val = sp.integrate(val * sp.exp(-weight * y**2), (y, -sp.oo, sp.oo))
        out += val
    lam = sp.Rational(1, 1) / sp.sqrt(cc) ** n
    out = sp.expand(-(lam ** (-j)) * out)
    shifted = {}
    for term in sp.Add.make_args(out):
        coeff, mono = sp.Integer(1), []
        for f in sp.Mul.make_args(term):
            base, e = f.as_base_exp()
            if base in X.values():
                s, d = next(k for k, x in X.items() if x == base)
                mono.append(((s, d - j), int(e)))
            else:
                coeff *= f
        if all(d <= N for (_, d), _ in mono):
            key = monomial(*mono)
            shifted[key] = shifted.get(key, 0) + coeff
    return {k: sp.simplify(val) for k, val in shifted.items() if sp.simplify(val) != 0}


@pytest.mark.parametrize("c", [1, 4])
@pytest.mark.parametrize("m", [(), monomial((1, 2)), monomial((2, 1), (1, 3))])
@pytest.mark.parametrize("j", [1, 2])
def test_negative_mode_matches_direct_oracle(c, m, j):
    N = 2
    cfg = SlnConfig(2, c)
    got = sln_mode(cfg, E(1, 2), -j).apply(FilteredVector({m: ONE}), N)
    expected = _oracle_negative_mode(c, 1, 2, j, m, N)
    as_sym = {k: sp.simplify(scalar_to_sympy(v).subs(RHO_SYM, sp.pi)) for k, v in got.terms.items()}
    assert set(as_sym) == set(expected)
    for k in expected:
        assert sp.simplify(as_sym[k] - expected[k]) == 0


@pytest.mark.parametrize("n", [2, 3])
@pytest.mark.parametrize("k", [-3, -2, -1, 0, 1, 2])
def test_fast_route_equals_series_route(n, k):
    cfg = SlnConfig(n, 4)
    monos = basis_monomials(n, 2, 3)
    for name, a in sl_basis(n):
        fast, ref = sln_mode(cfg, a, k), sln_mode_series(cfg, a, k)
        N = 3
        for m in monos:
            v = FilteredVector({m: ONE})
            assert fast.apply(v, N) == ref.apply(v, N), (name, k, m)


@given(st.integers(-2, 2), st.integers(-3, 3), st.integers(-3, 3))
def test_modes_are_linear_in_the_matrix(k, p, q):
    cfg = SlnConfig(2, 1)
    a = {(1, 2): Scalar.from_rational(p), (2, 1): Scalar.from_rational(q)}
    a = {key: c for key, c in a.items() if c}
    v = FilteredVector({monomial((1, 1)): ONE})
    lhs = sln_mode(cfg, a, k).apply(v, 3) if a else FilteredVector({}, 3)
    rhs = sln_mode(cfg, E(1, 2), k).apply(v, 3).scale(Scalar.from_rational(p)) + sln_mode(cfg, E(2, 1), k).apply(v, 3).scale(
        Scalar.from_rational(q)
    )
    assert lhs == rhs


def test_level_one_central_term_example():
    cfg = SlnConfig(2, 1)
    A, B = sln_mode(cfg, E(1, 2), 1), sln_mode(cfg, E(2, 1), -1)
    C = commutator(A, B)
    N = 4
    lhs = C.apply(PHI, N)
    rhs = sln_mode(cfg, H(1), 0).apply(PHI, N) + truncate(PHI, N)
    assert lhs == rhs


def test_zero_modes_have_no_central_term():
    cfg = SlnConfig(2, 4)
    C = commutator(sln_mode(cfg, E(1, 2), 0), sln_mode(cfg, E(2, 1), 0))
    assert C.apply(PHI, 3) == sln_mode(cfg, H(1), 0).apply(PHI, 3)


def test_trace_form_normalization():
    assert trace_form(E(1, 2), E(2, 1)) == ONE
    assert trace_form(H(1), H(1)) == Scalar.from_rational(2)


@pytest.mark.parametrize("n, c, lam", [(1, 1, "1"), (1, 4, "1/2"), (2, 4, "1/4"), (3, 4, "1/8"), (3, 1, "1")])
def test_pi_t_eigenvalue(n, c, lam):
    e = check_pit_eigenvalue(SlnConfig(n, c))
    assert e.status == "pass" and e.data["lambda"] == lam


def test_pi_t_relations_on_small_basis():
    e = check_pit_relations(SlnConfig(2, 4), depth=3, degree=2)
    assert e.status == "pass" and e.data["checks"] > 0


def test_eigen_probes_stay_in_the_eigenspace():
    for c in (1, 4):
        cfg = SlnConfig(2, c)
        assert check_eigen_relation(cfg, eigen_probes(cfg, 1, (-2, 2)), 4).status == "pass"


def test_eigen_probe_names():
    cfg = SlnConfig(2, 1)
    names = [p.name for p in eigen_probes(cfg, 1, (-1, 1))]
    assert names[0] == "phi" and "E12(-1) phi" in names and len(names) == 1 + 3 * 3


def test_bracket_on_eigen_probes_small_window():
    cfg = SlnConfig(2, 4)
    e = check_affine_bracket(cfg, (-1, 1), 1, 3)
    assert e.status == "pass", e.witness


def test_exploratory_bracket_reports_without_failing():
    e = check_affine_bracket(SlnConfig(2, 1), (-1, 1), 1, 2, exploratory=True)
    assert e.status == "info" and e.ok


def test_current_certificate_is_relative_to_the_probe_family():
    cfg = SlnConfig(2, 1)
    probes = eigen_probes(cfg, 1, (-2, 2))
    f = current_field(cfg, E(1, 2), name="E12", budget=probe_budget(1, (-2, 2)))
    assert check_field_axioms(f, probes, range(1, 4), 3, (-1, 1), probes[:5]).status == "pass"
    # without the budget the certificate is too optimistic on generation-1 probes
    bare = current_field(cfg, E(1, 2), name="E12")
    assert check_field_axioms(bare, probes, range(1, 4), 3, (-1, 1), probes[:5]).status == "fail"


def test_sl_config_rejects_bad_input():
    with pytest.raises(ValueError):
        SlnConfig(0, 1)
    with pytest.raises(ValueError):
        SlnConfig(2, 2).space
