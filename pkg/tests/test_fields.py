"""Fields, lazy n-th products, locality and the axiom checker on the beta-gamma model."""

import pytest
from hypothesis import given
from hypothesis import strategies as st

from vertop.betagamma import SymplecticConfig, beta_field, gamma_field, monomial_probes
from vertop.fields import (
    DerivativeField,
    DualFunctional,
    FreeField,
    IdentityField,
    check_field_axioms,
    check_locality,
    commutator_formula_mode,
    dual_mode,
    find_locality_order,
    nproduct,
)
from vertop.filtered import FilteredVector, monomial
from vertop.scalar import ONE, TAU, Scalar

CFG = SymplecticConfig(1)
PLAIN = CFG.space
BETA, GAMMA = beta_field(CFG, 1), gamma_field(CFG, 1)
PROBES = monomial_probes(PLAIN, 2, 3)


def x(s, n, e=1):
    return FilteredVector({monomial(((s, n), e)): ONE})


def same_on_probes(A, B, N=3, probes=PROBES):
    M = max(A.need(N), B.need(N))
    return all(A.apply(p.at(M), N) == B.apply(p.at(M), N) for p in probes)


def test_identity_field_is_mode_minus_one():
    one = IdentityField(PLAIN)
    v = x(1, 2)
    assert one.mode(-1).apply(v, 3).terms == v.terms
    for k in (-3, -2, 0, 1):
        assert not one.mode(k).apply(v, 3)
    assert one.deep(7) == 2


def test_derivative_follows_term_by_term_rule():
    # d/dz sum a_(k) z^(-k-1) has z^0 coefficient (k = -2 term) equal to a_(-2)
    d = DerivativeField(BETA)
    assert same_on_probes(d.mode(-1), BETA.mode(-2))
    v = x(1, 1)
    assert d.mode(-2).apply(v, 4) == BETA.mode(-3).apply(v, 4).scale(Scalar.from_rational(2))
    assert d.mode(3).apply(x(2, 3), 3) == BETA.mode(2).apply(x(2, 3), 3).scale(Scalar.from_rational(-3))
    assert not DerivativeField(IdentityField(PLAIN)).mode(-1).apply(v, 3)


def test_second_derivative():
    dd = DerivativeField(DerivativeField(GAMMA))
    # (d^2 a)_(j) = j (j - 1) a_(j-2)
    for j in (-3, -1, 2, 3):
        expected = GAMMA.mode(j - 2).apply(x(2, 1), 5).scale(Scalar.from_rational(j * (j - 1)))
        assert dd.mode(j).apply(x(2, 1), 5) == expected


def test_gamma_zero_mode_kills_absent_variable():
    assert not GAMMA.mode(0).apply(x(2, 1), 3)
    assert GAMMA.mode(0).apply(x(1, 1), 3) == FilteredVector({(): ONE}, 3)


def test_beta_negative_mode_multiplies():
    assert BETA.mode(-2).apply(FilteredVector({(): ONE}), 3).terms == x(1, 2).scale(-TAU).terms


@pytest.mark.parametrize("n", [0, 1, 2])
@pytest.mark.parametrize("pair", [(BETA, GAMMA), (GAMMA, BETA), (BETA, BETA)])
def test_lazy_nproduct_equals_commutator_formula(n, pair):
    a, b = pair
    c = nproduct(a, b, n)
    for j in range(-3, 4):
        assert same_on_probes(c.mode(j), commutator_formula_mode(a, b, n, j))


@given(st.sampled_from([-1, -2, -3]), st.integers(-3, 3), st.sampled_from(["bg", "gb", "bb"]))
def test_cutoff_extension_changes_nothing(n, j, which):
    a, b = {"bg": (BETA, GAMMA), "gb": (GAMMA, BETA), "bb": (BETA, BETA)}[which]
    assert same_on_probes(nproduct(a, b, n).mode(j), nproduct(a, b, n, slack=3).mode(j))


def test_zero_product_of_beta_gamma_is_tau_identity():
    c = nproduct(BETA, GAMMA, 0)
    one = IdentityField(PLAIN)
    for j in range(-3, 4):
        M = c.mode(j).need(3)
        for p in PROBES:
            assert c.mode(j).apply(p.at(M), 3) == one.mode(j).apply(p.at(M), 3).scale(TAU)


def test_locality_orders():
    assert find_locality_order(BETA, GAMMA, PROBES, 3) == 1
    assert find_locality_order(BETA, BETA, PROBES, 3) == 0
    assert not check_locality(BETA, GAMMA, 0, PROBES, 3).ok


def test_field_axioms_accept_the_free_fields():
    for f in (BETA, GAMMA):
        e = check_field_axioms(f, PROBES, range(1, 4), 3, (-3, 3), expect_sharp=True)
        assert e.status == "pass", e.witness


def test_field_axioms_reject_a_false_certificate():
    class Overclaimed(FreeField):
        def deep(self, N):
            return N

    f = Overclaimed(PLAIN, BETA.table, "beta-overclaimed")
    e = check_field_axioms(f, PROBES, range(1, 4), 3, (-2, 2))
    assert e.status == "fail" and "condition (2)" in e.witness


def test_field_axioms_reject_a_loose_certificate_when_sharpness_is_expected():
    class Loose(FreeField):
        def deep(self, N):
            return N + 2

    e = check_field_axioms(Loose(PLAIN, BETA.table, "beta-loose"), PROBES, range(1, 3), 1, (-1, 1), expect_sharp=True)
    assert e.status == "fail" and "not sharp" in e.witness


def test_dual_modes_vanish_past_the_certificate():
    phi = DualFunctional({monomial((1, 1)): ONE, monomial((2, 2), (1, 1)): Scalar.from_rational(3)}, 2)
    K = BETA.deep(phi.vanishing_depth)
    for k in range(K, K + 4):
        assert dual_mode(BETA, -k, phi).is_zero()
    assert not dual_mode(BETA, -1, phi).is_zero()


def test_dual_functional_rejects_deep_support():
    with pytest.raises(ValueError):
        DualFunctional({monomial((1, 4)): ONE}, 3)
