"""Heisenberg modes, beta/gamma fields and the quadratic sp fields."""

import json
from pathlib import Path

import pytest

from vertop.betagamma import (
    SymplecticConfig,
    beta_field,
    check_heisenberg_relations,
    check_sp_bracket_closure,
    dual_field_check,
    gamma_field,
    monomial_probes,
    random_functionals,
    sp_generators,
    sp_quadratic_field,
)
from vertop.fields import check_field_axioms, commutator
from vertop.filtered import FilteredVector, monomial
from vertop.report import emit_report
from vertop.scalar import ONE, TAU
from vertop.suites import CheckConfig, run_suite

GOLDEN = Path(__file__).parent / "golden"


@pytest.mark.parametrize("twist", ["0", "1/2"])
def test_fast_and_generic_heisenberg_routes_agree(twist):
    cfg = SymplecticConfig(1, twist)
    fast = check_heisenberg_relations(cfg, (-2, 2), None, 3, 2, fast=True)
    slow = check_heisenberg_relations(cfg, (-2, 2), None, 3, 2, fast=False)
    assert fast.status == slow.status == "pass"
    assert fast.data["checks"] == slow.data["checks"]


def test_heisenberg_check_detects_a_wrong_normalization():
    cfg = SymplecticConfig(1)
    good = beta_field(cfg, 1)
    # beta with the opposite sign on its creation part breaks [beta(-1), gamma(0)]
    from vertop.fields import FreeField

    bad = FreeField(cfg.space, lambda k: good.table(k) if k >= 0 else (TAU, good.table(k)[1]), "beta-bad")
    gamma = gamma_field(cfg, 1)
    C = commutator(bad.mode(-1), gamma.mode(0))
    v = FilteredVector({(): ONE})
    assert C.apply(v, 2).terms == {(): -TAU}
    C = commutator(good.mode(-1), gamma.mode(0))
    assert C.apply(v, 2).terms == {(): TAU}
    assert check_heisenberg_relations(cfg, (-1, 1), None, 2, 1).status == "pass"


def test_bracket_value_on_the_vacuum_monomial():
    cfg = SymplecticConfig(2, "1/2")
    v = FilteredVector({monomial((1, 1)): ONE})
    for k in (1, 2):
        for j in (1, 2):
            for m in range(-3, 3):
                C = commutator(beta_field(cfg, k).mode(m), gamma_field(cfg, j).mode(-m - 1))
                expected = v.scale(TAU) if k == j else FilteredVector({})
                assert C.apply(v, 4).terms == expected.terms


def test_sp_quadratic_is_a_normal_product():
    cfg = SymplecticConfig(1)
    q = sp_quadratic_field(cfg, "bg", 1, 1)
    probes = monomial_probes(cfg.space, 2, 3)
    e = check_field_axioms(q, probes, range(1, 4), 3, (-2, 2))
    assert e.status == "pass", e.witness
    labels, gens = sp_generators(cfg)
    assert sorted(f.name for f in gens.values()) == ["sp[bb,1,1]", "sp[bg,1,1]", "sp[gg,1,1]"]


@pytest.mark.parametrize("g, twist", [(1, "0"), (1, "1/2"), (2, "0")])
def test_sp_closure_has_one_central_scalar(g, twist):
    cfg = SymplecticConfig(g, twist)
    window = (-1, 1) if g == 2 else (-2, 2)
    e = check_sp_bracket_closure(cfg, window, None, 2, 2, 2)
    assert e.status == "pass", e.witness
    assert e.data["central_scalar"] == "1"


def test_sp_closure_golden_report():
    report = run_suite(CheckConfig(suite="sp", g=1))
    golden = (GOLDEN / "sp_closure_g1.json").read_text()
    assert emit_report(report, "json") == golden
    doc = json.loads(golden)
    assert [e["data"]["central_scalar"] for e in doc["entries"]] == ["1"]


def test_random_functionals_are_seeded():
    cfg = SymplecticConfig(1)
    a = random_functionals(cfg.space, 5, 3, seed=7)
    b = random_functionals(cfg.space, 5, 3, seed=7)
    assert a == b
    assert all(1 <= phi.vanishing_depth <= 3 for phi in a)


def test_dual_field_check_passes_for_both_twists():
    entries = dual_field_check(1, seed=1, count=5, max_depth=3)
    assert len(entries) == 4
    assert all(e.status == "pass" for e in entries), [e.witness for e in entries]


def test_config_validation():
    with pytest.raises(ValueError):
        SymplecticConfig(0)
    with pytest.raises(ValueError):
        SymplecticConfig(1, "1/3")
    with pytest.raises(IndexError):
        beta_field(SymplecticConfig(1), 2)
