"""Acceptance criteria, run exactly and within their time budgets.

Each test records one line ``criterion N: PASS|FAIL ...``; the lines are
printed in the pytest terminal summary (and directly when this file is run
as a script).
"""

import json
import random
import time
from pathlib import Path

import pytest

from vertop.affine import (
    SlnConfig,
    check_affine_bracket,
    check_pit_eigenvalue,
    check_pit_relations,
    current_field,
    eigen_probes,
    probe_budget,
    sl_basis,
)
from vertop.betagamma import (
    SymplecticConfig,
    beta_field,
    check_heisenberg_relations,
    dual_field_check,
    gamma_field,
    monomial_probes,
    sp_generators,
)
from vertop.fields import check_field_axioms
from vertop.induced import (
    check_confluence,
    borcherds_suite,
    compare_induced_heisenberg,
    gaussian_spec,
    heisenberg_algebra,
    induce,
    random_words,
    sl_algebra,
    straighten,
    vacuum_spec,
)
from vertop.report import Entry, emit_report
from vertop.scalar import ONE, Scalar
from vertop.suites import CheckConfig, _nproduct_consistency, _pick, run_suite

GOLDEN = Path(__file__).parent / "golden"
RESULTS = {}


def record(n, title, entries, elapsed, budget=None, extra=""):
    bad = [e for e in entries if not e.ok]
    over = budget is not None and elapsed >= budget
    ok = not bad and not over
    detail = f"{len(entries)} checks, {elapsed:.1f} s"
    if budget is not None:
        detail += f" (budget {budget} s)"
    if extra:
        detail += f", {extra}"
    if bad:
        detail += f"; first failure: {bad[0].name} {bad[0].params}: {bad[0].witness}"
    if over:
        detail += "; over budget"
    RESULTS[n] = f"criterion {n}: {'PASS' if ok else 'FAIL'} {title}: {detail}"
    assert not bad, RESULTS[n]
    assert not over, RESULTS[n]


def test_criterion_01_heisenberg_relations():
    t = time.perf_counter()
    entries = [
        check_heisenberg_relations(SymplecticConfig(g, tw), (-4, 4), None, 5, 3)
        for g in (1, 2)
        for tw in ("0", "1/2")
    ]
    checks = sum(e.data.get("checks", 0) for e in entries)
    record(1, "Heisenberg relations", entries, time.perf_counter() - t, 30, f"{checks} brackets")


def test_criterion_02_field_axioms():
    t = time.perf_counter()
    rng = random.Random(0)
    entries = []
    bg = SymplecticConfig(1)
    probes = monomial_probes(bg.space, 3, 5)
    fields = [beta_field(bg, 1), gamma_field(bg, 1)]
    for f in fields:
        entries.append(check_field_axioms(f, probes, range(1, 6), 3, (-3, 3), _pick(rng, probes, 20), expect_sharp=True))
    for f in sp_generators(bg)[1].values():
        entries.append(check_field_axioms(f, probes, range(1, 6), 3, (-3, 3), _pick(rng, probes, 20)))
    for n in (2, 3):
        for c in (1, 4):
            cfg = SlnConfig(n, c)
            eig = eigen_probes(cfg, 1, (-2, 2))
            budget = probe_budget(1, (-2, 2))
            for name, a in sl_basis(n):
                f = current_field(cfg, a, name=name, budget=budget)
                e = check_field_axioms(f, eig, range(1, 6), 3, (-2, 2), _pick(rng, eig, 20))
                e.params.update({"n": n, "c": c})
                entries.append(e)
    record(2, "field axioms (conditions 1 and 2)", entries, time.perf_counter() - t, 60)


def test_criterion_03_normal_product_consistency():
    t = time.perf_counter()
    entries = []
    for tw in ("0", "1/2"):
        bg = SymplecticConfig(1, tw)
        fields = [beta_field(bg, 1), gamma_field(bg, 1)]
        entries.append(_nproduct_consistency(fields, monomial_probes(bg.space, 2, 3), 3, (-3, 3)))
    cfg = SlnConfig(2, 1)
    currents = [current_field(cfg, a, name=name, budget=probe_budget(1, (-1, 1))) for name, a in sl_basis(2)]
    entries.append(_nproduct_consistency(currents, eigen_probes(cfg, 1, (-1, 1)), 3, (-2, 2)))
    record(3, "lazy n-products equal the commutator formula (n = 0, 1, 2)", entries, time.perf_counter() - t)


def test_criterion_04_pi_t():
    t = time.perf_counter()
    entries = []
    lams = []
    for n in (1, 2, 3):
        for c in (1, 4):
            cfg = SlnConfig(n, c)
            e = check_pit_eigenvalue(cfg)
            lams.append(f"({n},{c})->{e.data['lambda']}")
            entries += [e, check_pit_relations(cfg, depth=4, degree=3)]
    record(4, "pi_t eigenvalue and relations", entries, time.perf_counter() - t, 10, "lambda " + " ".join(lams))


def test_criterion_05_level_one_bracket():
    t = time.perf_counter()
    entries = [check_affine_bracket(SlnConfig(n, c), (-2, 2), 1, 4) for n in (2, 3) for c in (1, 4)]
    record(5, "level-1 affine bracket on eigen-probes", entries, time.perf_counter() - t, 300)


def test_criterion_06_borcherds():
    t = time.perf_counter()
    entries = borcherds_suite("heisenberg", ONE, (-2, 2), 3)
    entries += borcherds_suite("sl2", ONE, (-2, 2), 4, c=1)
    record(6, "Borcherds identity (beta-gamma and V^1(sl2))", entries, time.perf_counter() - t, 600)


def test_criterion_07_dual_fields():
    t = time.perf_counter()
    entries = dual_field_check(1, seed=0, count=20, max_depth=4, margin=3)
    record(7, "dual modes vanish past the bound", entries, time.perf_counter() - t)


def test_criterion_08_induced_modules():
    t = time.perf_counter()
    entries = []
    sl2 = sl_algebra(2)
    entries.append(check_confluence(induce(vacuum_spec(ONE), sl2), random_words(sl2, 200, 4, 4, seed=0), 4))
    h1 = heisenberg_algebra(1)
    entries.append(check_confluence(induce(gaussian_spec(1), h1), random_words(h1, 200, 4, 4, seed=0), 4))
    k = Scalar.from_rational(3)
    vac = straighten((("E12", 1), ("E21", -1)), vacuum_spec(k), algebra=sl2)
    probe = Entry("vacuum-central-value", {"level": "3"})
    if vac.terms != {(): k}:
        probe.fail(f"e(1)f(-1)vac = {vac.render()}")
    entries.append(probe)
    entries.append(compare_induced_heisenberg(1, 4, 3))
    record(8, "induced modules", entries, time.perf_counter() - t)


def test_criterion_09_sp_closure_golden():
    t = time.perf_counter()
    report = run_suite(CheckConfig(suite="sp", g=1))
    golden = (GOLDEN / "sp_closure_g1.json").read_text()
    same = emit_report(report, "json") == golden
    entries = list(report.entries)
    if not same:
        entries[0].fail("report differs from the golden file")
    scalar = json.loads(golden)["entries"][0]["data"]["central_scalar"]
    record(9, "sp closure with one central scalar", entries, time.perf_counter() - t, extra=f"central scalar {scalar}")


def test_criterion_10_determinism():
    t = time.perf_counter()
    entries = []
    for suite, extra in (
        ("heisenberg", {"N": 3, "window": (-2, 2)}),
        ("betagamma-axioms", {"N": 3, "seed": 11}),
        ("sp", {}),
        ("pi-t", {"n": 2, "c": 4}),
        ("dual", {"seed": 4}),
        ("induced-heisenberg", {"N": 3, "seed": 2}),
    ):
        a = emit_report(run_suite(CheckConfig(suite=suite, **extra)), "json")
        b = emit_report(run_suite(CheckConfig(suite=suite, **extra)), "json")
        e = Entry("determinism", {"suite": suite})
        if a != b:
            e.fail("reports differ")
        entries.append(e)
    record(10, "byte-identical reports", entries, time.perf_counter() - t)


if __name__ == "__main__":
    raise SystemExit(pytest.main([__file__, "-q", "-p", "no:cacheprovider"]))
