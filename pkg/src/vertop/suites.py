"""Verification suites behind the command line."""

from __future__ import annotations

import random
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Optional, Tuple

from .report import Entry, Report
from .scalar import parse_scalar

__all__ = ["CheckConfig", "ConfigError", "SUITES", "run_suite", "parse_window"]

SUITES = (
    "heisenberg",
    "betagamma-axioms",
    "sp",
    "sln",
    "pi-t",
    "borcherds",
    "dual",
    "induced-heisenberg",
)


class ConfigError(ValueError):
    pass


def parse_window(text):
    """'a..b' -> (a, b)."""
    try:
        lo, hi = text.split("..")
        lo, hi = int(lo), int(hi)
    except ValueError:
        raise ConfigError(f"window must look like a..b, got {text!r}") from None
    if lo > hi:
        raise ConfigError(f"empty window {text!r}")
    return lo, hi


@dataclass
class CheckConfig:
    suite: str = "heisenberg"
    N: int = 5
    degree: int = 3
    window: Tuple[int, int] = (-3, 3)
    generation: int = 1
    g: int = 1
    n: int = 2
    c: Fraction = Fraction(1)
    level: str = "1"
    algebra: str = "sl2"
    spec: str = "vacuum"
    max_word_len: int = 3
    seed: int = 0
    format: str = "json"
    timing: bool = False

    def validate(self):
        if self.suite not in SUITES and self.suite != "all":
            raise ConfigError(f"unknown suite {self.suite!r}")
        if self.N < 1:
            raise ConfigError("N must be >= 1")
        if self.degree < 0:
            raise ConfigError("degree must be >= 0")
        lo, hi = self.window
        if lo > hi:
            raise ConfigError("window is empty")
        if self.g < 1:
            raise ConfigError("g must be >= 1")
        if self.n < 1:
            raise ConfigError("n must be >= 1")
        if self.generation < 0:
            raise ConfigError("generation must be >= 0")
        c = Fraction(self.c)
        if c <= 0 or not (_is_square(c.numerator) and _is_square(c.denominator)):
            raise ConfigError(f"c must be a positive rational square, got {c}")
        if self.algebra not in ("sl2", "sl3", "heisenberg"):
            raise ConfigError(f"unknown algebra {self.algebra!r}")
        try:
            parse_scalar(str(self.level))
        except ValueError as exc:
            raise ConfigError(f"bad level {self.level!r}: {exc}") from None
        if self.spec not in ("vacuum", "gaussian"):
            raise ConfigError(f"unknown spec {self.spec!r}")
        if self.spec == "gaussian" and self.algebra != "heisenberg":
            raise ConfigError("the gaussian spec needs --algebra heisenberg")
        if self.max_word_len < 0:
            raise ConfigError("max-word-len must be >= 0")
        if self.format not in ("json", "text"):
            raise ConfigError(f"unknown format {self.format!r}")
        return self

    def echo(self):
        d = asdict(self)
        d["window"] = f"{self.window[0]}..{self.window[1]}"
        d["c"] = str(Fraction(self.c))
        d["level"] = str(self.level)
        d.pop("format")
        d.pop("timing")
        return d


def _is_square(k):
    from math import isqrt

    return k >= 0 and isqrt(k) ** 2 == k


def _scalar(text):
    return parse_scalar(str(text))


# ---------------------------------------------------------------------------
# suites


def _heisenberg(cfg):
    from .betagamma import SymplecticConfig, check_heisenberg_relations

    return [
        check_heisenberg_relations(SymplecticConfig(cfg.g, tw), cfg.window, None, cfg.N, cfg.degree)
        for tw in ("0", "1/2")
    ]


def _pick(rng, items, k):
    items = list(items)
    if len(items) <= k:
        return items
    idx = sorted(rng.sample(range(len(items)), k))
    return [items[i] for i in idx]


def _betagamma_axioms(cfg):
    from .betagamma import SymplecticConfig, beta_field, gamma_field, monomial_probes, sp_generators
    from .fields import check_field_axioms, check_locality, commutator_formula_mode, nproduct

    rng = random.Random(cfg.seed)
    entries = []
    bg = SymplecticConfig(cfg.g)
    N = cfg.N
    probes = monomial_probes(bg.space, cfg.degree, N)
    cont = _pick(rng, probes, 20)
    fields = []
    for i in range(1, cfg.g + 1):
        fields += [beta_field(bg, i), gamma_field(bg, i)]
    for f in fields:
        entries.append(check_field_axioms(f, probes, range(1, N + 1), 3, cfg.window, cont, expect_sharp=True))
    small = monomial_probes(bg.space, min(cfg.degree, 2), min(N, 3))
    _, gens = sp_generators(bg)
    for f in gens.values():
        entries.append(check_field_axioms(f, probes, range(1, N + 1), 3, cfg.window, _pick(rng, probes, 20)))
    b, g_ = fields[0], fields[1]
    entries.append(check_locality(b, b, 0, small, min(N, 3), cfg.window, name="locality-beta-beta"))
    entries.append(check_locality(b, g_, 1, small, min(N, 3), cfg.window, name="locality-beta-gamma"))
    entries.append(_nproduct_consistency(fields, small, min(N, 3), cfg.window))
    return entries


def _nproduct_consistency(fields, probes, N, window, orders=(0, 1, 2)):
    """Lazy n-th product modes against the finite commutator formula."""
    from .fields import commutator_formula_mode, nproduct

    entry = Entry("nproduct-consistency", {"fields": [f.name for f in fields], "orders": list(orders), "N": N, "window": list(window)})
    from .report import timed

    with timed(entry):
        for a in fields:
            for b in fields:
                for n in orders:
                    c = nproduct(a, b, n)
                    for j in range(window[0], window[1] + 1):
                        lazy, finite = c.mode(j), commutator_formula_mode(a, b, n, j)
                        M = max(lazy.need(N), finite.need(N))
                        for p in probes:
                            v = p.at(M)
                            if lazy.apply(v, N) != finite.apply(v, N):
                                entry.fail(f"{c.name} mode {j} on {p.name}")
                                return entry
    return entry


def _sp(cfg):
    from .betagamma import SymplecticConfig, check_sp_bracket_closure

    w = (max(cfg.window[0], -2), min(cfg.window[1], 2))
    return [check_sp_bracket_closure(SymplecticConfig(cfg.g), w, None, min(cfg.N, 3))]


def _sln_cfg(cfg):
    from .affine import SlnConfig

    return SlnConfig(cfg.n, Fraction(cfg.c))


def _sln(cfg):
    from .affine import check_affine_bracket, check_eigen_relation, current_field, eigen_probes, probe_budget, sl_basis
    from .fields import check_field_axioms

    rng = random.Random(cfg.seed)
    sc = _sln_cfg(cfg)
    if sc.n < 2:
        raise ConfigError("the sl_n suite needs n >= 2")
    pw = (max(cfg.window[0], -2), min(cfg.window[1], 2))
    gen = min(cfg.generation, 1)
    probes = eigen_probes(sc, gen, pw)
    N = min(cfg.N, 4)
    entries = [
        check_eigen_relation(sc, probes, cfg.N),
        check_affine_bracket(sc, pw, gen, N, probes=probes),
        check_affine_bracket(sc, pw, gen, min(N, 3), exploratory=True),
    ]
    budget = probe_budget(gen, pw)
    for name, a in sl_basis(sc.n):
        f = current_field(sc, a, name=name, budget=budget)
        entries.append(check_field_axioms(f, probes, range(1, cfg.N + 1), 3, pw, _pick(rng, probes, 20)))
    return entries


def _pit(cfg):
    from .affine import SlnConfig, check_pit_eigenvalue, check_pit_relations

    sc = SlnConfig(cfg.n, Fraction(cfg.c))
    return [
        check_pit_eigenvalue(sc, min(cfg.N, 4)),
        check_pit_relations(sc, depth=min(cfg.N, 4), degree=cfg.degree),
    ]


def _borcherds(cfg):
    from .induced import borcherds_suite

    return borcherds_suite(cfg.algebra, _scalar(cfg.level), cfg.window, min(cfg.N, 4), cfg.g, Fraction(cfg.c))


def _dual(cfg):
    from .betagamma import dual_field_check

    return dual_field_check(cfg.g, cfg.seed, count=20, max_depth=min(cfg.N, 4))


def _induced(cfg):
    from .induced import (
        check_confluence,
        compare_induced_heisenberg,
        gaussian_spec,
        heisenberg_algebra,
        induce,
        random_words,
        sl_algebra,
        vacuum_spec,
    )

    N = min(cfg.N, 4)
    entries = [compare_induced_heisenberg(cfg.g, N, cfg.max_word_len)]
    if cfg.algebra == "heisenberg":
        alg = heisenberg_algebra(cfg.g)
    else:
        alg = sl_algebra(int(cfg.algebra[2:]))
    level = _scalar(cfg.level)
    spec = gaussian_spec(cfg.g, level) if cfg.spec == "gaussian" else vacuum_spec(level)
    module = induce(spec, alg)
    words = random_words(alg, 200, max_len=max(cfg.max_word_len, 1), max_depth=N, seed=cfg.seed)
    entries.append(check_confluence(module, words, N))
    return entries


_RUNNERS = {
    "heisenberg": _heisenberg,
    "betagamma-axioms": _betagamma_axioms,
    "sp": _sp,
    "sln": _sln,
    "pi-t": _pit,
    "borcherds": _borcherds,
    "dual": _dual,
    "induced-heisenberg": _induced,
}


def run_suite(cfg):
    """Run one suite (or all of them) and collect a deterministic report."""
    cfg.validate()
    names = SUITES if cfg.suite == "all" else (cfg.suite,)
    report = Report(cfg.suite, cfg.echo())
    for name in names:
        try:
            report.entries.extend(_RUNNERS[name](cfg))
        except ConfigError:
            raise
        except Exception as exc:  # surfaced as an error entry, never swallowed silently
            report.entries.append(Entry(name, {}, status="error", witness=f"{type(exc).__name__}: {exc}"))
    return report
