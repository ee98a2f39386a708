"""Induced modules over affine and Heisenberg mode algebras.

A :class:`ModeAlgebra` is a finite Lie algebra ``g`` with a central
extension of its loop algebra.  A :class:`SubalgebraSpec` lists annihilators
(each with one leading nonnegative mode) and a level for the center; the
induced module is spanned by normal-ordered words in the negative modes
acting on a cyclic vector.  Words are tuples of letters ``(name, mode)``;
a word ``(L1, ..., Lr)`` stands for ``L1 L2 ... Lr |0>``.  Normal order puts
the deepest letter first (mode ascending, then basis index).

The depth filtration ``U_n`` is spanned by words containing a letter of
depth >= ``n``; a state at precision ``N`` keeps only words whose letters
all have depth <= ``N``.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Dict, List, Optional, Tuple

from .fields import IdentityField, LinearField, NProductField, binomial
from .filtered import Deriv, FilteredVector, Mult, apply_primitive, truncate
from .report import Entry, timed
from .scalar import ONE, TAU, ZERO, Scalar, as_scalar

__all__ = [
    "SpecError",
    "ModeAlgebra",
    "sl_algebra",
    "heisenberg_algebra",
    "SubalgebraSpec",
    "vacuum_spec",
    "gaussian_spec",
    "PBWState",
    "InducedModule",
    "induce",
    "straighten",
    "straighten_bubble",
    "random_words",
    "check_confluence",
    "VacuumProducts",
    "state_nproduct",
    "reconstruct_field",
    "borcherds_check",
    "compare_induced_heisenberg",
    "render_word",
    "borcherds_suite",
    "betagamma_states",
]

CENTRAL = "K"


class SpecError(ValueError):
    """Inconsistent or non-terminating subalgebra data."""


# ---------------------------------------------------------------------------
# mode algebras
#
# An element is a dict {letter: Scalar} where a letter is (name, mode); the
# key CENTRAL holds the coefficient of K.


def _add(acc, key, c):
    y = acc.get(key)
    if y is None:
        if c:
            acc[key] = c
    else:
        z = y + c
        if z:
            acc[key] = z
        else:
            del acc[key]


class ModeAlgebra:
    """Loop algebra of a finite Lie algebra plus a central element K.

    ``struct[(a, b)]`` is ``[a, b]`` as a dict over basis names.  The central
    term is either ``m d_(m+k,0) form(a,b) K`` (affine) or
    ``tau d_(m+k+1,0) form(a,b) K`` (Heisenberg, form antisymmetric).
    ``weights`` are the conformal weights of the generators; a letter
    ``x(m)`` raises the weight of a state by ``weights[x] - m - 1``.
    """

    def __init__(self, name, basis, struct, form, cocycle, weights=None, check_depth=2):
        self.name = name
        self.basis = list(basis)
        self.index = {b: i for i, b in enumerate(self.basis)}
        self.struct = {k: {x: as_scalar(c) for x, c in v.items() if c} for k, v in struct.items()}
        self.form = {k: as_scalar(c) for k, c in form.items() if c}
        if cocycle not in ("affine", "heisenberg"):
            raise ValueError("cocycle must be 'affine' or 'heisenberg'")
        self.cocycle = cocycle
        self.weights = dict(weights or {b: 1 for b in self.basis})
        self._verify(check_depth)

    def __repr__(self):
        return f"ModeAlgebra({self.name})"

    def key(self, letter):
        name, mode = letter
        return (mode, self.index[name])

    def bracket_letters(self, x, y):
        (a, m), (b, k) = x, y
        out = {}
        for z, c in self.struct.get((a, b), {}).items():
            out[(z, m + k)] = c
        f = self.form.get((a, b))
        if f:
            if self.cocycle == "affine":
                if m + k == 0 and m:
                    out[CENTRAL] = f * m
            elif m + k + 1 == 0:
                out[CENTRAL] = f * TAU
        return out

    def bracket(self, X, Y):
        out = {}
        for x, c in X.items():
            if x == CENTRAL:
                continue
            for y, d in Y.items():
                if y == CENTRAL:
                    continue
                for z, e in self.bracket_letters(x, y).items():
                    _add(out, z, c * d * e)
        return out

    def weight_shift(self, letter):
        name, mode = letter
        return self.weights[name] - mode - 1

    def _verify(self, depth):
        """Antisymmetry and Jacobi on letters with modes in [-depth, depth]."""
        letters = [(b, m) for b in self.basis for m in range(-depth, depth + 1)]
        for x in letters:
            for y in letters:
                s = self.bracket({x: ONE}, {y: ONE})
                t = self.bracket({y: ONE}, {x: ONE})
                for k in set(s) | set(t):
                    if s.get(k, ZERO) + t.get(k, ZERO):
                        raise SpecError(f"antisymmetry fails for {x}, {y}")
        basis_letters = [(b, m) for b in self.basis for m in range(-1, 2)]
        for x in basis_letters:
            for y in basis_letters:
                for z in basis_letters:
                    X, Y, Z = {x: ONE}, {y: ONE}, {z: ONE}
                    total = {}
                    for P, Q, R in ((X, Y, Z), (Y, Z, X), (Z, X, Y)):
                        for k, c in self.bracket(self.bracket(P, Q), R).items():
                            _add(total, k, c)
                    if total:
                        raise SpecError(f"Jacobi fails for {x}, {y}, {z}")


def _sl_decompose(n, mat):
    """Coefficients of a trace-zero matrix in the basis E_uv, H_u."""
    out = {}
    for (u, v), c in mat.items():
        if u != v:
            out[f"E{u}{v}"] = c
    running = ZERO
    for u in range(1, n):
        running = running + mat.get((u, u), ZERO)
        if running:
            out[f"H{u}"] = running
    return out


@lru_cache(maxsize=None)
def sl_algebra(n):
    """Affine sl_n with the trace form, basis E_uv (u != v) and H_u."""
    from .affine import matrix_bracket, sl_basis, trace_form

    basis = sl_basis(n)
    names = [b for b, _ in basis]
    struct, form = {}, {}
    for an, a in basis:
        for bn, b in basis:
            struct[(an, bn)] = _sl_decompose(n, matrix_bracket(a, b))
            form[(an, bn)] = trace_form(a, b)
    return ModeAlgebra(f"sl{n}", names, struct, form, "affine")


@lru_cache(maxsize=None)
def heisenberg_algebra(g):
    """Generators b_j, c_j with [b_j(m), c_k(l)] = tau d_jk d_(m+l+1,0) K."""
    names = [f"b{j}" for j in range(1, g + 1)] + [f"c{j}" for j in range(1, g + 1)]
    form = {}
    for j in range(1, g + 1):
        form[(f"b{j}", f"c{j}")] = ONE
        form[(f"c{j}", f"b{j}")] = -ONE
    weights = {f"b{j}": 1 for j in range(1, g + 1)}
    weights.update({f"c{j}": 0 for j in range(1, g + 1)})
    return ModeAlgebra(f"heisenberg{g}", names, {}, form, "heisenberg", weights)


# ---------------------------------------------------------------------------
# subalgebra data


@dataclass
class SubalgebraSpec:
    """Annihilators of the cyclic vector and the level of K.

    ``annihilator(letter)`` returns the annihilator whose leading letter is
    ``letter`` (a nonnegative mode), as an element dict, or None.  Negative
    modes form the complement; ``depth_gap`` asserts that no annihilator is
    supported on modes of depth >= ``depth_gap`` alone.
    """

    name: str
    level: Scalar
    annihilator: Callable
    depth_gap: int = 1
    extra: List[dict] = field(default_factory=list)

    def rule(self, letter):
        X = self.annihilator(letter)
        if X is None or not X.get(letter):
            raise SpecError(f"no annihilator with leading letter {render_letter(letter)}")
        lead = X[letter]
        inv = -lead.inverse()
        return {k: c * inv for k, c in X.items() if k != letter}

    def annihilators(self, algebra, max_mode):
        out = []
        for b in algebra.basis:
            for m in range(0, max_mode + 1):
                X = self.annihilator((b, m))
                if X is not None:
                    out.append(X)
        return out + list(self.extra)


def vacuum_spec(level=ONE):
    """Every nonnegative mode kills the vacuum; K acts by ``level``."""
    return SubalgebraSpec("vacuum", as_scalar(level), lambda letter: {letter: ONE} if letter[1] >= 0 else None)


def gaussian_spec(g, level=ONE):
    """Annihilators of exp(-sum x^2 / 2) in the beta-gamma realization.

    On the twist-1/2 model ``x + d/dx`` kills the Gaussian; in modes this is
    ``c_j(n-1) - tau^-1 b_j(-n)`` and ``b_j(n-1) + tau^-1 c_j(-n)``.
    """
    tinv = TAU.inverse()

    def ann(letter):
        name, m = letter
        if m < 0:
            return None
        j = name[1:]
        if name[0] == "c":
            return {letter: ONE, (f"b{j}", -(m + 1)): -tinv}
        return {letter: ONE, (f"c{j}", -(m + 1)): tinv}

    return SubalgebraSpec("gaussian", as_scalar(level), ann)


# ---------------------------------------------------------------------------
# states


def render_letter(letter):
    name, m = letter
    return f"{name}({m})"


def render_word(word):
    return "".join(render_letter(x) for x in word) + "|0>"


def word_depth(word):
    return max((-m for _, m in word), default=0)


class PBWState:
    """Combination of normal-ordered words, exact or modulo ``U_precision``."""

    __slots__ = ("terms", "precision")

    def __init__(self, terms=None, precision=None):
        terms = {w: as_scalar(c) for w, c in (terms or {}).items()}
        terms = {w: c for w, c in terms.items() if c}
        if precision is not None:
            terms = {w: c for w, c in terms.items() if word_depth(w) <= precision}
        self.terms = terms
        self.precision = precision

    @classmethod
    def vacuum(cls):
        return cls({(): ONE})

    @classmethod
    def word(cls, word, coef=ONE):
        return cls({tuple(word): coef})

    def truncate(self, N):
        if self.precision is not None and N > self.precision:
            raise SpecError(f"state known mod U_{self.precision}, requested U_{N}")
        return PBWState(self.terms, N)

    def __eq__(self, other):
        return isinstance(other, PBWState) and self.terms == other.terms and self.precision == other.precision

    def __bool__(self):
        return bool(self.terms)

    def __add__(self, other):
        out = dict(self.terms)
        for w, c in other.terms.items():
            _add(out, w, c)
        prec = _min_prec(self.precision, other.precision)
        return PBWState(out, prec)

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def scale(self, c):
        c = as_scalar(c)
        return PBWState({w: c * x for w, x in self.terms.items()}, self.precision)

    def render(self):
        if not self.terms:
            body = "0"
        else:
            parts = []
            for w in sorted(self.terms, key=lambda w: (len(w), w)):
                c = self.terms[w]
                parts.append(render_word(w) if c == ONE else f"({c})*{render_word(w)}")
            body = " + ".join(parts)
        return body if self.precision is None else f"{body} @ precision {self.precision}"

    def __repr__(self):
        return f"PBWState({self.render()})"


def _min_prec(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return min(a, b)


# ---------------------------------------------------------------------------
# straightening


class InducedModule:
    """Module induced from a subalgebra character; letters act by straightening."""

    def __init__(self, algebra, spec, budget=200000):
        self.algebra = algebra
        self.spec = spec
        self.level = spec.level
        self.budget = budget
        self._act = {}
        self._rules = {}
        self._steps = 0

    def is_complement(self, letter):
        return letter[1] < 0

    def _rule(self, letter):
        hit = self._rules.get(letter)
        if hit is None:
            hit = self._rules[letter] = self.spec.rule(letter)
        return hit

    def _tick(self):
        self._steps += 1
        if self._steps > self.budget:
            raise SpecError("straightening exceeded its rewrite budget")

    def act(self, letter, word):
        """``letter . word`` as an exact dict of normal words."""
        key = (letter, word)
        hit = self._act.get(key)
        if hit is not None:
            return hit
        self._tick()
        alg = self.algebra
        out = {}
        if self.is_complement(letter) and (not word or alg.key(letter) <= alg.key(word[0])):
            out[(letter,) + word] = ONE
        elif not word:
            for x, c in self._rule(letter).items():
                if x == CENTRAL:
                    _add(out, (), c * self.level)
                else:
                    for w, d in self.act(x, ()).items():
                        _add(out, w, c * d)
        else:
            first, rest = word[0], word[1:]
            for w, c in self.act(letter, rest).items():
                for w2, d in self.act(first, w).items():
                    _add(out, w2, c * d)
            for x, c in alg.bracket_letters(letter, first).items():
                if x == CENTRAL:
                    _add(out, rest, c * self.level)
                else:
                    for w, d in self.act(x, rest).items():
                        _add(out, w, c * d)
        self._act[key] = out
        return out

    def apply_letter(self, letter, state, N=None):
        self._steps = 0
        out = {}
        for w, c in state.terms.items():
            for w2, d in self.act(letter, w).items():
                _add(out, w2, c * d)
        return PBWState(out, _min_prec(N, state.precision))

    def apply_word(self, word, state=None, N=None):
        """``word[0] word[1] ... state`` (rightmost letter acts first)."""
        self._steps = 0
        terms = dict((state or PBWState.vacuum()).terms)
        for letter in reversed(word):
            out = {}
            for w, c in terms.items():
                for w2, d in self.act(letter, w).items():
                    _add(out, w2, c * d)
            terms = out
        prec = None if state is None else state.precision
        return PBWState(terms, _min_prec(N, prec))

    def straighten(self, word, N=None):
        return self.apply_word(tuple(word), None, N)

    def straighten_bubble(self, word, N=None):
        """Independent rewriting: repeatedly fix the leftmost disorder."""
        alg = self.algebra
        pending = {tuple(word): ONE}
        done = {}
        steps = 0
        while pending:
            w, c = pending.popitem()
            steps += 1
            if steps > self.budget:
                raise SpecError("bubble straightening exceeded its rewrite budget")
            pos = None
            for i, x in enumerate(w):
                if not self.is_complement(x):
                    if i == len(w) - 1:
                        pos = ("rule", i)
                        break
                    if self.is_complement(w[i + 1]):
                        pos = ("swap", i)
                        break
                elif i + 1 < len(w) and self.is_complement(w[i + 1]) and alg.key(x) > alg.key(w[i + 1]):
                    pos = ("swap", i)
                    break
            if pos is None:
                if any(not self.is_complement(x) for x in w):
                    raise SpecError("bubble straightening stuck")
                _add(done, w, c)
                continue
            kind, i = pos
            if kind == "rule":
                head = w[:i]
                for x, d in self._rule(w[i]).items():
                    if x == CENTRAL:
                        _add(pending, head, c * d * self.level)
                    else:
                        _add(pending, head + (x,), c * d)
            else:
                x, y = w[i], w[i + 1]
                head, tail = w[:i], w[i + 2 :]
                _add(pending, head + (y, x) + tail, c)
                for z, d in alg.bracket_letters(x, y).items():
                    if z == CENTRAL:
                        _add(pending, head + tail, c * d * self.level)
                    else:
                        _add(pending, head + (z,) + tail, c * d)
        return PBWState(done, N)


def induce(spec, algebra, check_depth=3):
    """Build the induced module after sanity checks on the annihilators.

    Raises :class:`SpecError` when an annihilator lives entirely in the
    complement at depth >= ``depth_gap`` (the filtration would not be
    separated), or when annihilator brackets are inconsistent with the
    character.
    """
    anns = spec.annihilators(algebra, check_depth)
    for X in anns:
        letters = [x for x in X if x != CENTRAL]
        if letters and all(m <= -spec.depth_gap for _, m in letters):
            raise SpecError(
                "annihilator " + _render_element(X) + f" lies in depth >= {spec.depth_gap}; the filtration is not separated"
            )
    module = InducedModule(algebra, spec)
    for X in anns:
        if not any(x != CENTRAL and x[1] >= 0 for x in X):
            continue
        for Y in anns:
            if not any(y != CENTRAL and y[1] >= 0 for y in Y):
                continue
            value = _character(module, algebra.bracket(X, Y))
            if value:
                raise SpecError(
                    f"annihilator bracket [{_render_element(X)}, {_render_element(Y)}] acts on the cyclic vector by "
                    + PBWState(value).render()
                )
    return module


def _character(module, X):
    """``X |0>``: zero exactly when X is in the annihilator span with character 0."""
    out = {}
    for x, c in X.items():
        if x == CENTRAL:
            _add(out, (), c * module.level)
        else:
            for w, d in module.act(x, ()).items():
                _add(out, w, c * d)
    return out


def _render_element(X):
    parts = []
    for x, c in X.items():
        s = "K" if x == CENTRAL else render_letter(x)
        parts.append(s if c == ONE else f"({c})*{s}")
    return " + ".join(parts) or "0"


def straighten(word, spec, N=None, algebra=None, module=None):
    """Normal form of ``word |0>`` in the induced module, modulo U_N."""
    module = module or InducedModule(algebra, spec)
    return module.straighten(word, N)


def straighten_bubble(word, spec, N=None, algebra=None, module=None):
    module = module or InducedModule(algebra, spec)
    return module.straighten_bubble(word, N)


def random_words(algebra, count, max_len=4, max_depth=4, seed=0):
    """Random letter words with modes in [-max_depth, max_depth]."""
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        length = rng.randint(1, max_len)
        out.append(
            tuple((rng.choice(algebra.basis), rng.randint(-max_depth, max_depth)) for _ in range(length))
        )
    return out


def check_confluence(module, words, N=4):
    entry = Entry(
        "straightening-confluence",
        {"algebra": module.algebra.name, "spec": module.spec.name, "words": len(words), "N": N},
    )
    with timed(entry):
        for w in words:
            a = module.straighten(w).truncate(N)
            b = module.straighten_bubble(w).truncate(N)
            if a != b:
                entry.fail(f"{render_word(w)}: {a.render()} vs {b.render()}")
                break
    return entry


# ---------------------------------------------------------------------------
# vertex algebra structure on the vacuum module


def _word_weight(alg, word):
    return sum(alg.weight_shift(x) for x in word)


class VacuumProducts:
    """n-th products of states in a vacuum module, by recursion on the first letter."""

    def __init__(self, module):
        if module.spec.name != "vacuum":
            raise SpecError("n-th products of states need the vacuum module")
        self.module = module
        self.algebra = module.algebra
        self._memo = {}

    def letter_mode(self, letter, word):
        return self.module.act(letter, word)

    def product(self, wa, wb, l):
        """a_(l) b for two normal words, as an exact dict."""
        key = (wa, wb, l)
        hit = self._memo.get(key)
        if hit is not None:
            return hit
        alg = self.algebra
        out = {}
        if not wa:
            if l == -1:
                out[wb] = ONE
        elif _word_weight(alg, wa) + _word_weight(alg, wb) - l - 1 >= 0:
            x, c = wa[0], wa[1:]
            name, mode = x
            n = mode  # x(n) with n = -m-1 < 0
            wc = _word_weight(alg, c)
            wbw = _word_weight(alg, wb)
            last1 = wc + wbw - 1 - l
            for i in range(0, max(last1, -1) + 1):
                coef = (-1) ** i * binomial(n, i)
                if not coef:
                    continue
                for w, d in self.product(c, wb, l + i).items():
                    for w2, e in self.letter_mode((name, n - i), w).items():
                        _add(out, w2, Scalar.from_rational(coef) * d * e)
            last2 = alg.weights[name] + wbw - 1
            for i in range(0, max(last2, -1) + 1):
                coef = -((-1) ** i) * binomial(n, i) * (-1) ** (n % 2)
                if not coef:
                    continue
                for w, d in self.letter_mode((name, i), wb).items():
                    for w2, e in self.product(c, w, n + l - i).items():
                        _add(out, w2, Scalar.from_rational(coef) * d * e)
        self._memo[key] = out
        return out


def state_nproduct(a, b, l, V):
    """a_(l) b inside the vacuum module ``V``."""
    prods = V if isinstance(V, VacuumProducts) else VacuumProducts(V)
    out = {}
    for wa, ca in a.terms.items():
        for wb, cb in b.terms.items():
            for w, d in prods.product(wa, wb, l).items():
                _add(out, w, ca * cb * d)
    return PBWState(out, _min_prec(a.precision, b.precision))


def reconstruct_field(a, realization, space=None, cache=None):
    """Field of a state: |0> -> Id, x(-1)|0> -> Y_x, x(-m-1)c -> Y_x _(-m-1) Y_c."""
    cache = {} if cache is None else cache
    if space is None:
        space = next(iter(realization.values())).space

    def word_field(w):
        hit = cache.get(w)
        if hit is not None:
            return hit
        if not w:
            f = IdentityField(space)
        else:
            (name, mode), rest = w[0], w[1:]
            if mode >= 0:
                raise SpecError(f"state word {render_word(w)} is not built from negative modes")
            if name not in realization:
                raise SpecError(f"no field for generator {name}")
            if not rest and mode == -1:
                f = realization[name]
            else:
                f = NProductField(realization[name], word_field(rest), mode, name=f"Y({render_word(w)})")
        cache[w] = f
        return f

    items = [(c, word_field(w)) for w, c in sorted(a.terms.items(), key=lambda t: (len(t[0]), t[0]))]
    if len(items) == 1 and items[0][0] == ONE:
        return items[0][1]
    if not items:
        return LinearField(space, [], name="0")
    return LinearField(space, items, name=a.render())


def borcherds_check(a, b, l, realization, probes, N, window=(-2, 2), V=None, cache=None, name="borcherds"):
    """Compare Y(a_(l) b) with Y(a)_(l) Y(b) mode by mode on probes mod U_N."""
    entry = Entry(name, {"a": a.render(), "b": b.render(), "l": l, "N": N, "window": list(window)})
    with timed(entry):
        ab = state_nproduct(a, b, l, V)
        left = reconstruct_field(ab, realization, cache=cache)
        right = NProductField(reconstruct_field(a, realization, cache=cache), reconstruct_field(b, realization, cache=cache), l)
        lo, hi = window
        for n in range(lo, hi + 1):
            L, R = left.mode(n), right.mode(n)
            M = max(L.need(N), R.need(N))
            for p in probes:
                v = p.at(M)
                x, y = L.apply(v, N), R.apply(v, N)
                if x != y:
                    entry.fail(f"mode {n} on {p.name}: {x.render()} vs {y.render()}")
                    return entry
        entry.data["product"] = ab.render()
    return entry


# ---------------------------------------------------------------------------
# comparison with the Gaussian in the twist-1/2 model


def compare_induced_heisenberg(g=1, N=4, max_len=3, window=None):
    """Map word|0> to word . Gaussian and check it intertwines every generator mode.

    The level of K is measured from ``[b_1(0), c_1(-1)]`` on the Gaussian.
    """
    from .betagamma import SymplecticConfig, beta_field, gamma_field

    entry = Entry("induced-heisenberg", {"g": g, "N": N, "max_len": max_len})
    cfg = SymplecticConfig(g, "1/2")
    space = cfg.space
    fields = {}
    for j in range(1, g + 1):
        fields[f"b{j}"] = beta_field(cfg, j)
        fields[f"c{j}"] = gamma_field(cfg, j)
    gauss = FilteredVector({(): ONE}, _clean=True)

    def model_letter(letter, v):
        name, m = letter
        op = fields[name].mode(m)
        out = apply_primitive(op.ops[0], v, space)
        return out.scale(op.coef)

    with timed(entry):
        # the central element: [b1(0), c1(-1)] = tau K
        v = model_letter(("b1", 0), model_letter(("c1", -1), gauss)) - model_letter(
            ("c1", -1), model_letter(("b1", 0), gauss)
        )
        ratio = v.coefficient(()) / TAU
        if v != gauss.scale(v.coefficient(())):
            entry.fail("center does not act by a scalar on the Gaussian")
            return entry
        level = ratio
        entry.data["level"] = str(level)
        algebra = heisenberg_algebra(g)
        module = induce(gaussian_spec(g, level), algebra)

        # annihilators kill the Gaussian in the model
        for s in range(1, 2 * g + 1):
            for n in range(1, N + 1):
                w = apply_primitive(Mult(s, n), gauss, space) + apply_primitive(Deriv(s, n), gauss, space)
                if w:
                    entry.fail(f"x[{s},-{n}] + d/dx[{s},-{n}] does not kill the Gaussian: {w.render()}")
                    return entry
        for letter in [(b, m) for b in algebra.basis for m in range(0, N)]:
            X = module.spec.annihilator(letter)
            total = FilteredVector({}, _clean=True)
            for x, c in X.items():
                total = total + model_letter(x, gauss).scale(c)
            if total:
                entry.fail(f"annihilator {_render_element(X)} does not kill the Gaussian")
                return entry

        def phi(state):
            acc = FilteredVector({}, _clean=True)
            for w, c in state.terms.items():
                x = gauss
                for letter in reversed(w):
                    x = model_letter(letter, x)
                acc = acc + x.scale(c)
            return acc

        complement = [(b, -d) for b in algebra.basis for d in range(1, N + 1)]
        words = [()]
        frontier = [()]
        for _ in range(max_len):
            nxt = []
            for w in frontier:
                for x in complement:
                    if not w or algebra.key(x) <= algebra.key(w[0]):
                        nxt.append((x,) + w)
            words += nxt
            frontier = nxt
        lo, hi = window or (-(N + 1), N)
        letters = [(b, m) for b in algebra.basis for m in range(lo, hi + 1)]
        checked = 0
        for w in words:
            image = phi(PBWState.word(w))
            for x in letters:
                lhs = phi(module.apply_letter(x, PBWState.word(w)).truncate(N))
                rhs = model_letter(x, image)
                if truncate(lhs, N) != truncate(rhs, N):
                    entry.fail(f"{render_letter(x)} on {render_word(w)}")
                    return entry
                checked += 1
        entry.data["checks"] = checked
        entry.data["words"] = len(words)
    return entry


# ---------------------------------------------------------------------------
# suites


def betagamma_states(g=1, max_depth=2):
    """Normal words in b_j(-n), c_j(-n) whose letter depths sum to at most ``max_depth``."""
    alg = heisenberg_algebra(g)
    letters = [(b, -d) for b in alg.basis for d in range(1, max_depth + 1)]
    words = [()]
    frontier = [((), 0)]
    while frontier:
        nxt = []
        for w, total in frontier:
            for x in letters:
                t = total - x[1]
                if t <= max_depth and (not w or alg.key(x) <= alg.key(w[0])):
                    nxt.append(((x,) + w, t))
        words += [w for w, _ in nxt]
        frontier = nxt
    return [PBWState.word(w) for w in sorted(words, key=lambda w: (len(w), w))]


def borcherds_suite(algebra="heisenberg", level=ONE, window=(-2, 2), N=4, g=1, c=1, ls=None, probe_window=(-2, 2)):
    """Borcherds identity for the beta-gamma system or V^k(sl_n) on its realization.

    The realization has level 1; other levels are expected to fail (for
    ``l >= 1`` the central term disagrees).
    """
    from .affine import SlnConfig, current_field, eigen_probes, probe_budget
    from .betagamma import SymplecticConfig, beta_field, gamma_field, monomial_probes

    entries = []
    if algebra == "heisenberg":
        cfg = SymplecticConfig(g)
        alg = heisenberg_algebra(g)
        realization = {}
        for j in range(1, g + 1):
            realization[f"b{j}"] = beta_field(cfg, j)
            realization[f"c{j}"] = gamma_field(cfg, j)
        states = betagamma_states(g, 2)
        probes = monomial_probes(cfg.space, 2, 2)
        pairs = [(a, b) for a in states for b in states]
        ls = ls or range(-2, 3)
        Nc = min(N, 3)
    else:
        n = int(algebra[2:])
        sc = SlnConfig(n, c)
        alg = sl_algebra(n)
        budget = probe_budget(1, probe_window)
        realization = {name: current_field(sc, a, name=name, budget=budget) for name, a in _sl_named(n)}
        probes = eigen_probes(sc, 1, probe_window)
        gens = [PBWState.word(((name, -1),)) for name in alg.basis]
        pairs = [(a, b) for a in gens for b in gens]
        ls = ls or range(-1, 2)
        Nc = N
    V = VacuumProducts(induce(vacuum_spec(level), alg))
    cache = {}
    for a, b in pairs:
        for l in ls:
            e = borcherds_check(a, b, l, realization, probes, Nc, window, V=V, cache=cache)
            e.params["algebra"] = alg.name
            e.params["level"] = str(level)
            entries.append(e)
    return entries


def _sl_named(n):
    from .affine import sl_basis

    return sl_basis(n)
