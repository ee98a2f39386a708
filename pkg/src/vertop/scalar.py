"""Exact scalars in Q(i)(rho).

``rho`` is a formal transcendental standing in for pi, so that 2*pi*i is
represented exactly by ``tau = 2*i*rho``.  Every scalar is a quotient of two
polynomials in ``rho`` with Gaussian-rational coefficients, kept in lowest
terms with a monic denominator.
"""

from __future__ import annotations

import re

from gmpy2 import mpq

__all__ = [
    "GaussianRational",
    "Scalar",
    "ScalarParseError",
    "ZERO",
    "ONE",
    "I",
    "RHO",
    "TAU",
    "tau",
    "as_scalar",
    "parse_scalar",
    "render_scalar",
]


_Q0 = mpq(0)
_Q1 = mpq(1)


def _q(x):
    if isinstance(x, str):
        return mpq(x)
    return mpq(x)


class GaussianRational:
    """re + i*im with rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = re if type(re) is type(_Q0) else _q(re)
        self.im = im if type(im) is type(_Q0) else _q(im)

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __eq__(self, other):
        if isinstance(other, GaussianRational):
            return self.re == other.re and self.im == other.im
        if isinstance(other, int):
            return self.im == 0 and self.re == other
        return NotImplemented

    def __hash__(self):
        return hash((self.re, self.im))

    def __add__(self, o):
        return GaussianRational(self.re + o.re, self.im + o.im)

    def __sub__(self, o):
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, o):
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return GaussianRational(a * c, _Q0)
        return GaussianRational(a * c - b * d, a * d + b * c)

    def inverse(self):
        n = self.re * self.re + self.im * self.im
        if not n:
            raise ZeroDivisionError("inverse of zero Gaussian rational")
        return GaussianRational(self.re / n, -self.im / n)

    def __truediv__(self, o):
        return self * o.inverse()

    def is_real(self):
        return not self.im

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return _render_gauss(self)


_G0 = GaussianRational(0, 0)
_G1 = GaussianRational(1, 0)
_ONE_POLY = (_G1,)


def _render_rational(q):
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _render_gauss(z):
    re_, im = z.re, z.im
    if not im:
        return _render_rational(re_)
    if im == 1:
        ims = "i"
    elif im == -1:
        ims = "-i"
    else:
        ims = f"{_render_rational(im)}*i"
    if not re_:
        return ims
    if ims.startswith("-"):
        return f"{_render_rational(re_)} - {ims[1:]}"
    return f"{_render_rational(re_)} + {ims}"


# ---------------------------------------------------------------------------
# dense polynomials in rho: tuples of GaussianRational, low degree first,
# no trailing zeros; the zero polynomial is ().


def _trim(p):
    n = len(p)
    while n and not p[n - 1]:
        n -= 1
    return p if n == len(p) else p[:n]


def _padd(p, q):
    if len(p) < len(q):
        p, q = q, p
    out = list(p)
    for k, c in enumerate(q):
        out[k] = out[k] + c
    return _trim(tuple(out))


def _pneg(p):
    return tuple(-c for c in p)


def _pmul(p, q):
    if not p or not q:
        return ()
    if len(p) == 1:
        c = p[0]
        return tuple(c * d for d in q)
    if len(q) == 1:
        c = q[0]
        return tuple(d * c for d in p)
    out = [_G0] * (len(p) + len(q) - 1)
    for i, a in enumerate(p):
        if not a:
            continue
        for j, b in enumerate(q):
            out[i + j] = out[i + j] + a * b
    return _trim(tuple(out))


def _pscale(p, c):
    return tuple(d * c for d in p)


def _pdivmod(p, q):
    if not q:
        raise ZeroDivisionError("polynomial division by zero")
    p = list(p)
    dq = len(q) - 1
    lead_inv = q[-1].inverse()
    quot = [_G0] * max(len(p) - dq, 0)
    for k in range(len(p) - 1, dq - 1, -1):
        c = p[k]
        if not c:
            continue
        f = c * lead_inv
        quot[k - dq] = f
        for j in range(dq + 1):
            p[k - dq + j] = p[k - dq + j] - f * q[j]
    return _trim(tuple(quot)), _trim(tuple(p[:dq]))


def _monic(p):
    lead = p[-1]
    if lead == _G1:
        return p
    inv = lead.inverse()
    return tuple(c * inv for c in p)


def _pgcd(p, q):
    while q:
        p, q = q, _pdivmod(p, q)[1]
    return _monic(p) if p else p


def _rho_power(k):
    return (_G0,) * k + (_G1,)


def _is_rho_power(p):
    """Return k if p == rho**k, else None."""
    if p[-1] != _G1:
        return None
    for c in p[:-1]:
        if c:
            return None
    return len(p) - 1


class ScalarParseError(ValueError):
    def __init__(self, message, offset):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class Scalar:
    """Element of Q(i)(rho) in canonical form ``num/den``.

    ``den`` is monic and coprime to ``num``; zero is ``()/(1,)``.  Values are
    immutable.
    """

    __slots__ = ("num", "den", "_dk", "_mono")

    def __init__(self, num=(), den=(_G1,), _canonical=False):
        if _canonical:
            self.num = num
            self.den = den
            self._dk = dk = _is_rho_power(den)
            self._mono = _mono_of(num, dk)
            return
        num = _trim(tuple(num))
        den = _trim(tuple(den))
        if not den:
            raise ZeroDivisionError("scalar with zero denominator")
        self._set(num, den)

    def _set(self, num, den):
        if not num:
            self.num, self.den, self._dk, self._mono = (), (_G1,), 0, None
            return
        dk = _is_rho_power(den)
        if dk is None:
            g = _pgcd(num, den)
            if len(g) > 1:
                num = _pdivmod(num, g)[0]
                den = _pdivmod(den, g)[0]
            lead = den[-1]
            if lead != _G1:
                inv = lead.inverse()
                num = _pscale(num, inv)
                den = _pscale(den, inv)
            dk = _is_rho_power(den)
        if dk:
            v = 0
            while not num[v]:
                v += 1
            t = min(v, dk)
            if t:
                num = num[t:]
                dk -= t
                den = _rho_power(dk)
        self.num, self.den, self._dk = num, den, dk
        self._mono = _mono_of(num, dk)

    # -- constructors -----------------------------------------------------
    @classmethod
    def from_rational(cls, q):
        q = _q(q)
        if not q:
            return ZERO
        return cls((GaussianRational(q, _Q0),), (_G1,), _canonical=True)

    @classmethod
    def gaussian(cls, re, im=0):
        z = GaussianRational(re, im)
        if not z:
            return ZERO
        return cls((z,), (_G1,), _canonical=True)

    @classmethod
    def rho_power(cls, k, coeff=1):
        """coeff * rho**k for any integer k."""
        c = coeff if isinstance(coeff, GaussianRational) else GaussianRational(coeff)
        if not c:
            return ZERO
        if k >= 0:
            return cls(_rho_power(k)[:-1] + (c,), (_G1,), _canonical=True)
        return cls((c,), _rho_power(-k), _canonical=True)

    # -- predicates -------------------------------------------------------
    def is_zero(self):
        return not self.num

    def __bool__(self):
        return bool(self.num)

    def is_constant(self):
        """True if the scalar lies in Q(i)."""
        return len(self.num) <= 1 and self._dk == 0

    def constant(self):
        if not self.is_constant():
            raise ValueError(f"{self} is not a constant")
        return self.num[0] if self.num else _G0

    def monomial(self):
        """Return (c, k) with self == c*rho**k, or None."""
        return self._mono

    # -- arithmetic -------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        if not self.num:
            return other
        if not other.num:
            return self
        m1, m2 = self._mono, other._mono
        if m1 is not None and m2 is not None and m1[1] == m2[1]:
            c = m1[0] + m2[0]
            return _from_mono(c, m1[1]) if c else ZERO
        dk1, dk2 = self._dk, other._dk
        if dk1 is not None and dk2 is not None:
            if dk1 == dk2:
                num = _padd(self.num, other.num)
                den = self.den
            elif dk1 < dk2:
                num = _padd((_G0,) * (dk2 - dk1) + self.num, other.num)
                den = other.den
            else:
                num = _padd(self.num, (_G0,) * (dk1 - dk2) + other.num)
                den = self.den
            s = Scalar.__new__(Scalar)
            s._set(num, den)
            return s
        if self.den == other.den:
            num = _padd(self.num, other.num)
            den = self.den
        else:
            num = _padd(_pmul(self.num, other.den), _pmul(other.num, self.den))
            den = _pmul(self.den, other.den)
        s = Scalar.__new__(Scalar)
        s._set(num, den)
        return s

    __radd__ = __add__

    def __neg__(self):
        if not self.num:
            return self
        m = self._mono
        if m is not None:
            return _from_mono(-m[0], m[1])
        return Scalar(_pneg(self.num), self.den, _canonical=True)

    def __sub__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        return self + (-other)

    def __rsub__(self, other):
        return as_scalar(other) - self

    def __mul__(self, other):
        if not isinstance(other, Scalar):
            if isinstance(other, int):
                if other == 1:
                    return self
                if other == 0 or not self.num:
                    return ZERO
                c = GaussianRational(mpq(other), _Q0)
                m = self._mono
                if m is not None:
                    return _from_mono(m[0] * c, m[1])
                return Scalar(tuple(d * c for d in self.num), self.den, _canonical=True)
            other = as_scalar(other)
        if not self.num or not other.num:
            return ZERO
        m1, m2 = self._mono, other._mono
        if m1 is not None and m2 is not None:
            return _from_mono(m1[0] * m2[0], m1[1] + m2[1])
        dk1, dk2 = self._dk, other._dk
        if dk1 is not None and dk2 is not None:
            num = _pmul(self.num, other.num)
            s = Scalar.__new__(Scalar)
            s._set(num, _rho_power(dk1 + dk2))
            return s
        s = Scalar.__new__(Scalar)
        s._set(_pmul(self.num, other.num), _pmul(self.den, other.den))
        return s

    __rmul__ = __mul__

    def inverse(self):
        if not self.num:
            raise ZeroDivisionError("inverse of zero scalar")
        s = Scalar.__new__(Scalar)
        s._set(self.den, self.num)
        return s

    def __truediv__(self, other):
        if not isinstance(other, Scalar):
            other = as_scalar(other)
        return self * other.inverse()

    def __rtruediv__(self, other):
        return as_scalar(other) * self.inverse()

    def __pow__(self, k):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        out = ONE
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def conjugate_i(self):
        """Apply i -> -i coefficientwise (rho is fixed)."""
        conj = lambda p: tuple(GaussianRational(c.re, -c.im) for c in p)
        return Scalar(conj(self.num), conj(self.den))

    # -- comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, Scalar):
            return self.num == other.num and self.den == other.den
        if isinstance(other, (int, GaussianRational)) or type(other) is type(_Q0):
            return self == as_scalar(other)
        return NotImplemented

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"Scalar({self})"

    def __str__(self):
        return render_scalar(self)


def _mono_of(num, dk):
    if dk is None or not num:
        return None
    if dk:
        return (num[0], -dk) if len(num) == 1 else None
    k = len(num) - 1
    for c in num[:-1]:
        if c:
            return None
    return (num[k], k)


_RHO_POWERS = {}


def _from_mono(c, k):
    """Canonical scalar c*rho**k (c nonzero)."""
    s = Scalar.__new__(Scalar)
    if k >= 0:
        s.num = (_G0,) * k + (c,)
        s.den = _ONE_POLY
        s._dk = 0
    else:
        den = _RHO_POWERS.get(-k)
        if den is None:
            den = _RHO_POWERS[-k] = _rho_power(-k)
        s.num = (c,)
        s.den = den
        s._dk = -k
    s._mono = (c, k)
    return s


def as_scalar(x):
    if isinstance(x, Scalar):
        return x
    if isinstance(x, GaussianRational):
        return Scalar((x,), (_G1,)) if x else ZERO
    if isinstance(x, str):
        return parse_scalar(x)
    return Scalar.from_rational(x)


ZERO = Scalar((), (_G1,), _canonical=True)
ONE = Scalar((_G1,), (_G1,), _canonical=True)
I = Scalar((GaussianRational(0, 1),), (_G1,), _canonical=True)
RHO = Scalar((_G0, _G1), (_G1,), _canonical=True)
TAU = Scalar((_G0, GaussianRational(0, 2)), (_G1,), _canonical=True)


def tau():
    """2*pi*i as the exact scalar 2*i*rho."""
    return TAU


# ---------------------------------------------------------------------------
# rendering


def _render_poly(p, var="rho"):
    parts = []
    for k in range(len(p) - 1, -1, -1):
        c = p[k]
        if not c:
            continue
        cs = _render_gauss(c)
        if k == 0:
            term = cs
        else:
            pw = var if k == 1 else f"{var}^{k}"
            if c == _G1:
                term = pw
            elif c == GaussianRational(-1):
                term = f"-{pw}"
            elif c.im and c.re:
                term = f"({cs})*{pw}"
            else:
                term = f"{cs}*{pw}"
        parts.append(term)
    out = parts[0]
    for t in parts[1:]:
        out += f" - {t[1:]}" if t.startswith("-") else f" + {t}"
    return out


def _tau_form(s):
    """Render c*rho^k as q*tau^k when q = c/(2i)^k is rational."""
    mono = s.monomial()
    if mono is None or mono[1] == 0:
        return None
    c, k = mono
    two_i = GaussianRational(0, 2)
    base = _G1
    for _ in range(abs(k)):
        base = base * two_i
    q = c / base if k > 0 else c * base
    if q.im:
        return None
    pw = "tau" if k == 1 else f"tau^{k}"
    if q.re == 1:
        return pw
    if q.re == -1:
        return f"-{pw}"
    return f"{_render_rational(q.re)}*{pw}"


def render_scalar(s):
    if not s.num:
        return "0"
    t = _tau_form(s)
    if t is not None:
        return t
    num = _render_poly(s.num)
    if s.den == (_G1,):
        return num
    den = _render_poly(s.den)
    if len([c for c in s.num if c]) > 1 or (s.num[-1].im and s.num[-1].re):
        num = f"({num})"
    if len([c for c in s.den if c]) > 1:
        den = f"({den})"
    return f"{num}/{den}"


# ---------------------------------------------------------------------------
# parsing: sums/products/quotients/powers of rationals, i, rho, tau

_TOKEN = re.compile(r"\s*(?:(\d+)|(rho|tau|i)|(\*\*|[-+*/^()]))")


def _tokenize(src):
    toks = []
    pos = 0
    n = len(src)
    while pos < n:
        if src[pos:].strip() == "":
            break
        m = _TOKEN.match(src, pos)
        if not m:
            raise ScalarParseError(f"unexpected character {src[pos]!r}", pos)
        start = m.start(m.lastindex)
        if m.group(1) is not None:
            toks.append(("num", m.group(1), start))
        elif m.group(2) is not None:
            toks.append(("name", m.group(2), start))
        else:
            op = m.group(3)
            toks.append(("op", "^" if op == "**" else op, start))
        pos = m.end()
    toks.append(("end", "", n))
    return toks


class _ScalarParser:
    def __init__(self, src):
        self.toks = _tokenize(src)
        self.k = 0

    def peek(self):
        return self.toks[self.k]

    def take(self):
        t = self.toks[self.k]
        self.k += 1
        return t

    def expect(self, value):
        t = self.take()
        if t[1] != value:
            raise ScalarParseError(f"expected {value!r}, got {t[1]!r}", t[2])

    def parse(self):
        v = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ScalarParseError(f"unexpected token {t[1]!r}", t[2])
        return v

    def expr(self):
        v = self.term()
        while self.peek()[1] in ("+", "-") and self.peek()[0] == "op":
            op = self.take()[1]
            w = self.term()
            v = v + w if op == "+" else v - w
        return v

    def term(self):
        v = self.unary()
        while self.peek()[0] == "op" and self.peek()[1] in ("*", "/"):
            op = self.take()
            w = self.unary()
            if op[1] == "*":
                v = v * w
            else:
                if w.is_zero():
                    raise ScalarParseError("division by zero", op[2])
                v = v / w
        return v

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in ("+", "-"):
            self.take()
            v = self.unary()
            return -v if t[1] == "-" else v
        return self.power()

    def power(self):
        v = self.atom()
        if self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            sign = 1
            t = self.peek()
            if t[0] == "op" and t[1] in ("+", "-"):
                self.take()
                sign = -1 if t[1] == "-" else 1
            t = self.take()
            if t[0] != "num":
                raise ScalarParseError("expected integer exponent", t[2])
            e = sign * int(t[1])
            if e < 0 and v.is_zero():
                raise ScalarParseError("zero to a negative power", t[2])
            v = v ** e
        return v

    def atom(self):
        t = self.take()
        if t[0] == "num":
            return Scalar.from_rational(int(t[1]))
        if t[0] == "name":
            return {"i": I, "rho": RHO, "tau": TAU}[t[1]]
        if t[1] == "(":
            v = self.expr()
            self.expect(")")
            return v
        raise ScalarParseError(f"unexpected token {t[1]!r}", t[2])


def parse_scalar(src):
    """Parse text such as ``"1/2 + 3*i"``, ``"-tau^2"`` or ``"(rho - 1)/rho"``."""
    return _ScalarParser(src).parse()
