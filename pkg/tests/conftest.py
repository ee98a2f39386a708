import sympy as sp
from hypothesis import settings

from vertop.scalar import Scalar

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

RHO_SYM = sp.Symbol("rho")


def scalar_to_sympy(s: Scalar):
    """Independent rendering of a scalar as a sympy rational function in rho."""

    def poly(p):
        return sum(
            (sp.Rational(int(c.re.numerator), int(c.re.denominator)) + sp.I * sp.Rational(int(c.im.numerator), int(c.im.denominator)))
            * RHO_SYM**k
            for k, c in enumerate(p)
        )

    return poly(s.num) / poly(s.den)


def sympy_equal(a, b):
    return sp.simplify(sp.cancel(sp.expand(a - b))) == 0


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    results = getattr(mod, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        terminalreporter.write_line(results[n])
