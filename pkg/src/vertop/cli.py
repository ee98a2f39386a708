"""Command line: ``vertop check SUITE``, ``vertop ope --expr E`` and ``vertop report FILE``.

Exit status is 0 when every entry passes, 1 when any check fails and 2 on
configuration or usage errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .exprs import ExprError, expr_family, build_field, identify_field, parse_expr, render_expr
from .report import Report, emit_report
from .suites import SUITES, CheckConfig, ConfigError, parse_window, run_suite

__all__ = ["main", "build_parser", "load_config_file"]

# flag name -> (CheckConfig attribute, converter)
_KEYS = {
    "N": ("N", int),
    "degree": ("degree", int),
    "window": ("window", parse_window),
    "generation": ("generation", int),
    "g": ("g", int),
    "n": ("n", int),
    "c": ("c", Fraction),
    "level": ("level", str),
    "algebra": ("algebra", str),
    "spec": ("spec", str),
    "max-word-len": ("max_word_len", int),
    "seed": ("seed", int),
    "format": ("format", str),
    "timing": ("timing", lambda v: str(v).lower() in ("1", "true", "yes", "on")),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _common(p):
    p.add_argument("-N", type=str, default=None, help="truncation depth (work mod U_N)")
    p.add_argument("--window", default=None, help="mode window a..b")
    p.add_argument("--g", default=None, help="number of beta-gamma pairs")
    p.add_argument("--n", default=None, help="rank of sl_n")
    p.add_argument("--c", default=None, help="positive rational square for phi_c")
    p.add_argument("--format", default=None, choices=("json", "text"))
    p.add_argument("--config", default=None, help="key=value file; flags override it")


def build_parser():
    parser = _Parser(prog="vertop", description="Exact checks of vertex-algebra actions on filtered function spaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    check = sub.add_parser("check", help="run a verification suite")
    check.add_argument("suite", choices=SUITES + ("all",))
    _common(check)
    check.add_argument("--degree", default=None, help="probe degree bound")
    check.add_argument("--generation", default=None, help="eigen-probe generation")
    check.add_argument("--algebra", default=None, choices=("sl2", "sl3", "heisenberg"))
    check.add_argument("--level", default=None, help="level k, e.g. 1 or 2*tau")
    check.add_argument("--spec", default=None, choices=("vacuum", "gaussian"))
    check.add_argument("--max-word-len", dest="max_word_len", default=None)
    check.add_argument("--seed", default=None)
    check.add_argument("--timing", action="store_true", default=None, help="record per-entry milliseconds")

    ope = sub.add_parser("ope", help="identify a field expression among the basic fields")
    ope.add_argument("--expr", required=True)
    _common(ope)

    rep = sub.add_parser("report", help="re-render a saved JSON report")
    rep.add_argument("path")
    rep.add_argument("--format", default="text", choices=("json", "text"))
    return parser


def load_config_file(path):
    """Read ``key = value`` lines (``#`` starts a comment) into a dict keyed like the flags."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value")
            key, value = (s.strip() for s in line.split("=", 1))
            key = key.lstrip("-").replace("_", "-")
            if key not in _KEYS:
                raise ConfigError(f"{path}:{lineno}: unknown key {key!r}")
            out[key] = value
    return out


def _config(args, suite):
    raw = load_config_file(args.config) if args.config else {}
    for key in _KEYS:
        value = getattr(args, _KEYS[key][0] if key != "max-word-len" else "max_word_len", None)
        if value is not None:
            raw[key] = value
    cfg = CheckConfig(suite=suite)
    for key, value in raw.items():
        attr, conv = _KEYS[key]
        try:
            setattr(cfg, attr, conv(value))
        except (ValueError, ZeroDivisionError) as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"bad value for {key}: {value!r}") from None
    return cfg.validate()


def _check(args):
    cfg = _config(args, args.suite)
    report = run_suite(cfg)
    sys.stdout.write(emit_report(report, cfg.format, cfg.timing))
    return 0 if report.ok else 1


def _ope(args):
    from .affine import SlnConfig, current_field, eigen_probes, sl_basis
    from .betagamma import SymplecticConfig, beta_field, gamma_field, monomial_probes, sp_generators
    from .fields import DerivativeField, IdentityField

    cfg = _config(args, "heisenberg")
    if args.format is None and not (args.config and "format" in load_config_file(args.config)):
        cfg.format = "text"
    e = parse_expr(args.expr)
    N = min(cfg.N, 4)
    window = cfg.window
    affine = "affine" in expr_family(e)
    cands = {}
    if affine:
        sc = SlnConfig(cfg.n, cfg.c)
        if sc.n < 2:
            raise ConfigError("current fields need n >= 2")
        f = build_field(e, sl_cfg=sc)
        space = sc.space
        for name, a in sl_basis(sc.n):
            cands[name] = current_field(sc, a, name=name)
        probes = eigen_probes(sc, 0)
    else:
        bg = SymplecticConfig(cfg.g)
        f = build_field(e, bg_cfg=bg)
        space = bg.space
        for i in range(1, cfg.g + 1):
            b, c = beta_field(bg, i), gamma_field(bg, i)
            cands[f"beta[{i}]"] = b
            cands[f"gamma[{i}]"] = c
            cands[f"d(beta[{i}])"] = DerivativeField(b)
            cands[f"d(gamma[{i}])"] = DerivativeField(c)
        labels, gens = sp_generators(bg)
        for key, q in gens.items():
            cands[q.name] = q
        probes = monomial_probes(space, 2, 2)
    cands = {"id": IdentityField(space), **cands}
    ident = identify_field(f, cands, probes, N, window)
    if cfg.format == "json":
        out = {"expr": render_expr(e), "N": N, "window": list(window), "identification": ident}
        sys.stdout.write(json.dumps(out, sort_keys=True, indent=2) + "\n")
    else:
        sys.stdout.write(f"{ident if ident is not None else 'no combination of the basic fields matches'}\n")
    return 0 if ident is not None else 1


def _report(args):
    try:
        with open(args.path, encoding="utf-8") as fh:
            report = Report.from_json(json.load(fh))
    except (OSError, ValueError, KeyError) as exc:
        raise ConfigError(f"cannot read report {args.path}: {exc}") from None
    sys.stdout.write(emit_report(report, args.format))
    return 0 if report.ok else 1


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "check":
            return _check(args)
        if args.command == "ope":
            return _ope(args)
        return _report(args)
    except (ConfigError, ExprError) as exc:
        print(f"vertop: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
