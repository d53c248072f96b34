"""Command-line front end: ``hardytower <command> ...``.

Exit status is 0 when the command succeeds (for checking commands: every
check passed), 1 when a check fails and 2 for usage, parse or domain errors.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .bounds import _jsonable, growth_bound_report, riccati_z, wronskian, wronskian_report
from .diffpoly import chvar_closed_form, chvar_transform
from .errors import (
    CacheBoundError,
    DomainError,
    HardyTowerError,
    LoweringError,
    ParseError,
    UnsupportedComposition,
    UnsupportedPower,
    ZeroDivisionInField,
)
from .field import compare, derive, logderiv, omega_map, sigma_map, sign_eventual
from .monomial import INFINITY
from .ode import DEFAULT_TOL, normalise_form, pair
from .parser import parse_diffpoly, parse_expr
from .printing import print_canonical, print_diffpoly
from .tower import IDENTITIES, TowerCache, identity_suite, lambda_, omega_seq, pc_check
from .witness import witness_pipeline

USAGE_ERRORS = (
    ParseError,
    LoweringError,
    DomainError,
    CacheBoundError,
    UnsupportedComposition,
    UnsupportedPower,
    ZeroDivisionInField,
    ValueError,
)
FAMILIES = {"lambda": lambda_, "omega_seq": omega_seq}


class _Usage(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _Usage(f"{self.prog}: error: {message}")


def _globals(defaults: bool) -> argparse.ArgumentParser:
    """Global flags, accepted before or after the subcommand."""
    p = argparse.ArgumentParser(add_help=False, argument_default=None if defaults else argparse.SUPPRESS)
    p.add_argument("--tol", type=float, **({"default": DEFAULT_TOL} if defaults else {}))
    p.add_argument("--t0", type=float, **({"default": None} if defaults else {}))
    p.add_argument("--tmax", type=float, **({"default": None} if defaults else {}))
    p.add_argument("--json", action="store_true", **({"default": False} if defaults else {}))
    p.add_argument("--csv", metavar="PATH", **({"default": None} if defaults else {}))
    return p


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="hardytower", description=__doc__.splitlines()[0], parents=[_globals(True)])
    common = _globals(False)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def cmd(name, help_text):
        return sub.add_parser(name, help=help_text, parents=[common])

    p = cmd("derive", "derivative of an expression")
    p.add_argument("expr")
    p.add_argument("--order", type=int, default=1)
    for name, text in (
        ("logderiv", "logarithmic derivative f'/f"),
        ("omega", "omega(z) = -2z' - z^2"),
        ("sigma", "sigma(y) = omega(-y'/y) + y^2"),
        ("val", "valuation vector"),
        ("sign", "eventual sign"),
    ):
        cmd(name, text).add_argument("expr")
    p = cmd("compare", "asymptotic relation between two expressions")
    p.add_argument("f")
    p.add_argument("g")
    p = cmd("mulconj", "multiplicative conjugate P(a*Y)")
    p.add_argument("poly")
    p.add_argument("a")
    p = cmd("compconj", "compositional conjugate P^phi")
    p.add_argument("poly")
    p.add_argument("phi")
    p = cmd("chvar", "change of variables for 4Y''+fY by g")
    p.add_argument("f")
    p.add_argument("g")
    p = cmd("tower", "exact identity suite for the tower sequences")
    p.add_argument("--identities", type=int, required=True, metavar="N")
    p = cmd("pc-check", "finite-prefix pseudo-Cauchy check")
    p.add_argument("exprs", nargs="*")
    p.add_argument("--family", choices=sorted(FAMILIES))
    p.add_argument("--n", type=int, default=6)
    p = cmd("ode", "integrate the fundamental pair of Y''+fY or 4Y''+fY")
    p.add_argument("f")
    p.add_argument("--form", default="Y''+fY")
    p.add_argument("--c", type=float, help="also measure the growth bounds for this c")
    p.add_argument("--grid", type=int, default=512)
    p = cmd("witness", "oscillating Riccati witness pipeline")
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--grid", type=int, default=512)
    return parser


def _emit(args, payload: dict, text: str) -> None:
    if args.json:
        print(json.dumps(payload, default=_jsonable, ensure_ascii=False, sort_keys=True))
    else:
        print(text)


def _val_text(v) -> str:
    return "inf" if v is INFINITY else str(v)


def _sign_text(s: int) -> str:
    return {1: "+", -1: "-", 0: "0"}[s]


def _unary(args) -> int:
    f = parse_expr(args.expr)
    if args.command == "derive":
        if args.order < 0:
            raise ValueError("--order must be non-negative")
        r = print_canonical(f.derive_n(args.order) if args.order != 1 else derive(f))
    elif args.command == "logderiv":
        r = print_canonical(logderiv(f))
    elif args.command == "omega":
        r = print_canonical(omega_map(f))
    elif args.command == "sigma":
        r = print_canonical(sigma_map(f))
    elif args.command == "val":
        v = f.valuation()
        payload = {"command": "val", "input": args.expr, "result": _val_text(v)}
        if v is not INFINITY:
            payload["vector"] = v.as_dict()
        _emit(args, payload, _val_text(v))
        return 0
    else:
        r = _sign_text(sign_eventual(f))
    _emit(args, {"command": args.command, "input": args.expr, "result": r}, r)
    return 0


def _compare(args) -> int:
    v = compare(parse_expr(args.f), parse_expr(args.g))
    _emit(
        args,
        {"command": "compare", "f": args.f, "g": args.g, "relation": v.relation, "similar": v.similar, "result": str(v)},
        str(v),
    )
    return 0


def _conj(args) -> int:
    P = parse_diffpoly(args.poly)
    if args.command == "mulconj":
        Q = P.mul_conj(parse_expr(args.a))
        extra = {}
    else:
        Q = P.comp_conj(parse_expr(args.phi))
        extra = {"derivation_scale": print_canonical(Q.phi)}
    text = print_diffpoly(Q)
    if extra:
        text += f"    [derivation scale {extra['derivation_scale']}]"
    _emit(args, {"command": args.command, "input": args.poly, "result": print_diffpoly(Q), **extra}, text)
    return 0


def _chvar(args) -> int:
    f, g = parse_expr(args.f), parse_expr(args.g)
    phi, Q = chvar_transform(f, g)
    ok = Q == chvar_closed_form(f, g)
    payload = {
        "command": "chvar",
        "phi": print_canonical(phi),
        "result": print_diffpoly(Q),
        "closed_form": print_diffpoly(chvar_closed_form(f, g)),
        "pass": ok,
    }
    _emit(args, payload, f"{print_diffpoly(Q)}    [phi = {print_canonical(phi)}; closed form {'matches' if ok else 'DIFFERS'}]")
    return 0 if ok else 1


def _tower(args) -> int:
    n = args.identities
    if n < 0:
        raise ValueError("--identities must be non-negative")
    report = identity_suite(n, TowerCache(max(8, n + 1)))
    lines = []
    for label, text in IDENTITIES:
        rows = [r for r in report.results if r.label == label]
        ok = all(r.passed for r in rows)
        lines.append(f"({label}) {text:<45} n<={n}  {'pass' if ok else 'FAIL'}")
    lines.append("all pass" if report.passed else f"{len(report.failures())} failures")
    _emit(args, {"command": "tower", **report.as_dict()}, "\n".join(lines))
    return 0 if report.passed else 1


def _pc(args) -> int:
    if args.family:
        seq = [FAMILIES[args.family](k) for k in range(args.n + 1)]
    elif args.exprs:
        seq = [parse_expr(e) for e in args.exprs]
    else:
        raise ValueError("pc-check needs expressions or --family")
    verdict = pc_check(seq)
    incs = [_val_text(v) for v in verdict.increments]
    _emit(
        args,
        {"command": "pc-check", "result": str(verdict), "is_pc": verdict.is_pc, "increments": incs},
        str(verdict) + "\n" + "\n".join(f"  v(a{k + 1} - a{k}) = {v}" for k, v in enumerate(incs)),
    )
    return 0


def _write_csv(path, t, y1, y1p, y2, y2p, z, w) -> None:
    import csv

    with open(path, "w", newline="") as fh:
        out = csv.writer(fh)
        out.writerow(["t", "y1", "y1p", "y2", "y2p", "re_z", "im_z", "w"])
        for row in zip(t, y1, y1p, y2, y2p, z.real, z.imag, w):
            out.writerow([repr(float(v)) for v in row])


def _ode(args) -> int:
    f = parse_expr(args.f)
    form = normalise_form(args.form)
    t0 = args.t0 if args.t0 is not None else 10.0
    t_max = args.tmax if args.tmax is not None else 1e4
    tr1, tr2 = pair(f, form, t0=t0, t_max=t_max, tol=args.tol, n_grid=args.grid)
    reports = [wronskian_report(tr1, tr2)]
    if args.c is not None:
        reports.append(growth_bound_report(f, [tr1, tr2], args.c))
    y = tr1.combine(tr2, 1, 1j)
    z, zrep = riccati_z(y)
    if args.csv:
        _write_csv(args.csv, tr1.t, tr1.y, tr1.yp, tr2.y, tr2.yp, z, wronskian(tr1, tr2))
    ok = all(r.passed or r.status == "not_applicable" for r in reports)
    lines = [f"integrated {form} with f = {print_canonical(f)} on [{t0:g}, {t_max:g}], tol {args.tol:g}"]
    lines.append(f"y1(T) = {tr1.y[-1]:.12g}, y2(T) = {tr2.y[-1]:.12g}")
    for r in reports:
        lines.append(f"{r.bound}: {r.status} (constant {r.constant})")
    _emit(
        args,
        {
            "command": "ode",
            "form": form,
            "f": print_canonical(f),
            "t0": t0,
            "t_max": t_max,
            "tol": args.tol,
            "pass": ok,
            "final": {"t": tr1.t_max, "y1": tr1.y[-1], "y1p": tr1.yp[-1], "y2": tr2.y[-1], "y2p": tr2.yp[-1]},
            "reports": [r.to_dict() for r in reports],
        },
        "\n".join(lines),
    )
    return 0 if ok else 1


def _witness(args) -> int:
    t0 = args.t0 if args.t0 is not None else 10.0
    t_max = args.tmax if args.tmax is not None else 1e4
    report = witness_pipeline(args.m, args.n, t0, t_max, args.tol, args.grid)
    if args.csv:
        report.write_csv(args.csv)
    lines = [f"witness m={args.m} n={args.n} on [{t0:g}, {t_max:g}]"]
    for name, ok in report.exact.items():
        lines.append(f"  exact  {name:<48} {'pass' if ok else 'FAIL'}")
    for c in report.checks:
        extra = f" threshold {c.threshold:.6g}" if c.threshold is not None else ""
        const = "n/a" if c.constant is None else f"{c.constant:.3g}"
        lines.append(f"  numeric {c.bound:<47} {c.status} ({const}){extra}")
    lines.append("all checks pass" if report.passed else f"failed at: {report.failed_step}")
    _emit(args, report.to_dict(), "\n".join(lines))
    return 0 if report.passed else 1


HANDLERS = {
    "derive": _unary,
    "logderiv": _unary,
    "omega": _unary,
    "sigma": _unary,
    "val": _unary,
    "sign": _unary,
    "compare": _compare,
    "mulconj": _conj,
    "compconj": _conj,
    "chvar": _chvar,
    "tower": _tower,
    "pc-check": _pc,
    "ode": _ode,
    "witness": _witness,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except _Usage as exc:
        print(parser.format_usage().rstrip(), file=sys.stderr)
        print(exc, file=sys.stderr)
        return 2
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    if not args.tol > 0:
        print("hardytower: error: --tol must be positive", file=sys.stderr)
        return 2
    try:
        with np.errstate(all="ignore"):
            return HANDLERS[args.command](args)
    except USAGE_ERRORS as exc:
        print(f"hardytower {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    except HardyTowerError as exc:
        print(f"hardytower {args.command}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
