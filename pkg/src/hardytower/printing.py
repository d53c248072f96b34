"""Canonical text form of field elements and differential polynomials.

The output is accepted by :func:`hardytower.parser.parse_expr` (and
``parse_diffpoly``) and parses back to an equal value.  Terms are printed in
decreasing dominance; differential-polynomial terms in graded-lex order of
their multi-indices.
"""

from __future__ import annotations

from fractions import Fraction

from .monomial import TowerMonomial


def _exponent(q: Fraction) -> str:
    if q.denominator == 1:
        return f"^{q.numerator}"
    return f"^({q})"


def _power(base: str, q: Fraction) -> str:
    return base if q == 1 else base + _exponent(q)


def _poly_in_x(exp_part) -> str:
    parts = []
    for k in range(len(exp_part), 0, -1):
        a = exp_part[k - 1]
        if a:
            parts.append((a, _power("x", Fraction(k))))
    return _join(parts)


def print_monomial(m: TowerMonomial) -> str:
    factors = []
    if m.exp_part:
        factors.append(f"exp({_poly_in_x(m.exp_part)})")
    for n, q in enumerate(m.logs):
        if q:
            factors.append(_power("x" if n == 0 else f"ell({n})", q))
    return "*".join(factors) if factors else "1"


def _join(parts: list[tuple[Fraction, str]]) -> str:
    """Join ``(coefficient, factor)`` pairs; ``factor == ''`` means a bare constant."""
    if not parts:
        return "0"
    out = []
    for i, (c, body) in enumerate(parts):
        neg = c < 0
        a = -c if neg else c
        if not body:
            text = str(a)
        elif a == 1:
            text = body
        else:
            text = f"{a}*{body}"
        if i == 0:
            out.append(("-" if neg else "") + text)
        else:
            out.append((" - " if neg else " + ") + text)
    return "".join(out)


def print_combo(combo) -> str:
    parts = []
    for m, c in combo.sorted_terms():
        parts.append((c, "" if m.is_one() else print_monomial(m)))
    return _join(parts)


def print_canonical(f) -> str:
    """Deterministic text for a :class:`~hardytower.field.FieldElem`."""
    num = print_combo(f.num)
    dens = f.den_factors
    if not dens:
        return num

    def root_key(item):
        r, p = item
        return (print_combo(r), p)

    factors = []
    for r, p in sorted(dens.items(), key=root_key):
        factors.append(_power(f"({print_combo(r)})", Fraction(p)))
    return f"({num})/({'*'.join(factors)})"


def _yfactor(k: int) -> str:
    if k <= 3:
        return "Y" + "'" * k
    return f"Y^({k})"


def index_key(idx: tuple[int, ...], width: int = 0):
    """Graded-lex key on multi-indices (higher total degree first)."""
    padded = tuple(idx) + (0,) * (width - len(idx))
    return (sum(idx), tuple(reversed(padded)))


def print_diffpoly(P) -> str:
    """Text for a :class:`~hardytower.diffpoly.DiffPoly` (the derivation scale is not printed)."""
    width = P.order + 1
    items = sorted(P.coeffs.items(), key=lambda kv: index_key(kv[0], width), reverse=True)
    if not items:
        return "0"
    out = []
    for i, (idx, c) in enumerate(items):
        ys = []
        for k, e in enumerate(idx):
            if e:
                ys.append(_yfactor(k) + (f"^{e}" if e > 1 else ""))
        ybody = "*".join(ys)
        cv = c.constant_value()
        if cv is not None:
            neg = cv < 0
            a = -cv if neg else cv
            if not ybody:
                text = str(a)
            elif a == 1:
                text = ybody
            else:
                text = f"{a}*{ybody}"
            sep = ("-" if neg else "") if i == 0 else (" - " if neg else " + ")
        else:
            neg = c.sign() < 0 and i > 0
            ctext = f"({print_canonical(-c if neg else c)})"
            text = f"{ctext}*{ybody}" if ybody else ctext
            sep = "" if i == 0 else (" - " if neg else " + ")
        out.append(sep + text)
    return "".join(out)
