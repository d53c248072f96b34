"""Independent symbolic oracle: rebuild a FieldElem as a sympy expression.

Nothing here goes through the package's own arithmetic; only the stored
exponent data is read.
"""

from __future__ import annotations

import sympy as sp

X = sp.Symbol("x", positive=True)


def ell(n: int):
    out = X
    for _ in range(n):
        out = sp.log(out)
    return out


def monomial(m):
    poly = sum(sp.Rational(int(c.numerator), int(c.denominator)) * X ** (k + 1) for k, c in enumerate(m.exp_part))
    out = sp.exp(poly)
    for n, q in enumerate(m.logs):
        out *= ell(n) ** sp.Rational(int(q.numerator), int(q.denominator))
    return out


def combo(c):
    return sum(sp.Rational(int(v.numerator), int(v.denominator)) * monomial(m) for m, v in c.terms.items())


def to_sympy(f):
    den = sp.Integer(1)
    for root, power in f.den_factors.items():
        den *= combo(root) ** power
    return combo(f.num) / den


def value(expr, t: float, dps: int = 40):
    return sp.N(expr.subs(X, sp.Float(t, dps)), dps)
