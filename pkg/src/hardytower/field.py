"""Exact arithmetic in the differential field generated by tower monomials.

An :class:`LCombo` is a finite rational linear combination of
:class:`~hardytower.monomial.TowerMonomial`; a :class:`FieldElem` is a
quotient of two of them.  No multivariate gcd is ever computed.  Instead the
denominator is kept *factored* as ``prod_i r_i**p_i`` where each root ``r_i``
is normalised to have leading term exactly ``1``; units (single terms) are
always folded into the numerator.  This keeps the k-th derivative of
``n/d`` at denominator ``d**(k+1)`` rather than ``d**(2**k)``.

Consequences used throughout:

* ``f == 0`` iff the numerator has no terms;
* the eventual sign of ``f`` is the sign of the leading numerator coefficient;
* ``v(f)`` is the valuation of the leading numerator monomial.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from gmpy2 import mpq
from typing import Callable, Iterable, Iterator, Mapping, Union

from .errors import UnsupportedComposition, UnsupportedPower, ZeroDivisionInField
from .monomial import (
    INFINITY,
    ONE,
    TowerMonomial,
    ValVector,
    _MPQ,
    dominance_cmp,
    dominance_key,
    rational,
)

Scalar = Union[int, Fraction, mpq]


class LCombo:
    """Immutable map ``TowerMonomial -> non-zero rational``."""

    __slots__ = ("_terms", "_hash", "_lead")

    def __init__(self, terms: Mapping[TowerMonomial, Scalar] | Iterable = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[TowerMonomial, mpq] = {}
        for m, c in items:
            c = rational(c)
            if c:
                s = acc.get(m, 0) + c
                if s:
                    acc[m] = s
                else:
                    del acc[m]
        self._terms = acc
        self._hash = None
        self._lead = None

    @classmethod
    def _raw(cls, acc: dict[TowerMonomial, mpq]) -> "LCombo":
        obj = cls.__new__(cls)
        obj._terms = acc
        obj._hash = None
        obj._lead = None
        return obj

    @classmethod
    def monomial(cls, m: TowerMonomial, c: Scalar = 1) -> "LCombo":
        return cls({m: c})

    @classmethod
    def constant(cls, c: Scalar) -> "LCombo":
        return cls({ONE: c})

    @property
    def terms(self) -> Mapping[TowerMonomial, mpq]:
        return self._terms

    def __len__(self) -> int:
        return len(self._terms)

    def __iter__(self) -> Iterator[tuple[TowerMonomial, mpq]]:
        return iter(self._terms.items())

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def __eq__(self, other) -> bool:
        if not isinstance(other, LCombo):
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self) -> str:
        return f"LCombo({dict(self._terms)!r})"

    def sorted_terms(self) -> list[tuple[TowerMonomial, mpq]]:
        """Terms in decreasing dominance."""
        return sorted(self._terms.items(), key=lambda mc: dominance_key(mc[0]), reverse=True)

    def lead(self) -> tuple[TowerMonomial, mpq]:
        if not self._terms:
            raise ZeroDivisionInField("zero combination has no leading term")
        if self._lead is None:
            best = None
            for m in self._terms:
                if best is None or dominance_cmp(m, best) > 0:
                    best = m
            self._lead = (best, self._terms[best])
        return self._lead

    def trail(self) -> tuple[TowerMonomial, mpq]:
        worst = None
        for m in self._terms:
            if worst is None or dominance_cmp(m, worst) < 0:
                worst = m
        return worst, self._terms[worst]

    def __add__(self, other: "LCombo") -> "LCombo":
        acc = dict(self._terms)
        for m, c in other._terms.items():
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)
        return LCombo._raw(acc)

    def __neg__(self) -> "LCombo":
        return LCombo._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other: "LCombo") -> "LCombo":
        return self + (-other)

    def scale(self, c: Scalar, m: TowerMonomial = ONE) -> "LCombo":
        c = rational(c)
        if not c:
            return LCombo._raw({})
        if m.is_one():
            return LCombo._raw({k: v * c for k, v in self._terms.items()})
        return LCombo._raw({k * m: v * c for k, v in self._terms.items()})

    def __mul__(self, other: "LCombo") -> "LCombo":
        if len(other) == 1:
            (m, c), = other._terms.items()
            return self.scale(c, m)
        if len(self) == 1:
            (m, c), = self._terms.items()
            return other.scale(c, m)
        acc: dict[TowerMonomial, mpq] = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                m = m1 * m2
                s = acc.get(m, 0) + c1 * c2
                if s:
                    acc[m] = s
                else:
                    acc.pop(m, None)
        return LCombo._raw(acc)

    def __pow__(self, k: int) -> "LCombo":
        if k < 0:
            raise ValueError("negative power of a combination")
        result = LCombo.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def derive(self) -> "LCombo":
        acc: dict[TowerMonomial, mpq] = {}

        def put(m, c):
            s = acc.get(m, 0) + c
            if s:
                acc[m] = s
            else:
                acc.pop(m, None)

        for m, c in self._terms.items():
            # d/dx exp(p) * prod ell_n^q_n = m * (p' + sum_n q_n * gamma_n)
            for k, a in enumerate(m.exp_part):
                if a:
                    put(m * TowerMonomial.ell(0, k), c * a * (k + 1))
            for n, q in enumerate(m.logs):
                if q:
                    put(m * _gamma_monomial(n), c * q)
        return LCombo._raw(acc)

    def map_monomials(self, fn: Callable[[TowerMonomial], TowerMonomial]) -> "LCombo":
        return LCombo((fn(m), c) for m, c in self._terms.items())

    def constant_value(self) -> mpq | None:
        """The rational value if this combination is a constant, else None."""
        if not self._terms:
            return mpq(0)
        if len(self._terms) == 1 and ONE in self._terms:
            return self._terms[ONE]
        return None


def _gamma_monomial(n: int) -> TowerMonomial:
    return TowerMonomial((), (mpq(-1),) * (n + 1))


def _exact_div(a: LCombo, b: LCombo, max_steps: int = 256) -> LCombo | None:
    """Return ``a / b`` if it is a finite combination, else None.

    Long division by leading terms; quotient monomials come out in
    decreasing order and must stay above ``trail(a)/trail(b)``.
    """
    if b.is_zero():
        raise ZeroDivisionInField("division by zero combination")
    if a.is_zero():
        return a
    bm, bc = b.lead()
    floor = a.trail()[0] / b.trail()[0]
    rem = a
    quot: dict[TowerMonomial, mpq] = {}
    for _ in range(max_steps):
        if rem.is_zero():
            return LCombo._raw(quot)
        rm, rc = rem.lead()
        qm = rm / bm
        if dominance_cmp(qm, floor) < 0:
            return None
        qc = rc / bc
        quot[qm] = quot.get(qm, 0) + qc
        rem = rem - b.scale(qc, qm)
    return None


def _normalise_root(r: LCombo) -> tuple[mpq, TowerMonomial, LCombo]:
    """Split ``r = c * m * rhat`` with ``rhat`` having leading term ``1``."""
    m, c = r.lead()
    if len(r) == 1:
        return c, m, _ONE_COMBO
    return c, m, r.scale(1 / c, m.inverse())


_ONE_COMBO = LCombo.constant(1)
_ZERO_COMBO = LCombo()


def _coerce(value) -> "FieldElem":
    if isinstance(value, FieldElem):
        return value
    if isinstance(value, (int, Fraction, _MPQ)):
        return FieldElem.constant(value)
    if isinstance(value, TowerMonomial):
        return FieldElem.from_monomial(value)
    if isinstance(value, LCombo):
        return FieldElem.from_combo(value)
    raise TypeError(f"cannot interpret {type(value).__name__} as a field element")


def _binary(method):
    """Return NotImplemented for operands that are not field values."""

    def wrapper(self, other):
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return method(self, other)

    wrapper.__name__ = method.__name__
    wrapper.__doc__ = method.__doc__
    return wrapper


class FieldElem:
    """Element ``num / prod(root**power)`` of the tower field."""

    __slots__ = ("_num", "_dens")

    def __init__(self, num: LCombo, dens: Mapping[LCombo, int] | None = None):
        # Normalise: roots monic with leading monomial 1, units folded into num.
        acc: dict[LCombo, int] = {}
        for r, p in (dens or {}).items():
            if p == 0:
                continue
            if p < 0:
                num = num * (r ** (-p))
                continue
            c, m, rhat = _normalise_root(r)
            num = num.scale(c ** -p, m ** -p)
            if rhat is not _ONE_COMBO:
                acc[rhat] = acc.get(rhat, 0) + p
        if num.is_zero():
            acc = {}
        reduced = _reduced(num, acc)
        self._num = reduced._num
        self._dens = reduced._dens

    @classmethod
    def _make(cls, num: LCombo, dens: dict[LCombo, int]) -> "FieldElem":
        obj = cls.__new__(cls)
        obj._num = num
        obj._dens = {} if num.is_zero() else dens
        return obj

    # constructors ---------------------------------------------------------
    @classmethod
    def constant(cls, c: Scalar) -> "FieldElem":
        return cls._make(LCombo.constant(c), {})

    @classmethod
    def zero(cls) -> "FieldElem":
        return cls._make(_ZERO_COMBO, {})

    @classmethod
    def one(cls) -> "FieldElem":
        return cls._make(_ONE_COMBO, {})

    @classmethod
    def from_monomial(cls, m: TowerMonomial, c: Scalar = 1) -> "FieldElem":
        return cls._make(LCombo.monomial(m, c), {})

    @classmethod
    def from_combo(cls, num: LCombo, den: LCombo | None = None) -> "FieldElem":
        if den is None:
            return cls._make(num, {})
        if den.is_zero():
            raise ZeroDivisionInField("zero denominator")
        return cls(num, {den: 1})

    @classmethod
    def x(cls) -> "FieldElem":
        return cls.from_monomial(TowerMonomial.ell(0))

    @classmethod
    def ell(cls, n: int) -> "FieldElem":
        return cls.from_monomial(TowerMonomial.ell(n))

    @classmethod
    def exp_poly(cls, coeffs: Mapping[int, Scalar]) -> "FieldElem":
        """``exp(sum_k coeffs[k] * x**k)`` for ``k >= 1``."""
        return cls.from_monomial(TowerMonomial.make(exp_part=coeffs))

    # accessors ------------------------------------------------------------
    @property
    def num(self) -> LCombo:
        return self._num

    @property
    def den_factors(self) -> Mapping[LCombo, int]:
        return dict(self._dens)

    @property
    def den(self) -> LCombo:
        out = _ONE_COMBO
        for r, p in self._dens.items():
            out = out * (r ** p)
        return out

    def is_zero(self) -> bool:
        return self._num.is_zero()

    def __bool__(self) -> bool:
        return not self.is_zero()

    def is_laurent(self) -> bool:
        """True if the denominator is trivial (a finite sum of monomials)."""
        return not self._dens

    def monomials(self) -> set[TowerMonomial]:
        out = set(m for m, _ in self._num)
        for r in self._dens:
            out.update(m for m, _ in r)
        return out

    def max_log_index(self) -> int:
        return max((m.max_log_index for m in self.monomials()), default=-1)

    # arithmetic -----------------------------------------------------------
    @_binary
    def __add__(self, other) -> "FieldElem":
        other = _coerce(other)
        if other.is_zero():
            return self
        if self.is_zero():
            return other
        if not self._dens and not other._dens:
            return FieldElem._make(self._num + other._num, {})
        common = dict(self._dens)
        for r, p in other._dens.items():
            if common.get(r, 0) < p:
                common[r] = p
        num = _lift(self._num, self._dens, common) + _lift(other._num, other._dens, common)
        return _reduced(num, common)

    __radd__ = __add__

    def __neg__(self) -> "FieldElem":
        return FieldElem._make(-self._num, dict(self._dens))

    @_binary
    def __sub__(self, other) -> "FieldElem":
        return self + (-_coerce(other))

    @_binary
    def __rsub__(self, other) -> "FieldElem":
        return _coerce(other) - self

    @_binary
    def __mul__(self, other) -> "FieldElem":
        other = _coerce(other)
        if self.is_zero() or other.is_zero():
            return FieldElem.zero()
        dens = dict(self._dens)
        for r, p in other._dens.items():
            dens[r] = dens.get(r, 0) + p
        num = self._num * other._num
        return _reduced(num, dens)

    __rmul__ = __mul__

    def inverse(self) -> "FieldElem":
        if self.is_zero():
            raise ZeroDivisionInField("inverse of zero")
        c, m, rhat = _normalise_root(self._num)
        num = LCombo.monomial(m.inverse(), 1 / c)
        for r, p in self._dens.items():
            num = num * (r ** p)
        dens = {} if rhat is _ONE_COMBO else {rhat: 1}
        return _reduced(num, dens)

    @_binary
    def __truediv__(self, other) -> "FieldElem":
        return self * _coerce(other).inverse()

    @_binary
    def __rtruediv__(self, other) -> "FieldElem":
        return _coerce(other) * self.inverse()

    def __pow__(self, r) -> "FieldElem":
        r = rational(r)
        if r.denominator == 1:
            k = r.numerator
            if k < 0:
                return self.inverse() ** (-k)
            num = self._num ** k
            return FieldElem._make(num, {rt: p * k for rt, p in self._dens.items()} if k else {})
        if self._dens or len(self._num) != 1:
            raise UnsupportedPower(f"rational power {r} of a non-monomial element")
        (m, c), = self._num
        return FieldElem.from_monomial(m ** r, _rational_root(c, r))

    def __eq__(self, other) -> bool:
        try:
            other = _coerce(other)
        except TypeError:
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    # order and valuation --------------------------------------------------
    def sign(self) -> int:
        if self.is_zero():
            return 0
        return 1 if self._num.lead()[1] > 0 else -1

    def __lt__(self, other) -> bool:
        return (self - _coerce(other)).sign() < 0

    def __le__(self, other) -> bool:
        return (self - _coerce(other)).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - _coerce(other)).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - _coerce(other)).sign() >= 0

    def __abs__(self) -> "FieldElem":
        return -self if self.sign() < 0 else self

    def valuation(self):
        if self.is_zero():
            return INFINITY
        return ValVector.of(self._num.lead()[0])

    def leading_term(self) -> tuple[TowerMonomial, mpq]:
        return self._num.lead()

    def constant_value(self) -> mpq | None:
        """The rational value if ``self`` is constant, else None."""
        if not self._dens:
            return self._num.constant_value()
        if not self.derive().is_zero():
            return None
        return self._num.lead()[1]

    # derivation -----------------------------------------------------------
    def derive(self) -> "FieldElem":
        if not self._dens:
            return FieldElem._make(self._num.derive(), {})
        # (N / prod r_i^p_i)' = (N' prod r_i - N sum_i p_i r_i' prod_{j!=i} r_j) / prod r_i^(p_i+1)
        roots = list(self._dens.items())
        prod_all = _ONE_COMBO
        for r, _ in roots:
            prod_all = prod_all * r
        num = self._num.derive() * prod_all
        for i, (r, p) in enumerate(roots):
            others = _ONE_COMBO
            for j, (s, _) in enumerate(roots):
                if j != i:
                    others = others * s
            num = num - (self._num * r.derive() * others).scale(p)
        dens = {r: p + 1 for r, p in roots}
        return _reduced(num, dens)

    def derive_n(self, k: int) -> "FieldElem":
        out = self
        for _ in range(k):
            out = out.derive()
        return out

    # composition ----------------------------------------------------------
    def map_monomials(self, fn: Callable[[TowerMonomial], TowerMonomial]) -> "FieldElem":
        return FieldElem(self._num.map_monomials(fn), {r.map_monomials(fn): p for r, p in self._dens.items()})

    def __repr__(self) -> str:
        from .printing import print_canonical

        return f"FieldElem({print_canonical(self)!r})"

    def __str__(self) -> str:
        from .printing import print_canonical

        return print_canonical(self)


def _lift(num: LCombo, dens: Mapping[LCombo, int], common: Mapping[LCombo, int]) -> LCombo:
    for r, p in common.items():
        missing = p - dens.get(r, 0)
        if missing:
            num = num * (r ** missing)
    return num


_REDUCE_NUM_LIMIT = 48
_REDUCE_ROOT_LIMIT = 12


def _reduced(num: LCombo, dens: dict[LCombo, int]) -> FieldElem:
    """Build ``num / prod dens`` after dividing out root factors where exact.

    Only attempted for small operands; an unreduced result is still correct.
    """
    if dens and len(num) <= _REDUCE_NUM_LIMIT:
        for r in list(dens):
            if len(r) > _REDUCE_ROOT_LIMIT:
                continue
            while dens.get(r, 0) > 0:
                q = _exact_div(num, r)
                if q is None:
                    break
                num = q
                dens[r] -= 1
            if not dens[r]:
                del dens[r]
    return FieldElem._make(num, dens)


def _rational_root(c: mpq, r: mpq) -> mpq:
    if c < 0:
        raise UnsupportedPower(f"non-integer power {r} of a negative coefficient")
    q = int(r.denominator)

    def iroot(n: int) -> int:
        x = round(n ** (1.0 / q))
        for cand in (x - 1, x, x + 1):
            if cand >= 0 and cand ** q == n:
                return cand
        raise UnsupportedPower(f"coefficient {c} has no exact {q}-th root")

    base = mpq(iroot(int(c.numerator)), iroot(int(c.denominator)))
    return base ** int(r.numerator)


# ---------------------------------------------------------------------------
# Differential-field operations


def derive(f) -> FieldElem:
    return _coerce(f).derive()


def logderiv(f) -> FieldElem:
    f = _coerce(f)
    if f.is_zero():
        raise ZeroDivisionInField("logarithmic derivative of zero")
    return f.derive() / f


def omega_map(z) -> FieldElem:
    """``omega(z) = -2 z' - z**2``."""
    z = _coerce(z)
    return -2 * z.derive() - z * z


def sigma_map(y) -> FieldElem:
    """``sigma(y) = omega(-y') + y**2`` with ``y' `` the logarithmic derivative."""
    y = _coerce(y)
    if y.is_zero():
        raise ZeroDivisionInField("sigma is undefined at zero")
    return omega_map(-logderiv(y)) + y * y


def valuation(f):
    return _coerce(f).valuation()


def sign_eventual(f) -> int:
    return _coerce(f).sign()


@dataclass(frozen=True)
class Verdict:
    """Asymptotic comparison result: ``relation`` in {'≺', '≻', '≍'}."""

    relation: str
    similar: bool = False

    def __str__(self) -> str:
        return f"{self.relation} ∼" if self.similar else self.relation


PREC, SUCC, ASYMP = "≺", "≻", "≍"


def _relation(f: FieldElem, g: FieldElem) -> str:
    vf, vg = f.valuation(), g.valuation()
    if vf == vg:
        return ASYMP
    return PREC if vf > vg else SUCC


def compare(f, g) -> Verdict:
    f, g = _coerce(f), _coerce(g)
    rel = _relation(f, g)
    similar = (not g.is_zero()) and _relation(f - g, g) == PREC
    return Verdict(rel, similar)


def compose_log(f) -> FieldElem:
    """``f o log``: shift ``ell_k -> ell_{k+1}`` and ``exp(c x) -> x**c``."""

    def fn(m: TowerMonomial) -> TowerMonomial:
        if m.exp_degree > 1:
            raise UnsupportedComposition(f"exp part of degree {m.exp_degree} composed with log")
        c = m.exp_part[0] if m.exp_part else mpq(0)
        return TowerMonomial((), (c,) + m.logs)

    return _coerce(f).map_monomials(fn)


def compose_exp(f) -> FieldElem:
    """``f o exp``: shift ``ell_{k+1} -> ell_k`` and ``x**q -> exp(q x)``."""

    def fn(m: TowerMonomial) -> TowerMonomial:
        if m.exp_part:
            raise UnsupportedComposition("exp(p(x)) composed with exp leaves the lattice")
        if not m.logs:
            return m
        return TowerMonomial((m.logs[0],), m.logs[1:])

    return _coerce(f).map_monomials(fn)


x = FieldElem.x
