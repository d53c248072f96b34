"""Transmonomials ``exp(p(x)) * prod_n ell_n**q_n`` and their valuations.

Here ``ell_0 = x`` and ``ell_{n+1} = log(ell_n)``.  A monomial is stored as two
dense tuples of exact rationals (``gmpy2.mpq``, which compares and hashes
like :class:`fractions.Fraction`) with trailing zeros stripped:

* ``exp_part[k]`` is the coefficient of ``x**(k+1)`` in ``p`` (``p(0) == 0``),
* ``logs[n]`` is the exponent of ``ell_n``.

Monomials form a multiplicative group.  Eventual dominance is lexicographic:
first the coefficients of ``p`` from the highest degree down, then ``q_0``,
``q_1``, ...  This is the order in which ``exp(x**d) >> ... >> x >> log x``.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence, Union

from gmpy2 import mpq

Rational = Union[int, Fraction, mpq]
_MPQ = type(mpq(0))


def rational(v) -> mpq:
    """Exact rational from an int, Fraction, mpq or string such as ``"-3/4"``."""
    return v if type(v) is _MPQ else mpq(v)


def _strip(values: Iterable[Rational]) -> tuple[mpq, ...]:
    out = [v if type(v) is _MPQ else mpq(v) for v in values]
    while out and out[-1] == 0:
        out.pop()
    return tuple(out)


def _add(a: tuple[mpq, ...], b: tuple[mpq, ...], sign: int = 1) -> tuple[mpq, ...]:
    if not b:
        return a
    if not a and sign == 1:
        return b
    if len(a) < len(b):
        a = a + (_ZERO,) * (len(b) - len(a))
    out = list(a)
    for i, q in enumerate(b):
        out[i] = out[i] + q if sign == 1 else out[i] - q
    while out and not out[-1]:
        out.pop()
    return tuple(out)


_ZERO = mpq(0)
_INTERN: dict = {}
_INTERN_LIMIT = 1 << 18


def _lead_sign(exp_part: tuple[mpq, ...], logs: tuple[mpq, ...]) -> int:
    """Sign of the first non-zero component in dominance order."""
    if exp_part:
        return 1 if exp_part[-1] > 0 else -1
    for q in logs:
        if q:
            return 1 if q > 0 else -1
    return 0


@dataclass(frozen=True, eq=False)
class TowerMonomial:
    exp_part: tuple[mpq, ...] = ()
    logs: tuple[mpq, ...] = ()
    _hash: int = field(default=0, init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "exp_part", _strip(self.exp_part))
        object.__setattr__(self, "logs", _strip(self.logs))
        object.__setattr__(self, "_hash", hash((self.exp_part, self.logs)))

    @classmethod
    def _fast(cls, exp_part: tuple[mpq, ...], logs: tuple[mpq, ...]) -> "TowerMonomial":
        # inputs already stripped tuples of mpq; equal results share one
        # object so dictionary lookups mostly succeed on identity
        key = (exp_part, logs)
        obj = _INTERN.get(key)
        if obj is None:
            obj = object.__new__(cls)
            object.__setattr__(obj, "exp_part", exp_part)
            object.__setattr__(obj, "logs", logs)
            object.__setattr__(obj, "_hash", hash(key))
            if len(_INTERN) >= _INTERN_LIMIT:
                _INTERN.clear()
            _INTERN[key] = obj
        return obj

    def __hash__(self) -> int:
        return self._hash

    def __eq__(self, other) -> bool:
        if self is other:
            return True
        if not isinstance(other, TowerMonomial):
            return NotImplemented
        return self._hash == other._hash and self.logs == other.logs and self.exp_part == other.exp_part

    @classmethod
    def make(
        cls,
        exp_part: Sequence[Rational] | Mapping[int, Rational] = (),
        log_exponents: Sequence[Rational] | Mapping[int, Rational] = (),
    ) -> "TowerMonomial":
        """Build a monomial from dense sequences or sparse ``{index: value}`` maps.

        For ``exp_part`` given as a mapping the keys are degrees (``>= 1``);
        a non-zero constant term is rejected.
        """
        if isinstance(exp_part, Mapping):
            if exp_part.get(0, 0):
                raise ValueError("exp_part must have zero constant term")
            deg = max((k for k, v in exp_part.items() if v), default=0)
            exp_part = [exp_part.get(k, 0) for k in range(1, deg + 1)]
        if isinstance(log_exponents, Mapping):
            if any(k < 0 for k in log_exponents):
                raise ValueError("log indices must be non-negative")
            top = max((k for k, v in log_exponents.items() if v), default=-1)
            log_exponents = [log_exponents.get(k, 0) for k in range(top + 1)]
        return cls(tuple(exp_part), tuple(log_exponents))

    @classmethod
    def ell(cls, n: int, power: Rational = 1) -> "TowerMonomial":
        return cls.make(log_exponents={n: power})

    @property
    def log_exponents(self) -> dict[int, mpq]:
        return {n: q for n, q in enumerate(self.logs) if q}

    @property
    def exp_degree(self) -> int:
        return len(self.exp_part)

    @property
    def max_log_index(self) -> int:
        """Largest ``n`` with ``q_n != 0``, or ``-1``."""
        return len(self.logs) - 1

    def is_one(self) -> bool:
        return not self.exp_part and not self.logs

    def __mul__(self, other: "TowerMonomial") -> "TowerMonomial":
        return _product(self, other)

    def __truediv__(self, other: "TowerMonomial") -> "TowerMonomial":
        return _quotient(self, other)

    def __pow__(self, r: Rational) -> "TowerMonomial":
        r = rational(r)
        return TowerMonomial(tuple(c * r for c in self.exp_part), tuple(q * r for q in self.logs))

    def inverse(self) -> "TowerMonomial":
        return self ** -1

    def __repr__(self) -> str:
        return f"TowerMonomial(exp={list(map(str, self.exp_part))}, logs={list(map(str, self.logs))})"


@functools.lru_cache(maxsize=1 << 16)
def _product(a: TowerMonomial, b: TowerMonomial) -> TowerMonomial:
    return TowerMonomial._fast(_add(a.exp_part, b.exp_part), _add(a.logs, b.logs))


@functools.lru_cache(maxsize=1 << 16)
def _quotient(a: TowerMonomial, b: TowerMonomial) -> TowerMonomial:
    return TowerMonomial._fast(_add(a.exp_part, b.exp_part, -1), _add(a.logs, b.logs, -1))


ONE = TowerMonomial()


def dominance_cmp(a: TowerMonomial, b: TowerMonomial) -> int:
    """Return 1 if ``a`` eventually dominates ``b``, -1 if dominated, 0 if equal."""
    d = a / b
    return _lead_sign(d.exp_part, d.logs)


dominance_key = functools.cmp_to_key(dominance_cmp)


class _Infinity:
    """The value ``v(0)``; larger than every :class:`ValVector`."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFINITY"

    __str__ = __repr__

    def __eq__(self, other):
        return other is self

    def __hash__(self):
        return hash("hardytower.INFINITY")

    def __lt__(self, other):
        return False

    def __le__(self, other):
        return other is self

    def __gt__(self, other):
        return other is not self

    def __ge__(self, other):
        return True


INFINITY = _Infinity()


@functools.total_ordering
@dataclass(frozen=True)
class ValVector:
    """Element of the value group: the negated exponent data of a monomial.

    Larger germs have smaller valuation, so ``v(m1) < v(m2)`` iff ``m1``
    dominates ``m2``.
    """

    exp: tuple[mpq, ...] = ()
    logs: tuple[mpq, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "exp", _strip(self.exp))
        object.__setattr__(self, "logs", _strip(self.logs))

    @classmethod
    def of(cls, m: TowerMonomial) -> "ValVector":
        return cls(tuple(-c for c in m.exp_part), tuple(-q for q in m.logs))

    def __add__(self, other):
        if other is INFINITY:
            return INFINITY
        return ValVector(_add(self.exp, other.exp), _add(self.logs, other.logs))

    __radd__ = __add__

    def __sub__(self, other: "ValVector") -> "ValVector":
        return ValVector(_add(self.exp, other.exp, -1), _add(self.logs, other.logs, -1))

    def __neg__(self) -> "ValVector":
        return ValVector(tuple(-c for c in self.exp), tuple(-q for q in self.logs))

    def __mul__(self, k: Rational) -> "ValVector":
        k = rational(k)
        return ValVector(tuple(c * k for c in self.exp), tuple(q * k for q in self.logs))

    __rmul__ = __mul__

    def _cmp(self, other) -> int:
        if other is INFINITY:
            return -1
        d = self - other
        return _lead_sign(d.exp, d.logs)

    def __lt__(self, other):
        if not isinstance(other, (ValVector, _Infinity)):
            return NotImplemented
        return self._cmp(other) < 0

    def is_zero(self) -> bool:
        return not self.exp and not self.logs

    def as_dict(self) -> dict:
        return {"exp": [str(c) for c in self.exp], "logs": [str(q) for q in self.logs]}

    def __str__(self) -> str:
        parts = []
        if self.exp:
            parts.append("exp=(" + ", ".join(str(c) for c in reversed(self.exp)) + ")")
        parts.append("logs=(" + ", ".join(str(q) for q in self.logs) + ")")
        return "v[" + "; ".join(parts) + "]"
