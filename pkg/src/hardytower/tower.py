"""Iterated logarithms and the sequences built from them.

For ``n >= 0``::

    ell(n)       = log log ... log x            (n times)
    gamma(n)     = (ell_0 * ... * ell_n)**-1    = ell(n)'/ell(n)
    lambda_(n)   = gamma(0) + ... + gamma(n)    = -gamma(n)'/gamma(n)
    omega_seq(n) = gamma(0)**2 + ... + gamma(n)**2 = omega(lambda_(n))
    g(n)         = gamma(n)**(-1/2)

``identity_suite`` checks the defining relations exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .diffpoly import DiffPoly
from .errors import CacheBoundError, HardyTowerError
from .field import FieldElem, logderiv, omega_map
from .monomial import INFINITY, TowerMonomial

DEFAULT_N_MAX = 8


def _prod_ell(n: int, power: Fraction) -> TowerMonomial:
    return TowerMonomial((), (Fraction(power),) * (n + 1))


def ell(n: int) -> FieldElem:
    return FieldElem.ell(n)


def gamma(n: int) -> FieldElem:
    return FieldElem.from_monomial(_prod_ell(n, Fraction(-1)))


def lambda_(n: int) -> FieldElem:
    out = FieldElem.zero()
    for k in range(n + 1):
        out = out + gamma(k)
    return out


def omega_seq(n: int) -> FieldElem:
    out = FieldElem.zero()
    for k in range(n + 1):
        out = out + FieldElem.from_monomial(_prod_ell(k, Fraction(-2)))
    return out


def g(n: int) -> FieldElem:
    return FieldElem.from_monomial(_prod_ell(n, Fraction(1, 2)))


class TowerCache:
    """Memoised ``ell, gamma, lambda_, omega_seq, g`` for ``0 <= n <= n_max``.

    Everything is built in the constructor; afterwards the cache is read-only.
    """

    NAMES = ("ell", "gamma", "lambda", "omega_seq", "g")

    def __init__(self, n_max: int = DEFAULT_N_MAX):
        if n_max < 0:
            raise ValueError("n_max must be non-negative")
        self.n_max = n_max
        builders = {"ell": ell, "gamma": gamma, "lambda": lambda_, "omega_seq": omega_seq, "g": g}
        self._table = {
            name: tuple(fn(n) for n in range(n_max + 1)) for name, fn in builders.items()
        }

    def get(self, name: str, n: int) -> FieldElem:
        if name not in self._table:
            raise KeyError(name)
        if not 0 <= n <= self.n_max:
            raise CacheBoundError(f"{name}({n}) outside cache bound 0..{self.n_max}")
        return self._table[name][n]

    def ell(self, n: int) -> FieldElem:
        return self.get("ell", n)

    def gamma(self, n: int) -> FieldElem:
        return self.get("gamma", n)

    def lambda_(self, n: int) -> FieldElem:
        return self.get("lambda", n)

    def omega_seq(self, n: int) -> FieldElem:
        return self.get("omega_seq", n)

    def g(self, n: int) -> FieldElem:
        return self.get("g", n)


# (label, description) in the order they are reported
IDENTITIES = (
    ("a", "ell(n)^dagger = gamma(n)"),
    ("b", "gamma(n)^dagger = -lambda(n)"),
    ("c", "lambda(n+1) = lambda(n) + gamma(n+1)"),
    ("d", "ell(n+1)*gamma(n+1) = gamma(n)"),
    ("e", "omega(lambda(n)) = omega_seq(n)"),
    ("f", "omega_seq(n+1) - omega_seq(n) = gamma(n+1)^2"),
    ("g", "2*g(n)^dagger = lambda(n)"),
    ("h", "4*g(n)'' + omega_seq(n)*g(n) = 0"),
)


@dataclass(frozen=True)
class IdentityResult:
    label: str
    n: int
    passed: bool
    description: str


@dataclass
class IdentityReport:
    n_max: int
    results: list[IdentityResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def failures(self) -> list[IdentityResult]:
        return [r for r in self.results if not r.passed]

    def as_dict(self) -> dict:
        return {
            "n_max": self.n_max,
            "pass": self.passed,
            "results": [
                {"identity": r.label, "n": r.n, "pass": r.passed, "statement": r.description}
                for r in self.results
            ],
        }


def _check(label: str, n: int, c: TowerCache) -> bool:
    if label == "a":
        return logderiv(c.ell(n)) == c.gamma(n)
    if label == "b":
        return logderiv(c.gamma(n)) == -c.lambda_(n)
    if label == "c":
        return c.lambda_(n + 1) == c.lambda_(n) + c.gamma(n + 1)
    if label == "d":
        return c.ell(n + 1) * c.gamma(n + 1) == c.gamma(n)
    if label == "e":
        return omega_map(c.lambda_(n)) == c.omega_seq(n)
    if label == "f":
        return c.omega_seq(n + 1) - c.omega_seq(n) == c.gamma(n + 1) ** 2
    if label == "g":
        return 2 * logderiv(c.g(n)) == c.lambda_(n)
    if label == "h":
        return (4 * DiffPoly.Y(2) + c.omega_seq(n) * DiffPoly.Y(0)).eval(c.g(n)).is_zero()
    raise KeyError(label)


def identity_suite(n_max: int, cache: TowerCache | None = None) -> IdentityReport:
    """Check all eight relations for ``0 <= n <= n_max``.

    Relations (c), (d), (f) look one step ahead, so the cache must reach
    ``n_max + 1``; a default cache of that size is built when none is given.
    """
    if cache is None:
        cache = TowerCache(max(DEFAULT_N_MAX, n_max + 1))
    if n_max + 1 > cache.n_max:
        raise CacheBoundError(f"identity_suite({n_max}) needs a cache up to {n_max + 1}")
    report = IdentityReport(n_max)
    for n in range(n_max + 1):
        for label, text in IDENTITIES:
            try:
                ok = _check(label, n, cache)
            except HardyTowerError:
                ok = False
            report.results.append(IdentityResult(label, n, bool(ok), text))
    return report


@dataclass(frozen=True)
class PcVerdict:
    """Finite-prefix pseudo-Cauchy check: difference valuations strictly increase."""

    is_pc: bool
    increments: tuple

    def __str__(self) -> str:
        return "pc-sequence" if self.is_pc else "not-pc"


def pc_check(seq) -> PcVerdict:
    seq = list(seq)
    if len(seq) < 3:
        raise ValueError("pc_check needs at least three elements")
    incs = []
    for k in range(len(seq) - 1):
        v = (seq[k + 1] - seq[k]).valuation()
        if v is INFINITY:
            raise ValueError(f"elements {k} and {k + 1} are equal")
        incs.append(v)
    ok = all(incs[k] < incs[k + 1] for k in range(len(incs) - 1))
    return PcVerdict(ok, tuple(incs))
