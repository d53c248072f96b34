"""Sparse differential polynomials over :class:`~hardytower.field.FieldElem`.

``P = sum_i P_i * Y**i0 * (Y')**i1 * ... * (Y^(r))**ir`` is stored as a map
from multi-indices (trailing zeros stripped, so ``()`` is the constant term)
to non-zero coefficients.

Every polynomial also records the derivation it lives over: ``phi`` means
``Y'`` stands for ``phi**-1 * d/dx`` applied to ``Y``.  Freshly built
polynomials have ``phi == 1``; compositional conjugation by ``psi`` multiplies
the scale by ``psi``.  Evaluation always uses the recorded derivation, so
``P.comp_conj(psi).eval(y) == P.eval(y)``.
"""

from __future__ import annotations

from math import comb
from typing import Mapping

from .errors import ZeroDivisionInField
from .field import FieldElem, _coerce

MultiIndex = tuple[int, ...]


def _strip(idx) -> MultiIndex:
    idx = list(idx)
    if any(i < 0 for i in idx):
        raise ValueError(f"negative exponent in multi-index {tuple(idx)}")
    while idx and idx[-1] == 0:
        idx.pop()
    return tuple(idx)


def _add_idx(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    if len(a) < len(b):
        a, b = b, a
    return tuple(a[i] + (b[i] if i < len(b) else 0) for i in range(len(a)))


class DiffPoly:
    __slots__ = ("_coeffs", "_phi")

    def __init__(self, coeffs: Mapping[MultiIndex, object] | None = None, phi=None):
        acc: dict[MultiIndex, FieldElem] = {}
        for idx, c in (coeffs or {}).items():
            c = _coerce(c)
            if c.is_zero():
                continue
            k = _strip(idx)
            acc[k] = acc[k] + c if k in acc else c
            if acc[k].is_zero():
                del acc[k]
        self._coeffs = acc
        self._phi = FieldElem.one() if phi is None else _coerce(phi)
        if self._phi.is_zero():
            raise ZeroDivisionInField("derivation scale must be non-zero")

    @classmethod
    def _raw(cls, coeffs: dict[MultiIndex, FieldElem], phi: FieldElem) -> "DiffPoly":
        obj = cls.__new__(cls)
        obj._coeffs = coeffs
        obj._phi = phi
        return obj

    @classmethod
    def Y(cls, k: int = 0, phi=None) -> "DiffPoly":
        """The indeterminate's ``k``-th derivative ``Y^(k)``."""
        return cls({(0,) * k + (1,): 1}, phi)

    @classmethod
    def constant(cls, c, phi=None) -> "DiffPoly":
        return cls({(): c}, phi)

    @property
    def coeffs(self) -> Mapping[MultiIndex, FieldElem]:
        return dict(self._coeffs)

    @property
    def phi(self) -> FieldElem:
        return self._phi

    @property
    def order(self) -> int:
        return max((len(i) - 1 for i in self._coeffs), default=0) if self._coeffs else 0

    @property
    def degree(self) -> int:
        return max((sum(i) for i in self._coeffs), default=0)

    def coefficient(self, idx) -> FieldElem:
        return self._coeffs.get(_strip(idx), FieldElem.zero())

    def is_zero(self) -> bool:
        return not self._coeffs

    # ring structure -------------------------------------------------------
    def _check(self, other: "DiffPoly") -> None:
        if self._phi is not other._phi and not self._phi == other._phi:
            raise ValueError("differential polynomials over different derivations")

    def _lift(self, other) -> "DiffPoly":
        if isinstance(other, DiffPoly):
            self._check(other)
            return other
        return DiffPoly.constant(other, self._phi)

    def __add__(self, other) -> "DiffPoly":
        other = self._lift(other)
        acc = dict(self._coeffs)
        for idx, c in other._coeffs.items():
            s = acc[idx] + c if idx in acc else c
            if s.is_zero():
                acc.pop(idx, None)
            else:
                acc[idx] = s
        return DiffPoly._raw(acc, self._phi)

    __radd__ = __add__

    def __neg__(self) -> "DiffPoly":
        return DiffPoly._raw({i: -c for i, c in self._coeffs.items()}, self._phi)

    def __sub__(self, other) -> "DiffPoly":
        return self + (-self._lift(other))

    def __rsub__(self, other) -> "DiffPoly":
        return self._lift(other) - self

    def __mul__(self, other) -> "DiffPoly":
        if not isinstance(other, DiffPoly):
            c = _coerce(other)
            if c.is_zero():
                return DiffPoly._raw({}, self._phi)
            return DiffPoly._raw({i: a * c for i, a in self._coeffs.items()}, self._phi)
        self._check(other)
        acc: dict[MultiIndex, FieldElem] = {}
        for i, a in self._coeffs.items():
            for j, b in other._coeffs.items():
                k = _add_idx(i, j)
                s = acc[k] + a * b if k in acc else a * b
                if s.is_zero():
                    acc.pop(k, None)
                else:
                    acc[k] = s
        return DiffPoly._raw(acc, self._phi)

    __rmul__ = __mul__

    def __pow__(self, k: int) -> "DiffPoly":
        if k < 0:
            raise ValueError("negative power of a differential polynomial")
        out = DiffPoly.constant(1, self._phi)
        base = self
        while k:
            if k & 1:
                out = out * base
            k >>= 1
            if k:
                base = base * base
        return out

    def __eq__(self, other) -> bool:
        if not isinstance(other, DiffPoly):
            return NotImplemented
        if not self._phi == other._phi:
            return False
        if self._coeffs.keys() != other._coeffs.keys():
            return False
        return all(c == other._coeffs[i] for i, c in self._coeffs.items())

    __hash__ = None

    def __repr__(self) -> str:
        from .printing import print_diffpoly

        return f"DiffPoly({print_diffpoly(self)!r})"

    def __str__(self) -> str:
        from .printing import print_diffpoly

        return print_diffpoly(self)

    # derivation-aware helpers --------------------------------------------
    def delta(self, a: FieldElem) -> FieldElem:
        """The derivation this polynomial lives over, applied to ``a``."""
        d = a.derive()
        return d if self._phi == 1 else d / self._phi

    def _substitute(self, images: list["DiffPoly"], phi: FieldElem) -> "DiffPoly":
        """Replace ``Y^(k)`` by ``images[k]``; coefficients are kept."""
        out = DiffPoly._raw({}, phi)
        powers: dict[tuple[int, int], DiffPoly] = {}
        for idx, c in self._coeffs.items():
            term = DiffPoly.constant(c, phi)
            for k, e in enumerate(idx):
                if e:
                    if (k, e) not in powers:
                        powers[(k, e)] = images[k] ** e
                    term = term * powers[(k, e)]
            out = out + term
        return out

    # operations -----------------------------------------------------------
    def eval(self, y) -> FieldElem:
        """``P(y)``, using the recorded derivation for ``y', y'', ...``."""
        y = _coerce(y)
        ders = [y]
        for _ in range(self.order):
            ders.append(self.delta(ders[-1]))
        total = FieldElem.zero()
        cache: dict[tuple[int, int], FieldElem] = {}
        for idx, c in self._coeffs.items():
            term = c
            for k, e in enumerate(idx):
                if e:
                    if (k, e) not in cache:
                        cache[(k, e)] = ders[k] ** e
                    term = term * cache[(k, e)]
            total = total + term
        return total

    __call__ = eval

    def mul_conj(self, a) -> "DiffPoly":
        """``P_{*a}(Y) = P(a*Y)``."""
        a = _coerce(a)
        r = self.order
        ders = [a]
        for _ in range(r):
            ders.append(self.delta(ders[-1]))
        images = []
        for k in range(r + 1):
            # Leibniz: (aY)^(k) = sum_j C(k, j) a^(k-j) Y^(j)
            images.append(
                DiffPoly({(0,) * j + (1,): comb(k, j) * ders[k - j] for j in range(k + 1)}, self._phi)
            )
        return self._substitute(images, self._phi)

    def comp_conj(self, psi) -> "DiffPoly":
        """Compositional conjugate ``P^psi`` over the derivation ``psi**-1 * delta``."""
        psi = _coerce(psi)
        if psi.is_zero():
            raise ZeroDivisionInField("compositional conjugation by zero")
        new_phi = self._phi * psi
        images = [DiffPoly.Y(0, new_phi)]
        # delta^(k+1) Y = sum_j delta(c_j) Y^(j) + psi c_j Y^(j+1)  where delta^k Y = sum_j c_j Y^(j)
        for _ in range(self.order):
            prev = images[-1]
            acc: dict[MultiIndex, FieldElem] = {}
            for idx, c in prev._coeffs.items():
                j = len(idx) - 1
                dc = self.delta(c)
                if not dc.is_zero():
                    acc[idx] = acc[idx] + dc if idx in acc else dc
                nxt = (0,) * (j + 1) + (1,)
                acc[nxt] = acc[nxt] + psi * c if nxt in acc else psi * c
            images.append(DiffPoly(acc, new_phi))
        return self._substitute(images, new_phi)

    def with_phi(self, phi) -> "DiffPoly":
        """Same coefficients, reinterpreted over another derivation."""
        return DiffPoly._raw(dict(self._coeffs), _coerce(phi))


def Y(k: int = 0) -> DiffPoly:
    return DiffPoly.Y(k)


def eval_poly(P: DiffPoly, y) -> FieldElem:
    return P.eval(y)


def mul_conj(P: DiffPoly, a) -> DiffPoly:
    return P.mul_conj(a)


def comp_conj(P: DiffPoly, phi) -> DiffPoly:
    return P.comp_conj(phi)


def riccati_poly(f) -> DiffPoly:
    """``4Y'' + fY``."""
    return 4 * DiffPoly.Y(2) + _coerce(f) * DiffPoly.Y(0)


def chvar_transform(f, g) -> tuple[FieldElem, DiffPoly]:
    """Return ``(phi, g**3 * P_{*g}^phi)`` for ``P = 4Y'' + fY`` and ``phi = g**-2``.

    The result is computed through the general conjugation machinery; compare
    with :func:`chvar_closed_form` for the expected ``4Y'' + g**3 P(g) Y``.
    """
    g = _coerce(g)
    if g.is_zero():
        raise ZeroDivisionInField("change of variables needs g != 0")
    phi = g ** -2
    P = riccati_poly(f)
    return phi, g ** 3 * P.mul_conj(g).comp_conj(phi)


def chvar_closed_form(f, g) -> DiffPoly:
    g = _coerce(g)
    phi = g ** -2
    P = riccati_poly(f)
    return (4 * DiffPoly.Y(2) + (g ** 3 * P.eval(g)) * DiffPoly.Y(0)).with_phi(phi)


def eventual_sign_of_eval(P: DiffPoly, y) -> int:
    return P.eval(y).sign()
