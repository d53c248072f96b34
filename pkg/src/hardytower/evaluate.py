"""Floating-point evaluation of field elements.

Every monomial ``exp(p(x)) * prod ell(k)**q_k`` is evaluated through its
logarithm ``p(t) + sum q_k * ell(k+1)(t)`` (because ``log ell(k) = ell(k+1)``),
and each linear combination is summed after factoring out its largest
term.  This keeps values such as ``exp(x**2) * x**-400`` finite wherever
their quotient is, and keeps the relative error near ``1e-12`` on the
ranges used by the harness.

Elements that use ``ell(K)`` are only evaluated for ``t > E_K`` with
``E_0 = 0`` and ``E_{k+1} = exp(E_k)``; past that point every iterated
logarithm up to ``ell(K)`` is positive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, PoleError
from .field import FieldElem, LCombo, _coerce

# relative size of a root's sum compared to the sum of its |terms|
POLE_GUARD = 1e-13


def domain_threshold(f) -> float:
    """``E_K`` for the largest log index ``K`` occurring in ``f`` (``-inf`` if none)."""
    k = _coerce(f).max_log_index()
    if k < 0:
        return -math.inf
    e = 0.0
    for _ in range(k):
        e = math.exp(e) if e < 709 else math.inf
    return e


def _ells(t: np.ndarray, top: int) -> list[np.ndarray]:
    """``[ell(0)(t), ..., ell(top)(t)]``."""
    out = [t]
    for _ in range(top):
        out.append(np.log(out[-1]))
    return out


class _CompiledCombo:
    __slots__ = ("coefs", "exp_polys", "logs")

    def __init__(self, combo: LCombo):
        terms = combo.sorted_terms()
        self.coefs = np.array([float(c) for _, c in terms])
        self.exp_polys = [tuple(float(a) for a in m.exp_part) for m, _ in terms]
        self.logs = [tuple(float(q) for q in m.logs) for m, _ in terms]

    def log_terms(self, t: np.ndarray, ells: list[np.ndarray]) -> np.ndarray:
        rows = np.zeros((len(self.coefs), t.size))
        for i, (poly, logs) in enumerate(zip(self.exp_polys, self.logs)):
            acc = np.zeros_like(t)
            for a in reversed(poly):  # Horner, no constant term
                acc = (acc + a) * t
            for k, q in enumerate(logs):
                if q:
                    acc = acc + q * ells[k + 1]
            rows[i] = acc
        return rows

    def scaled(self, t, ells, guard: bool) -> tuple[np.ndarray, np.ndarray]:
        """``(s, L)`` with value ``s * exp(L)`` and ``|s|`` of order one."""
        rows = self.log_terms(t, ells)
        top = rows.max(axis=0)
        weights = np.exp(rows - top)
        s = self.coefs @ weights
        if guard:
            size = np.abs(self.coefs) @ weights
            bad = np.abs(s) <= POLE_GUARD * size
            if np.any(bad):
                where = float(t[np.argmax(bad)])
                raise PoleError(f"denominator vanishes numerically near t = {where:.6g}")
        return s, top


@dataclass
class CompiledElem:
    """A field element prepared for repeated evaluation on arrays of ``t``."""

    elem: FieldElem
    threshold: float

    def __post_init__(self):
        self._num = _CompiledCombo(self.elem.num)
        self._dens = [(_CompiledCombo(r), p) for r, p in self.elem.den_factors.items()]
        self._top = max(self.elem.max_log_index() + 1, 0)

    def _prepare(self, t) -> np.ndarray:
        t = np.atleast_1d(np.asarray(t, dtype=float))
        if np.any(~(t > self.threshold)):
            bad = float(t[np.argmax(~(t > self.threshold))])
            raise DomainError(
                f"t = {bad:.6g} is not above the domain threshold {self.threshold:.6g}",
                threshold=self.threshold,
            )
        return t

    def log_abs_and_sign(self, t) -> tuple[np.ndarray, np.ndarray]:
        """``(log|f(t)|, sign f(t))``; useful when ``f(t)`` over- or underflows."""
        t = self._prepare(t)
        if self.elem.is_zero():
            return np.full(t.shape, -np.inf), np.zeros(t.shape)
        ells = _ells(t, self._top)
        s, L = self._num.scaled(t, ells, guard=False)
        sign = np.sign(s)
        with np.errstate(divide="ignore"):
            log_abs = np.log(np.abs(s)) + L
        for combo, p in self._dens:
            ds, dL = combo.scaled(t, ells, guard=True)
            sign = sign * np.sign(ds) ** p
            log_abs = log_abs - p * (np.log(np.abs(ds)) + dL)
        return log_abs, sign

    def __call__(self, t) -> np.ndarray:
        t = self._prepare(t)
        if self.elem.is_zero():
            return np.zeros(t.shape)
        ells = _ells(t, self._top)
        s, L = self._num.scaled(t, ells, guard=False)
        for combo, p in self._dens:
            ds, dL = combo.scaled(t, ells, guard=True)
            s = s / ds**p
            L = L - p * dL
        with np.errstate(over="ignore", under="ignore"):
            return s * np.exp(L)


def compile_elem(f) -> CompiledElem:
    f = _coerce(f)
    return CompiledElem(f, domain_threshold(f))


def eval_at(f, t: float) -> float:
    """Value of ``f`` at the real point ``t``.

    Raises :class:`DomainError` (carrying the threshold) at or below the
    domain threshold, and :class:`PoleError` when a denominator factor
    cancels to within the guard.
    """
    return float(compile_elem(f)(t)[0])


def eval_sign(f, t: float) -> int:
    """Sign of ``f(t)``, robust against overflow of the value itself."""
    _, s = compile_elem(f).log_abs_and_sign(t)
    return int(s[0])
