"""Adaptive integration of ``Y'' + fY = 0`` and ``4Y'' + fY = 0``.

The equations are integrated in the variable ``u = log t`` with state
``(y, t*y')``:

    d/du y      = t*y'
    d/du (t*y') = t*y' - k * (t**2 f)(t) * y        (k = 1 or 1/4)

For coefficients of the size met here (``t**2 f`` bounded) this system has
slowly varying solutions, so a log-spaced grid is natural and the step
control is not dominated by the ``1/t`` decay of derivatives.  The work is
done by scipy's embedded Runge-Kutta 4(5) pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import DomainError, StepSizeUnderflow
from .evaluate import compile_elem
from .field import FieldElem, _coerce

FORMS = {"Y''+fY": 1.0, "4Y''+fY": 0.25}
_FORM_ALIASES = {
    "y''+fy": "Y''+fY",
    "y2+fy": "Y''+fY",
    "plain": "Y''+fY",
    "4y''+fy": "4Y''+fY",
    "4y2+fy": "4Y''+fY",
    "riccati": "4Y''+fY",
}

DEFAULT_TOL = 1e-9
DEFAULT_GRID = 512


def normalise_form(form: str) -> str:
    key = form.replace(" ", "")
    if key in FORMS:
        return key
    try:
        return _FORM_ALIASES[key.lower()]
    except KeyError:
        raise ValueError(f"unknown equation form {form!r}; use one of {sorted(FORMS)}") from None


def log_grid(t0: float, t_max: float, n: int = DEFAULT_GRID) -> np.ndarray:
    if not 0 < t0 < t_max:
        raise ValueError("need 0 < t0 < t_max")
    if n < 2:
        raise ValueError("grid needs at least two points")
    t = np.exp(np.linspace(math.log(t0), math.log(t_max), n))
    t[0], t[-1] = t0, t_max
    return t


def _scaled_coefficient(f) -> tuple[Callable[[np.ndarray], np.ndarray], str, float]:
    """``t -> t**2 f(t)`` plus a label and the domain threshold."""
    if callable(f) and not isinstance(f, FieldElem):
        return (lambda t: np.asarray(t) ** 2 * np.asarray(f(t), dtype=float)), getattr(
            f, "__name__", "sampled"
        ), -math.inf
    f = _coerce(f)
    compiled = compile_elem(FieldElem.x() ** 2 * f)
    return compiled, str(f), compiled.threshold


@dataclass(frozen=True)
class Trajectory:
    """Samples of one solution on a log-spaced grid.

    ``y`` and ``yp`` are real arrays, or complex when the solution was
    assembled from a real pair.  ``provenance`` records the coefficient,
    the form and the initial data.
    """

    t: np.ndarray
    y: np.ndarray
    yp: np.ndarray
    tol: float
    form: str
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        for arr in (self.t, self.y, self.yp):
            arr.setflags(write=False)

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t_max(self) -> float:
        return float(self.t[-1])

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.y)

    def combine(self, other: "Trajectory", a: complex = 1, b: complex = 1) -> "Trajectory":
        """``a*self + b*other`` on the common grid."""
        if self.t.shape != other.t.shape or not np.array_equal(self.t, other.t):
            raise ValueError("trajectories live on different grids")
        if self.form != other.form:
            raise ValueError("trajectories solve different equations")
        prov = {"combination": [a, b], "parts": [self.provenance, other.provenance]}
        return Trajectory(
            self.t,
            a * self.y + b * other.y,
            a * self.yp + b * other.yp,
            max(self.tol, other.tol),
            self.form,
            prov,
        )


def solve_system(
    coef: Callable[[np.ndarray], np.ndarray],
    k: float,
    grid: np.ndarray,
    initial: Sequence[tuple[float, float]],
    quadratures: Sequence[Callable[[np.ndarray], np.ndarray]] = (),
    tol: float = DEFAULT_TOL,
) -> tuple[np.ndarray, np.ndarray, np.ndarray, dict]:
    """Integrate several solutions and quadratures on one adaptive mesh.

    ``initial`` holds ``(y, y')`` at ``grid[0]`` for each solution; each
    quadrature ``q`` adds ``int_{t0}^t q(s) ds`` to the state.  Returns
    ``(Y, YP, Q, info)`` with one row per solution or quadrature.
    """
    grid = np.asarray(grid, dtype=float)
    u = np.log(grid)
    t0 = grid[0]
    ns, nq = len(initial), len(quadratures)
    state0 = []
    for y0, y0p in initial:
        state0 += [y0, t0 * y0p]
    state0 += [0.0] * nq
    state0 = np.array(state0, dtype=float)

    def rhs(uu, s):
        t = math.exp(uu)
        c = k * float(coef(np.array([t]))[0])
        out = np.empty_like(s)
        for i in range(ns):
            y, v = s[2 * i], s[2 * i + 1]
            out[2 * i] = v
            out[2 * i + 1] = v - c * y
        for j, q in enumerate(quadratures):
            out[2 * ns + j] = t * float(q(np.array([t]))[0])
        return out

    # absolute floor keeps components that start at zero from forcing tiny steps
    scale = max(1.0, float(np.max(np.abs(state0))) if state0.size else 1.0)
    sol = solve_ivp(
        rhs,
        (u[0], u[-1]),
        state0,
        method="RK45",
        t_eval=u,
        rtol=tol,
        atol=tol * 1e-3 * scale,
    )
    if not sol.success:
        raise StepSizeUnderflow(f"integration failed: {sol.message}")
    S = sol.y
    Y = S[0 : 2 * ns : 2]
    YP = S[1 : 2 * ns : 2] / grid
    Q = S[2 * ns :]
    info = {"nfev": int(sol.nfev)}
    return Y, YP, Q, info


def integrate(
    f,
    form: str = "Y''+fY",
    t0: float = 10.0,
    t_max: float = 1e4,
    y0: float = 1.0,
    y0p: float = 0.0,
    tol: float = DEFAULT_TOL,
    n_grid: int = DEFAULT_GRID,
    grid: np.ndarray | None = None,
) -> Trajectory:
    """Solve the linear equation with data ``(y0, y0p)`` at ``t0``.

    ``f`` is a :class:`FieldElem` (or anything coercible) or a callable
    ``t -> f(t)`` on numpy arrays.  Complex initial data is split into two
    real solves and recombined.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    form = normalise_form(form)
    coef, label, threshold = _scaled_coefficient(f)
    if grid is None:
        grid = log_grid(t0, t_max, n_grid)
    grid = np.asarray(grid, dtype=float)
    if grid[0] <= threshold:
        raise DomainError(
            f"t0 = {grid[0]:.6g} is not above the domain threshold {threshold:.6g}",
            threshold=threshold,
        )
    y0c, y0pc = complex(y0), complex(y0p)
    if y0c.imag == 0 and y0pc.imag == 0:
        Y, YP, _, info = solve_system(coef, FORMS[form], grid, [(y0c.real, y0pc.real)], tol=tol)
        y, yp = Y[0], YP[0]
    else:
        Y, YP, _, info = solve_system(
            coef, FORMS[form], grid, [(y0c.real, y0pc.real), (y0c.imag, y0pc.imag)], tol=tol
        )
        y, yp = Y[0] + 1j * Y[1], YP[0] + 1j * YP[1]
    prov = {"f": label, "form": form, "t0": float(grid[0]), "y0": y0, "y0p": y0p, **info}
    return Trajectory(grid, np.array(y), np.array(yp), tol, form, prov)


def pair(f, form: str = "Y''+fY", **kwargs) -> tuple[Trajectory, Trajectory]:
    """The fundamental pair with data ``(1, 0)`` and ``(0, 1)``."""
    kwargs.pop("y0", None)
    kwargs.pop("y0p", None)
    return (
        integrate(f, form, y0=1.0, y0p=0.0, **kwargs),
        integrate(f, form, y0=0.0, y0p=1.0, **kwargs),
    )
