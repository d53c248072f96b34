"""Measured constants for the growth bounds of second-order linear equations.

All reports are computed pointwise on a trajectory grid and are
deterministic given their inputs.  "Eventually" and "bounded" are decided
empirically:

* an upper bound ``r(t) <= C`` passes when ``sup r`` is finite and the tail
  of the grid (the last ``tail_fraction`` of the points) does not exceed the
  sup over the rest, i.e. the sup is attained away from ``T_max``;
* a lower bound ``r(t) >= d`` passes symmetrically with ``d > 0``;
* a predicate that should hold eventually passes when it holds on
  ``[T*, T_max]`` for an automatically located ``T*`` and that stretch
  covers at least the tail fraction of the grid.

These are heuristics on finite data, and every report says which one it used.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import cumulative_simpson, cumulative_trapezoid

from .errors import NotApplicable, PoleError
from .ode import FORMS, Trajectory, normalise_form

TAIL_FRACTION = 0.1
# slack for "not larger in the tail" comparisons of measured ratios
TAIL_SLACK = 1e-6
# |y|**2 below this is treated as a zero of y
UNDERFLOW = 1e-280
MARGIN_SAMPLES = 16


@dataclass
class BoundReport:
    bound: str
    constant: float | None
    threshold: float | None
    passed: bool | None
    margins_tail: list[float] = field(default_factory=list)
    status: str = "pass"
    details: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return {k: d[k] for k in ("bound", "constant", "threshold", "pass", "margins_tail", "status", "details")}

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kwargs)

    def raise_for_status(self) -> None:
        if self.status == "not_applicable":
            raise NotApplicable(self.details.get("reason", self.bound))
        if not self.passed:
            raise AssertionError(f"{self.bound}: {self.status}")


def _jsonable(obj):
    if isinstance(obj, (np.floating, np.integer)):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return str(obj)


def _finite(x) -> float | None:
    x = float(x)
    return x if math.isfinite(x) else None


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def tail_start(n: int, tail_fraction: float = TAIL_FRACTION) -> int:
    return n - max(1, math.ceil(tail_fraction * n))


def _sample(values: np.ndarray) -> list[float]:
    if values.size <= MARGIN_SAMPLES:
        idx = np.arange(values.size)
    else:
        idx = np.unique(np.linspace(0, values.size - 1, MARGIN_SAMPLES).round().astype(int))
    return [float(v) for v in values[idx]]


def sup_report(name: str, t: np.ndarray, ratio: np.ndarray, tail_fraction: float = TAIL_FRACTION) -> BoundReport:
    """Upper bound ``ratio <= C``: sup finite and not growing into the tail."""
    ratio = np.asarray(ratio, dtype=float)
    k = tail_start(ratio.size, tail_fraction)
    finite = bool(np.all(np.isfinite(ratio)))
    sup = float(np.max(ratio)) if finite else math.inf
    head = float(np.max(ratio[:k]))
    tail = float(np.max(ratio[k:]))
    ok = finite and tail <= head * (1 + TAIL_SLACK) + 1e-300
    margins = ratio[k:] / sup if finite and sup > 0 else ratio[k:]
    return BoundReport(
        name,
        _finite(sup),
        None,
        ok,
        _sample(margins),
        _status(ok),
        {"argmax_t": float(t[int(np.argmax(ratio))]) if finite else None, "tail_from_t": float(t[k])},
    )


def inf_report(name: str, t: np.ndarray, ratio: np.ndarray, tail_fraction: float = TAIL_FRACTION) -> BoundReport:
    """Lower bound ``ratio >= d > 0``: inf positive and not shrinking into the tail."""
    ratio = np.asarray(ratio, dtype=float)
    k = tail_start(ratio.size, tail_fraction)
    d = float(np.min(ratio))
    head = float(np.min(ratio[:k]))
    tail = float(np.min(ratio[k:]))
    ok = bool(np.all(np.isfinite(ratio))) and d > 0 and tail >= head * (1 - TAIL_SLACK)
    margins = ratio[k:] / d if d > 0 else ratio[k:]
    return BoundReport(
        name,
        _finite(d),
        None,
        ok,
        _sample(margins),
        _status(ok),
        {"argmin_t": float(t[int(np.argmin(ratio))]), "tail_from_t": float(t[k])},
    )


def eventual_threshold(holds: np.ndarray) -> int | None:
    """Smallest index ``i`` with ``holds[i:]`` all true (``None`` if the last point fails)."""
    holds = np.asarray(holds, dtype=bool)
    if holds.size == 0 or not holds[-1]:
        return None
    bad = np.flatnonzero(~holds)
    return int(bad[-1] + 1) if bad.size else 0


def eventually_report(
    name: str,
    t: np.ndarray,
    margin: np.ndarray,
    tail_fraction: float = TAIL_FRACTION,
    details: dict | None = None,
) -> BoundReport:
    """``margin > 0`` on ``[T*, T_max]`` with ``T*`` located from the data."""
    margin = np.asarray(margin, dtype=float)
    i = eventual_threshold(margin > 0)
    k = tail_start(margin.size, tail_fraction)
    ok = i is not None and i <= k
    tail = margin[k:]
    info = {
        "heuristic": "holds on [T*, T_max], T* located on the grid, tail >= "
        f"{tail_fraction:.0%} of the points",
        "threshold_index": i,
        "tail_margin_nondecreasing": bool(np.all(np.diff(tail) >= 0)),
        **(details or {}),
    }
    return BoundReport(
        name,
        _finite(np.min(margin[i:])) if i is not None else None,
        float(t[i]) if i is not None else None,
        ok,
        _sample(tail),
        _status(ok),
        info,
    )


def residual_report(name: str, t: np.ndarray, residual: np.ndarray, tolerance: float) -> BoundReport:
    """``max |residual| <= tolerance``."""
    residual = np.abs(np.asarray(residual, dtype=float))
    worst = float(np.max(residual)) if residual.size else 0.0
    ok = bool(np.all(np.isfinite(residual))) and worst <= tolerance
    return BoundReport(
        name,
        _finite(worst),
        None,
        ok,
        _sample(residual[tail_start(residual.size):]),
        _status(ok),
        {"tolerance": tolerance, "argmax_t": float(t[int(np.argmax(residual))]) if residual.size else None},
    )


# ---------------------------------------------------------------------------


def wronskian(tr1: Trajectory, tr2: Trajectory) -> np.ndarray:
    return tr1.y * tr2.yp - tr1.yp * tr2.y


def wronskian_report(tr1: Trajectory, tr2: Trajectory, max_drift: float | None = None) -> BoundReport:
    """Relative drift of ``w = y1*y2' - y1'*y2`` from its initial value.

    The default allowance is ten times the looser integration tolerance.
    """
    if tr1.t.shape != tr2.t.shape or not np.array_equal(tr1.t, tr2.t):
        raise ValueError("wronskian_report needs trajectories on the same grid")
    if tr1.form != tr2.form:
        raise ValueError("wronskian_report needs trajectories of the same equation")
    if max_drift is None:
        max_drift = 10 * max(tr1.tol, tr2.tol)
    w = wronskian(tr1, tr2)
    w0 = w[0]
    size = abs(tr1.y[0] * tr2.yp[0]) + abs(tr1.yp[0] * tr2.y[0])
    if abs(w0) <= 1e-12 * size or w0 == 0:
        return BoundReport(
            "wronskian", 0.0, None, False, [], "dependent",
            {"reason": "initial Wronskian vanishes: the solutions are dependent", "w0": w0},
        )
    drift = np.abs(w - w0) / abs(w0)
    worst = float(np.max(drift))
    ok = worst <= max_drift
    return BoundReport(
        "wronskian",
        worst,
        None,
        ok,
        _sample(drift[tail_start(drift.size):]),
        _status(ok),
        {"w0": w0, "max_drift": max_drift},
    )


def _coefficient_samples(f, t: np.ndarray) -> np.ndarray:
    if callable(f) and not hasattr(f, "num"):
        return np.asarray(f(t), dtype=float)
    from .evaluate import compile_elem

    return compile_elem(f)(t)


def riccati_z(tr: Trajectory, c: float = 0.0, tail_fraction: float = TAIL_FRACTION) -> tuple[np.ndarray, BoundReport]:
    """``z = 2y'/y`` on the grid and the measured ``sup |z| / t**(2c)``.

    Raises :class:`PoleError` when ``|y|**2`` drops below the underflow guard.
    """
    y, yp, t = tr.y, tr.yp, tr.t
    mag2 = np.abs(y) ** 2
    if np.any(mag2 < UNDERFLOW):
        where = float(t[int(np.argmax(mag2 < UNDERFLOW))])
        raise PoleError(f"|y|^2 below {UNDERFLOW:g} at t = {where:.6g}; z = 2y'/y is not defined there")
    z = 2 * yp / y
    rep = sup_report("riccati_z", t, np.abs(z) / t ** (2 * c), tail_fraction)
    rep.details["c"] = c
    if np.iscomplexobj(y):
        # Re/Im through the real-pair formulas, against the direct quotient
        y1, y2, p1, p2 = y.real, y.imag, yp.real, yp.imag
        den = y1**2 + y2**2
        re = 2 * (p1 * y1 + p2 * y2) / den
        im = 2 * (y1 * p2 - p1 * y2) / den
        scale = np.abs(z)
        rep.details["pair_formula_error"] = float(
            np.max(np.abs(re + 1j * im - z) / np.where(scale > 0, scale, 1))
        )
    return z, rep


def d_du(values: np.ndarray, u: np.ndarray) -> tuple[np.ndarray, slice]:
    """Fourth-order central difference on a uniform ``u`` grid (interior points)."""
    h = np.diff(u)
    if h.size < 4 or np.max(np.abs(h - h.mean())) > 1e-9 * max(1.0, abs(h.mean())):
        raise ValueError("d_du needs at least five uniformly spaced points")
    h = h.mean()
    v = values
    out = (v[:-4] - 8 * v[1:-3] + 8 * v[3:-1] - v[4:]) / (12 * h)
    return out, slice(2, -2)


def riccati_residual(tr: Trajectory, f, z: np.ndarray | None = None) -> np.ndarray:
    """Relative residual of ``-2z' - z**2 = 4kf`` on interior grid points.

    ``k`` is 1 for ``Y'' + fY`` and 1/4 for ``4Y'' + fY``, so the right-hand
    side is ``4f`` or ``f``.  Derivatives are taken in ``u = log t`` on
    ``Z = t*z``:  ``t**2 (-2z' - z**2) = -2(Z_u - Z) - Z**2``.
    """
    if z is None:
        z, _ = riccati_z(tr)
    t = tr.t
    u = np.log(t)
    Z = t * z
    dZ, inner = d_du(Z, u)
    Zi = Z[inner]
    lhs = -2 * (dZ - Zi) - Zi**2
    k = FORMS[normalise_form(tr.form)]
    rhs = 4 * k * t[inner] ** 2 * _coefficient_samples(f, t[inner])
    scale = np.maximum(np.abs(rhs), np.abs(Zi) ** 2)
    scale = np.where(scale > 0, scale, 1.0)
    return np.abs(lhs - rhs) / scale


def growth_bound_report(
    f,
    trajectories,
    c: float,
    tail_fraction: float = TAIL_FRACTION,
) -> BoundReport:
    """Measured constants for ``|y| <= C t**(c+1)``, ``|y'| <= C t**c`` and companions.

    Precondition ``|f(t)| t**2 <= c`` on the grid; for ``4Y'' + fY`` the
    effective coefficient is ``f/4``.  With two real trajectories the lower
    bound ``max(|y1|, |y2|) t**c >= d`` and ``|z| <= D t**(2c)`` for
    ``z = 2y'/y``, ``y = y1 + i*y2`` are measured too.
    """
    trajectories = list(trajectories)
    if not trajectories:
        raise ValueError("growth_bound_report needs at least one trajectory")
    tr0 = trajectories[0]
    t = tr0.t
    k = FORMS[normalise_form(tr0.form)]
    size = np.max(np.abs(_coefficient_samples(f, t)) * k * t**2)
    if not size <= c * (1 + 1e-12):
        return BoundReport(
            "growth", None, None, None, [], "not_applicable",
            {"reason": f"max |f(t)| t^2 = {size:.6g} exceeds c = {c:g} on the grid", "c": c},
        )
    parts: list[BoundReport] = []
    for i, tr in enumerate(trajectories):
        up = sup_report(f"|y{i + 1}|/t^(c+1)", t, np.abs(tr.y) / t ** (c + 1), tail_fraction)
        upp = sup_report(f"|y{i + 1}'|/t^c", t, np.abs(tr.yp) / t**c, tail_fraction)
        parts += [up, upp]
    complex_tr = next((tr for tr in trajectories if tr.is_complex), None)
    real = [tr for tr in trajectories if not tr.is_complex]
    if len(real) >= 2:
        y1, y2 = real[0], real[1]
        lower = np.maximum(np.abs(y1.y), np.abs(y2.y)) * t**c
        parts.append(inf_report("max(|y1|,|y2|)*t^c", t, lower, tail_fraction))
        if complex_tr is None:
            complex_tr = y1.combine(y2, 1, 1j)
    if complex_tr is not None:
        _, zrep = riccati_z(complex_tr, c, tail_fraction)
        zrep.bound = "|z|/t^(2c)"
        parts.append(zrep)
    ok = all(p.passed for p in parts)
    upper = [p.constant for p in parts if p.bound.startswith("|y")]
    return BoundReport(
        "growth",
        max(upper) if all(u is not None for u in upper) else None,
        None,
        ok,
        parts[0].margins_tail,
        _status(ok),
        {"c": c, "max_f_t2": float(size), "parts": [p.to_dict() for p in parts]},
    )


def gronwall_check(t, v, y, C: float, rtol: float = 1e-12) -> BoundReport:
    """Check ``y <= C exp(int_a^t v)`` given ``y <= C + int_a^t v*y``.

    Integrals are cumulative Simpson sums in ``u = log t`` (``t > 0``);
    ``|Simpson - trapezoid|`` serves as the quadrature error budget.  When
    the hypothesis fails on the grid the report has status ``not_applicable``.
    """
    t = np.asarray(t, dtype=float)
    v = np.asarray(v, dtype=float)
    y = np.asarray(y, dtype=float)
    if np.any(t <= 0) or np.any(np.diff(t) <= 0):
        raise ValueError("gronwall_check needs a positive increasing grid")
    if np.any(v < 0) or np.any(y < 0):
        raise ValueError("gronwall_check needs non-negative samples")
    u = np.log(t)

    def integral(g):
        s = cumulative_simpson(g * t, x=u, initial=0.0)
        tr = cumulative_trapezoid(g * t, x=u, initial=0.0)
        return s, np.abs(s - tr)

    Ivy, err_vy = integral(v * y)
    hyp_rhs = C + Ivy
    slack = err_vy + rtol * np.abs(hyp_rhs)
    hyp_gap = y - hyp_rhs
    if np.any(hyp_gap > slack):
        i = int(np.argmax(hyp_gap - slack))
        return BoundReport(
            "gronwall", None, None, None, [], "not_applicable",
            {"reason": f"hypothesis y <= C + int v*y fails at t = {t[i]:.6g}", "excess": float(hyp_gap[i])},
        )
    Iv, err_v = integral(v)
    B = C * np.exp(Iv)
    budget = B * (np.expm1(err_v) + rtol)
    with np.errstate(divide="ignore", invalid="ignore"):
        margin = np.where(B > 0, (B - y) / B, 0.0)
    ok = bool(np.all(y <= B + budget))
    measured_C = float(np.max(y / np.exp(Iv)))
    return BoundReport(
        "gronwall",
        measured_C,
        None,
        ok,
        _sample(margin[tail_start(margin.size):]),
        _status(ok),
        {
            "C": C,
            "min_margin": float(np.min(margin)),
            "max_abs_margin": float(np.max(np.abs(margin))),
            "quadrature_budget": float(np.max(err_v)),
        },
    )
