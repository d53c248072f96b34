"""Finite-level reproduction of the oscillating Riccati witness.

For ``n < m`` the pipeline takes ``f = omega_seq(m)`` and

1. uses the exact solution ``y1 = g(m)`` of ``4Y'' + fY = 0``;
2. builds ``y2 = y1 * int_{t0}^t y1**-2`` by integrating ``I' = y1**-2`` on
   the same adaptive mesh that also integrates both solutions as an ODE,
   so the Wronskian is ``w = y1*y2' - y1'*y2 = 1 > 0``;
3. forms ``z = 2(y1' + i y2')/(y1 + i y2)``;
4. checks the quantitative steps: the ODE residual of ``y2``, the sandwich
   ``lambda_(n) < Re z < lambda_(n) + gamma(n)`` on a located tail,
   ``Im z > 0`` with ``Im z = 2w/(y1**2 + y2**2)``, ``sigma(Im z) = f`` and
   ``(Im z)^dagger = -Re z``;
5. measures ``|g(n)**3 P(g(n))| * ell(n+1)**2`` for ``P = 4Y'' + fY``.

Quantities are kept in scaled form (``t*z``, ``y2/y1``, ``t*y'/y1``) so that
``T_max`` far beyond the overflow range of ``y1`` itself is usable.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field

import numpy as np

from .bounds import (
    BoundReport,
    _jsonable,
    d_du,
    eventually_report,
    residual_report,
    sup_report,
)
from .diffpoly import riccati_poly
from .errors import CacheBoundError, DomainError
from .evaluate import compile_elem
from .field import SUCC, FieldElem, compare, logderiv, sign_eventual
from .ode import DEFAULT_TOL, Trajectory, log_grid, solve_system
from .tower import TowerCache

RESIDUAL_TOL = 1e-4
QUOTIENT_TOL = 1e-9
ODE_TOL = 1e-6
# finite differences below need u-steps no coarser than this
MAX_DU = 0.005


@dataclass
class WitnessReport:
    m: int
    n: int
    t0: float
    t_max: float
    tol: float
    checks: list[BoundReport] = field(default_factory=list)
    exact: dict = field(default_factory=dict)
    samples: dict = field(default_factory=dict, repr=False)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and all(self.exact.values())

    @property
    def failed_step(self) -> str | None:
        for name, ok in self.exact.items():
            if not ok:
                return name
        for c in self.checks:
            if not c.passed:
                return c.bound
        return None

    def check(self, name: str) -> BoundReport:
        for c in self.checks:
            if c.bound == name:
                return c
        raise KeyError(name)

    @property
    def sandwich_threshold(self) -> float | None:
        return self.check("sandwich").threshold

    def to_dict(self) -> dict:
        return {
            "m": self.m,
            "n": self.n,
            "t0": self.t0,
            "t_max": self.t_max,
            "tol": self.tol,
            "pass": self.passed,
            "failed_step": self.failed_step,
            "sandwich_threshold": self.sandwich_threshold,
            "exact": dict(self.exact),
            "checks": [c.to_dict() for c in self.checks],
        }

    def to_json(self, **kwargs) -> str:
        return json.dumps(self.to_dict(), default=_jsonable, **kwargs)

    def write_csv(self, path) -> None:
        """Columns ``t, y1, y1p, y2, y2p, re_z, im_z, w``.

        ``y1`` and ``y2`` overflow to ``inf`` when ``T_max`` is huge; the
        ``re_z`` and ``im_z`` columns stay finite.
        """
        s = self.samples
        cols = ("t", "y1", "y1p", "y2", "y2p", "re_z", "im_z", "w")
        with open(path, "w", newline="") as fh:
            out = csv.writer(fh)
            out.writerow(cols)
            for row in zip(*(s[c] for c in cols)):
                out.writerow([repr(float(v)) for v in row])


def _pipeline_grid(t0: float, t_max: float, n_grid: int) -> np.ndarray:
    span = math.log(t_max) - math.log(t0)
    return log_grid(t0, t_max, max(n_grid, math.ceil(span / MAX_DU) + 1))


def witness_pipeline(
    m: int,
    n: int,
    t0: float = 10.0,
    t_max: float = 1e4,
    tol: float = DEFAULT_TOL,
    n_grid: int = 512,
    cache: TowerCache | None = None,
) -> WitnessReport:
    if not 0 <= n < m:
        raise ValueError(f"witness_pipeline needs 0 <= n < m, got m={m}, n={n}")
    cache = cache or TowerCache(max(8, m + 1))
    if m + 1 > cache.n_max:
        raise CacheBoundError(f"witness_pipeline({m}, {n}) needs a cache up to {m + 1}")
    x = FieldElem.x()
    f = cache.omega_seq(m)
    g_m = cache.g(m)
    lam_n, gam_n = cache.lambda_(n), cache.gamma(n)

    exact = {
        # y1 = g(m) solves 4Y'' + fY = 0 and 2 y1^dagger = lambda_(m)
        "g(m) solves 4Y''+omega_seq(m)Y": riccati_poly(f).eval(g_m).is_zero(),
        "2*g(m)^dagger = lambda(m)": 2 * logderiv(g_m) == cache.lambda_(m),
        "lambda(n) < lambda(m) < lambda(n) + gamma(n)": sign_eventual(cache.lambda_(m) - lam_n) > 0
        and sign_eventual(lam_n + gam_n - cache.lambda_(m)) > 0,
    }
    P_gn = cache.g(n) ** 3 * riccati_poly(f).eval(cache.g(n)) * cache.ell(n + 1) ** 2
    exact["g(n)^3 P(g(n)) ell(n+1)^2 bounded"] = P_gn.is_zero() or compare(P_gn, 1).relation != SUCC

    threshold = compile_elem(f).threshold
    if t0 <= threshold:
        raise DomainError(
            f"t0 = {t0:.6g} is not above the domain threshold {threshold:.6g} of omega_seq({m})",
            threshold=threshold,
        )
    grid = _pipeline_grid(t0, t_max, n_grid)
    t = grid
    u = np.log(t)

    # exact ingredients, all finite on the whole grid
    t_gamma = compile_elem(x * cache.gamma(m))  # = t / y1**2
    b1_exact = compile_elem(x * cache.lambda_(m) / 2)  # = t y1'/y1
    g_at = compile_elem(g_m)
    y1_t0 = float(g_at(t0)[0])
    y1p_t0 = float(b1_exact(t0)[0]) * y1_t0 / t0

    coef = compile_elem(x**2 * f)
    Y, YP, Q, info = solve_system(
        coef,
        0.25,
        t,
        [(y1_t0, y1p_t0), (0.0, 1.0 / y1_t0)],
        quadratures=[compile_elem(cache.gamma(m))],
        tol=tol,
    )
    I = Q[0]
    # log|y1| for rescaling the ODE solutions
    log_y1, _ = g_at.log_abs_and_sign(t)
    y1_scale = np.exp(log_y1 - log_y1[0])

    checks: list[BoundReport] = []

    # y1 from the ODE against the exact g(m); y2 from the ODE against y1*I
    rel1 = np.abs(Y[0] / y1_t0 / y1_scale - 1)
    checks.append(residual_report("y1 ode vs exact", t, rel1, ODE_TOL))
    y2_ode_scaled = Y[1] / y1_t0 / y1_scale  # y2 / y1 from the ODE
    size = np.sqrt(1 + I**2)
    checks.append(residual_report("y2 ode vs quadrature", t, np.abs(y2_ode_scaled - I) / size, ODE_TOL))

    # scaled derivatives: b1 = t y1'/y1, b2 = t y2'/y1 = b1*I + t/y1**2
    b1 = b1_exact(t)
    tg = t_gamma(t)
    b2 = b1 * I + tg
    re_tz = 2 * (b1 + b2 * I) / (1 + I**2)
    im_tz = 2 * tg / (1 + I**2)

    # ODE residual for y2, scaled by t**2/y1: 4 t**2 y2''/y1 + t**2 f I
    db2, inner = d_du(b2, u)
    ti = t[inner]
    # t**2 y2'' / y1 = d(t y2')/du / y1 - t y2'/y1 ;  d(t y2')/du / y1 = db2 + b2*b1
    t2y2pp = db2 + b2[inner] * b1[inner] - b2[inner]
    t2f = coef(ti)
    res = 4 * t2y2pp + t2f * I[inner]
    scale = 4 * np.abs(t2y2pp) + np.abs(t2f * I[inner])
    checks.append(residual_report("4y2''+f*y2 residual", ti, res / np.where(scale > 0, scale, 1), RESIDUAL_TOL))

    # sandwich on t*Re z
    lo = compile_elem(x * lam_n)(t)
    hi = compile_elem(x * (lam_n + gam_n))(t)
    width = hi - lo
    margin = np.minimum(re_tz - lo, hi - re_tz) / width
    checks.append(
        eventually_report(
            "sandwich",
            t,
            margin,
            details={
                "lower_margin_tail": [float(v) for v in ((re_tz - lo) / width)[-4:]],
                "upper_margin_tail": [float(v) for v in ((hi - re_tz) / width)[-4:]],
            },
        )
    )

    # Im z > 0 throughout
    rep = sup_report("Im z > 0", t, -im_tz)
    rep.passed = bool(np.all(im_tz > 0))
    rep.status = "pass" if rep.passed else "fail"
    rep.constant = float(np.min(im_tz / t))
    checks.append(rep)

    # Im z = 2w/(y1^2+y2^2) and Re z through the pair formulas, against the direct quotient
    y1n, y2n = 1.0, I
    z_direct = 2 * (b1 + 1j * b2) / (y1n + 1j * y2n)
    quot = np.abs((re_tz + 1j * im_tz) - z_direct) / np.abs(z_direct)
    checks.append(residual_report("pair formulas vs quotient", t, quot, QUOTIENT_TOL))
    w = Y[0] * YP[1] - YP[0] * Y[1]
    checks.append(residual_report("wronskian", t, np.abs(w - w[0]) / abs(w[0]), ODE_TOL))

    # sigma(Im z) = f: t^2 sigma(v) = -2(R_u - R) - R^2 + V^2 with R = t*Re z, V = t*Im z
    dR, _ = d_du(re_tz, u)
    Ri, Vi = re_tz[inner], im_tz[inner]
    sig = -2 * (dR - Ri) - Ri**2 + Vi**2
    checks.append(residual_report("sigma(Im z) vs f", ti, np.abs(sig - t2f) / np.abs(t2f), RESIDUAL_TOL))

    # (Im z)^dagger = -Re z: t*(Im z)^dagger = d log V/du - 1
    dlogV, _ = d_du(np.log(im_tz), u)
    dag = dlogV - 1
    checks.append(residual_report("(Im z)^dagger vs -Re z", ti, np.abs(dag + Ri) / np.abs(Ri), RESIDUAL_TOL))

    # |g(n)^3 P(g(n))| * ell(n+1)^2 stays bounded
    A = np.abs(compile_elem(P_gn)(t))
    rep = sup_report("chvar bound", t, A)
    rep.details["measured_A"] = rep.constant
    checks.append(rep)

    with np.errstate(over="ignore", invalid="ignore"):
        y1 = g_at(t)
        samples = {
            "t": t,
            "y1": y1,
            "y1p": b1 * y1 / t,
            "y2": I * y1,
            "y2p": b2 * y1 / t,
            "re_z": re_tz / t,
            "im_z": im_tz / t,
            # b1*I - I*b1 + t/y1**2 * (y1**2/t): exactly 1 by construction
            "w": (b1 * I + tg - I * b1) / tg,
        }
    report = WitnessReport(m, n, float(t0), float(t_max), tol, checks, exact, samples)
    report.samples["info"] = info
    return report


def trajectory_of(report: WitnessReport) -> Trajectory:
    """The complex solution ``y1 + i*y2`` sampled by a pipeline run."""
    s = report.samples
    return Trajectory(
        np.array(s["t"]),
        np.array(s["y1"] + 1j * s["y2"]),
        np.array(s["y1p"] + 1j * s["y2p"]),
        report.tol,
        "4Y''+fY",
        {"f": f"omega_seq({report.m})", "source": "witness_pipeline"},
    )
