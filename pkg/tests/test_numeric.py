import math
import random
from fractions import Fraction

import mpmath
import numpy as np
import pytest

import gen
import oracle
from hardytower import (
    DomainError,
    FieldElem,
    NotApplicable,
    PoleError,
    TowerCache,
    compile_elem,
    derive,
    domain_threshold,
    eval_at,
    eval_sign,
    g,
    gamma,
    gronwall_check,
    growth_bound_report,
    integrate,
    lambda_,
    omega_seq,
    parse_expr,
    riccati_residual,
    riccati_z,
    sign_eventual,
    wronskian_report,
)
from hardytower.bounds import d_du, eventually_report, sup_report
from hardytower.ode import log_grid, pair

x = FieldElem.x()


# -- evaluation --------------------------------------------------------------


def test_eval_examples():
    assert eval_at(FieldElem.ell(2), math.e**math.e) == pytest.approx(1.0, rel=1e-14)
    assert eval_at(gamma(0), 10.0) == pytest.approx(0.1, rel=1e-15)
    assert eval_at(lambda_(1), math.e) == pytest.approx(2 / math.e, rel=1e-15)


def test_domain_threshold():
    assert domain_threshold(x) == 0
    # every ell(k) with k <= K must be positive
    assert domain_threshold(FieldElem.ell(1)) == pytest.approx(1.0)
    assert domain_threshold(FieldElem.ell(2)) == pytest.approx(math.e)
    assert domain_threshold(FieldElem.ell(3)) == pytest.approx(math.exp(math.e))
    assert domain_threshold(omega_seq(3)) == pytest.approx(math.exp(math.e))
    with pytest.raises(DomainError) as err:
        eval_at(g(3), 10.0)
    assert err.value.threshold == pytest.approx(math.exp(math.e))


def test_pole_guard():
    with pytest.raises(PoleError):
        eval_at(parse_expr("1/(x - 10)"), 10.0)
    assert eval_at(parse_expr("1/(x - 10)"), 12.0) == pytest.approx(0.5)


def test_no_overflow_in_log_space():
    big = parse_expr("exp(x^2)*x^-3")
    assert eval_sign(big - parse_expr("exp(x^2)*x^-2"), 1e5) == -1
    assert math.isinf(eval_at(big, 1e5))


def test_eval_against_mpmath():
    rng = random.Random(3)
    for _ in range(30):
        f = gen.elem(rng)
        t = 37.5
        expected = float(oracle.value(oracle.to_sympy(f), t))
        assert eval_at(f, t) == pytest.approx(expected, rel=1e-11)


def test_sign_at_top_of_grid_matches_eventual_sign():
    rng = random.Random(5)
    t_top = 1e300
    for _ in range(100):
        f = gen.elem(rng)
        assert eval_sign(f, t_top) == sign_eventual(f)


def test_vectorised_evaluation():
    t = log_grid(10, 1e4, 64)
    c = compile_elem(lambda_(2))
    assert np.allclose(c(t), [eval_at(lambda_(2), v) for v in t], rtol=1e-14)


# -- integration -------------------------------------------------------------


def test_free_particle():
    tr = integrate(FieldElem.zero(), t0=10, t_max=1e4, y0=0, y0p=1, tol=1e-10)
    assert np.allclose(tr.y, tr.t - 10, rtol=1e-8, atol=1e-8)
    assert np.allclose(tr.yp, 1, rtol=1e-8)


def test_harmonic_energy_is_bounded():
    tr = integrate(FieldElem.one(), t0=10, t_max=200, y0=1, y0p=0, n_grid=2000)
    energy = tr.y**2 + tr.yp**2
    assert np.max(np.abs(energy - 1)) < 1e-6


def test_harmonic_against_closed_form():
    tr = integrate(FieldElem.one(), t0=10, t_max=100, y0=1, y0p=0, tol=1e-11)
    assert np.allclose(tr.y, np.cos(tr.t - 10), atol=1e-8)


@pytest.mark.parametrize("m, t0", [(0, 10), (1, 10), (2, 10), (3, 20)])
def test_exact_solution_reproduced(m, t0):
    c = TowerCache(6)
    gm = c.g(m)
    tr = integrate(c.omega_seq(m), "4Y''+fY", t0=t0, t_max=1e4, y0=eval_at(gm, t0), y0p=eval_at(derive(gm), t0))
    exact = compile_elem(gm)(tr.t)
    assert np.max(np.abs(tr.y / exact - 1)) < 1e-7


def test_domain_error_below_threshold():
    with pytest.raises(DomainError):
        integrate(omega_seq(3), "4Y''+fY", t0=10)


def test_callable_coefficient():
    a = integrate(lambda t: 2 / t**2, t0=10, t_max=1e3)
    b = integrate(2 / x**2, t0=10, t_max=1e3)
    assert np.allclose(a.y, b.y, rtol=1e-12)


def test_linearity():
    f = parse_expr("omega_seq(1) + 3*x^-2")
    kw = dict(t0=10, t_max=1e4, tol=1e-10)
    tr1, tr2 = pair(f, **kw)
    c1, c2 = 2.5, -0.75
    combined = integrate(f, y0=c1, y0p=c2, **kw)
    mix = tr1.combine(tr2, c1, c2)
    scale = np.maximum(np.abs(mix.y), 1)
    assert np.max(np.abs(combined.y - mix.y) / scale) < 1e-7


def test_complex_data_matches_real_pair():
    f = 4 * x**-2
    tr1, tr2 = pair(f, t0=10, t_max=1e3)
    z = integrate(f, t0=10, t_max=1e3, y0=1, y0p=1j)
    assert z.is_complex
    assert np.allclose(z.y, tr1.y + 1j * tr2.y, rtol=1e-7)


def test_trajectory_is_read_only():
    tr = integrate(FieldElem.zero(), t0=10, t_max=100)
    with pytest.raises(ValueError):
        tr.y[0] = 3


def test_rejects_bad_tolerance():
    with pytest.raises(ValueError):
        integrate(FieldElem.zero(), tol=0)


# -- bounds ------------------------------------------------------------------


@pytest.mark.parametrize("f", ["0", "x^-2", "omega_seq(2)", "1/4*x^-2 - exp(-x)"])
def test_abel_drift(f):
    tol = 1e-9
    tr1, tr2 = pair(parse_expr(f), t0=10, t_max=1e4, tol=tol)
    rep = wronskian_report(tr1, tr2)
    assert rep.passed and rep.constant <= 10 * tol


def test_wronskian_flags_dependent_pair():
    tr, _ = pair(FieldElem.zero(), t0=10, t_max=100)
    rep = wronskian_report(tr, tr)
    assert rep.status == "dependent" and not rep.passed


@pytest.mark.parametrize("c", [0.25, 1.0, 4.0])
def test_growth_bounds(c):
    f = Fraction(c) * x**-2
    trs = pair(f, t0=10, t_max=1e5)
    rep = growth_bound_report(f, trs, c)
    assert rep.passed, rep.details
    assert math.isfinite(rep.constant)


def test_growth_bound_free_particle():
    trs = pair(FieldElem.zero(), t0=10, t_max=1e5)
    rep = growth_bound_report(FieldElem.zero(), trs, 1.0)
    assert rep.passed
    # |y|/t^2 decays like 1/t
    assert rep.details["parts"][0]["margins_tail"][-1] < 1e-4


def test_growth_bound_precondition():
    f = 2 * x**-2
    rep = growth_bound_report(f, pair(f, t0=10, t_max=1e3), 1.0)
    assert rep.status == "not_applicable"
    with pytest.raises(NotApplicable):
        rep.raise_for_status()


def test_gronwall_examples():
    t = log_grid(1, 1e4, 512)
    assert gronwall_check(t, np.zeros_like(t), np.full_like(t, 2.0), 2.0).passed
    c, C = 0.5, 3.0
    eq = gronwall_check(t, c / t, C * t**c, C)
    assert eq.passed
    assert eq.details["max_abs_margin"] < 1e-3
    bad = gronwall_check(t, np.zeros_like(t), np.full_like(t, 2 * C), C)
    assert bad.status == "not_applicable"


def test_riccati_z_of_exact_solution():
    c = TowerCache(4)
    tr = integrate(
        c.omega_seq(2), "4Y''+fY", t0=10, t_max=1e4, y0=eval_at(c.g(2), 10), y0p=eval_at(derive(c.g(2)), 10)
    )
    z, _ = riccati_z(tr)
    assert np.max(np.abs(z / compile_elem(c.lambda_(2))(tr.t) - 1)) < 1e-6


def test_riccati_z_free_particle():
    tr1, tr2 = pair(FieldElem.zero(), t0=10, t_max=1e4)
    y = tr1.combine(tr2, 1, 1j)
    z, rep = riccati_z(y)
    assert np.allclose(z, 2j / (1 + 1j * (y.t - 10)), atol=1e-8)
    assert rep.details["pair_formula_error"] < 1e-9


def test_riccati_z_aborts_on_zero():
    tr = integrate(FieldElem.one(), t0=10, t_max=30, y0=0, y0p=1, n_grid=2000)
    with pytest.raises(PoleError):
        riccati_z(tr)


@pytest.mark.parametrize("f", ["x^-2", "4*x^-2", "omega_seq(1)"])
def test_riccati_relation(f):
    f = parse_expr(f)
    tr1, tr2 = pair(f, t0=10, t_max=1e4, n_grid=4096)
    y = tr1.combine(tr2, 1, 1j)
    res = riccati_residual(y, f)
    assert np.max(res) < 1e-4


# -- "eventually" helpers ----------------------------------------------------


def test_eventually_locates_threshold():
    t = log_grid(10, 1e4, 200)
    rep = eventually_report("crossing", t, np.log(t) - np.log(100.0))
    assert rep.passed
    assert 100 <= rep.threshold < 110


def test_eventually_fails_when_predicate_breaks_at_the_end():
    t = log_grid(10, 1e4, 200)
    rep = eventually_report("late failure", t, 1e3 - t)
    assert not rep.passed


def test_sup_report_growing_tail_fails():
    t = log_grid(10, 1e4, 200)
    assert sup_report("bounded", t, 1 / t + 1).passed
    assert not sup_report("growing", t, np.log(t)).passed


def test_stencil_order():
    u = np.linspace(0, 1, 101)
    d, inner = d_du(np.sin(u), u)
    assert np.max(np.abs(d - np.cos(u[inner]))) < 1e-8


def test_mpmath_reference_solution():
    # independent high-precision solve of y'' + y/t^2 = 0 against the pair
    mpmath.mp.dps = 30
    sol = mpmath.odefun(lambda t, v: [v[1], -v[0] / t**2], 10, [1, 0])
    tr = integrate(x**-2, t0=10, t_max=200, tol=1e-11)
    for k in (50, 120, len(tr.t) - 1):
        assert tr.y[k] == pytest.approx(float(sol(tr.t[k])[0]), rel=1e-8)
