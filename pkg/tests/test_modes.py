import math

import numpy as np
import pytest
from scipy.integrate import quad, solve_ivp

from harmcone.geometry import ConeSpec
from harmcone.modes import (ModeError, fit_growth, indicial_exponent, integrate_mode,
                            integrate_modes, mode_2d_closed_form, output_grid)
from harmcone.warp import builtin_catalog, eval_warp, get_warp, warp_from_expr

flat = get_warp("euclidean")
half_sin = get_warp("half_sin")


@pytest.mark.parametrize("n, lam_sq, gamma", [(2, 9.0, 3.0), (3, 2.0, 1.0), (7, 6.0, 1.0),
                                              (4, 0.0, 0.0)])
def test_indicial_exponent(n, lam_sq, gamma):
    assert indicial_exponent(n, lam_sq) == pytest.approx(gamma, abs=1e-15)


def test_output_grid():
    g = output_grid(100.0, 64)
    assert g[0] == pytest.approx(1e-3) and g[-1] == 100.0
    assert len(g) == 5 * 64 + 1
    assert output_grid(50.0, 4)[-1] == 50.0


def test_flat_modes_are_powers():
    assert integrate_mode(ConeSpec(3, flat), 1, 100.0).log_phi_at(100.0) == pytest.approx(
        math.log(100.0), rel=1e-8)
    mode = integrate_mode(ConeSpec(2, flat), 3, 100.0)
    for r in (0.01, 0.5, 2.0, 37.0, 100.0):
        assert mode.log_phi_at(r) == pytest.approx(3 * math.log(r), abs=1e-8 * 3 * math.log(100))


def test_half_sine_mode_against_quadrature():
    mode = integrate_mode(ConeSpec(2, half_sin), 1, 100.0)
    ref = quad(lambda s: 2 / (s + math.sin(s)), 1, 50, limit=200, epsabs=1e-13)[0]
    assert math.exp(mode.log_phi_at(50.0) - ref) == pytest.approx(1.0, abs=1e-6)


def test_mode_against_solve_ivp():
    # n = 3 half-sine mode 2 in the original variables from r = 1, seeded by our state
    c = ConeSpec(3, half_sin)
    mode = integrate_mode(c, 2, 20.0)
    lam_sq = mode.lambda_sq

    def rhs(r, s):
        phi, d1, _ = eval_warp(half_sin, r)
        u, du = s
        return [du, lam_sq / phi ** 2 * u - 2 * d1 / phi * du]

    sol = solve_ivp(rhs, (1.0, 20.0), [1.0, mode.w_at(1.0)], rtol=1e-12, atol=1e-14,
                    method="DOP853")
    assert math.log(sol.y[0, -1]) == pytest.approx(mode.log_phi_at(20.0), rel=1e-8)


def test_closed_form_values():
    assert mode_2d_closed_form(flat, 2, 10.0) == pytest.approx(2 * math.log(10), rel=1e-12)
    ref = quad(lambda s: 2 / (s + math.sin(s)), 1, math.e, epsabs=1e-14)[0]
    assert mode_2d_closed_form(half_sin, 1, math.e) == pytest.approx(ref, rel=1e-10)
    # r log r tail: integral grows like log log r
    big = mode_2d_closed_form(get_warp("r_log_r"), 1, 1e6)
    assert big - math.log(math.log(1e6)) == pytest.approx(
        mode_2d_closed_form(get_warp("r_log_r"), 1, 1e3) - math.log(math.log(1e3)), abs=1e-9)


@pytest.mark.parametrize("w", [w for w in builtin_catalog() if w.name != "bump_counterexample"],
                         ids=lambda w: w.name)
def test_surface_equivalence_all_catalog(w):
    for m in range(1, 6):
        mode = integrate_mode(ConeSpec(2, w), m, 100.0)
        for r in (2.0, 7.5, 30.0, 100.0):
            assert math.expm1(mode.log_phi_at(r) - mode_2d_closed_form(w, m, r)) == pytest.approx(
                0.0, abs=1e-6)


@pytest.mark.parametrize("n", [2, 3, 5])
@pytest.mark.parametrize("name", ["half_sin", "r_log_r", "power_beta(0.5)"])
def test_mode_ordering(n, name):
    modes = integrate_modes(ConeSpec(n, get_warp(name)), range(1, 6), 1e3)
    sel = modes[0].grid > 1.0
    for a, b in zip(modes, modes[1:]):
        assert np.all(b.log_phi[sel] >= a.log_phi[sel])


@pytest.mark.parametrize("n, name", [(3, "half_sin"), (4, "euclidean"), (3, "power_beta(0.5)"),
                                     (5, "half_sin")])
def test_riccati_identity(n, name):
    w = get_warp(name)
    mode = integrate_mode(ConeSpec(n, w), 2, 50.0, tol=1e-12)

    def x_at(r):
        phi = eval_warp(w, r)[0]
        return mode.w_at(r) * phi ** (n - 1) / (r * mode.lambda_sq)

    worst = 0.0
    for r in np.geomspace(0.05, 45.0, 64):
        h = 1e-3 * r
        dx = (x_at(r - 2 * h) - 8 * x_at(r - h) + 8 * x_at(r + h) - x_at(r + 2 * h)) / (12 * h)
        phi = eval_warp(w, r)[0]
        resid = dx + mode.lambda_sq / phi ** (n - 1) * x_at(r) ** 2 - phi ** (n - 3)
        worst = max(worst, abs(resid) / (1 + phi ** (n - 3)))
    assert worst <= 1e-6


@pytest.mark.parametrize("n", [3, 4, 7])
@pytest.mark.parametrize("name", ["half_sin", "power_beta(0.5)", "euclidean"])
def test_riccati_variable_nondecreasing(n, name):
    mode = integrate_mode(ConeSpec(n, get_warp(name)), 3, 1e3)
    steps = np.diff(mode.x)
    assert np.all(steps >= -1e-10 * np.maximum(1.0, mode.x[1:]))


def test_fit_flat_polynomial():
    mode = integrate_mode(ConeSpec(2, flat), 5, 100.0)
    fit = fit_growth(mode, (10.0, 100.0))
    assert fit.kind == "Polynomial"
    assert fit.coef == pytest.approx(5.0, rel=1e-9)
    assert fit.residual < 1e-8
    assert fit.label() == "Polynomial(d=5)"


def test_fit_half_sine_quadratic():
    fit = fit_growth(integrate_mode(ConeSpec(2, half_sin), 1, 1e4), (1e3, 1e4))
    assert fit.kind == "Polynomial"
    assert 1.9 <= fit.exponent <= 2.1


def test_fit_r_log_r_surface_log_power():
    # on surfaces phi_m = (log r)^m up to a constant on the tail
    fit = fit_growth(integrate_mode(ConeSpec(2, get_warp("r_log_r")), 3, 1e6), (1e3, 1e6))
    assert fit.kind == "LogPower"
    assert fit.coef == pytest.approx(3.0, rel=1e-6)


def test_fit_rejects_bad_windows():
    mode = integrate_mode(ConeSpec(2, flat), 1, 100.0)
    with pytest.raises(ValueError):
        fit_growth(mode, (10.0, 50.0))
    with pytest.raises(ValueError):
        fit_growth(mode, (10.0, 1000.0))


def test_integrate_mode_arguments():
    with pytest.raises(ValueError):
        integrate_mode(ConeSpec(2, flat), 0, 10.0)
    with pytest.raises(ValueError):
        integrate_mode(ConeSpec(2, flat), 1, 0.5)


def test_mode_error_when_integration_stalls(monkeypatch):
    import harmcone.modes as modes

    monkeypatch.setattr(modes, "MAX_STEPS", 5000)
    w = warp_from_expr("pinched", "r*exp(-r^2)")  # r/phi = e^(r^2) blows up
    with pytest.raises(ModeError):
        integrate_mode(ConeSpec(3, w), 1, 100.0)


def test_bump_mode_until_double_overflow():
    c = ConeSpec(2, get_warp("bump_counterexample"))
    mode = integrate_mode(c, 1, 700.0)
    assert np.all(mode.w >= 0) and np.all(np.diff(mode.log_phi) >= -1e-12)
    with pytest.raises(ModeError, match="overflows"):
        integrate_mode(c, 1, 1e4)
