import math

import numpy as np
import pytest

from harmcone.geometry import ConeSpec
from harmcone.liouville import (NotApplicable, corollary_dimension_threshold,
                                growth_rate_coefficient, liouville_verdict, min_growth_exponent,
                                minimal_dimension, riccati_bound_coefficient,
                                riccati_coefficient_a, slp_dimension, verify_riccati_lower_bound,
                                verify_sqrt_inequality)
from harmcone.modes import fit_growth, integrate_mode
from harmcone.warp import get_warp, warp_from_expr

LAMS = (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)


def test_printed_coefficient_value():
    assert riccati_coefficient_a(3, 1.0, math.sqrt(2)) == pytest.approx(math.sqrt(2), rel=1e-14)


@pytest.mark.parametrize("n, beta", [(3, 1.0), (7, 1.0), (7, 2.0), (10, 0.5)])
def test_printed_coefficient_increasing(n, beta):
    vals = [riccati_coefficient_a(n, beta, lam) for lam in LAMS]
    assert all(b > a for a, b in zip(vals, vals[1:]))


def test_printed_coefficient_vanishes_at_zero():
    assert riccati_coefficient_a(10, 1.0, 1e-6) < 1e-15


@pytest.mark.parametrize("n, beta", [(3, 1.0), (5, 2.0), (9, 0.5)])
@pytest.mark.parametrize("lam", LAMS)
def test_bound_coefficient_solves_quadratic(n, beta, lam):
    k = riccati_bound_coefficient(n, beta, lam)
    assert lam ** 2 * k ** 2 + beta * (n - 2) * k == pytest.approx(1.0, rel=1e-13)
    assert growth_rate_coefficient(n, beta, lam) == pytest.approx(lam ** 2 * k, rel=1e-13)


def test_growth_rate_tends_to_lambda():
    assert growth_rate_coefficient(3, 1e-8, 2.0) == pytest.approx(2.0, rel=1e-6)


def test_coefficients_need_three_dimensions():
    with pytest.raises(NotApplicable):
        riccati_bound_coefficient(2, 1.0, 1.0)


@pytest.mark.parametrize("beta, threshold, n_min", [
    (1.0, 4 + 2 * math.sqrt(2), 7),
    (0.5, 10 + 4 * math.sqrt(5), 19),
])
def test_dimension_threshold(beta, threshold, n_min):
    assert corollary_dimension_threshold(beta) == pytest.approx(threshold, abs=1e-12)
    assert minimal_dimension(beta) == n_min


def test_dimension_threshold_large_beta():
    assert 2.0 < corollary_dimension_threshold(1e4) < 2.001


def test_min_growth_exponent():
    assert min_growth_exponent(7, 1.0) == pytest.approx(6 / (5 * math.sqrt(2)))
    assert min_growth_exponent(7, 2.0) == pytest.approx(6 / (20 * math.sqrt(2)))
    assert min_growth_exponent(10 ** 6, 1.0) == pytest.approx(1 / math.sqrt(2), rel=1e-5)
    with pytest.raises(NotApplicable):
        min_growth_exponent(6, 1.0)


def test_riccati_bound_flat_cone():
    c = ConeSpec(3, get_warp("euclidean"))
    # the bound coefficient is sharp on the flat cone; the printed one is not a lower bound
    assert verify_riccati_lower_bound(c, 1, 100.0) >= -1e-9
    assert verify_riccati_lower_bound(c, 1, 100.0, coefficient="printed") < -1.0


@pytest.mark.parametrize("name, n, m_max", [("half_sin", 3, 10), ("power_beta(0.5)", 4, 5)])
def test_riccati_bound_examples(name, n, m_max):
    assert verify_riccati_lower_bound(ConeSpec(n, get_warp(name)), m_max, 100.0) >= -1e-9


def test_riccati_bound_needs_beta():
    with pytest.raises(NotApplicable):
        verify_riccati_lower_bound(ConeSpec(3, get_warp("r_log_r")), 2)


def test_sqrt_inequality():
    assert verify_sqrt_inequality(10_000) <= 0.0
    assert math.sqrt(2) - 1 >= 1 / (2 * math.sqrt(2))
    with pytest.raises(ValueError):
        verify_sqrt_inequality(10)


def test_verdict_flat_plane():
    v = liouville_verdict(ConeSpec(2, get_warp("euclidean")), 1e4)
    assert v.integral_diverges and v.growth_class == "log"
    # A(r) = exp(log r) = r
    assert v.A_samples[-1] == pytest.approx(1e4, rel=1e-8)


def test_verdict_half_sine():
    v = liouville_verdict(ConeSpec(2, get_warp("half_sin")), 1e4)
    assert v.integral_diverges and v.growth_class == "log"
    # A(r) ~ r^2: slope of log A against log r over the last decade
    r, A = np.array(v.r_samples), np.array(v.A_samples)
    sel = r >= 1e3
    slope = np.polyfit(np.log(r[sel]), np.log(A[sel]), 1)[0]
    assert slope == pytest.approx(2.0, abs=0.01)


def test_verdict_convergent_integral():
    w = warp_from_expr("fast", "r + step(r; 1, 2) * (r^1.5 - r)")
    v = liouville_verdict(ConeSpec(2, w), 1e4)
    assert not v.integral_diverges and v.growth_class == "bounded"
    assert any("no Liouville certificate" in n for n in v.notes)


def test_verdict_r_log_r_loglog():
    v = liouville_verdict(ConeSpec(3, get_warp("r_log_r")), 1e5)
    assert v.growth_class == "loglog" and v.integral_diverges
    assert v.A_coefficient is None


def test_verdict_high_dimension_floor():
    v = liouville_verdict(ConeSpec(8, get_warp("half_sin")), 1e3)
    assert v.min_growth_poly == pytest.approx(min_growth_exponent(8, 1.0))
    assert v.A_coefficient == pytest.approx(growth_rate_coefficient(8, 1.0, math.sqrt(7)))


def test_slp_flat_counts():
    rep = slp_dimension(ConeSpec(3, get_warp("euclidean")), 1.0, 6, 1e3, (10, 1e3))
    assert rep.counted_dim == 4 and rep.verdict == "Finite"
    rep = slp_dimension(ConeSpec(2, get_warp("euclidean")), 2.5, 8, 1e3, (10, 1e3))
    assert rep.counted_dim == 5


@pytest.mark.parametrize("n", [8, 10])
def test_fitted_exponent_dominates_floor(n):
    mode = integrate_mode(ConeSpec(n, get_warp("half_sin")), 1, 1e4)
    fit = fit_growth(mode, (1e3, 1e4))
    assert fit.exponent >= min_growth_exponent(n, 1.0) - 0.02


def test_half_sine_three_dimensional_modes_outgrow_lambda():
    rep = slp_dimension(ConeSpec(3, get_warp("half_sin")), 1.0, 10, 1e4, (1e3, 1e4))
    exps = rep.exponents
    assert all(b > a for a, b in zip(exps, exps[1:]))
    c = min(e / math.sqrt(lam_sq) for (_, lam_sq, _, _), e in zip(rep.rows, exps))
    assert c > 0.5
    assert rep.verdict == "Finite"
