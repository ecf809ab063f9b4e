"""Quadrature and ODE primitives against closed forms and scipy."""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.integrate import quad, solve_ivp

from harmcone.ode import StepSizeError, dopri45
from harmcone.quadrature import QuadratureError, cumulative, simpson, simpson_log


def test_simpson_polynomial_exact():
    assert simpson(lambda x: x ** 3 - 2 * x, 0.0, 2.0) == pytest.approx(0.0, abs=1e-14)


def test_simpson_oscillatory_against_scipy():
    f = lambda x: abs(math.sin(x))
    ref = quad(f, 0, 100, limit=500, points=[k * math.pi for k in range(1, 32)])[0]
    assert simpson(f, 0.0, 100.0, 1e-10) == pytest.approx(ref, rel=1e-9)


def test_simpson_endpoint_singularity():
    assert simpson(math.sqrt, 0.0, 1.0, 1e-10) == pytest.approx(2 / 3, abs=1e-9)


def test_simpson_reversed_and_empty():
    assert simpson(math.exp, 1.0, 0.0) == pytest.approx(-(math.e - 1))
    assert simpson(math.exp, 2.0, 2.0) == 0.0


def test_simpson_reports_nonconvergence():
    with pytest.raises(QuadratureError):
        simpson(lambda x: 1 / x if x else math.inf, 0.0, 1.0, 1e-10, max_depth=12)


def test_simpson_log_many_decades():
    assert simpson_log(lambda r: 1 / r, 1.0, 1e6) == pytest.approx(math.log(1e6), rel=1e-11)
    with pytest.raises(ValueError):
        simpson_log(lambda r: r, 0.0, 1.0)


def test_cumulative_matches_antiderivative():
    pts = [1.0, 2.0, 5.0, 10.0]
    got = cumulative(lambda r: 1 / r, pts, log=True, start=1.0)
    assert got == pytest.approx([math.log(p) for p in pts], rel=1e-10, abs=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.floats(-3, 3), st.floats(0.1, 5), st.floats(0.5, 4))
def test_simpson_agrees_with_scipy(a, width, k):
    f = lambda x: math.exp(-x * x) * math.cos(k * x)
    b = a + width
    assert simpson(f, a, b, 1e-11) == pytest.approx(quad(f, a, b, epsabs=1e-13)[0], abs=1e-9)


def test_dopri_exponential():
    ts = [0.5, 1.0, 2.0]
    out = dopri45(lambda t, y: [y[0]], 0.0, [1.0], ts)
    assert [o[0] for o in out] == pytest.approx([math.exp(t) for t in ts], rel=1e-9)


def test_dopri_oscillator_against_solve_ivp():
    fun = lambda t, y: [y[1], -y[0] - 0.1 * y[1]]
    ts = np.linspace(0, 20, 9)[1:]
    ours = np.array(dopri45(fun, 0.0, [1.0, 0.0], ts))
    ref = solve_ivp(fun, (0, 20), [1.0, 0.0], t_eval=ts, rtol=1e-12, atol=1e-14, method="DOP853")
    assert np.max(np.abs(ours - ref.y.T)) < 1e-8


def test_dopri_output_at_start_and_repeats():
    out = dopri45(lambda t, y: [1.0], 0.0, [0.0], [0.0, 1.0, 1.0])
    assert [o[0] for o in out] == pytest.approx([0.0, 1.0, 1.0])


def test_dopri_check_can_abort():
    def check(t, y):
        if y[0] > 2:
            raise RuntimeError("stop")

    with pytest.raises(RuntimeError):
        dopri45(lambda t, y: [y[0]], 0.0, [1.0], [5.0], check=check)


def test_dopri_step_underflow():
    # blow-up in finite time at t = 1
    with pytest.raises(StepSizeError):
        dopri45(lambda t, y: [y[0] ** 2], 0.0, [1.0], [2.0], h_min=1e-10)
