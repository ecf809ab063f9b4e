import math

import pytest

from harmcone.geometry import (ConeSpec, ball_volume, doubling_ratios, radial_curvature,
                               sphere_eigendata, sphere_volume, total_curvature_2d)
from harmcone.warp import builtin_catalog, get_warp, power_beta, warp_from_expr

flat = get_warp("euclidean")


@pytest.mark.parametrize("n, m, expected", [(3, 1, (2, 3)), (2, 4, (16, 2)), (4, 2, (8, 9)),
                                            (2, 0, (0, 1)), (3, 2, (6, 5))])
def test_sphere_eigendata(n, m, expected):
    assert sphere_eigendata(n, m) == expected


def test_sphere_volume():
    assert sphere_volume(1) == pytest.approx(2 * math.pi)
    assert sphere_volume(2) == pytest.approx(4 * math.pi)


def test_custom_link():
    c = ConeSpec(3, flat, link=((1.5, 2), (4.0, 1)), link_volume=3.0)
    assert c.eigendata(2) == (4.0, 1)
    assert c.max_mode == 2
    with pytest.raises(IndexError):
        c.eigendata(3)
    with pytest.raises(ValueError):
        ConeSpec(3, flat, link=((2.0, 1), (1.0, 1)), link_volume=1.0)
    with pytest.raises(ValueError):
        ConeSpec(3, flat, link=((1.0, 1),))


def test_radial_curvature_examples():
    assert radial_curvature(flat, 7.0) == 0.0
    assert radial_curvature(get_warp("half_sin"), math.pi / 2) == pytest.approx(1 / (math.pi / 2 + 1))
    assert radial_curvature(warp_from_expr("sinh", "sinh(r)"), 1.0) == pytest.approx(-1.0)


@pytest.mark.parametrize("b0", [0.25, 0.5, 0.75])
def test_power_beta_concave_tail(b0):
    w = power_beta(b0)
    assert all(radial_curvature(w, r) >= 0 for r in (2.0, 3.0, 10.0, 1e3))


def test_ball_volume_flat():
    assert ball_volume(ConeSpec(2, flat), 1.0) == pytest.approx(math.pi, rel=1e-12)
    assert ball_volume(ConeSpec(3, flat), 1.0) == pytest.approx(4 * math.pi / 3, rel=1e-12)


@pytest.mark.parametrize("n", [2, 3, 4, 7])
@pytest.mark.parametrize("R", [1.0, 5.0, 25.0])
def test_flat_volume_scaling(n, R):
    c = ConeSpec(n, flat)
    assert ball_volume(c, 2 * R) / ball_volume(c, R) == pytest.approx(2 ** n, rel=1e-9)


@pytest.mark.parametrize("w", builtin_catalog(), ids=lambda w: w.name)
def test_volume_increasing(w):
    c = ConeSpec(3, w)
    vols = [ball_volume(c, R) for R in (0.5, 1.0, 2.0, 4.0, 8.0, 16.0)]
    assert all(b > a for a, b in zip(vols, vols[1:]))


def test_bump_volume_lower_bound():
    vol = ball_volume(ConeSpec(2, get_warp("bump_counterexample")), 12.0)
    assert vol >= 2 * math.pi * (math.exp(6) - math.exp(5))


def test_doubling_verdicts():
    rep = doubling_ratios(ConeSpec(3, flat), [1.0, 4.0, 9.0])
    assert rep.verdict == "Bounded"
    assert rep.ratios == pytest.approx([8.0] * 3, rel=1e-9)
    assert doubling_ratios(ConeSpec(2, get_warp("half_sin")), [10, 20, 40, 80]).verdict == "Bounded"
    bump = doubling_ratios(ConeSpec(2, get_warp("bump_counterexample")), [6.0, 12.0, 18.0])
    assert bump.verdict == "Unbounded"
    for k, ratio in zip((1, 2, 3), bump.ratios):
        assert ratio >= math.exp(6 * k - 7) * (math.e - 1)


def test_doubling_rejects_bad_lists():
    with pytest.raises(ValueError):
        doubling_ratios(ConeSpec(2, flat), [])
    with pytest.raises(ValueError):
        doubling_ratios(ConeSpec(2, flat), [2.0, 1.0])


def test_total_curvature():
    tc = total_curvature_2d(flat, 50.0)
    assert tc.value == 0.0 and not tc.diverges
    tc = total_curvature_2d(get_warp("half_sin"), 200.0)
    assert tc.diverges
    # (1/2) integral |sin| over [0, 200] times 2 pi
    assert tc.value == pytest.approx(math.pi * (2 * 63 + 1 - math.cos(200 - 63 * math.pi)), rel=1e-8)
    tc = total_curvature_2d(warp_from_expr("tanh", "tanh(r)"), 50.0)
    assert tc.value == pytest.approx(2 * math.pi, rel=1e-8)
    assert not tc.diverges
