import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosebound import localization as loc
from bosebound import potentials as pot
from bosebound import scattering as sc
from bosebound.errors import RangeTooLarge


@pytest.fixture(scope="module")
def kern():
    return loc.LocalizationKernel(s=0.05)


@pytest.fixture(scope="module")
def fs05(kern):
    return loc.Fs_bound_check(0.05, kernel=kern)


@pytest.fixture(scope="module")
def window():
    v = pot.square_well(8.0, 1.0)
    sol = sc.scattering_solution(v)
    return v, sol


def test_profile_normalised_even_and_supported():
    prof = loc.default_profile()
    t = np.linspace(-0.6, 0.6, 241)
    assert np.allclose(prof.h(t), prof.h(-t))
    assert np.all(prof.h(t[np.abs(t) >= 0.5]) == 0)
    fine = np.linspace(-0.5, 0.5, 200001)
    assert np.trapezoid(prof.h(fine) ** 2, fine) == pytest.approx(1.0, rel=1e-8)


def test_chi_l2_norm_and_convolution_at_origin(kern):
    assert kern.chi_l2_norm2() == pytest.approx(1.0, abs=1e-12)
    assert float(kern.chi_conv_chi(0.0)) == pytest.approx(1.0, abs=1e-12)
    assert float(kern.chi_conv_chi(1.0)) == 0.0


def test_hat_table_matches_direct_sum():
    prof = loc.default_profile()
    q = np.linspace(0.0, 150.0, 997)
    assert np.allclose(prof.hat(q), prof._cos_sum(q, prof._w * prof._h), atol=1e-12)


def test_chi_hat_at_zero_below_one(kern):
    # Cauchy-Schwarz on the unit cube
    c0 = float(kern.chi_hat(np.zeros(3)))
    assert 0 < c0 < 1


@pytest.mark.parametrize("p, expected", [
    ((0.0, 0.0, 0.0), 1.0),
    ((2 * math.pi, 0.0, 0.0), 0.0),
    ((math.pi, 0.0, 0.0), 2 / math.pi),
    ((math.pi, math.pi, 0.0), 4 / math.pi ** 2),
])
def test_theta_hat_examples(p, expected):
    assert float(loc.theta_hat(np.array(p))) == pytest.approx(expected, abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-50, 50), min_size=3, max_size=3))
def test_quav_multiplier_in_unit_interval_and_beta_bound(p):
    p = np.array(p)
    m = float(loc.quav_multiplier(p))
    assert 0.0 <= m <= 1.0
    beta = 0.9753102948
    p2 = float(p @ p)
    if p2 > 0:
        assert m <= p2 / (beta * (p2 + beta)) * (1 + 1e-12)


def test_scaling_law(kern):
    p = np.array([[0.7, 0.1, -0.3], [3.0, 0.0, 0.0]])
    assert np.allclose(kern.F(p, ell=2.5), kern.F(2.5 * p, ell=1.0), rtol=1e-13, atol=1e-15)


def test_F_nonnegative_and_even(kern):
    p = np.array([[1.0, 2.0, 0.5], [10.0, 0.0, 0.0], [5.0, 5.0, 5.0]])
    F = kern.F(p)
    assert np.all(F >= -1e-8)
    assert np.allclose(kern.F(-p), F, rtol=1e-10, atol=1e-12)


def test_D_value(kern):
    D = kern.D
    assert 0.3 < D < 0.4
    dirs = loc.octant_directions(16)
    assert np.min(kern.chi_conv_chi(D * dirs)) >= 0.5 - 1e-10


def test_Fs_bound_passes_at_s_005(fs05):
    rep = fs05
    assert rep.passes and rep.C > 0 and rep.outer_min_margin >= 0


def test_parse_pgrid():
    assert loc.parse_pgrid("axis:5", 0.05).shape == (5, 3)
    assert loc.parse_pgrid("mixed:17", 0.05).shape == (17, 3)
    for bad in ("axis", "spiral:4", "axis:0"):
        with pytest.raises(ValueError):
            loc.parse_pgrid(bad, 0.05)


def test_window_sandwich_and_scaling(window):
    v, sol = window
    ex = []
    for ell in (50.0, 100.0):
        wp = loc.windowed_potential(v, sol, loc.LocalizationKernel(ell=ell))
        assert wp.sandwich_min() >= -1e-12
        assert np.all(wp.W1 >= sol.g - 1e-12)
        ex.append(wp.sandwich_excess())
    assert math.log2(ex[0] / ex[1]) == pytest.approx(2.0, abs=0.1)


def test_row_integral_near_window_free_value(window):
    v, sol = window
    wp = loc.windowed_potential(v, sol, loc.LocalizationKernel(ell=100.0))
    vals = wp.row_integral(np.array([[0.0, 0.0, 0.0], [30.0, 0.0, 0.0]]))
    chi0 = float(wp.kernel.chi(np.zeros(3)))
    assert vals[0] == pytest.approx(8 * math.pi * sol.a * chi0 ** 2, rel=1e-3)
    assert vals[1] < vals[0]


def test_range_too_large(window):
    v, sol = window
    with pytest.raises(RangeTooLarge):
        loc.windowed_potential(v, sol, loc.LocalizationKernel(ell=1.0))


def test_no_window_is_identity(window):
    v, sol = window
    wp = loc.windowed_potential(v, sol, None)
    assert not wp.window and wp.sandwich_excess() == 0.0
    assert np.allclose(wp.W1, sol.g_at(sol.grid.nodes))


def test_kernel_validation():
    for kw in ({"s": 0.0}, {"ell": -1.0}, {"K": 0.0}, {"C_kin": -1.0}):
        with pytest.raises(ValueError):
            loc.LocalizationKernel(**kw)


@pytest.mark.xfail(strict=True, reason="F grows like s^3.4 on the inner region, so the fitted C "
                                        "falls by about 5x when s is halved")
def test_fitted_C_stable_under_halving_s(fs05):
    c1 = fs05.C
    c2 = loc.Fs_bound_check(0.025).C
    assert abs(c2 / c1 - 1) <= 0.2
