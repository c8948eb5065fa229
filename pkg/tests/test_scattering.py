import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosebound import potentials as pot
from bosebound import scattering as sc
from bosebound.verify import random_piecewise, square_well_a


@pytest.mark.parametrize("V0, R", [(8.0, 1.0), (0.5, 2.0), (100.0, 0.5)])
def test_square_well_closed_form(V0, R):
    assert sc.scattering_length_ode(pot.square_well(V0, R)) == pytest.approx(square_well_a(V0, R), rel=1e-9)


def test_zero_potential():
    assert sc.scattering_length_ode(pot.zero()) == 0.0
    assert sc.scattering_length_variational(pot.zero()) == 0.0


def test_hard_core_equals_radius():
    assert sc.scattering_length_ode(pot.hard_core(1.3)) == pytest.approx(1.3, rel=1e-10)


def test_solvers_agree_on_random_potentials():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        v = random_piecewise(rng)
        a1 = sc.scattering_length_ode(v)
        a2 = sc.scattering_length_variational(v)
        assert a2 == pytest.approx(a1, rel=1e-6)


def test_variational_rejects_small_outer_radius():
    with pytest.raises(ValueError):
        sc.scattering_length_variational(pot.square_well(1.0, 1.0), 0.5)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 50.0), st.floats(0.1, 50.0), st.floats(0.3, 2.0))
def test_monotone_in_potential(V1, V2, R):
    lo, hi = sorted((V1, V2))
    a_lo = sc.scattering_length_ode(pot.square_well(lo, R))
    a_hi = sc.scattering_length_ode(pot.square_well(hi, R))
    assert a_lo <= a_hi * (1 + 1e-10)
    assert 0 < a_hi <= R


def test_omega_pointwise_ordering():
    weak = sc.scattering_solution(pot.square_well(2.0, 1.0))
    strong = sc.scattering_solution(pot.square_well(20.0, 1.0))
    r = np.linspace(0.01, 3.0, 300)
    assert np.all(weak.omega_at(r) <= strong.omega_at(r) + 1e-12)
    assert np.all((strong.omega_at(r) >= 0) & (strong.omega_at(r) <= 1))


def test_exterior_law():
    sol = sc.scattering_solution(pot.square_well(8.0, 1.0))
    r = np.linspace(1.0, 4.0, 50)
    assert np.allclose(sol.omega_at(r) * r, sol.a, rtol=1e-9)


def test_integral_identity_and_fourier_relation():
    sol = sc.scattering_solution(pot.square_well(8.0, 1.0))
    assert sol.integral("g") == pytest.approx(8 * math.pi * sol.a, rel=1e-8)
    k = sc.identity_k_grid(sol.R)
    g0 = sc.fourier(sol, "g", 0.0)
    assert g0 == pytest.approx(8 * math.pi * sol.a, rel=1e-8)
    gap = np.abs(2 * k * k * sc.fourier(sol, "omega", k) - sc.fourier(sol, "g", k))
    assert gap.max() <= 1e-6 * g0


def test_g_omega_bounded_by_g():
    sol = sc.scattering_solution(pot.square_well(8.0, 1.0))
    assert 0 < sol.integral("g_omega") < sol.integral("g")


def test_truncation_sequence_increases():
    seq = sc.truncation_limit(pot.hard_core(1.0), [8, 128, 2048])
    assert seq[0] < seq[1] < seq[2] < 1.0
    with pytest.raises(ValueError):
        sc.truncation_limit(pot.hard_core(1.0), [8, 4])


def test_additivity_split_at_ends():
    v = pot.piecewise_constant([0.5, 1.0], [10.0, 3.0])
    for R_split in (0.0, 0.5, 1.0):
        assert sc.additivity_check(v, R_split).holds


def test_omega_nonincreasing_and_a_bounds():
    v = pot.piecewise_constant([0.4, 1.0], [30.0, 2.0])
    sol = sc.scattering_solution(v)
    r = np.linspace(0.0, 3.0, 600)
    assert np.all(np.diff(sol.omega_at(r)) <= 1e-12)
    assert sol.a <= v.range
    assert sol.a <= pot.l1_norm(v) / (8 * math.pi)


def test_fourier_transform_peaks_at_origin():
    sol = sc.scattering_solution(pot.square_well(8.0, 1.0))
    k = np.linspace(0.0, 40.0, 400)
    g = sc.fourier(sol, "g", k)
    assert np.all(np.abs(g) <= g[0] * (1 + 1e-12))
