import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosebound import bogoliubov as bog
from bosebound import localization as loc
from bosebound import potentials as pot
from bosebound import scattering as sc
from bosebound.errors import InvalidCoefficients, TruncationNotConverged


@pytest.mark.parametrize("A, B, kappa, expected", [
    (2.0, 1.0, 0.0, math.sqrt(3.0) - 2.0),
    (1.0, 0.0, 0.0, 0.0),
    (1.0, 0.0, 1.0, -2.0),
    (1.0, 1.0, 0.0, -1.0),
    (3.0, -1.0, 1j, math.sqrt(8.0) - 3.0 - 1.0),
])
def test_bound_examples(A, B, kappa, expected):
    assert bog.bog_bound(A, B, kappa) == pytest.approx(expected, abs=1e-14)


@pytest.mark.parametrize("A, B", [(0.0, 0.0), (-1.0, 0.0), (1.0, -1.0), (1.0, 1.5), (math.nan, 0.0)])
def test_invalid_coefficients(A, B):
    with pytest.raises(InvalidCoefficients):
        bog.bog_bound(A, B)
    with pytest.raises(InvalidCoefficients):
        bog.FockOracleSpec(A, B)


@pytest.mark.parametrize("A, B, kappa", [(2.0, 1.0, 0.0), (1.0, 0.0, 1.0), (1.0, 0.4, 0.3 + 0.4j)])
def test_oracle_examples(A, B, kappa):
    e = bog.fock_oracle(bog.FockOracleSpec(A, B, kappa, 40), check=False)
    assert e == pytest.approx(bog.bogoliubov_ground_energy(A, B, kappa), abs=1e-8)


def test_doubled_representation_matches_gauge():
    spec = bog.FockOracleSpec(1.5, 0.6, 0.2 - 0.5j, 16)
    a = bog.fock_oracle(spec, check=False)
    b = bog.fock_oracle(spec, check=False, doubled=True)
    assert a == pytest.approx(b, abs=1e-10)
    m = bog.fock_matrix(spec, doubled=True)
    assert np.array_equal(m, m.T)


def test_oracle_nonincreasing_and_geometric_in_truncation():
    A, B, kappa = 1.0, 0.6, 0.3
    e = [bog.fock_oracle(bog.FockOracleSpec(A, B, kappa, n), check=False) for n in (10, 20, 40)]
    assert e[0] >= e[1] >= e[2]
    exact = bog.bogoliubov_ground_energy(A, B, kappa)
    assert abs(e[1] - exact) < 0.1 * abs(e[0] - exact)


def test_oracle_check_flags_poor_truncation():
    with pytest.raises(TruncationNotConverged):
        bog.fock_oracle(bog.FockOracleSpec(1.0, 0.95, 0.0, 6))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.2, 5.0), st.floats(-0.9, 0.9), st.floats(-1, 1), st.floats(-1, 1))
def test_oracle_dominates_bound(A, r, kr, ki):
    B = r * A
    e = bog.fock_oracle(bog.FockOracleSpec(A, B, complex(kr, ki), 24), check=False)
    assert e >= bog.bog_bound(A, B, complex(kr, ki)) - 1e-6


@settings(max_examples=50, deadline=None)
@given(st.floats(1e-3, 1e3), st.floats(-0.999, 0.999))
def test_regularized_kernel_matches_direct_and_bounds(A, r):
    B = r * A
    reg = float(bog.regularized_kernel(A, B))
    direct = math.sqrt(A * A - B * B) - A + B * B / (2 * A)
    assert reg == pytest.approx(direct, rel=1e-6, abs=1e-12 * A)
    quartic = B ** 4 / A ** 3
    assert -0.5 * quartic * (1 + 1e-12) <= reg <= -0.125 * quartic * (1 - 1e-12) + 1e-300


def test_regularized_kernel_zero_cases():
    assert bog.regularized_kernel(1.0, 0.0) == 0.0
    assert bog.regularized_kernel(0.0, 0.0) == 0.0


@pytest.fixture(scope="module")
def window():
    v = pot.square_well(8.0, 1.0)
    sol = sc.scattering_solution(v)
    kern = loc.LocalizationKernel(ell=100.0)
    return sol, loc.windowed_potential(v, sol, kern)


def test_coefficients_and_regime(window):
    sol, wp = window
    rho_mu = (0.1 / 100.0) ** 2 / sol.a
    c = bog.bog_coefficients(wp, 20 * rho_mu, rho_mu)
    k = np.concatenate([[0.0], np.geomspace(1e-4, 1e2, 200)])
    assert np.all(c.A(k) > 0)
    assert np.max(c.ratio(k)) <= 0.5
    assert np.allclose(np.abs(c.B(k)) / c.A(k), c.ratio(k), rtol=1e-12)
    assert c.alpha == pytest.approx(16 * math.pi * 20 * rho_mu * sol.a + rho_mu * sol.a)


def test_tau_lower_bound(window):
    sol, wp = window
    c = bog.bog_coefficients(wp, 1e-6, 1e-6)
    k = np.linspace(0.0, 10.0, 1001)
    assert bog.tau_lower_bound_holds(c, k)
    c0 = bog.bog_coefficients(wp, 1e-6, 1e-6, C_kin=0.0)
    assert np.array_equal(c0.tau(k), k * k)


def test_empty_box_has_no_bogoliubov_energy(window):
    sol, wp = window
    c = bog.bog_coefficients(wp, 0.0, 1e-6)
    assert np.all(c.A(np.linspace(0, 1, 5)) == 0)
    assert bog.bog_integral(c).total == 0.0


def test_full_integral_is_negative_and_split_consistent(window):
    sol, wp = window
    rho = 1e-6 / sol.a ** 3
    c = bog.bog_coefficients(wp, rho, rho)
    res = bog.bog_integral(c)
    assert res.regularized < 0 and res.second_born < 0
    assert res.total == pytest.approx(res.regularized + res.second_born)
    assert res.error < 1e-6 * abs(res.total)


def test_second_born_parseval_without_window(window):
    sol, _ = window
    res = bog.second_born_integral(loc.windowed_potential(sol.potential, sol, None))
    assert abs(res.difference) <= max(10 * res.error, 1e-9 * res.reference)


def test_lhy_integrand_and_coefficient():
    t = np.array([1e-3, 0.1, 1.0, 10.0])
    direct = (np.sqrt(t ** 4 + 2 * t ** 2) - t ** 2 - 1 + 1 / (2 * t ** 2)) * t ** 2
    assert np.allclose(bog.lhy_integrand(t), direct, rtol=1e-6)
    assert float(bog.lhy_integrand(0.0)) == 0.5
    r = bog.lhy_coefficient()
    assert r.J == pytest.approx(r.J_alt, rel=1e-11)
    assert r.coefficient == pytest.approx(128 / (15 * math.sqrt(math.pi)), rel=1e-10)
