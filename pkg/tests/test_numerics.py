import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bosebound import numerics as nm
from bosebound import potentials as pot
from bosebound.errors import InvalidInterval, NotSymmetric


def test_gauss_kronrod_polynomial_exact():
    res = nm.integrate_adaptive(lambda x: x ** 5 - 3 * x ** 2, 0.0, 2.0)
    assert res.value == pytest.approx(64 / 6 - 8, rel=1e-13)


@pytest.mark.parametrize("mapping", ["rational", "tangent"])
def test_semi_infinite_algebraic_tail(mapping):
    res = nm.integrate_adaptive(lambda x: 1.0 / (1.0 + x * x), 0.0, math.inf,
                                decay=2.0, mapping=mapping)
    assert res.value == pytest.approx(math.pi / 2, rel=1e-9)


def test_breakpoints_handle_jump():
    f = lambda x: np.where(x < 0.3, 1.0, 2.0)
    res = nm.integrate_adaptive(f, 0.0, 1.0, points=[0.3])
    assert res.value == pytest.approx(0.3 + 1.4, rel=1e-12)


def test_empty_interval_rejected():
    with pytest.raises((InvalidInterval, ValueError)):
        nm.integrate_adaptive(np.sin, 1.0, 0.0)


@settings(max_examples=25, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0.1, 4.0))
def test_quadrature_linear_in_integrand(c1, c2, b):
    f, g = np.cos, lambda x: np.exp(-x)
    lhs = nm.integrate_adaptive(lambda x: c1 * f(x) + c2 * g(x), 0.0, b).value
    rhs = c1 * nm.integrate_adaptive(f, 0.0, b).value + c2 * nm.integrate_adaptive(g, 0.0, b).value
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-11)


def test_tolerance_validation():
    with pytest.raises(ValueError):
        nm.Tolerance(rel=0.0)
    with pytest.raises(ValueError):
        nm.Tolerance(abs=-1.0)


def test_ode_zero_potential_gives_linear_u():
    sol = nm.solve_radial_ode(pot.square_well(1e-300, 1.0), np.linspace(0.0, 2.0, 5))
    r = np.linspace(0.1, 2.0, 7)
    u = sol.u_at(r)
    assert np.allclose(u / u[-1], r / r[-1], rtol=1e-10)


def test_ode_satisfies_equation():
    v = pot.square_well(8.0, 1.0)
    sol = nm.solve_radial_ode(v, np.linspace(0.0, 1.0, 11))
    h = 1e-3
    for r in (0.2, 0.5, 0.8):
        u0, up, um = sol.u_at(np.array([r, r + h, r - h]))
        second = (up - 2 * u0 + um) / h ** 2
        assert second == pytest.approx(0.5 * 8.0 * u0, rel=1e-5)


def test_ode_scattering_length_error_estimate_small():
    a, err = nm.ode_scattering_length(pot.square_well(8.0, 1.0))
    assert err <= 1e-8 * a


def test_variational_raw_minima_decrease_and_extrapolate():
    v = pot.square_well(8.0, 1.0)
    m, err, raw = nm.variational_minimum(v, 2.0)
    assert all(b <= a * (1 + 1e-14) for a, b in zip(raw, raw[1:]))
    assert m <= raw[-1] * (1 + 1e-12)
    a = m / (4 * math.pi + m / 2.0)
    assert a == pytest.approx(nm.ode_scattering_length(v)[0], rel=1e-8)


@pytest.mark.parametrize("matrix, expected", [
    (np.eye(3), 1.0),
    (np.diag([3.0, -1.0, 2.0]), -1.0),
    (np.array([[0.0, 1.0], [1.0, 0.0]]), -1.0),
])
def test_min_eigen_examples(matrix, expected):
    lam, x = nm.min_eigen_sym(matrix)
    assert lam == pytest.approx(expected, abs=1e-14)
    assert np.allclose(matrix @ x, lam * x, atol=1e-12)


def test_min_eigen_rejects_asymmetric():
    with pytest.raises(NotSymmetric):
        nm.min_eigen_sym(np.array([[0.0, 1.0], [0.0, 0.0]]))


@pytest.mark.parametrize("n, bw", [(200, 3), (500, 10), (40, 39)])
def test_min_eigen_matches_dense(n, bw):
    rng = np.random.default_rng(n)
    m = rng.standard_normal((n, n))
    m = np.triu(np.tril(m + m.T, bw), -bw)
    lam, x = nm.min_eigen_sym(m)
    assert lam == pytest.approx(np.linalg.eigvalsh(m)[0], abs=1e-10)
    assert np.linalg.norm(m @ x - lam * x) <= 1e-9 * np.abs(m).max()
