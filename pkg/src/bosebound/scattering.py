"""Scattering length, scattering solution and their radial Fourier transforms.

Conventions: phi = 1 - omega solves -Lap(phi) + v phi / 2 = 0 with
phi -> 1 at infinity, so omega = a / r outside the range R and
g = v (1 - omega) integrates to 8 pi a. With u = r phi normalised so that
u(r) = r - a beyond R, the profiles are omega = 1 - u / r and g = v u / r.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import numerics as nm
from .errors import HardCoreUnsupported
from .potentials import RadialPotential, split_range, truncate

_GL_CACHE: dict = {}


def _gauss_legendre(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


# ---------------------------------------------------------------------------
# Scattering length
# ---------------------------------------------------------------------------


def scattering_length_ode(v: RadialPotential, tol: nm.Tolerance | None = None) -> float:
    """Scattering length from the zero-energy radial equation.

    Uses the log-derivative at the range, a = R - u(R)/u'(R); a hard core
    enters as the boundary condition u(r_core) = 0.
    """
    return nm.ode_scattering_length(v, tol)[0]


def scattering_length_variational(v: RadialPotential, R_tilde: float | None = None,
                                  resolution: int = 200,
                                  tol: nm.Tolerance | None = None) -> float:
    """Scattering length from the discretised variational problem.

    Minimises 4 pi int (phi'^2 + v phi^2 / 2) r^2 dr over radial phi with
    phi(R_tilde) = 1 (and phi = 0 on the core), then inverts
    m = 4 pi a / (1 - a / R_tilde). ``R_tilde`` defaults to 2 R.
    """
    R = v.range
    if R == 0:
        return 0.0
    if R_tilde is None:
        R_tilde = 2.0 * R
    if not R_tilde > R:
        raise ValueError("R_tilde must exceed the range %g" % R)
    m, _, _ = nm.variational_minimum(v, float(R_tilde), resolution, tol)
    return m / (4.0 * math.pi + m / R_tilde)


# ---------------------------------------------------------------------------
# Scattering solution
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class FourierProfile:
    """Radial Fourier transform f^(k) = (4 pi / k) int r f(r) sin(kr) dr."""

    evaluator: Callable
    value_at_zero: float

    def __call__(self, k):
        return self.evaluator(k)


@dataclass(frozen=True)
class ScatteringSolution:
    """Scattering length with omega and g sampled on a radial grid."""

    a: float
    grid: nm.RadialGrid
    omega: np.ndarray
    g: np.ndarray
    g_omega_integral: float
    R: float
    potential: RadialPotential = field(repr=False)
    ode: nm.RadialODESolution = field(repr=False)
    a_error: float = 0.0
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    # -- dense evaluators ------------------------------------------------
    def u(self, r):
        return self.ode.u_at(r)

    def omega_at(self, r):
        r = np.asarray(r, dtype=float)
        safe = np.where(r > 0, r, 1.0)
        return np.where(r > 0, 1.0 - self.u(r) / safe, 1.0 - self.ode.du_dense[0])

    def g_at(self, r):
        r = np.asarray(r, dtype=float)
        return self.potential(r) * (1.0 - self.omega_at(r))

    # -- piecewise Gauss-Legendre panels on [0, R] ----------------------
    def _panels(self, order: int = 10):
        """Gauss-Legendre nodes and weights on every ODE step inside [0, R]."""
        rd = self.ode.r_dense
        rd = rd[rd <= self.R + 1e-15 * self.R]
        if rd.size < 2:
            return np.zeros(0), np.zeros(0)
        lo, hi = rd[:-1], rd[1:]
        h = hi - lo
        x, w = _gauss_legendre(order)
        nodes = 0.5 * (lo + hi)[:, None] + 0.5 * h[:, None] * x[None, :]
        weights = 0.5 * h[:, None] * w[None, :]
        return nodes.ravel(), weights.ravel()

    def integral(self, which: str) -> float:
        """4 pi int f r^2 dr for f in {g, g_omega, v_u}."""
        r, w = self._panels()
        return 4.0 * math.pi * float(np.sum(w * r * r * self._profile(which, r)))

    def _profile(self, which, r):
        u = self.u(r)
        vv = self.potential(r)
        if which == "g":
            return vv * u / r
        if which in ("g_omega", "gomega", "gω"):
            return vv * (u / r) * (1.0 - u / r)
        if which == "omega_inner":
            return 1.0 - u / r
        raise ValueError("unknown profile %r" % which)

    def fourier(self, which: str, k) -> np.ndarray:
        return fourier(self, which, k)


def _default_grid(R):
    return nm.RadialGrid(np.concatenate([np.linspace(0.0, R, 201), np.linspace(R, 4 * R, 151)[1:]]))


def scattering_solution(v: RadialPotential, grid: nm.RadialGrid | Sequence[float] | None = None,
                        tol: nm.Tolerance | None = None) -> ScatteringSolution:
    """Scattering solution omega and g = v (1 - omega) of a potential without a hard core.

    Raises:
        HardCoreUnsupported: for potentials with a hard core; truncate first.
    """
    if v.has_core:
        raise HardCoreUnsupported(
            "profiles of hard-core potentials are reached through truncate(v, n), n -> inf")
    tol = tol or nm.Tolerance(rel=1e-11, abs=0.0)
    R = v.range
    if grid is None:
        grid = _default_grid(R if R > 0 else 1.0)
    elif not isinstance(grid, nm.RadialGrid):
        grid = nm.RadialGrid(grid)
    if R > 0 and grid.nodes[-1] < R:
        raise ValueError("grid must extend to the range R=%g" % R)
    if R == 0:
        ode = nm.solve_radial_ode(v, grid, tol)
        zeros = np.zeros_like(grid.nodes)
        return ScatteringSolution(0.0, grid, zeros, zeros.copy(), 0.0, 0.0, v, ode, 0.0)
    ode = nm.solve_radial_ode(v, grid, tol)
    r = grid.nodes
    safe = np.where(r > 0, r, 1.0)
    ratio = np.where(r > 0, ode.u / safe, ode.du_dense[0])
    omega = 1.0 - ratio
    g = v(r) * ratio
    sol = ScatteringSolution(ode.a, grid, omega, g, 0.0, R, v, ode, ode.error)
    object.__setattr__(sol, "g_omega_integral", sol.integral("g_omega"))
    return sol


# ---------------------------------------------------------------------------
# Fourier transforms
# ---------------------------------------------------------------------------


_PANEL_ORDERS = (10, 16, 24, 40, 64, 100, 160, 256, 400)


def _weighted_samples(sol, which, n, weight, tag):
    """Panel nodes r and values w * r * f(r) * weight(r), cached per solution."""
    cache = sol._cache
    key = (which, n, tag)
    if key not in cache:
        r, w = sol._panels(order=n)
        f = w * r * sol._profile(which, r)
        if weight is not None:
            f = f * weight(r)
        cache[key] = (r, f)
    return cache[key]


def _radial_transform(sol, which: str, k, weight=None, tag=None) -> np.ndarray:
    """(4 pi / k) int_0^R r f(r) w(r) sin(kr) dr, with the k -> 0 limit 4 pi int f w r^2.

    ``weight`` optionally multiplies the profile; ``tag`` identifies it for
    caching of the panel samples.
    """
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if sol.R == 0:
        return np.zeros_like(k)
    if weight is not None and tag is None:
        tag = id(weight)
    h_max = float(np.max(np.diff(sol.ode.r_dense)))
    out = np.empty_like(k)
    small = k * sol.R < 1e-4
    big_idx = np.flatnonzero(~small)
    if big_idx.size:
        need = 0.6 * k[big_idx] * h_max + 10
        orders = np.array([next((o for o in _PANEL_ORDERS if o >= nd), None) or int(nd) + 1
                           for nd in need])
        for n in np.unique(orders):
            sel = big_idx[orders == n]
            r, f = _weighted_samples(sol, which, int(n), weight, tag)
            for start in range(0, sel.size, 64):
                idx = sel[start:start + 64]
                kk = k[idx]
                out[idx] = 4.0 * math.pi * (np.sin(np.outer(kk, r)) @ f) / kk
    if np.any(small):
        # sin(kr)/k = r (1 - (kr)^2/6 + (kr)^4/120)
        r, f = _weighted_samples(sol, which, 10, weight, tag)
        kk = k[small]
        r2 = r * r
        m0 = float(np.sum(f * r))
        m2 = float(np.sum(f * r * r2))
        m4 = float(np.sum(f * r * r2 * r2))
        out[small] = 4.0 * math.pi * (m0 - kk ** 2 * m2 / 6.0 + kk ** 4 * m4 / 120.0)
    return out


def fourier(sol: ScatteringSolution, which: str, k):
    """Radial Fourier transform of ``g``, ``g_omega`` or ``omega`` at k.

    ``omega`` (not integrable) is transformed with its exterior tail a/r
    handled in closed form: the contribution of r > R is 4 pi a cos(kR) / k^2.
    """
    scalar = np.ndim(k) == 0
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if np.any(k < 0):
        raise ValueError("k must be nonnegative")
    if which in ("g", "g_omega", "gomega", "gω"):
        out = _radial_transform(sol, "g" if which == "g" else "g_omega", k)
    elif which == "omega":
        if np.any(k == 0):
            raise ValueError("omega^ is singular at k = 0")
        inner = _radial_transform(sol, "omega_inner", k)
        out = inner + 4.0 * math.pi * sol.a * np.cos(k * sol.R) / k ** 2
    else:
        raise ValueError("unknown profile %r" % which)
    return float(out[0]) if scalar else out


def fourier_profile(sol: ScatteringSolution, which: str = "g") -> FourierProfile:
    return FourierProfile(lambda k: fourier(sol, which, k), float(fourier(sol, which, 0.0)))


def identity_k_grid(R: float, n: int = 32) -> np.ndarray:
    return np.geomspace(1e-2 / R, 1e2 / R, n)


# ---------------------------------------------------------------------------
# Truncation and additivity
# ---------------------------------------------------------------------------


def truncation_limit(v: RadialPotential, levels: Sequence[float],
                     tol: nm.Tolerance | None = None) -> list:
    """Scattering lengths of min(v, n) along increasing levels n."""
    levels = [float(n) for n in levels]
    if any(b <= a for a, b in zip(levels, levels[1:])):
        raise ValueError("levels must be strictly increasing")
    return [scattering_length_ode(truncate(v, n), tol) for n in levels]


@dataclass(frozen=True)
class AdditivityResult:
    a: float
    a_leq: float
    a_gt: float
    holds: bool
    slack: float

    def __iter__(self):
        return iter((self.a, self.a_leq, self.a_gt, self.holds))


def additivity_check(v: RadialPotential, R_split: float,
                     tol: nm.Tolerance | None = None) -> AdditivityResult:
    """max(a_leq, a_gt) <= a(v) <= a_leq + a_gt for the split at ``R_split``."""
    tol = tol or nm.Tolerance(rel=1e-11, abs=0.0)
    v_leq, v_gt = split_range(v, R_split)
    a = scattering_length_ode(v, tol)
    a_leq = scattering_length_ode(v_leq, tol)
    a_gt = scattering_length_ode(v_gt, tol)
    slack = 1e-9 * max(a, 1e-300)
    holds = (max(a_leq, a_gt) <= a + slack) and (a <= a_leq + a_gt + slack)
    return AdditivityResult(a, a_leq, a_gt, bool(holds), slack)
