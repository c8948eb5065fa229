"""Quadratic-Hamiltonian layer: Bogoliubov coefficients, bounds and integrals.

Coefficients in a box of side ell holding n = rho ell^3 particles:

    tau(k) = (k^2 - C_kin ell^-2)_+,
    A(k)   = (tau(k) + 16 pi rho a + rho_mu a) / n,
    B(k)   = W1^(k) / ell^3.

Radial k-integrals use d^3k = 4 pi k^2 dk. Transforms of profiles with jump
discontinuities decay like k^-2; the part of an integral beyond the
quadrature cutoff is added from that asymptotic form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import numerics as nm
from .errors import InvalidCoefficients, TruncationNotConverged

TWO_PI_CUBED = (2.0 * math.pi) ** 3
K_CUTOFF_FACTOR = 2000.0


# ---------------------------------------------------------------------------
# Two-mode bound and its exact-diagonalisation oracle
# ---------------------------------------------------------------------------


def _check_AB(A: float, B: float) -> None:
    if not (np.isfinite(A) and np.isfinite(B)) or not A > 0 or not -A < B <= A:
        raise InvalidCoefficients("need A > 0 and -A < B <= A, got A=%r, B=%r" % (A, B))


def bog_bound(A: float, B: float, kappa: complex = 0.0, commutator_sum: float = 2.0) -> float:
    """Lower bound -(A - sqrt(A^2 - B^2)) c / 2 - 2 |kappa|^2 / (A + B).

    ``commutator_sum`` is the value c of [b+, b+*] + [b-, b-*].

    Raises:
        InvalidCoefficients: unless A > 0 and -A < B <= A.
    """
    _check_AB(A, B)
    if commutator_sum < 0:
        raise InvalidCoefficients("commutator sum must be nonnegative")
    return (-0.5 * (A - math.sqrt(A * A - B * B)) * commutator_sum
            - 2.0 * abs(kappa) ** 2 / (A + B))


@dataclass(frozen=True)
class FockOracleSpec:
    """Two-mode Hamiltonian A (N+ + N-) + B (b+* b-* + b+ b-) + kappa (b+* + b-) + h.c."""

    A: float
    B: float
    kappa: complex = 0.0
    n_max: int = 40

    def __post_init__(self):
        _check_AB(self.A, self.B)
        if int(self.n_max) != self.n_max or self.n_max < 2:
            raise ValueError("n_max must be an integer >= 2")


def _ladder(n_max: int) -> np.ndarray:
    """Annihilation operator on span{|0>, ..., |n_max>}."""
    return np.diag(np.sqrt(np.arange(1.0, n_max + 1.0)), 1)


def fock_matrix(spec: FockOracleSpec, doubled: bool = False) -> np.ndarray:
    """Real symmetric matrix of the truncated two-mode Hamiltonian.

    By default the phase of kappa is removed with the gauge rotation
    b+ -> e^{i phi} b+, b- -> e^{-i phi} b-, which leaves the A and B terms
    unchanged and makes the matrix real. ``doubled=True`` instead keeps the
    complex coupling and returns the real 2d x 2d representation
    [[Re H, -Im H], [Im H, Re H]], whose spectrum is that of H twice over.
    """
    n = spec.n_max
    b = _ladder(n)
    eye = np.eye(n + 1)
    bp = np.kron(b, eye)
    bm = np.kron(eye, b)
    num = np.diag(np.add.outer(np.arange(n + 1.0), np.arange(n + 1.0)).ravel())
    pair = np.kron(b.T, b.T)  # b+* b-*
    H = spec.A * num + spec.B * (pair + pair.T)
    x = bp.T + bm  # kappa multiplies b+* + b-
    kappa = complex(spec.kappa)
    if not doubled:
        return H + abs(kappa) * (x + x.T)
    Hr = H + kappa.real * (x + x.T)
    Hi = kappa.imag * (x - x.T)
    return np.block([[Hr, -Hi], [Hi, Hr]])


def fock_oracle(spec: FockOracleSpec, check: bool = True, doubled: bool = False,
                tol: float = 1e-8) -> float:
    """Ground energy of the two-mode Hamiltonian on the truncated Fock space.

    The truncated matrix is the compression of the full operator, so the
    value is nonincreasing in ``n_max``. With ``check`` the value at
    ``n_max // 2`` is computed as well and the two must agree to
    ``tol * (1 + |E|)``.

    Raises:
        TruncationNotConverged: when the check fails.
    """
    energy = nm.min_eigen_sym(fock_matrix(spec, doubled))[0]
    if check:
        half = FockOracleSpec(spec.A, spec.B, spec.kappa, max(2, spec.n_max // 2))
        coarse = nm.min_eigen_sym(fock_matrix(half, doubled))[0]
        if abs(coarse - energy) > tol * (1.0 + abs(energy)):
            raise TruncationNotConverged(
                "n_max %d -> %d moved the ground energy by %.3e"
                % (half.n_max, spec.n_max, abs(coarse - energy)))
    return energy


def bogoliubov_ground_energy(A: float, B: float, kappa: complex = 0.0) -> float:
    """Exact ground energy sqrt(A^2 - B^2) - A - 2 |kappa|^2 / (A + B) of the two-mode form."""
    _check_AB(A, B)
    return math.sqrt(A * A - B * B) - A - 2.0 * abs(kappa) ** 2 / (A + B)


def regularized_kernel(A, B):
    """sqrt(A^2 - B^2) - A + B^2 / (2A), evaluated without cancellation.

    With y = (B/A)^2 the value is -A y^2 / (2 (1 + sqrt(1 - y))^2).
    """
    A = np.asarray(A, dtype=float)
    B = np.asarray(B, dtype=float)
    safe = np.where(A > 0, A, 1.0)
    y = (B / safe) ** 2
    out = -safe * y * y / (2.0 * (1.0 + np.sqrt(np.maximum(1.0 - y, 0.0))) ** 2)
    return np.where(A > 0, out, 0.0)


# ---------------------------------------------------------------------------
# Coefficients
# ---------------------------------------------------------------------------


def profile_jumps(wp) -> tuple:
    """Jump data (r_j, J_j) of r W1(r) at the discontinuities of the potential.

    W1^(k) ~ (4 pi / k^2) sum_j J_j cos(k r_j) as k -> inf, with
    J_j = r_j (W1(r_j+) - W1(r_j-)).
    """
    sol = wp.sol
    v = sol.potential
    pieces = v.segments()
    rs, jumps = [], []
    for i, (lo, hi, vlo, vhi) in enumerate(pieces):
        left = pieces[i - 1][3] if i > 0 and pieces[i - 1][1] == lo else 0.0
        if lo > 0 and vlo != left:
            rs.append(lo)
            jumps.append(vlo - left)
        nxt = pieces[i + 1] if i + 1 < len(pieces) else None
        if (nxt is None or nxt[0] != hi) and vhi != 0.0:
            rs.append(hi)
            jumps.append(-vhi)
    if not rs:
        return ()
    r = np.array(rs)
    J = np.array(jumps) * np.asarray(sol.u(r)) * np.asarray(wp.weight(r))
    return tuple(zip(r.tolist(), J.tolist()))


def _tail_sum(jumps) -> float:
    """sum_j J_j^2, the mean-square amplitude of the k^-2 tail (cross terms average out)."""
    return float(sum(J * J for _, J in jumps))


@dataclass(frozen=True)
class BogCoefficients:
    """tau, A and B for a box of side ``ell`` with n = rho ell^3 particles."""

    n: float
    rho: float
    rho_mu: float
    rho_0: float
    ell: float
    a: float
    C_kin: float
    W1_hat: Callable = field(repr=False)
    R: float = 0.0
    jumps: tuple = field(default=(), repr=False)

    def __post_init__(self):
        if self.n < 0 or self.rho < 0 or self.rho_mu < 0 or self.rho_0 < 0:
            raise InvalidCoefficients("particle numbers and densities must be nonnegative")
        if not self.ell > 0 or self.a < 0 or self.C_kin < 0:
            raise InvalidCoefficients("need ell > 0, a >= 0, C_kin >= 0")

    @property
    def alpha(self) -> float:
        return 16.0 * math.pi * self.rho * self.a + self.rho_mu * self.a

    @property
    def cutoff(self) -> float:
        """|k| below which tau vanishes."""
        return math.sqrt(self.C_kin) / self.ell

    def tau(self, k):
        k = np.asarray(k, dtype=float)
        return np.maximum(k * k - self.C_kin / self.ell ** 2, 0.0)

    def A(self, k):
        if self.n == 0:
            return np.zeros_like(np.asarray(k, dtype=float))
        return (self.tau(k) + self.alpha) / self.n

    def B(self, k):
        return np.asarray(self.W1_hat(np.asarray(k, dtype=float)), dtype=float) / self.ell ** 3

    def ratio(self, k):
        """|B(k)| / A(k); independent of n."""
        return np.abs(self.rho * self.W1_hat(np.asarray(k, dtype=float))) / (self.tau(k) + self.alpha)

    @property
    def k_max(self) -> float:
        scale = K_CUTOFF_FACTOR / self.R if self.R > 0 else 0.0
        return max(scale, 100.0 * math.sqrt(self.alpha + self.C_kin / self.ell ** 2), 1e-300)


def bog_coefficients(wp, rho: float, rho_mu: float, *, ell: float | None = None,
                     C_kin: float | None = None, rho_0: float | None = None) -> BogCoefficients:
    """Coefficients from a windowed potential.

    ``ell`` and ``C_kin`` default to the window's kernel; they are required
    when the window is disabled.
    """
    kern = wp.kernel
    if ell is None:
        if kern is None:
            raise ValueError("ell is required without a window")
        ell = kern.ell
    if C_kin is None:
        if kern is None:
            raise ValueError("C_kin is required without a window")
        C_kin = kern.C_kin
    rho_0 = rho if rho_0 is None else rho_0
    return BogCoefficients(rho * ell ** 3, rho, rho_mu, rho_0, ell, wp.sol.a, C_kin,
                           wp.W1_hat, wp.sol.R, profile_jumps(wp))


# ---------------------------------------------------------------------------
# Radial k-integrals
# ---------------------------------------------------------------------------


def _k_points(R: float, k_max: float, extra: Sequence[float] = ()) -> list:
    pts = list(extra)
    if R > 0:
        pts.extend(np.arange(math.pi / R, k_max, math.pi / R).tolist())
    return sorted(p for p in set(pts) if 0 < p < k_max)


def radial_k_integral(f: Callable, k_max: float, R: float = 0.0, points: Sequence[float] = (),
                      tol: nm.Tolerance | None = None) -> nm.QuadResult:
    """4 pi int_0^k_max k^2 f(k) dk with breakpoints every pi / R."""
    tol = tol or nm.Tolerance(rel=1e-10, abs=0.0, max_refinements=40)
    return nm.integrate_adaptive(lambda k: 4.0 * math.pi * k * k * f(k), 0.0, k_max, tol,
                                 points=_k_points(R, k_max, points))


@dataclass(frozen=True)
class BogIntegral:
    """The split Bogoliubov integral, as energies in the box.

    regularized = (1/2)(2 pi)^-3 ell^3 n0 int (sqrt(A^2 - B^2) - A + B^2 / 2A) dk
    second_born = -(1/2)(2 pi)^-3 ell^3 n0 int B^2 / 2A dk
    """

    regularized: float
    second_born: float
    error: float

    @property
    def total(self) -> float:
        return self.regularized + self.second_born

    def __iter__(self):
        return iter((self.regularized, self.second_born))


def bog_integral(coeffs: BogCoefficients, n0: float | None = None,
                 tol: nm.Tolerance | None = None) -> BogIntegral:
    """(1/2)(2 pi)^-3 ell^3 n0 int (sqrt(A^2 - B^2) - A) dk, returned as its split pair.

    ``n0`` defaults to rho_0 ell^3.

    Raises:
        NonConvergent: from the quadrature.
        InvalidCoefficients: if B reaches A somewhere.
    """
    c = coeffs
    n0 = c.rho_0 * c.ell ** 3 if n0 is None else n0
    if c.n == 0 or n0 == 0 or c.a == 0:
        return BogIntegral(0.0, 0.0, 0.0)
    pref = 0.5 * c.ell ** 3 * n0 / TWO_PI_CUBED
    k_max = c.k_max
    pts = [c.cutoff] if c.cutoff > 0 else []

    def both(k):
        A = c.A(k)
        B = c.B(k)
        if np.any(np.abs(B) >= A):
            raise InvalidCoefficients("|B| >= A at some k; the Bogoliubov integral is undefined")
        return regularized_kernel(A, B), B * B / (2.0 * A)

    reg = radial_k_integral(lambda k: both(k)[0], k_max, c.R, pts, tol)
    sb = radial_k_integral(lambda k: both(k)[1], k_max, c.R, pts, tol)
    # tail of int B^2/2A beyond k_max: B^2 ~ 8 pi^2 sum J^2 / (k^4 ell^6), A ~ k^2 / n
    tail = 16.0 * math.pi ** 3 * c.n * _tail_sum(c.jumps) / (3.0 * c.ell ** 6 * k_max ** 3)
    return BogIntegral(pref * reg.value, -pref * (sb.value + tail),
                       pref * (reg.error + sb.error + tail * 1e-2))


@dataclass(frozen=True)
class SecondBornResult:
    value: float
    reference: float
    difference: float
    error: float

    def __iter__(self):
        return iter((self.value, self.reference, self.difference))


def second_born_integral(wp, sol=None, tol: nm.Tolerance | None = None) -> SecondBornResult:
    """(2 pi)^-3 int W1^(k)^2 / (2 k^2) dk against int g omega.

    In radial form the left side is (4 pi^2)^-1 int_0^inf W1^(k)^2 dk.
    Without a window it equals int g omega by Parseval.
    """
    sol = wp.sol if sol is None else sol
    R = sol.R
    if R == 0:
        return SecondBornResult(0.0, 0.0, 0.0, 0.0)
    tol = tol or nm.Tolerance(rel=1e-11, abs=0.0, max_refinements=40)
    k_max = K_CUTOFF_FACTOR / R
    res = nm.integrate_adaptive(lambda k: wp.W1_hat(k) ** 2, 0.0, k_max, tol,
                                points=_k_points(R, k_max))
    tail = 8.0 * math.pi ** 2 * _tail_sum(profile_jumps(wp)) / (3.0 * k_max ** 3)
    value = (res.value + tail) / (4.0 * math.pi ** 2)
    ref = sol.g_omega_integral
    return SecondBornResult(value, ref, value - ref, (res.error + 1e-2 * tail) / (4.0 * math.pi ** 2))


# ---------------------------------------------------------------------------
# LHY coefficient
# ---------------------------------------------------------------------------


def lhy_integrand(t):
    """(sqrt(t^4 + 2 t^2) - t^2 - 1 + 1 / (2 t^2)) t^2 in a cancellation-free form.

    With s = sqrt(1 + 2 / t^2) the integrand equals (s + 3) / (t^2 (1 + s)^3).
    """
    t = np.asarray(t, dtype=float)
    safe = np.where(t > 0, t, 1.0)
    s = np.sqrt(1.0 + 2.0 / safe ** 2)
    val = (s + 3.0) / (safe ** 2 * (1.0 + s) ** 3)
    return np.where(t > 0, val, 0.5)


@dataclass(frozen=True)
class LHYResult:
    J: float
    J_alt: float
    J_error: float
    coefficient: float

    @property
    def J_exact(self) -> float:
        return 8.0 * math.sqrt(2.0) / 15.0

    @property
    def coefficient_exact(self) -> float:
        return 128.0 / (15.0 * math.sqrt(math.pi))


def lhy_coefficient(tol: nm.Tolerance | None = None) -> LHYResult:
    """J = int_0^inf (sqrt(t^4 + 2t^2) - t^2 - 1 + 1/(2t^2)) t^2 dt and the LHY coefficient.

    The energy density correction (1/2)(2 pi)^-3 int (sqrt(k^4 + 2 k^2 b) - k^2 - b
    + b^2 / (2 k^2)) dk with b = 8 pi a rho equals
    b^(5/2) J / (4 pi^2) = 4 pi a rho^2 sqrt(rho a^3) * 8 sqrt(2) J / sqrt(pi),
    so the coefficient is 8 sqrt(2) J / sqrt(pi). J is computed with two
    different maps of the half line; both must agree.

    Raises:
        NonConvergent: from the quadrature.
    """
    tol = tol or nm.Tolerance(rel=1e-12, abs=0.0)
    main = nm.integrate_adaptive(lhy_integrand, 0.0, math.inf, tol, decay=2.0, mapping="rational")
    alt = nm.integrate_adaptive(lhy_integrand, 0.0, math.inf, tol, decay=2.0, mapping="tangent")
    coefficient = (8.0 * math.pi) ** 2.5 / (4.0 * math.pi ** 2 * 4.0 * math.pi) * main.value
    return LHYResult(main.value, alt.value, max(main.error, abs(main.value - alt.value)),
                     coefficient)


# ---------------------------------------------------------------------------
# Error-integral scalings
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ScalingRow:
    rho_mu: float
    ell: float
    E1_low: float
    E1_high: float
    E2_low: float
    E2_high: float
    bound_scale: float

    @property
    def E1(self) -> float:
        return self.E1_low + self.E1_high

    @property
    def E2(self) -> float:
        return self.E2_low + self.E2_high


@dataclass(frozen=True)
class ScalingTable:
    rows: tuple
    exponent_E1: float
    exponent_E2: float

    def as_rows(self) -> list:
        return [(r.rho_mu, r.ell, r.E1, r.E2, r.bound_scale) for r in self.rows]


def error_integrals(coeffs: BogCoefficients, tol: nm.Tolerance | None = None) -> tuple:
    """The two error integrals, each split at |k| = T / ell with T = sqrt(2 C_kin).

    E1 = int | ell^3 rho^-1 B^2 / (2A) - W1^2 / (2k^2) | dk
    E2 = ell^3 rho^-1 int B^4 / A^3 dk

    Returns (E1_low, E1_high, E2_low, E2_high).
    """
    c = coeffs
    if c.n == 0 or c.rho == 0:
        return 0.0, 0.0, 0.0, 0.0
    T = math.sqrt(2.0 * c.C_kin) / c.ell
    k_max = c.k_max
    scale = c.ell ** 3 / c.rho

    def e1(k):
        A = c.A(k)
        B = c.B(k)
        W = c.W1_hat(k)
        return np.abs(scale * B * B / (2.0 * A) - W * W / (2.0 * k * k))

    def e2(k):
        A = c.A(k)
        B = c.B(k)
        return scale * B ** 4 / A ** 3

    out = []
    for f in (e1, e2):
        if T > 0:
            low = radial_k_integral(f, T, c.R, [c.cutoff], tol).value
            high = nm.integrate_adaptive(
                lambda k: 4.0 * math.pi * k * k * f(k), T, k_max,
                tol or nm.Tolerance(rel=1e-10, abs=0.0, max_refinements=40),
                points=[p for p in _k_points(c.R, k_max) if p > T]).value
        else:
            low, high = 0.0, radial_k_integral(f, k_max, c.R, (), tol).value
        out.extend([low, high])
    return tuple(out)


def tau_lower_bound_holds(coeffs: BogCoefficients, k) -> bool:
    """tau(k) >= k^2 / 2 for |k| >= sqrt(2 C_kin) / ell."""
    k = np.asarray(k, dtype=float)
    T = math.sqrt(2.0 * coeffs.C_kin) / coeffs.ell
    sel = np.abs(k) >= T
    kk = k[sel]
    return bool(np.all(coeffs.tau(kk) >= 0.5 * kk * kk * (1.0 - 1e-14)))


def integral_error_scalings(v, K: float, rho_mus: Sequence[float], *, s: float = 0.05,
                            C_kin: float | None = None, density_ratio: float = 1.0,
                            tol: nm.Tolerance | None = None) -> ScalingTable:
    """Error integrals E1, E2 across rho_mu and their fitted log-log exponents.

    For each rho_mu the box is ell = K (rho_mu a)^-1/2 and rho = density_ratio * rho_mu.
    """
    from .localization import LocalizationKernel, ell_from_density, windowed_potential
    from .scattering import scattering_solution

    sol = scattering_solution(v)
    rows = []
    for rho_mu in rho_mus:
        ell = ell_from_density(K, rho_mu, sol.a)
        kern = LocalizationKernel(s=s, ell=ell, K=K, C_kin=C_kin)
        wp = windowed_potential(v, sol, kern)
        coeffs = bog_coefficients(wp, density_ratio * rho_mu, rho_mu)
        e1l, e1h, e2l, e2h = error_integrals(coeffs, tol)
        rows.append(ScalingRow(float(rho_mu), ell, e1l, e1h, e2l, e2h,
                               sol.a * math.sqrt(rho_mu * sol.a ** 3)))
    x = np.log([r.rho_mu for r in rows])
    fit1 = np.polyfit(x, np.log([r.E1 for r in rows]), 1)[0] if len(rows) > 1 else math.nan
    fit2 = np.polyfit(x, np.log([r.E2 for r in rows]), 1)[0] if len(rows) > 1 else math.nan
    return ScalingTable(tuple(rows), float(fit1), float(fit2))
