"""Box localization: the product bump, its convolution, the kinetic multipliers.

The bump is chi(x) = h(x1) h(x2) h(x3) with the 1-d profile
h = eta / ||eta||_2, eta(t) = exp(-1 / (1 - 4 t^2)) on |t| < 1/2. All 1-d
integrals of h use the substitution t = tanh(u) / 2, under which
1 - 4 t^2 = sech(u)^2 and eta = exp(-cosh(u)^2), so plain trapezoidal sums
converge double-exponentially.

The multiplier (ell = 1)

    F(p) = (2 pi)^-3 int K(q) [chi^(q - p) - theta^(p) chi^(q)]^2 dq,
    K(q) = (|q|^2 - s^-2)_+,

is evaluated through the split K = P + N with the polynomial part
P = |q|^2 - s^-2 (integrated in closed form by Parseval) and the compact
part N = (s^-2 - |q|^2)_+ (integrated over the ball |q| < 1/s).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.interpolate
import scipy.optimize

from .errors import NotFound, QuadratureBudgetExceeded, RangeTooLarge

TWO_PI_CUBED = (2.0 * math.pi) ** 3


# ---------------------------------------------------------------------------
# 1-d profile
# ---------------------------------------------------------------------------


def _de_nodes(step=0.01, u_max=3.75):
    u = np.arange(-u_max, u_max + 0.5 * step, step)
    t = 0.5 * np.tanh(u)
    ch2 = np.cosh(u) ** 2
    w = 0.5 * step / ch2  # dt/du * du
    return u, t, ch2, w


class BumpProfile:
    """Normalised 1-d bump h and the derived even functions of q and t.

    Parameters
    ----------
    step : float
        Trapezoid step in the double-exponential variable.
    q_max : float
        Largest |q| covered by the interpolation table of h^(q).
    dq : float
        Table spacing for h^.
    """

    def __init__(self, step: float = 0.01, q_max: float = 160.0, dq: float = 0.01):
        u, t, ch2, w = _de_nodes(step)
        eta = np.exp(-ch2)
        self.norm2 = float(np.sum(w * eta ** 2))
        inv = 1.0 / math.sqrt(self.norm2)
        self._t = t
        self._w = w
        self._h = eta * inv
        # phi = -1/(1-4t^2) = -cosh^2 u ; eta = exp(phi)
        tanh = np.tanh(u)
        ch4 = ch2 * ch2
        dphi = -4.0 * tanh * ch4
        d2phi = -8.0 * ch4 - 32.0 * tanh ** 2 * ch4 * ch2
        self._dh = dphi * self._h
        self._d2h = (d2phi + dphi ** 2) * self._h
        self.grad2 = float(np.sum(w * self._dh ** 2))  # int h'^2
        self._dq = dq
        qs = np.arange(0.0, q_max + 2 * dq, dq)
        self.q_max = float(qs[-2])
        self._hhat_val = self._hat_direct(qs)
        self._hhat_der = -self._sin_sum(qs, self._w * self._t * self._h) * dq
        tt = np.linspace(0.0, 1.0, 2001)
        self._H_table = scipy.interpolate.make_interp_spline(tt, self._conv_direct(tt), k=5)

    # -- pointwise profile ----------------------------------------------
    def h(self, t):
        t = np.asarray(t, dtype=float)
        inside = np.abs(t) < 0.5
        safe = np.where(inside, t, 0.0)
        val = np.exp(-1.0 / (1.0 - 4.0 * safe ** 2)) / math.sqrt(self.norm2)
        return np.where(inside, val, 0.0)

    @property
    def sup(self) -> float:
        return math.exp(-1.0) / math.sqrt(self.norm2)

    # -- transforms -----------------------------------------------------
    def _cos_sum(self, q, weights):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        out = np.empty_like(q)
        for i in range(0, q.size, 512):
            qq = q[i:i + 512]
            out[i:i + 512] = np.cos(np.outer(qq, self._t)) @ weights
        return out

    def _sin_sum(self, q, weights):
        q = np.atleast_1d(np.asarray(q, dtype=float))
        out = np.empty_like(q)
        for i in range(0, q.size, 512):
            qq = q[i:i + 512]
            out[i:i + 512] = np.sin(np.outer(qq, self._t)) @ weights
        return out

    def _hat_table(self, q):
        """Cubic Hermite interpolation of the tabulated h^ and h^'."""
        x = q / self._dq
        i = np.minimum(x.astype(np.intp), self._hhat_val.size - 2)
        t = x - i
        y0, y1 = self._hhat_val[i], self._hhat_val[i + 1]
        d0, d1 = self._hhat_der[i], self._hhat_der[i + 1]
        t2 = t * t
        t3 = t2 * t
        return (y0 + t2 * (3.0 - 2.0 * t) * (y1 - y0)
                + (t3 - 2.0 * t2 + t) * d0 + (t3 - t2) * d1)

    def _hat_direct(self, q):
        return self._cos_sum(q, self._w * self._h)

    def hat(self, q):
        """h^(q) = int h(t) cos(qt) dt (h is even, so h^ is real and even)."""
        q = np.abs(np.asarray(q, dtype=float))
        if np.any(q > self.q_max):
            big = q > self.q_max
            out = np.empty_like(q)
            out[~big] = self._hat_table(q[~big])
            out[big] = self._hat_direct(q[big])
            return out
        return self._hat_table(q)

    def S(self, q):
        """int h^2 cos(qt) dt."""
        return self._cos_sum(q, self._w * self._h ** 2)

    def T(self, q):
        """int h (-h'') cos(qt) dt."""
        return self._cos_sum(q, -self._w * self._h * self._d2h)

    def moment2(self) -> float:
        """int t^2 h(t)^2 dt."""
        return float(np.sum(self._w * self._t ** 2 * self._h ** 2))

    # -- self convolution -----------------------------------------------
    def _conv_direct(self, t, step=0.01, u_max=3.75):
        """(h * h)(t) = int h(s) h(s - t) ds for 0 <= t < 1 on the overlap."""
        t = np.atleast_1d(np.asarray(t, dtype=float))
        u = np.arange(-u_max, u_max + 0.5 * step, step)
        out = np.zeros_like(t)
        ok = np.abs(t) < 1.0
        tt = np.abs(t[ok])
        lo, hi = tt - 0.5, np.full_like(tt, 0.5)
        mid, half = 0.5 * (lo + hi), 0.5 * (hi - lo)
        s = mid[:, None] + half[:, None] * np.tanh(u)[None, :]
        w = half[:, None] * step / np.cosh(u)[None, :] ** 2
        out[ok] = np.sum(w * self.h(s) * self.h(s - tt[:, None]), axis=1)
        return out

    def conv(self, t):
        """H(t) = (h * h)(t), even, supported in [-1, 1], H(0) = 1."""
        t = np.abs(np.asarray(t, dtype=float))
        inside = t < 1.0
        return np.where(inside, self._H_table(np.where(inside, t, 0.0)), 0.0)


_DEFAULT_PROFILE: BumpProfile | None = None


def default_profile() -> BumpProfile:
    global _DEFAULT_PROFILE
    if _DEFAULT_PROFILE is None:
        _DEFAULT_PROFILE = BumpProfile()
    return _DEFAULT_PROFILE


# ---------------------------------------------------------------------------
# Geometry helpers
# ---------------------------------------------------------------------------


def octant_directions(n: int = 24) -> np.ndarray:
    """Unit vectors covering the closed first octant (includes axes and diagonal)."""
    th = np.linspace(0.0, 0.5 * np.pi, n)
    dirs = []
    for a in th:
        m = max(2, int(round(n * math.sin(a))) + 1) if a > 0 else 1
        for b in np.linspace(0.0, 0.5 * np.pi, m):
            dirs.append((math.sin(a) * math.cos(b), math.sin(a) * math.sin(b), math.cos(a)))
    dirs.append((1.0, 1.0, 1.0))
    d = np.array(dirs)
    return d / np.linalg.norm(d, axis=1)[:, None]


def sphere_rule(n_mu: int = 16, n_phi: int = 32):
    """Product rule on the unit sphere: GL in cos(theta), trapezoid in phi.

    Returns unit vectors (m, 3) and weights summing to 1.
    """
    mu, wmu = np.polynomial.legendre.leggauss(n_mu)
    phi = 2.0 * np.pi * np.arange(n_phi) / n_phi
    st = np.sqrt(1.0 - mu ** 2)
    vec = np.stack([
        (st[:, None] * np.cos(phi)[None, :]).ravel(),
        (st[:, None] * np.sin(phi)[None, :]).ravel(),
        np.repeat(mu, n_phi),
    ], axis=1)
    w = np.repeat(wmu, n_phi) / (2.0 * n_phi)
    return vec, w


def theta_hat(p, ell: float = 1.0):
    """Fourier transform of the unit-box indicator at ell * p.

    ``p`` has shape (..., 3) (a scalar is read as (p, 0, 0)).
    """
    p = np.asarray(p, dtype=float)
    if p.ndim == 0:
        p = np.array([float(p), 0.0, 0.0])
    x = ell * p
    return np.prod(np.sinc(x / (2.0 * np.pi)), axis=-1)


def quav_multiplier(p, ell: float = 1.0):
    """1 - theta^(ell p)^2, the symbol of the averaged box projection."""
    return 1.0 - theta_hat(p, ell) ** 2


def _as_points(p):
    p = np.asarray(p, dtype=float)
    if p.ndim == 0:
        p = np.array([float(p), 0.0, 0.0])
    return p


# ---------------------------------------------------------------------------
# Kernel
# ---------------------------------------------------------------------------


def ell_from_density(K: float, rho_mu: float, a: float) -> float:
    """Box length ell = K (rho_mu a)^(-1/2)."""
    if not (K > 0 and rho_mu > 0 and a > 0):
        raise ValueError("K, rho_mu and a must be positive")
    return K / math.sqrt(rho_mu * a)


@dataclass(frozen=True)
class BallRule:
    """Spherical product rule on the ball |q| < radius."""

    n_r: int = 56
    n_mu: int = 88
    n_phi: int = 112


@dataclass
class LocalizationKernel:
    """Product bump, box scale and gap parameters.

    ``C_kin`` defaults to s^-2 / 4 and ``b`` is filled in by
    :meth:`gap_constant` when requested.
    """

    s: float = 0.05
    ell: float = 1.0
    K: float = 0.1
    C_kin: float | None = None
    b: float | None = None
    ball: BallRule = field(default_factory=BallRule)
    profile: BumpProfile = field(default_factory=default_profile, repr=False)

    def __post_init__(self):
        if not self.s > 0:
            raise ValueError("s must be positive")
        if not self.ell > 0:
            raise ValueError("ell must be positive")
        if not self.K > 0:
            raise ValueError("K must be positive")
        if self.C_kin is None:
            self.C_kin = 0.25 / self.s ** 2
        if self.C_kin < 0:
            raise ValueError("C_kin must be nonnegative")

    # -- bump ------------------------------------------------------------
    def chi(self, x):
        x = _as_points(x)
        return np.prod(self.profile.h(x), axis=-1)

    def chi_hat(self, q):
        q = _as_points(q)
        return np.prod(self.profile.hat(q), axis=-1)

    def chi_conv_chi(self, x):
        """(chi * chi)(x) = prod_i H(x_i); a scalar x means the point (x, 0, 0)."""
        x = _as_points(x)
        return np.prod(self.profile.conv(x), axis=-1)

    def chi_l2_norm2(self) -> float:
        return float(np.sum(self.profile._w * self.profile._h ** 2)) ** 3

    @cached_property
    def D(self) -> float:
        """Largest radius with |chi * chi - 1| <= 1/2 on the whole ball."""
        dirs = octant_directions(32)

        def margin(r):
            return float(np.min(self.chi_conv_chi(r * dirs))) - 0.5

        return float(scipy.optimize.brentq(margin, 1e-6, 0.99, xtol=1e-13))

    def window_average(self, r):
        """Spherical average of 1 / (chi * chi)(x / ell) over |x| = r."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        vec, w = sphere_rule(12, 24)
        out = np.empty_like(r)
        for i in range(0, r.size, 2048):
            rr = r[i:i + 2048]
            pts = rr[:, None, None] * vec[None, :, :] / self.ell
            out[i:i + 2048] = (1.0 / np.prod(self.profile.conv(pts), axis=-1)) @ w
        return out

    def window_max(self, r):
        """max over directions of 1 / (chi * chi)(x / ell), |x| = r."""
        r = np.atleast_1d(np.asarray(r, dtype=float))
        dirs = octant_directions(16)
        pts = r[:, None, None] * dirs[None, :, :] / self.ell
        return np.max(1.0 / np.prod(self.profile.conv(pts), axis=-1), axis=1)

    # -- multiplier F (ell = 1 variable) ---------------------------------
    @cached_property
    def _ball_nodes(self):
        rule = self.ball
        R = 1.0 / self.s
        xr, wr = np.polynomial.legendre.leggauss(rule.n_r)
        r = 0.5 * R * (xr + 1.0)
        wr = 0.5 * R * wr
        vec, wang = sphere_rule(rule.n_mu, rule.n_phi)
        q = (r[:, None, None] * vec[None, :, :]).reshape(-1, 3)
        w = (wr[:, None] * r[:, None] ** 2 * wang[None, :] * 4.0 * np.pi).ravel()
        weight = w * (R ** 2 - np.sum(q * q, axis=1)) / TWO_PI_CUBED
        return q, weight

    @cached_property
    def _chi_hat_ball(self):
        q, _ = self._ball_nodes
        return self.chi_hat(q)

    @cached_property
    def gradient_energy(self) -> float:
        """G = int |grad chi|^2 = 3 int h'^2."""
        return 3.0 * self.profile.grad2

    def _polynomial_parts(self, p):
        """Closed-form P-parts of the three terms at the points p (ell = 1)."""
        s2 = self.s ** -2
        G = self.gradient_energy
        pp = np.sum(p * p, axis=-1)
        S = self.profile.S(p.ravel()).reshape(p.shape)
        T = self.profile.T(p.ravel()).reshape(p.shape)
        prodS = np.prod(S, axis=-1)
        cross = (T[..., 0] * S[..., 1] * S[..., 2] + S[..., 0] * T[..., 1] * S[..., 2]
                 + S[..., 0] * S[..., 1] * T[..., 2])
        return pp + G - s2, cross - s2 * prodS, G - s2

    def _ball_parts(self, p):
        q, weight = self._ball_nodes
        c0 = self._chi_hat_ball
        n1 = np.empty(p.shape[0])
        n2 = np.empty(p.shape[0])
        for i, pi in enumerate(p):
            cp = self.chi_hat(q - pi)
            n1[i] = np.dot(weight, cp * cp)
            n2[i] = np.dot(weight, cp * c0)
        n3 = float(np.dot(weight, c0 * c0))
        return n1, n2, n3

    def F_terms(self, p, ell: float | None = None):
        """The three terms of F at ell p: (K*|chi^|^2, -2 theta^ chi^*(K chi^), theta^2 int K chi^2)."""
        ell = self.ell if ell is None else ell
        pts = np.atleast_2d(_as_points(p)) * ell
        if self.s * np.max(np.abs(pts), initial=0.0) > 1e6:
            raise QuadratureBudgetExceeded("|p| far outside the tabulated range")
        th = theta_hat(pts)
        p1, p2, p3 = self._polynomial_parts(pts)
        n1, n2, n3 = self._ball_parts(pts)
        t1 = p1 + n1
        t2 = -2.0 * th * (p2 + n2)
        t3 = th ** 2 * (p3 + n3)
        return t1, t2, t3

    def F(self, p, ell: float | None = None):
        """Multiplier F evaluated at ell p (``p`` of shape (..., 3) or scalar)."""
        p_arr = _as_points(p)
        t1, t2, t3 = self.F_terms(p_arr.reshape(-1, 3), ell)
        out = t1 + t2 + t3
        return float(out[0]) if p_arr.ndim == 1 else out.reshape(p_arr.shape[:-1])

    # -- derived constants -----------------------------------------------
    def Fs(self, p, C: float, ell: float | None = None):
        """Comparison symbol F_s(|p|) in physical units at scale ell."""
        ell = self.ell if ell is None else ell
        p = np.linalg.norm(np.atleast_2d(_as_points(p)), axis=-1)
        cut = 5.0 / 6.0 / (self.s * ell)
        return np.where(p >= cut, p ** 2 - 0.5 / (self.s * ell) ** 2, C * self.s * p ** 2)


# ---------------------------------------------------------------------------
# Multiplier checks
# ---------------------------------------------------------------------------


def default_pgrid(s: float, n: int = 64, p_max: float | None = None) -> np.ndarray:
    """Points on the three axes and the main diagonal, |p| in (0, p_max]."""
    p_max = 2.0 / s if p_max is None else p_max
    per = n // 4
    mags = np.linspace(p_max / per, p_max, per)
    dirs = np.array([[1, 0, 0], [0, 1, 0], [0, 0, 1], [1, 1, 1]], dtype=float)
    dirs /= np.linalg.norm(dirs, axis=1)[:, None]
    return (mags[None, :, None] * dirs[:, None, :]).reshape(-1, 3)


def parse_pgrid(spec: str, s: float) -> np.ndarray:
    """``axis:N`` (N points along x), ``diag:N`` or ``mixed:N`` (axes + diagonal)."""
    try:
        kind, count = spec.split(":")
        n = int(count)
    except ValueError:
        raise ValueError("p-grid spec must look like 'axis:64'") from None
    if n < 1:
        raise ValueError("p-grid needs at least one point")
    mags = np.linspace(0.0, 2.0 / s, n)
    if kind == "axis":
        return np.stack([mags, 0 * mags, 0 * mags], axis=1)
    if kind == "diag":
        return mags[:, None] * np.ones(3)[None, :] / math.sqrt(3.0)
    if kind == "mixed":
        return np.vstack([np.zeros((1, 3)), default_pgrid(s, max(4, n - 1))])
    raise ValueError("unknown p-grid kind %r" % kind)


@dataclass(frozen=True)
class FsReport:
    passes: bool
    C: float
    s: float
    inner_max_ratio: float
    outer_min_margin: float
    points: int


def Fs_bound_check(s: float, pgrid=None, kernel: LocalizationKernel | None = None) -> FsReport:
    """Check F(p) <= F_s(p) (ell = 1) with C fitted on the inner region.

    C = max F(p) / (s |p|^2) over |p| < (5/6) / s; the outer branch
    |p|^2 - s^-2 / 2 is checked directly.
    """
    kern = kernel if kernel is not None else LocalizationKernel(s=s, ell=1.0)
    if pgrid is None:
        mags = np.linspace(0.05, 2.0 / s, 48)
        dirs = np.array([[1, 0, 0], [1, 1, 1]], dtype=float)
        dirs /= np.linalg.norm(dirs, axis=1)[:, None]
        pgrid = (mags[None, :, None] * dirs[:, None, :]).reshape(-1, 3)
    pgrid = np.atleast_2d(pgrid)
    F = kern.F(pgrid, ell=1.0)
    pn = np.linalg.norm(pgrid, axis=1)
    cut = 5.0 / 6.0 / s
    inner = (pn < cut) & (pn > 0)
    outer = pn >= cut
    C = float(np.max(F[inner] / (s * pn[inner] ** 2))) if np.any(inner) else 0.0
    margin = float(np.min(pn[outer] ** 2 - 0.5 / s ** 2 - F[outer])) if np.any(outer) else math.inf
    tol = 1e-8 * (1.0 + pn ** 2)
    passes = bool(np.all(F[outer] <= pn[outer] ** 2 - 0.5 / s ** 2 + tol[outer])) and bool(
        np.all(F[pn == 0] <= tol[pn == 0]))
    return FsReport(passes, C, s, C, margin, int(pn.size))


def quav_beta_search(n_dirs: int = 12, p_max: float = 200.0, n_p: int = 4000,
                     tol: float = 1e-10) -> float:
    """Largest beta in (0, 1) with 1 - theta^(p)^2 <= beta^-1 p^2 / (p^2 + beta) on a grid.

    The right side decreases in beta, so the admissible set is an interval
    (0, beta*] and bisection applies.
    """
    dirs = octant_directions(n_dirs)
    mags = np.concatenate([np.geomspace(1e-4, 1.0, 200), np.linspace(1.0, p_max, n_p)])
    pts = (mags[None, :, None] * dirs[:, None, :]).reshape(-1, 3)
    lhs = quav_multiplier(pts)
    p2 = np.sum(pts * pts, axis=1)

    def ok(beta):
        return bool(np.all(lhs <= p2 / (beta * (p2 + beta)) * (1 + 1e-14)))

    lo, hi = 0.0, 1.0
    if ok(hi):
        return 1.0
    if not ok(1e-12):
        raise NotFound("no beta in (0, 1) satisfies the averaged-projection inequality")
    lo = 1e-12
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if ok(mid):
            lo = mid
        else:
            hi = mid
    return lo


def gap_constant(s: float, beta: float | None = None, C_fit: float | None = None) -> float:
    """Gap constant b for the kinetic localization with parameter s.

    Uses the comparison symbol at 2s: b = min(beta^2 (1 - 2s C), beta s^-2 / 8)
    where C is the fitted inner constant at 2s.
    """
    beta = quav_beta_search() if beta is None else beta
    if C_fit is None:
        C_fit = Fs_bound_check(2.0 * s).C
    b = min(beta ** 2 * (1.0 - 2.0 * s * C_fit), beta / (8.0 * s ** 2))
    if not b > 0:
        raise NotFound("no positive gap constant for s=%g (fitted C=%g)" % (s, C_fit))
    return b


# ---------------------------------------------------------------------------
# Windowed potential
# ---------------------------------------------------------------------------


@dataclass
class WindowedPotential:
    """W = v / (chi*chi)(x/ell), W1 = W (1 - omega), W2 = W (1 - omega^2).

    Profiles are spherical averages over |x| = r of the (weakly anisotropic)
    window. ``window=False`` replaces chi * chi by 1.
    """

    grid: np.ndarray
    W: np.ndarray
    W1: np.ndarray
    W2: np.ndarray
    D: float
    ell: float
    sol: object = field(repr=False)
    kernel: LocalizationKernel | None = field(repr=False, default=None)

    @property
    def window(self) -> bool:
        return self.kernel is not None

    def weight(self, r):
        if self.kernel is None:
            return np.ones_like(np.asarray(r, dtype=float))
        return self.kernel.window_average(r)

    def W1_hat(self, k):
        """Radial Fourier transform of the averaged W1 at k."""
        from .scattering import _radial_transform
        if self.kernel is None:
            return _radial_transform(self.sol, "g", k)
        return _radial_transform(self.sol, "g", k, weight=self.weight, tag=("window", self.ell))

    def sandwich_excess(self) -> float:
        """max over the support of (W1 / g - 1), anisotropy included."""
        if self.kernel is None:
            return 0.0
        r = self.grid[(self.grid > 0) & (self.grid <= self.sol.R)]
        return float(np.max(self.kernel.window_max(r)) - 1.0) if r.size else 0.0

    def sandwich_min(self) -> float:
        """min over the support of (W1 / g - 1); nonnegative since chi*chi <= 1."""
        if self.kernel is None:
            return 0.0
        r = self.grid[(self.grid > 0) & (self.grid <= self.sol.R)]
        vec, _ = sphere_rule(8, 16)
        pts = r[:, None, None] * vec[None, :, :] / self.ell
        return float(np.min(1.0 / np.prod(self.kernel.profile.conv(pts), axis=-1)) - 1.0)

    def row_integral(self, x_points, n_mu: int = 12, n_phi: int = 24, order: int = 16):
        """int w1(x, y) dy = chi(x/ell) int W1(z) chi((x - z)/ell) dz at each x."""
        if self.kernel is None:
            raise ValueError("row integrals need a window")
        kern = self.kernel
        sol = self.sol
        edges = np.unique(np.concatenate([[0.0], sol.potential.breakpoints(), [sol.R]]))
        edges = edges[edges <= sol.R]
        xg, wg = np.polynomial.legendre.leggauss(order)
        r = (0.5 * (edges[:-1] + edges[1:])[:, None] + 0.5 * np.diff(edges)[:, None] * xg).ravel()
        wr = (0.5 * np.diff(edges)[:, None] * wg).ravel()
        g = sol.g_at(r)
        vec, wang = sphere_rule(n_mu, n_phi)
        z = r[:, None, None] * vec[None, :, :]
        win = 1.0 / np.prod(kern.profile.conv(z / self.ell), axis=-1)
        base = (4.0 * np.pi * wr * r ** 2 * g)[:, None] * wang[None, :] * win
        x_points = np.atleast_2d(x_points)
        out = np.empty(x_points.shape[0])
        for i, x in enumerate(x_points):
            out[i] = kern.chi(x / self.ell) * np.sum(base * kern.chi((x - z) / self.ell))
        return out


def windowed_potential(v, sol, kernel: LocalizationKernel | None) -> WindowedPotential:
    """Window the potential and the scattering profiles at scale ``kernel.ell``.

    Raises:
        RangeTooLarge: if R / ell exceeds D (the window would be undefined).
    """
    r = sol.grid.nodes
    if kernel is None:
        m = np.ones_like(r)
        D, ell = math.inf, math.inf
    else:
        D, ell = kernel.D, kernel.ell
        if sol.R / ell > D:
            raise RangeTooLarge("R/ell = %.4g exceeds D = %.4g" % (sol.R / ell, D))
        m = np.where(r <= sol.R, kernel.window_average(np.minimum(r, sol.R)), 1.0)
    vv = v(r)
    omega = sol.omega
    W = vv * m
    return WindowedPotential(r, W, W * (1.0 - omega), W * (1.0 - omega ** 2), D, ell, sol, kernel)
