"""Shared numerical primitives.

Adaptive Gauss-Kronrod quadrature (finite and semi-infinite intervals), a
fixed-grid RK4 integrator for the zero-energy radial equation u'' = v u / 2,
a P1 finite-element discretisation of the radial scattering functional and a
dense symmetric eigensolver wrapper.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np
import scipy.linalg

from .errors import (
    InvalidInterval,
    MeshTooCoarse,
    NoConvergence,
    NonConvergent,
    NotSymmetric,
    SingularSystem,
    StepTooCoarse,
)

# ---------------------------------------------------------------------------
# Tolerances and grids
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Tolerance:
    rel: float = 1e-9
    abs: float = 1e-12
    max_refinements: int = 60

    def __post_init__(self):
        if not self.rel > 0:
            raise ValueError("rel must be positive")
        if not self.abs >= 0:
            raise ValueError("abs must be non-negative")
        if self.max_refinements < 1:
            raise ValueError("max_refinements must be >= 1")

    def target(self, value: float) -> float:
        return max(self.abs, self.rel * abs(value))


DEFAULT_TOL = Tolerance()


@dataclass(frozen=True)
class RadialGrid:
    nodes: np.ndarray

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 2:
            raise ValueError("a radial grid needs at least 2 nodes")
        if nodes[0] < 0:
            raise ValueError("radial grid must start at r >= 0")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("radial grid must be strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def uniform(cls, r_max: float, n: int, r_min: float = 0.0) -> "RadialGrid":
        return cls(np.linspace(r_min, r_max, n))

    @classmethod
    def geometric(cls, r_min: float, r_max: float, n: int,
                  include_origin: bool = True) -> "RadialGrid":
        nodes = np.geomspace(r_min, r_max, n)
        if include_origin:
            nodes = np.concatenate([[0.0], nodes])
        return cls(nodes)

    def __len__(self):
        return self.nodes.size


# ---------------------------------------------------------------------------
# Adaptive quadrature
# ---------------------------------------------------------------------------

# 7-point Gauss / 15-point Kronrod pair (QUADPACK qk15 tables).
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])

_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KW = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GW = np.zeros(15)
# Gauss nodes are the odd-indexed Kronrod nodes (xgk[1], xgk[3], ...).
_GW[[1, 3, 5]] = _WG[:3]
_GW[[13, 11, 9]] = _WG[:3]
_GW[7] = _WG[3]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    intervals: int
    evaluations: int

    def __iter__(self):
        yield self.value
        yield self.error


def _gk15(f, a, b):
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = centre[:, None] + half[:, None] * _NODES[None, :]
    fx = np.asarray(f(x.ravel()), dtype=float).reshape(x.shape)
    resk = fx @ _KW
    resg = fx @ _GW
    mean = 0.5 * resk
    resabs = np.abs(fx) @ _KW * np.abs(half)
    resasc = np.abs(fx - mean[:, None]) @ _KW * np.abs(half)
    value = resk * half
    err = np.abs((resk - resg) * half)
    scaled = np.where(
        (resasc != 0) & (err != 0),
        resasc * np.minimum(1.0, (200.0 * err / np.where(resasc == 0, 1, resasc)) ** 1.5),
        err,
    )
    scaled = np.maximum(scaled, 50 * _EPS * resabs)
    if not np.all(np.isfinite(value)):
        raise NonConvergent("integrand is not finite on the integration interval")
    return value, scaled


def _semi_infinite_map(lo, scale, decay, mapping):
    """Return (x(t), dx/dt) mapping t in [0, 1) onto [lo, inf)."""
    if mapping == "rational":
        beta = 1.0
        if decay is not None:
            if decay <= 1:
                raise InvalidInterval("integrand decaying like x**-%g is not integrable" % decay)
            beta = max(1.0, 1.0 / (decay - 1.0))

        def x_of(t):
            return lo + scale * ((1.0 - t) ** (-beta) - 1.0)

        def jac(t):
            return scale * beta * (1.0 - t) ** (-beta - 1.0)

        def t_of(x):
            return 1.0 - (1.0 + (x - lo) / scale) ** (-1.0 / beta)

    elif mapping == "tangent":
        if decay is not None and decay < 2:
            raise InvalidInterval("tangent mapping needs decay exponent >= 2")

        def x_of(t):
            return lo + scale * np.tan(0.5 * np.pi * t)

        def jac(t):
            return scale * 0.5 * np.pi / np.cos(0.5 * np.pi * t) ** 2

        def t_of(x):
            return 2.0 / np.pi * np.arctan((x - lo) / scale)
    else:
        raise ValueError("unknown mapping %r" % mapping)
    return x_of, jac, t_of


def integrate_adaptive(f: Callable, lo: float, hi: float, tol: Tolerance | None = None, *,
                       decay: float | None = None, scale: float = 1.0,
                       mapping: str = "rational", points: Sequence[float] = (),
                       vectorized: bool = True, max_intervals: int = 200_000) -> QuadResult:
    """Globally adaptive 7/15 Gauss-Kronrod quadrature of ``f`` over [lo, hi].

    ``hi`` may be ``inf``; the half line is mapped onto [0, 1) by
    x = lo + scale * ((1 - t)**-beta - 1) ("rational") or
    x = lo + scale * tan(pi t / 2) ("tangent"). ``decay`` is the exponent p
    of the integrand's algebraic tail |f| ~ x**-p and selects beta so that
    the mapped integrand stays bounded. ``points`` are interior breakpoints
    (discontinuities, kinks) used as initial interval boundaries.

    ``f`` receives a 1-d array when ``vectorized`` is true. Every pass
    bisects the intervals whose error exceeds their equal share of the
    target; ``tol.max_refinements`` bounds the number of passes.

    Raises:
        InvalidInterval: if lo >= hi.
        NonConvergent: if the tolerance is not met within the budget.
    """
    tol = tol or DEFAULT_TOL
    if math.isnan(lo) or math.isnan(hi) or not lo < hi:
        raise InvalidInterval("need lo < hi, got [%r, %r]" % (lo, hi))
    if math.isinf(lo):
        raise InvalidInterval("lower limit must be finite")
    func = f if vectorized else np.vectorize(f, otypes=[float])

    if math.isinf(hi):
        x_of, jac, t_of = _semi_infinite_map(lo, scale, decay, mapping)

        def g(t):
            return func(x_of(t)) * jac(t)

        edges = [0.0] + sorted(float(t_of(p)) for p in points if lo < p) + [1.0]
        integrand = g
    else:
        edges = [lo] + sorted(p for p in points if lo < p < hi) + [hi]
        integrand = func
    edges = np.unique(np.asarray(edges, dtype=float))
    a, b = edges[:-1], edges[1:]
    val, err = _gk15(integrand, a, b)
    evals = 15 * a.size

    for _ in range(tol.max_refinements):
        total, total_err = float(np.sum(val)), float(np.sum(err))
        if total_err <= tol.target(total):
            return QuadResult(total, total_err, a.size, evals)
        share = tol.target(total) / a.size
        split = err > share
        if not np.any(split):
            split = err >= err.max()
        mid = 0.5 * (a[split] + b[split])
        if np.any(np.abs(b[split] - a[split]) <= 64 * _EPS * np.maximum(np.abs(mid), 1e-300)):
            break
        new_a = np.concatenate([a[split], mid])
        new_b = np.concatenate([mid, b[split]])
        nv, ne = _gk15(integrand, new_a, new_b)
        evals += 15 * new_a.size
        keep = ~split
        a = np.concatenate([a[keep], new_a])
        b = np.concatenate([b[keep], new_b])
        val = np.concatenate([val[keep], nv])
        err = np.concatenate([err[keep], ne])
        if a.size > max_intervals:
            break
    total, total_err = float(np.sum(val)), float(np.sum(err))
    if total_err <= tol.target(total):
        return QuadResult(total, total_err, a.size, evals)
    raise NonConvergent(
        "adaptive quadrature stopped at %d intervals with error %.3e (target %.3e)"
        % (a.size, total_err, tol.target(total)))


# ---------------------------------------------------------------------------
# Radial zero-energy equation  u'' = v(r) u / 2
# ---------------------------------------------------------------------------


def _rk4_propagators(r0, h, c0, c1):
    """RK4 one-step matrices for y' = [[0, 1], [c(r), 0]] y, c linear in r.

    ``c0``/``c1`` give c at the start/end of each step (linear in between).
    """
    n = r0.size
    cm = 0.5 * (c0 + c1)

    def amat(c):
        m = np.zeros((n, 2, 2))
        m[:, 0, 1] = 1.0
        m[:, 1, 0] = c
        return m

    eye = np.broadcast_to(np.eye(2), (n, 2, 2))
    hh = h[:, None, None]
    k1 = amat(c0)
    k2 = amat(cm) @ (eye + 0.5 * hh * k1)
    k3 = amat(cm) @ (eye + 0.5 * hh * k2)
    k4 = amat(c1) @ (eye + hh * k3)
    return eye + hh / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)


def _prefix_products(mats):
    """Inclusive prefix products P_i = M_i ... M_0 with log-scale bookkeeping."""
    p = mats.copy()
    logs = np.zeros(p.shape[0])
    norm = np.abs(p).max(axis=(1, 2))
    p /= norm[:, None, None]
    logs += np.log(norm)
    d = 1
    n = p.shape[0]
    while d < n:
        prod = p[d:] @ p[:-d]
        norm = np.abs(prod).max(axis=(1, 2))
        prod /= norm[:, None, None]
        newlogs = logs[d:] + logs[:-d] + np.log(norm)
        p = np.concatenate([p[:d], prod])
        logs = np.concatenate([logs[:d], newlogs])
        d *= 2
    return p, logs


def hermite5(t, h, y0, y1, d0, d1, s0, s1):
    """Quintic Hermite interpolant on [x0, x0 + h] at relative position t."""
    t2 = t * t
    t3 = t2 * t
    t4 = t3 * t
    t5 = t4 * t
    return (y0 * (1 - 10 * t3 + 15 * t4 - 6 * t5)
            + h * d0 * (t - 6 * t3 + 8 * t4 - 3 * t5)
            + h * h * s0 * (0.5 * t2 - 1.5 * t3 + 1.5 * t4 - 0.5 * t5)
            + y1 * (10 * t3 - 15 * t4 + 6 * t5)
            + h * d1 * (-4 * t3 + 7 * t4 - 3 * t5)
            + h * h * s1 * (0.5 * t3 - t4 + 0.5 * t5))


@dataclass(frozen=True)
class RadialODESolution:
    """Solution of u'' = v u / 2 with u(r0) = 0, u'(r0) = 1, rescaled.

    The profile is normalised so that u'(r_end) = 1, hence for r beyond
    the range u(r) = r - a exactly. ``r``/``u``/``du`` hold the requested
    grid; the ``*_dense`` arrays hold every integration knot and ``c_left``
    / ``c_right`` the one-sided values of v/2 on each step, so that
    ``u_at`` interpolates with quintic Hermite polynomials (u'' = c u).
    ``a`` is the Richardson-extrapolated value of R - u(R)/u'(R).
    """

    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    log_norm: float
    r_dense: np.ndarray
    u_dense: np.ndarray
    du_dense: np.ndarray
    c_left: np.ndarray
    c_right: np.ndarray
    start: float
    a: float
    error: float
    steps: int

    def u_at(self, r):
        """Interpolated u at arbitrary radii (0 inside the core)."""
        r = np.asarray(r, dtype=float)
        rd = self.r_dense
        out = np.empty_like(r)
        below = r <= rd[0]
        above = r >= rd[-1]
        mid = ~(below | above)
        out[below] = 0.0
        out[above] = self.u_dense[-1] + self.du_dense[-1] * (r[above] - rd[-1])
        rm = r[mid]
        i = np.clip(np.searchsorted(rd, rm, side="right") - 1, 0, rd.size - 2)
        h = rd[i + 1] - rd[i]
        t = (rm - rd[i]) / h
        u0, u1 = self.u_dense[i], self.u_dense[i + 1]
        out[mid] = hermite5(t, h, u0, u1, self.du_dense[i], self.du_dense[i + 1],
                            self.c_left[i] * u0, self.c_right[i] * u1)
        return out

    def log_derivative_at(self, r: float) -> float:
        i = int(np.argmin(np.abs(self.r_dense - r)))
        if abs(self.r_dense[i] - r) > 1e-12 * max(1.0, abs(r)):
            raise ValueError("r=%r is not an integration knot" % r)
        return self.du_dense[i] / self.u_dense[i]


def _knot_intervals(potential, r_end, extra_nodes):
    start = potential.core_radius
    segs = potential.segments()
    knots = {start, r_end}
    knots.update(float(x) for x in extra_nodes if start <= x <= r_end)
    for lo, hi, _, _ in segs:
        if start <= lo <= r_end:
            knots.add(float(lo))
        if start <= hi <= r_end:
            knots.add(float(hi))
    return np.array(sorted(knots)), segs


def _segment_coeffs(segs, a, b):
    """Linear coefficient c(r) = v(r)/2 at a and b for the interval [a, b]."""
    mid = 0.5 * (a + b)
    c_a = np.zeros_like(a)
    c_b = np.zeros_like(b)
    kappa2 = np.zeros_like(a)
    for lo, hi, v_lo, v_hi in segs:
        inside = (mid > lo) & (mid < hi)
        if not np.any(inside):
            continue
        slope = (v_hi - v_lo) / (hi - lo)
        c_a[inside] = 0.5 * (v_lo + slope * (a[inside] - lo))
        c_b[inside] = 0.5 * (v_lo + slope * (b[inside] - lo))
        kappa2[inside] = 0.5 * max(v_lo, v_hi)
    return c_a, c_b, kappa2


def _integrate_once(knots, segs, base_h, factor):
    a, b = knots[:-1], knots[1:]
    c_a, c_b, kappa2 = _segment_coeffs(segs, a, b)
    kappa = np.sqrt(kappa2)
    length = b - a
    h_loc = np.where(kappa > 0, np.minimum(base_h, 0.25 / np.maximum(kappa, 1e-300)), base_h)
    m = np.maximum(np.ceil(length / h_loc - 1e-9).astype(int), 1) * factor
    idx = np.repeat(np.arange(a.size), m)
    offs = np.arange(idx.size) - np.repeat(np.cumsum(m) - m, m)
    h = (length / m)[idx]
    r0 = a[idx] + offs * h
    r1 = np.where(offs == m[idx] - 1, b[idx], r0 + h)
    h = r1 - r0
    slope = np.where(length > 0, (c_b - c_a) / length, 0.0)
    s0 = c_a[idx] + slope[idx] * (r0 - a[idx])
    s1 = c_a[idx] + slope[idx] * (r1 - a[idx])
    mats = _rk4_propagators(r0, h, s0, s1)
    prods, logs = _prefix_products(mats)
    y = prods[:, :, 1]  # initial data (u, u') = (0, 1)
    r_dense = np.concatenate([[knots[0]], r1])
    u = np.concatenate([[0.0], y[:, 0]])
    du = np.concatenate([[1.0], y[:, 1]])
    lg = np.concatenate([[0.0], logs])
    ref_log = lg[-1] + math.log(abs(du[-1]))
    scale = np.exp(lg - ref_log)
    return r_dense, u * scale, du * scale, ref_log, s0, s1


def solve_radial_ode(v, grid: RadialGrid | Sequence[float] | None = None,
                     tol: Tolerance | None = None, r_end: float | None = None,
                     max_levels: int = 12) -> RadialODESolution:
    """Integrate u'' = v u / 2 outwards from the core (or the origin).

    ``v`` is any object exposing ``core_radius``, ``range`` and
    ``segments()`` (piecewise-linear pieces ``(lo, hi, v_lo, v_hi)``).
    Integration runs to ``max(grid[-1], r_end, range)`` with classical RK4
    on every knot interval (knots = grid nodes plus potential breakpoints).
    The step is halved until the Richardson estimate |a_h - a_2h| / 15 of
    the scattering length R - u(R)/u'(R) meets ``tol``.

    Raises:
        StepTooCoarse: if ``max_levels`` halvings do not meet the tolerance.
    """
    tol = tol or DEFAULT_TOL
    if grid is None:
        nodes = np.zeros(0)
    else:
        nodes = np.asarray(grid.nodes if isinstance(grid, RadialGrid) else grid, dtype=float)
    R = float(v.range)
    start = float(v.core_radius)
    end = max([R, r_end or 0.0] + ([float(nodes[-1])] if nodes.size else []))
    if end <= start:
        end = start + max(R, 1.0)
    knots, segs = _knot_intervals(v, end, nodes)
    base_h = (end - start) / 32.0

    def scat_len(run):
        r_d, u_d, du_d = run[:3]
        if R <= start:
            return R
        i = int(np.argmin(np.abs(r_d - R)))
        return R - u_d[i] / du_d[i]

    prev = _integrate_once(knots, segs, base_h, 1)
    prev_a = scat_len(prev)
    for level in range(1, max_levels + 1):
        cur = _integrate_once(knots, segs, base_h, 2 ** level)
        cur_a = scat_len(cur)
        est = abs(cur_a - prev_a) / 15.0
        if est <= max(tol.rel * abs(cur_a), tol.abs, 1e-15 * max(R, 1e-300)):
            break
        prev, prev_a = cur, cur_a
    else:
        raise StepTooCoarse("radial ODE did not converge after %d step halvings" % max_levels)

    a_ext = cur_a + (cur_a - prev_a) / 15.0
    r_d, u_d, du_d, lg, s0, s1 = cur
    if nodes.size:
        pos = np.clip(np.searchsorted(r_d, nodes), 0, r_d.size - 1)
        hit = np.abs(r_d[pos] - nodes) <= 1e-12 * max(1.0, end)
        u_grid = np.where(nodes <= start, 0.0, u_d[pos])
        du_grid = np.where(nodes < start, 0.0, du_d[pos])
        assert np.all(hit | (nodes < start)), "grid nodes must be knots"
    else:
        u_grid = du_grid = np.zeros(0)
    return RadialODESolution(
        r=nodes, u=u_grid, du=du_grid, log_norm=lg,
        r_dense=r_d, u_dense=u_d, du_dense=du_d, c_left=s0, c_right=s1,
        start=start, a=a_ext, error=est, steps=int(s0.size),
    )


def ode_scattering_length(v, tol: Tolerance | None = None) -> tuple[float, float]:
    """Scattering length R - u(R)/u'(R) and its Richardson error estimate."""
    if float(v.range) <= 0:
        return 0.0, 0.0
    sol = solve_radial_ode(v, None, tol)
    return float(sol.a), float(sol.error)


# ---------------------------------------------------------------------------
# Variational (finite-element) route
# ---------------------------------------------------------------------------

_GL3_X, _GL3_W = np.polynomial.legendre.leggauss(3)


@dataclass(frozen=True)
class RadialQuadraticForm:
    """Tridiagonal P1 discretisation of 4 pi int (phi'^2 + v phi^2 / 2) r^2 dr.

    ``fixed`` maps node indices to prescribed values (Dirichlet data).
    ``elements`` optionally holds per-element (stiffness, m00, m01, m11);
    the energy is then summed element by element, which avoids the
    cancellation in phi^T K phi on fine meshes.
    """

    nodes: np.ndarray
    diag: np.ndarray
    off: np.ndarray
    fixed: dict
    elements: tuple | None = None

    def energy(self, phi):
        phi = np.asarray(phi, dtype=float)
        if self.elements is None:
            return float(phi @ (self.diag * phi) + 2.0 * np.sum(self.off * phi[:-1] * phi[1:]))
        stiff, m00, m01, m11 = self.elements
        pa, pb = phi[:-1], phi[1:]
        terms = stiff * (pb - pa) ** 2 + m00 * pa * pa + 2.0 * m01 * pa * pb + m11 * pb * pb
        return float(4 * np.pi * math.fsum(terms))


def _fem_mesh(v, r_outer, base_h):
    start = float(v.core_radius)
    segs = v.segments()
    edges = {start, r_outer}
    for lo, hi, _, _ in segs:
        edges.update(x for x in (lo, hi) if start <= x <= r_outer)
    edges = np.array(sorted(edges))
    pieces = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid = 0.5 * (lo + hi)
        kappa = 0.0
        for slo, shi, vl, vh in segs:
            if slo < mid < shi:
                kappa = math.sqrt(0.5 * max(vl, vh))
        h = base_h if kappa == 0 else min(base_h, 0.5 / kappa)
        n = max(2, int(math.ceil((hi - lo) / h)))
        pieces.append(np.linspace(lo, hi, n + 1)[:-1])
    pieces.append([r_outer])
    return np.concatenate(pieces), segs


def assemble_radial_form(v, R_tilde: float, base_h: float) -> RadialQuadraticForm:
    """Assemble the P1 form on a mesh aligned with every breakpoint of ``v``.

    Element integrals are exact: r^2 is integrated in closed form for the
    stiffness part and the (piecewise-linear) potential term uses 3-point
    Gauss-Legendre, exact for the degree-5 integrand.
    """
    nodes, segs = _fem_mesh(v, R_tilde, base_h)
    a, b = nodes[:-1], nodes[1:]
    h = b - a
    stiff = (b ** 3 - a ** 3) / 3.0 / h ** 2
    mid = 0.5 * (a + b)
    xq = mid[:, None] + 0.5 * h[:, None] * _GL3_X[None, :]
    wq = 0.5 * h[:, None] * _GL3_W[None, :]
    vq = np.zeros_like(xq)
    for lo, hi, v_lo, v_hi in segs:
        inside = (mid > lo) & (mid < hi)
        if np.any(inside):
            slope = (v_hi - v_lo) / (hi - lo) if hi > lo else 0.0
            vq[inside] = v_lo + slope * (xq[inside] - lo)
    l0 = (b[:, None] - xq) / h[:, None]
    l1 = (xq - a[:, None]) / h[:, None]
    wgt = 0.5 * vq * xq ** 2 * wq
    m00 = np.sum(wgt * l0 * l0, axis=1)
    m01 = np.sum(wgt * l0 * l1, axis=1)
    m11 = np.sum(wgt * l1 * l1, axis=1)
    n = nodes.size
    diag = np.zeros(n)
    diag[:-1] += stiff + m00
    diag[1:] += stiff + m11
    off = -stiff + m01
    fixed = {n - 1: 1.0}
    if v.core_radius > 0:
        fixed[0] = 0.0
    return RadialQuadraticForm(nodes, 4 * np.pi * diag, 4 * np.pi * off, fixed,
                               (stiff, m00, m01, m11))


def minimize_quadratic_form(form: RadialQuadraticForm) -> tuple[float, np.ndarray]:
    """Minimise phi^T K phi over phi with the prescribed Dirichlet values.

    Returns the minimum and the minimiser. Raises SingularSystem if the
    free block is not positive definite.
    """
    n = form.diag.size
    phi = np.zeros(n)
    fixed_idx = sorted(form.fixed)
    for i, val in form.fixed.items():
        phi[i] = val
    free = np.ones(n, dtype=bool)
    free[fixed_idx] = False
    idx = np.flatnonzero(free)
    if idx.size:
        if np.any(np.diff(idx) != 1):
            raise ValueError("fixed nodes must sit at the ends of the mesh")
        i0, i1 = idx[0], idx[-1]
        rhs = np.zeros(idx.size)
        if i0 > 0:
            rhs[0] -= form.off[i0 - 1] * phi[i0 - 1]
        if i1 < n - 1:
            rhs[-1] -= form.off[i1] * phi[i1 + 1]
        band = np.zeros((2, idx.size))
        band[0, 1:] = form.off[i0:i1]
        band[1] = form.diag[i0:i1 + 1]
        try:
            phi[idx] = scipy.linalg.solveh_banded(band, rhs)
        except np.linalg.LinAlgError as exc:
            raise SingularSystem("discrete radial operator is not positive definite") from exc
    return form.energy(phi), phi


def variational_minimum(v, R_tilde: float, resolution: int = 200, tol: Tolerance | None = None,
                        max_levels: int = 8) -> tuple[float, float, list]:
    """Mesh-extrapolated minimum of the radial functional with phi(R_tilde) = 1.

    Meshes are refined by factors of two; the raw minima (which decrease
    monotonically) are Romberg-extrapolated in h^2 and h^4. Returns
    (extrapolated minimum, error estimate, raw minima).
    """
    tol = tol or DEFAULT_TOL
    base = R_tilde / resolution
    raw = []
    table = []
    for level in range(max_levels):
        form = assemble_radial_form(v, R_tilde, base / 2 ** level)
        raw.append(minimize_quadratic_form(form)[0])
        row = [raw[-1]]
        if table:
            for j, factor in enumerate((4.0, 16.0)):
                if j >= len(table[-1]):
                    break
                row.append(row[j] + (row[j] - table[-1][j]) / (factor - 1.0))
        table.append(row)
        if len(table) >= 3 and len(row) == 3:
            est = abs(row[2] - table[-2][2]) if len(table[-2]) == 3 else abs(row[2] - row[1])
            if est <= max(tol.rel * abs(row[2]), 1e-15 * 4 * np.pi * R_tilde):
                return row[2], est, raw
    raise MeshTooCoarse("variational minimum not converged after %d refinements" % max_levels)


# ---------------------------------------------------------------------------
# Dense symmetric eigenproblems
# ---------------------------------------------------------------------------


def _bandwidth(m: np.ndarray) -> int:
    rows, cols = np.nonzero(m)
    return int(np.max(np.abs(rows - cols))) if rows.size else 0


def _lowest_banded(sym: np.ndarray, bw: int, scale: float):
    """Lowest eigenvalue by ?sbevx, eigenvector by shifted inverse iteration.

    The shift sits just below the eigenvalue, so the shifted band matrix is
    positive definite and a banded Cholesky solve applies.
    """
    n = sym.shape[0]
    band = np.zeros((bw + 1, n))
    for d in range(bw + 1):
        band[d, :n - d] = np.diagonal(sym, -d)
    lam = float(scipy.linalg.eig_banded(band, lower=True, eigvals_only=True,
                                        select="i", select_range=(0, 0))[0])
    x = np.random.default_rng(0).standard_normal(n)
    delta = 1e-9 * scale
    for _ in range(8):
        shifted = band.copy()
        shifted[0] -= lam - delta
        try:
            for _ in range(4):
                x = scipy.linalg.solveh_banded(shifted, x, lower=True)
                x /= np.linalg.norm(x)
            break
        except np.linalg.LinAlgError:
            delta *= 10.0
    else:
        raise NoConvergence("inverse iteration failed to factor the shifted matrix")
    return lam, x


def min_eigen_sym(matrix, check: bool = True) -> tuple[float, np.ndarray]:
    """Lowest eigenpair of a dense real symmetric matrix.

    Narrow-banded matrices go through LAPACK's banded eigenvalue solver
    (?sbevx), the rest through ?syevr.
    """
    m = np.asarray(matrix, dtype=float)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise NotSymmetric("matrix must be square")
    scale = max(np.abs(m).max(), 1e-300)
    if check and np.abs(m - m.T).max() > 1e-12 * scale:
        raise NotSymmetric("matrix is not symmetric within 1e-12 relative")
    sym = 0.5 * (m + m.T)
    n = sym.shape[0]
    bw = _bandwidth(sym)
    try:
        if n > 64 and 4 * (bw + 1) < n:
            lam, x = _lowest_banded(sym, bw, scale)
        else:
            w, vec = scipy.linalg.eigh(sym, subset_by_index=[0, 0], driver="evr")
            lam, x = float(w[0]), vec[:, 0]
    except (np.linalg.LinAlgError, ValueError) as exc:
        raise NoConvergence(str(exc)) from exc
    resid = np.linalg.norm(sym @ x - lam * x)
    norm = np.linalg.norm(sym, 2) if n <= 64 else scale * n
    if resid > 1e-10 * max(norm, 1e-300):
        raise NoConvergence("eigen residual %.3e too large" % resid)
    return lam, x
