"""Registry of numerical checks behind ``bosebound verify``.

Each check takes a :class:`VerifyConfig` and returns ``(passed, detail)``.
An exception inside a check marks that check failed; the suite continues.
"""

from __future__ import annotations

import fnmatch
import math
import time
from dataclasses import dataclass
from typing import Callable

import numpy as np

from . import bogoliubov as bog
from . import energy as en
from . import localization as loc
from . import potentials as pot
from . import scattering as sc


@dataclass(frozen=True)
class VerifyConfig:
    seed: int = 0
    filter: str | None = None
    C_kin: float | None = None
    s: float = 0.05
    K: float = 0.1
    rel_tol: float = 1e-8


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def to_dict(self) -> dict:
        return {"name": self.name, "passed": self.passed, "detail": self.detail}


CHECKS: dict[str, Callable] = {}


def check(name: str):
    def register(fn):
        CHECKS[name] = fn
        return fn
    return register


def random_piecewise(rng: np.random.Generator, n_pieces: int | None = None) -> pot.RadialPotential:
    """Random piecewise-constant potential with 1-4 pieces inside r <= 2."""
    m = int(rng.integers(1, 5)) if n_pieces is None else n_pieces
    edges = np.sort(rng.uniform(0.2, 2.0, m))
    edges = np.maximum.accumulate(edges + 1e-3 * np.arange(m))
    values = rng.uniform(0.5, 30.0, m)
    return pot.piecewise_constant(edges.tolist(), values.tolist())


def square_well_a(V0: float, R: float) -> float:
    kappa = math.sqrt(V0 / 2.0)
    return R * (1.0 - math.tanh(kappa * R) / (kappa * R))


# ---------------------------------------------------------------------------
# scattering
# ---------------------------------------------------------------------------


@check("scattering.hard_core")
def _hard_core(cfg):
    errs = []
    for R in (0.5, 1.0, 2.0):
        v = pot.hard_core(R)
        errs.append(abs(sc.scattering_length_ode(v) - R) / R)
        errs.append(abs(sc.scattering_length_variational(v) - R) / R)
    worst = max(errs)
    return worst <= cfg.rel_tol, "max relative error %.2e" % worst


@check("scattering.square_well")
def _square_well(cfg):
    rng = np.random.default_rng(cfg.seed)
    worst = 0.0
    for _ in range(10):
        V0, R = rng.uniform(0.1, 200.0), rng.uniform(0.2, 3.0)
        a = sc.scattering_length_ode(pot.square_well(V0, R))
        worst = max(worst, abs(a - square_well_a(V0, R)) / square_well_a(V0, R))
    return worst <= cfg.rel_tol, "max relative error %.2e" % worst


@check("scattering.identities")
def _identities(cfg):
    sol = sc.scattering_solution(pot.square_well(8.0, 1.0))
    integral = sol.integral("g") / (8.0 * math.pi * sol.a) - 1.0
    k = sc.identity_k_grid(sol.R)
    g = sc.fourier(sol, "g", k)
    om = sc.fourier(sol, "omega", k)
    ident = float(np.max(np.abs(om * 2.0 * k * k - g))) / sc.fourier(sol, "g", 0.0)
    ext = sol.grid.nodes >= sol.R
    law = float(np.max(np.abs(sol.omega[ext] * sol.grid.nodes[ext] - sol.a))) / sol.a
    ok = abs(integral) <= 1e-6 and ident <= 1e-6 and law <= 1e-8
    return ok, "int g: %.1e, Fourier: %.1e, exterior: %.1e" % (integral, ident, law)


@check("scattering.truncation")
def _truncation(cfg):
    seq = sc.truncation_limit(pot.hard_core(1.0), [8, 128, 2048, 2e6])
    # the exact last value is 1 - tanh(1000)/1000, exactly 1e-3 below 1
    ok = all(b > a for a, b in zip(seq, seq[1:])) and abs(seq[-1] - 1.0) <= 1e-3 * (1 + 1e-9)
    return ok, "sequence " + ", ".join("%.8f" % x for x in seq)


@check("scattering.additivity")
def _additivity(cfg):
    rng = np.random.default_rng(cfg.seed + 1)
    bad = 0
    for _ in range(10):
        v = random_piecewise(rng)
        for R_split in rng.uniform(0.0, v.range, 3):
            if not sc.additivity_check(v, float(R_split)).holds:
                bad += 1
    return bad == 0, "%d of 30 splits violate the sandwich" % bad


@check("scattering.solver_agreement")
def _solver_agreement(cfg):
    rng = np.random.default_rng(cfg.seed + 2)
    worst = 0.0
    for _ in range(6):
        v = random_piecewise(rng)
        a1 = sc.scattering_length_ode(v)
        a2 = sc.scattering_length_variational(v)
        worst = max(worst, abs(a1 - a2) / a1)
    return worst <= 1e-6, "max relative gap %.2e" % worst


# ---------------------------------------------------------------------------
# localization
# ---------------------------------------------------------------------------


def _kernel(cfg, **kw):
    C_kin = cfg.C_kin if cfg.C_kin is not None else None
    return loc.LocalizationKernel(s=cfg.s, C_kin=C_kin, K=cfg.K, **kw)


@check("localization.F")
def _F(cfg):
    kern = _kernel(cfg)
    t = kern.F_terms(np.zeros((1, 3)))
    big = max(abs(float(x[0])) for x in t)
    cancel = abs(sum(float(x[0]) for x in t)) / big
    h = 1e-3
    e = np.eye(3) * h
    grad = (kern.F(e) - kern.F(-e)) / (2.0 * h)
    scale = float(np.max(kern.F(e)))
    grad_rel = float(np.max(np.abs(grad))) * h / max(scale, 1e-300)
    p = loc.default_pgrid(cfg.s, 16)
    F = kern.F(p)
    floor = float(np.min(F + 1e-8 * (1.0 + np.sum(p * p, axis=1))))
    ok = cancel < 1e-8 and float(np.max(np.abs(grad))) < 1e-6 and floor >= 0
    return ok, "F(0) cancellation %.1e, |grad F(0)| %.1e (rel %.1e), min slack %.3g" % (
        cancel, float(np.max(np.abs(grad))), grad_rel, floor)


@check("localization.Fs_bound")
def _Fs(cfg):
    rep = loc.Fs_bound_check(cfg.s)
    return rep.passes, "fitted C %.4g, outer margin %.4g" % (rep.C, rep.outer_min_margin)


@check("localization.quav_beta")
def _quav(cfg):
    beta = loc.quav_beta_search()
    return 0 < beta <= 1, "beta %.10f" % beta


@check("localization.chi")
def _chi(cfg):
    kern = _kernel(cfg)
    norm = abs(kern.chi_l2_norm2() - 1.0)
    D = kern.D
    mid = float(kern.chi_conv_chi(D))
    ok = norm <= 1e-8 and abs(float(kern.chi_conv_chi(0.0)) - 1.0) <= 1e-10 and mid >= 0.5 - 1e-10
    return ok, "|int chi^2 - 1| %.1e, D %.6f, chi*chi(D) %.6f" % (norm, D, mid)


@check("localization.sandwich")
def _sandwich(cfg):
    v = pot.square_well(8.0, 1.0)
    sol = sc.scattering_solution(v)
    ex = []
    for ratio in (0.02, 0.01):
        wp = loc.windowed_potential(v, sol, _kernel(cfg, ell=1.0 / ratio))
        if wp.sandwich_min() < -1e-12:
            return False, "W1 < g somewhere"
        ex.append(wp.sandwich_excess())
    slope = math.log2(ex[0] / ex[1])
    return abs(slope - 2.0) <= 0.2, "excess %.3e -> %.3e, exponent %.4f" % (ex[0], ex[1], slope)


# ---------------------------------------------------------------------------
# bogoliubov
# ---------------------------------------------------------------------------


@check("bogoliubov.oracle")
def _oracle(cfg):
    rng = np.random.default_rng(cfg.seed + 3)
    worst = math.inf
    for _ in range(10):
        A = rng.uniform(0.5, 3.0)
        B = A * rng.uniform(-0.9, 0.9)
        kappa = complex(*rng.uniform(-0.5, 0.5, 2))
        spec = bog.FockOracleSpec(A, B, kappa, 20)
        gap = bog.fock_oracle(spec, check=False) - bog.bog_bound(A, B, kappa)
        worst = min(worst, gap + 1e-6)
    sharp = abs(bog.fock_oracle(bog.FockOracleSpec(2.0, 1.0, 0.0, 40)) - (math.sqrt(3.0) - 2.0))
    return worst >= 0 and sharp < 1e-6, "min dominance slack %.3g, sharpness %.1e" % (worst, sharp)


@check("bogoliubov.lhy")
def _lhy(cfg):
    r = bog.lhy_coefficient()
    e1, e2 = abs(r.J - r.J_exact), abs(r.coefficient - r.coefficient_exact)
    return e1 < 1e-8 and e2 < 1e-8, "J %.12f, coefficient %.10f" % (r.J, r.coefficient)


def _regime_coefficients(cfg, R_over_ell=0.01):
    v = pot.square_well(8.0, 1.0)
    sol = sc.scattering_solution(v)
    ell = 1.0 / R_over_ell
    rho_mu = (cfg.K / ell) ** 2 / sol.a
    kern = _kernel(cfg, ell=ell)
    wp = loc.windowed_potential(v, sol, kern)
    return sol, wp, rho_mu


@check("bogoliubov.regime")
def _regime(cfg):
    rng = np.random.default_rng(cfg.seed + 4)
    sol, wp, rho_mu = _regime_coefficients(cfg)
    k = np.concatenate([[0.0], 10.0 ** rng.uniform(-4.0, 2.0, 99)]) / sol.R
    worst = 0.0
    for ratio in rng.uniform(0.0, 20.0, 100):
        c = bog.bog_coefficients(wp, ratio * rho_mu, rho_mu)
        worst = max(worst, float(np.max(c.ratio(k))))
    return worst <= 0.5, "max |B|/A %.6f over 10^4 points" % worst


@check("bogoliubov.tau_split")
def _tau(cfg):
    sol, wp, rho_mu = _regime_coefficients(cfg)
    c = bog.bog_coefficients(wp, rho_mu, rho_mu)
    k = np.linspace(0.0, 50.0 / c.ell + 10 * c.cutoff, 2001)
    ok = bog.tau_lower_bound_holds(c, k)
    if c.C_kin == 0:
        ok = ok and bool(np.all(c.tau(k) == k * k))
    mono = bool(np.all(np.diff(c.A(k)) >= 0))
    return ok and mono, "C_kin %.4g, cutoff %.4g" % (c.C_kin, c.cutoff)


@check("bogoliubov.second_born")
def _second_born(cfg):
    v = pot.square_well(8.0, 1.0)
    sol = sc.scattering_solution(v)
    plain = bog.second_born_integral(loc.windowed_potential(v, sol, None))
    diffs = []
    for ratio in (0.02, 0.01):
        wp = loc.windowed_potential(v, sol, _kernel(cfg, ell=1.0 / ratio))
        diffs.append(bog.second_born_integral(wp).difference)
    q = diffs[0] / diffs[1]
    ok = abs(plain.difference) <= 1e-8 * plain.reference and abs(q - 4.0) <= 0.5
    return ok, "Parseval gap %.1e, window ratio %.4f" % (plain.difference, q)


@check("bogoliubov.error_scalings")
def _scalings(cfg):
    v = pot.square_well(8.0, 1.0)
    a = sc.scattering_length_ode(v)
    tab = bog.integral_error_scalings(v, cfg.K, [1e-8 / a ** 3, 1e-7 / a ** 3], s=cfg.s,
                                      C_kin=cfg.C_kin)
    ok = abs(tab.exponent_E1 - 0.5) <= 0.1 and abs(tab.exponent_E2 - 0.5) <= 0.1
    return ok, "exponents %.4f, %.4f" % (tab.exponent_E1, tab.exponent_E2)


# ---------------------------------------------------------------------------
# energy
# ---------------------------------------------------------------------------


@check("energy.covariance")
def _covariance(cfg):
    v = pot.square_well(8.0, 1.0)
    a = sc.scattering_length_ode(v)
    rho = 1e-6 / a ** 3
    conf = en.EnergyConfig(K=cfg.K, s=cfg.s, C_kin=cfg.C_kin)
    lam = 2.0
    base = en.box_lower_bound(v, rho, rho, conf).energy_densities()
    scaled = en.box_lower_bound(v.scaled(lam), rho / lam ** 3, rho / lam ** 3,
                                conf).energy_densities()
    worst = max(abs(scaled[k] * lam ** 5 - base[k]) / max(abs(base[k]), 1e-300)
                for k in base if base[k] != 0)
    return worst <= 1e-6, "max relative deviation %.2e" % worst


@check("energy.budget")
def _budget(cfg):
    v = pot.square_well(8.0, 1.0)
    rep = en.grand_canonical_assembly(v, 1e-6, 1.0)
    closed = rep.diagnostics["closed_form"]
    ok = abs(rep.total - closed) <= 1e-14 * abs(closed)
    ok = ok and rep.diagnostics["rho_mu_grid_maximiser"] == 1e-6
    return ok, "total %.6e, closed form %.6e" % (rep.total, closed)


# ---------------------------------------------------------------------------
# runner
# ---------------------------------------------------------------------------


def select(pattern: str | None) -> list:
    if not pattern:
        return list(CHECKS)
    names = [n for n in CHECKS if fnmatch.fnmatch(n, pattern) or pattern in n]
    return names


def run_verify(cfg: VerifyConfig | None = None, report: Callable | None = None) -> list:
    """Run the selected checks; exceptions count as failures."""
    cfg = cfg or VerifyConfig()
    results = []
    for name in select(cfg.filter):
        t0 = time.perf_counter()
        try:
            passed, detail = CHECKS[name](cfg)
        except Exception as exc:  # a failing module marks its check, never the suite
            passed, detail = False, "%s: %s" % (type(exc).__name__, exc)
        res = CheckResult(name, bool(passed), detail, time.perf_counter() - t0)
        results.append(res)
        if report is not None:
            report(res)
    return results
