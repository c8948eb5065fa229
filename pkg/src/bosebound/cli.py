"""Command-line interface: ``bosebound <subcommand> ...``.

Exit codes: 0 success (all checks passed), 1 a check failed, 2 a
configuration, input or I/O error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from . import bogoliubov as bog
from . import energy as en
from . import localization as loc
from . import numerics as nm
from . import potentials as pot
from . import scattering as sc
from . import tables
from . import verify as ver
from .errors import BoseBoundError, ConfigError

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2


def _float_list(text: str) -> list:
    try:
        return [float(x) for x in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError("expected a comma-separated list of numbers") from None


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bosebound", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version="%(prog)s " + __version__)
    parser.add_argument("--config", help="JSON file with option values (keys as the long options)")
    parser.add_argument("--seed", type=int, default=0, help="seed recorded in outputs")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("scatter", help="scattering length and profiles of a potential")
    p.add_argument("--potential", required=True, help="potential description file (JSON)")
    p.add_argument("--rtilde", type=float, default=None, help="outer radius of the variational problem")
    p.add_argument("--out", default="-", help="CSV output path (- for stdout)")

    p = sub.add_parser("localize", help="multiplier F, comparison symbol F_s and 1 - theta^2")
    p.add_argument("--s", type=float, default=0.05)
    p.add_argument("--ell", type=float, default=1.0)
    p.add_argument("--pgrid", default="axis:64", help="axis:N, diag:N or mixed:N")
    p.add_argument("--out", default="-")

    p = sub.add_parser("bog", help="two-mode bound against the truncated Fock oracle")
    p.add_argument("--A", type=float, required=True)
    p.add_argument("--B", type=float, required=True)
    p.add_argument("--kappa", type=complex, default=0j)
    p.add_argument("--nmax", type=int, default=40)

    p = sub.add_parser("lhy", help="leading and Bogoliubov energy densities across rho a^3")
    p.add_argument("--potential", required=True)
    p.add_argument("--rho-a3", type=_float_list, required=True, dest="rho_a3")
    p.add_argument("--K", type=float, default=0.1)
    p.add_argument("--C-kin", type=float, default=None, dest="C_kin")
    p.add_argument("--out", default="-")

    p = sub.add_parser("energy", help="itemised energy lower bound as JSON")
    p.add_argument("--potential", required=True)
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--rho-mu", type=float, default=None, dest="rho_mu")
    p.add_argument("--C", type=float, default=1.0)
    p.add_argument("--K", type=float, default=0.1)
    p.add_argument("--mode", choices=("auto", "box", "grand-canonical"), default="auto")
    p.add_argument("--out", default="-")

    p = sub.add_parser("verify", help="run the numerical check suite")
    p.add_argument("--filter", default=None, help="check name or glob")
    p.add_argument("--C-kin", type=float, default=None, dest="C_kin")
    p.add_argument("--list", action="store_true", help="list check names and exit")
    p.add_argument("--out", default=None, help="JSON pass/fail list")
    return parser


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------


def apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace, argv) -> argparse.Namespace:
    """Fill options from ``--config``; command-line flags take precedence.

    Raises:
        ConfigError: unreadable file, invalid JSON or unknown keys.
    """
    if not args.config:
        return args
    path = Path(args.config)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError("%s: %s" % (path, exc.strerror or exc)) from None
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("%s:%d:%d: %s" % (path, exc.lineno, exc.colno, exc.msg)) from None
    if not isinstance(data, dict):
        raise ConfigError("%s:1:1: configuration must be a JSON object" % path)
    known = {k for k in vars(args) if k not in ("config", "command")}
    unknown = sorted(set(data) - known)
    if unknown:
        raise ConfigError("%s: unknown keys for '%s': %s" % (path, args.command, ", ".join(unknown)))
    given = {a.split("=")[0].lstrip("-").replace("-", "_") for a in argv if a.startswith("--")}
    for key, value in data.items():
        if key not in given:
            setattr(args, key, value)
    return args


def _meta(args, **extra) -> dict:
    cfg = {k: v for k, v in sorted(vars(args).items()) if k not in ("out", "config")}
    meta = {"config_hash": en.config_hash(cfg), "seed": args.seed}
    meta.update(extra)
    return meta


def _write_text(path, text: str) -> None:
    if path in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def cmd_scatter(args) -> int:
    v = pot.load(args.potential)
    a_ode = sc.scattering_length_ode(v)
    a_var = sc.scattering_length_variational(v, args.rtilde) if v.range > 0 else 0.0
    if v.has_core:
        # profiles live outside the core; g = v u / r is finite there
        r = np.linspace(v.core_radius, 4.0 * v.range, 301)
        u = nm.solve_radial_ode(v, r).u_at(r)
        rows = list(zip(r, 1.0 - u / r, v(r) * u / r))
    else:
        sol = sc.scattering_solution(v)
        rows = list(zip(sol.grid.nodes, sol.omega, sol.g))
    text = tables.format_table(rows, ["r", "omega", "g"],
                               _meta(args, a_ode=a_ode, a_variational=a_var, R=v.range))
    _write_text(args.out, text)
    return EXIT_OK


def cmd_localize(args) -> int:
    """Columns in physical momentum p; F and F_s are compared in the variable ell p."""
    q = loc.parse_pgrid(args.pgrid, args.s)
    kern = loc.LocalizationKernel(s=args.s, ell=args.ell)
    phys = q / args.ell
    F = np.atleast_1d(kern.F(phys, ell=args.ell))
    qn = np.linalg.norm(q, axis=1)
    inner = (qn > 0) & (qn < 5.0 / 6.0 / args.s)
    C = float(np.max(F[inner] / (args.s * qn[inner] ** 2))) if np.any(inner) else 0.0
    Fs = np.atleast_1d(kern.Fs(phys, C, args.ell)) * args.ell ** 2
    quav = loc.quav_multiplier(phys, args.ell)
    rows = [(x, y, z, p, f, fs, w) for (x, y, z), p, f, fs, w
            in zip(phys, qn / args.ell, F, Fs, quav)]
    text = tables.format_table(rows, ["px", "py", "pz", "p", "F", "F_s", "quav"],
                               _meta(args, C_fit=C, D=kern.D))
    _write_text(args.out, text)
    return EXIT_OK


def cmd_bog(args) -> int:
    spec = bog.FockOracleSpec(args.A, args.B, args.kappa, args.nmax)
    bound = bog.bog_bound(args.A, args.B, args.kappa)
    oracle = bog.fock_oracle(spec, check=False)
    out = {"bound": bound, "oracle": oracle, "gap": oracle - bound,
           "exact": bog.bogoliubov_ground_energy(args.A, args.B, args.kappa)}
    for key in ("bound", "oracle", "gap", "exact"):
        print("%-7s %.17g" % (key, out[key]))
    return EXIT_OK


def cmd_lhy(args) -> int:
    v = pot.load(args.potential)
    a = sc.scattering_length_ode(v)
    cfg = en.EnergyConfig(K=args.K, C_kin=args.C_kin)
    rows = []
    for x in args.rho_a3:
        rho = x / a ** 3
        rep = en.box_lower_bound(v, rho, rho, cfg)
        rows.append((x, rep.leading, rep.lhy_term))
    text = tables.format_table(rows, ["rho_a3", "e_leading", "e_lhy_term"], _meta(args, a=a))
    _write_text(args.out, text)
    return EXIT_OK


def cmd_energy(args) -> int:
    v = pot.load(args.potential)
    mode = args.mode
    if mode == "auto":
        mode = "grand-canonical" if v.has_core else "box"
    if mode == "box":
        rho_mu = args.rho if args.rho_mu is None else args.rho_mu
        rep = en.box_lower_bound(v, args.rho, rho_mu, en.EnergyConfig(C=args.C, K=args.K))
    else:
        rep = en.grand_canonical_assembly(v, args.rho, args.C)
    doc = rep.to_dict()
    doc["mode"] = mode
    doc["seed"] = args.seed
    doc["config_hash"] = _meta(args)["config_hash"]
    _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True, default=en._jsonable) + "\n")
    return EXIT_OK


def cmd_verify(args) -> int:
    if args.list:
        for name in ver.CHECKS:
            print(name)
        return EXIT_OK
    cfg = ver.VerifyConfig(seed=args.seed, filter=args.filter, C_kin=args.C_kin)
    names = ver.select(cfg.filter)
    if not names:
        raise ConfigError("no check matches %r" % cfg.filter)
    print("seed %d" % cfg.seed)

    def report(res):
        print("%s %-32s %s" % ("PASS" if res.passed else "FAIL", res.name, res.detail), flush=True)

    results = ver.run_verify(cfg, report)
    if args.out:
        doc = {"seed": cfg.seed, "checks": [r.to_dict() for r in results],
               "passed": all(r.passed for r in results)}
        _write_text(args.out, json.dumps(doc, indent=2, sort_keys=True) + "\n")
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAIL


COMMANDS = {"scatter": cmd_scatter, "localize": cmd_localize, "bog": cmd_bog,
            "lhy": cmd_lhy, "energy": cmd_energy, "verify": cmd_verify}


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args = apply_config(parser, args, argv)
        return COMMANDS[args.command](args)
    except (ConfigError, OSError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return EXIT_CONFIG
    except (BoseBoundError, ValueError) as exc:
        print("error: %s: %s" % (type(exc).__name__, exc), file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
