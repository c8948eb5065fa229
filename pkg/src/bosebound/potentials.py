"""Nonnegative radial potentials of finite range.

Every potential is stored canonically as an optional hard-core radius plus
a list of piecewise-linear pieces ``(lo, hi, v_lo, v_hi)`` on half-open
intervals ``(lo, hi]`` (the first piece also owns ``r = lo = 0``). The
``kind``/``params`` pair is a human-facing description used for
serialisation; it is derived from the pieces, so two potentials that agree
pointwise compare equal regardless of how they were built.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import ConfigError

Piece = tuple  # (lo, hi, v_lo, v_hi)

KINDS = ("zero", "hard_core", "square_well", "piecewise_constant", "tabulated", "sum")


def _check_value(x, what):
    x = float(x)
    if not math.isfinite(x):
        raise ValueError("%s must be finite, got %r" % (what, x))
    if x < 0:
        raise ValueError("%s must be nonnegative, got %r" % (what, x))
    return x


def _simplify(pieces):
    """Drop empty pieces and merge collinear neighbours."""
    out = []
    for lo, hi, a, b in pieces:
        if hi <= lo:
            continue
        if out:
            plo, phi, pa, pb = out[-1]
            if phi == lo and pb == a:
                # merge when the union is still one linear function
                slope1 = (pb - pa) / (phi - plo)
                slope2 = (b - a) / (hi - lo)
                if slope1 == slope2 or (pa == pb == a == b):
                    out[-1] = (plo, hi, pa, b)
                    continue
        out.append((lo, hi, a, b))
    # trim trailing zero pieces
    while out and out[-1][2] == 0 and out[-1][3] == 0:
        out.pop()
    return tuple(out)


@dataclass(frozen=True, eq=False)
class RadialPotential:
    """Radial potential v(|x|) >= 0 with compact support.

    Attributes
    ----------
    core_radius : float
        Radius inside which v is +inf (0 when there is no hard core).
    pieces : tuple
        Piecewise-linear description beyond the core.
    """

    core_radius: float = 0.0
    pieces: tuple = field(default_factory=tuple)

    def __post_init__(self):
        core = _check_value(self.core_radius, "core radius")
        clean = []
        last = 0.0
        for piece in self.pieces:
            lo, hi, a, b = (float(t) for t in piece)
            if lo < last - 1e-300 or hi < lo or lo < 0:
                raise ValueError("pieces must be ordered, non-overlapping and in r >= 0")
            _check_value(a, "potential value")
            _check_value(b, "potential value")
            # values inside the core are irrelevant; clip there
            if hi <= core:
                last = hi
                continue
            if lo < core:
                a = a + (b - a) * (core - lo) / (hi - lo)
                lo = core
            clean.append((lo, hi, a, b))
            last = hi
        object.__setattr__(self, "core_radius", core)
        object.__setattr__(self, "pieces", _simplify(clean))

    # -- basic accessors -------------------------------------------------
    @property
    def range(self) -> float:
        """Smallest radius beyond which v vanishes."""
        if self.pieces:
            return max(self.pieces[-1][1], self.core_radius)
        return self.core_radius

    @property
    def has_core(self) -> bool:
        return self.core_radius > 0

    def segments(self) -> list:
        return list(self.pieces)

    def breakpoints(self) -> np.ndarray:
        pts = {self.core_radius, self.range}
        for lo, hi, _, _ in self.pieces:
            pts.update((lo, hi))
        return np.array(sorted(pts))

    @property
    def sup(self) -> float:
        if self.has_core:
            return math.inf
        return max((max(a, b) for _, _, a, b in self.pieces), default=0.0)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.zeros_like(r)
        for i, (lo, hi, a, b) in enumerate(self.pieces):
            inside = (r > lo) & (r <= hi)
            if i == 0 and lo == 0:
                inside |= r == 0
            out = np.where(inside, a + (b - a) * (r - lo) / (hi - lo), out)
        if self.has_core:
            out = np.where(r < self.core_radius, np.inf, out)
        return out if out.ndim else float(out)

    def __eq__(self, other):
        if not isinstance(other, RadialPotential):
            return NotImplemented
        return self.core_radius == other.core_radius and self.pieces == other.pieces

    def __hash__(self):
        return hash((self.core_radius, self.pieces))

    def __repr__(self):
        return "RadialPotential(kind=%r, params=%r)" % (self.kind, self.params)

    def __add__(self, other):
        return sum_of(self, other)

    # -- canonical description ------------------------------------------
    @property
    def kind(self) -> str:
        return self._describe()[0]

    @property
    def params(self) -> dict:
        return self._describe()[1]

    def _describe(self):
        pieces = self.pieces
        if self.has_core:
            if not pieces:
                return "hard_core", {"r_core": self.core_radius}
            rest = RadialPotential(0.0, pieces)
            return "sum", {"terms": [
                {"kind": "hard_core", "params": {"r_core": self.core_radius}},
                {"kind": rest.kind, "params": rest.params},
            ]}
        if not pieces:
            return "zero", {}
        constant = all(a == b for _, _, a, b in pieces)
        if constant and len(pieces) == 1 and pieces[0][0] == 0:
            return "square_well", {"V0": pieces[0][2], "R": pieces[0][1]}
        if constant:
            # fill gaps with zero-valued steps
            breaks, values = [], []
            last = 0.0
            for lo, hi, a, _ in pieces:
                if lo > last:
                    breaks.append(lo)
                    values.append(0.0)
                breaks.append(hi)
                values.append(a)
                last = hi
            return "piecewise_constant", {"breakpoints": breaks, "values": values}
        grid, samples = [], []
        for lo, hi, a, b in pieces:
            if grid and grid[-1] == lo and samples[-1] == a:
                pass
            else:
                if grid and grid[-1] != lo:
                    grid.append(grid[-1])
                    samples.append(0.0)
                    grid.append(lo)
                    samples.append(0.0)
                elif not grid and lo > 0:
                    grid.append(lo)
                    samples.append(0.0)
                grid.append(lo)
                samples.append(a)
            grid.append(hi)
            samples.append(b)
        return "tabulated", {"grid": grid, "samples": samples}

    def to_dict(self) -> dict:
        kind, params = self._describe()
        return {"kind": kind, "params": params, "range": self.range}

    # -- transformations --------------------------------------------------
    def scaled(self, lam: float) -> "RadialPotential":
        """Return r -> lam**-2 v(r / lam); the scattering length scales by lam."""
        lam = float(lam)
        if not lam > 0:
            raise ValueError("scale factor must be positive")
        s = lam ** -2
        return RadialPotential(
            self.core_radius * lam,
            tuple((lo * lam, hi * lam, a * s, b * s) for lo, hi, a, b in self.pieces))


# ---------------------------------------------------------------------------
# Constructors
# ---------------------------------------------------------------------------


def zero() -> RadialPotential:
    return RadialPotential()


def hard_core(r_core: float) -> RadialPotential:
    r_core = _check_value(r_core, "core radius")
    if r_core == 0:
        raise ValueError("core radius must be positive")
    return RadialPotential(r_core, ())


def square_well(V0: float, R: float) -> RadialPotential:
    V0 = _check_value(V0, "V0")
    R = _check_value(R, "R")
    if R == 0:
        raise ValueError("range must be positive")
    return RadialPotential(0.0, ((0.0, R, V0, V0),))


def piecewise_constant(breakpoints: Sequence[float], values: Sequence[float]) -> RadialPotential:
    """Step potential equal to ``values[i]`` on (breakpoints[i-1], breakpoints[i]].

    ``breakpoints`` are the outer radii of the steps (the first step starts
    at r = 0).
    """
    br = [float(b) for b in breakpoints]
    vals = [_check_value(v, "step value") for v in values]
    if len(br) != len(vals) or not br:
        raise ValueError("need one value per breakpoint")
    if br[0] <= 0 or any(b2 <= b1 for b1, b2 in zip(br, br[1:])):
        raise ValueError("breakpoints must be positive and strictly increasing")
    lows = [0.0] + br[:-1]
    return RadialPotential(0.0, tuple((lo, hi, v, v) for lo, hi, v in zip(lows, br, vals)))


def tabulated(grid: Sequence[float], samples: Sequence[float]) -> RadialPotential:
    """Linear interpolation of ``samples`` on ``grid``; zero outside the grid.

    A repeated grid node encodes a jump: the first sample is the left
    limit, the second the right limit.
    """
    g = [float(x) for x in grid]
    s = [_check_value(x, "sample") for x in samples]
    if len(g) != len(s) or len(g) < 2:
        raise ValueError("grid and samples must have equal length >= 2")
    if g[0] < 0 or any(b < a for a, b in zip(g, g[1:])):
        raise ValueError("grid must be nondecreasing and start at r >= 0")
    if any(a == b == c for a, b, c in zip(g, g[1:], g[2:])):
        raise ValueError("a grid node may appear at most twice")
    pieces = tuple((g[i], g[i + 1], s[i], s[i + 1]) for i in range(len(g) - 1) if g[i + 1] > g[i])
    return RadialPotential(0.0, pieces)


def _pieces_on(v: RadialPotential, edges):
    """Values of v's linear pieces restricted to each [edges[i], edges[i+1]]."""
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        a = b = 0.0
        for plo, phi, pa, pb in v.pieces:
            if plo <= lo and hi <= phi and phi > plo:
                slope = (pb - pa) / (phi - plo)
                a = pa + slope * (lo - plo)
                b = pa + slope * (hi - plo)
                break
        out.append((lo, hi, a, b))
    return out


def _merged_edges(potentials, extra=()):
    edges = set(extra)
    for v in potentials:
        edges.add(0.0)
        edges.add(v.core_radius)
        for lo, hi, _, _ in v.pieces:
            edges.update((lo, hi))
    return sorted(edges)


def sum_of(*potentials: RadialPotential) -> RadialPotential:
    """Pointwise sum; the hard core of the result is the largest core."""
    if not potentials:
        return zero()
    edges = _merged_edges(potentials)
    total = [(lo, hi, 0.0, 0.0) for lo, hi in zip(edges[:-1], edges[1:])]
    for v in potentials:
        part = _pieces_on(v, edges)
        total = [(lo, hi, a + pa, b + pb) for (lo, hi, a, b), (_, _, pa, pb) in zip(total, part)]
    core = max(v.core_radius for v in potentials)
    return RadialPotential(core, tuple(total))


def from_description(kind: str, params: dict) -> RadialPotential:
    if kind not in KINDS:
        raise ValueError("unknown potential kind %r (expected one of %s)" % (kind, ", ".join(KINDS)))
    params = dict(params or {})
    try:
        if kind == "zero":
            v = zero()
        elif kind == "hard_core":
            v = hard_core(params.pop("r_core"))
        elif kind == "square_well":
            v = square_well(params.pop("V0"), params.pop("R"))
        elif kind == "piecewise_constant":
            v = piecewise_constant(params.pop("breakpoints"), params.pop("values"))
        elif kind == "tabulated":
            v = tabulated(params.pop("grid"), params.pop("samples"))
        else:
            terms = params.pop("terms")
            v = sum_of(*(from_description(t["kind"], t.get("params", {})) for t in terms))
    except KeyError as exc:
        raise ValueError("potential kind %r is missing parameter %s" % (kind, exc)) from None
    if params:
        raise ValueError("unknown parameters for %r: %s" % (kind, ", ".join(sorted(params))))
    return v


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------


def truncate(v: RadialPotential, n: float) -> RadialPotential:
    """Pointwise minimum min(v, n); a hard core becomes a plateau at height n."""
    n = float(n)
    if not n > 0:
        raise ValueError("truncation level must be positive")
    pieces = []
    if v.has_core:
        pieces.append((0.0, v.core_radius, n, n))
    for lo, hi, a, b in v.pieces:
        if a <= n and b <= n:
            pieces.append((lo, hi, a, b))
        elif a >= n and b >= n:
            pieces.append((lo, hi, n, n))
        else:
            rc = lo + (n - a) * (hi - lo) / (b - a)
            pieces.append((lo, rc, min(a, n), n))
            pieces.append((rc, hi, n, min(b, n)))
    return RadialPotential(0.0, tuple(pieces))


def split_range(v: RadialPotential, R_split: float) -> tuple[RadialPotential, RadialPotential]:
    """Split v = v 1_{r <= R_split} + v 1_{r > R_split}.

    A split strictly inside a hard core is rejected, because the outer part
    would be an infinite shell that this representation cannot hold.
    """
    Rs = float(R_split)
    if not Rs >= 0:
        raise ValueError("split radius must be nonnegative")
    if 0 < Rs < v.core_radius:
        raise ValueError("cannot split inside the hard core (r_core=%g)" % v.core_radius)
    inner, outer = [], []
    for lo, hi, a, b in v.pieces:
        if hi <= Rs:
            inner.append((lo, hi, a, b))
        elif lo >= Rs:
            outer.append((lo, hi, a, b))
        else:
            m = a + (b - a) * (Rs - lo) / (hi - lo)
            inner.append((lo, Rs, a, m))
            outer.append((Rs, hi, m, b))
    if Rs == 0:
        return zero(), v
    return RadialPotential(v.core_radius, tuple(inner)), RadialPotential(0.0, tuple(outer))


def l1_norm(v: RadialPotential) -> float:
    """4 pi int v(r) r^2 dr, exact on the piecewise-linear representation."""
    if v.has_core:
        return math.inf
    total = 0.0
    for lo, hi, a, b in v.pieces:
        slope = (b - a) / (hi - lo)
        c0 = a - slope * lo
        total += c0 * (hi ** 3 - lo ** 3) / 3.0 + slope * (hi ** 4 - lo ** 4) / 4.0
    return 4.0 * math.pi * total


# ---------------------------------------------------------------------------
# Files
# ---------------------------------------------------------------------------


def dumps(v: RadialPotential) -> str:
    return json.dumps(v.to_dict(), indent=2, sort_keys=True) + "\n"


def loads(text: str, source: str = "<string>") -> RadialPotential:
    """Parse a potential description; raise ConfigError with line diagnostics."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError("%s:%d:%d: %s" % (source, exc.lineno, exc.colno, exc.msg)) from None
    if not isinstance(doc, dict):
        raise ConfigError("%s: top level must be an object with keys kind, params, range" % source)
    unknown = set(doc) - {"kind", "params", "range"}
    if unknown:
        raise ConfigError("%s: unknown keys %s" % (source, ", ".join(sorted(unknown))))
    if "kind" not in doc:
        raise ConfigError("%s: missing key 'kind'" % source)
    try:
        v = from_description(doc["kind"], doc.get("params", {}))
    except (ValueError, TypeError) as exc:
        raise ConfigError("%s: %s" % (source, exc)) from None
    if "range" in doc:
        try:
            declared = float(doc["range"])
        except (TypeError, ValueError):
            raise ConfigError("%s: range must be a number" % source) from None
        if not math.isclose(declared, v.range, rel_tol=1e-12, abs_tol=1e-300):
            raise ConfigError("%s: declared range %r disagrees with the potential's range %r"
                              % (source, declared, v.range))
    return v


def load(path) -> RadialPotential:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError("cannot read %s: %s" % (path, exc.strerror)) from None
    return loads(text, str(path))


def dump(v: RadialPotential, path) -> None:
    Path(path).write_text(dumps(v))


def sample_points(v: RadialPotential, n: int = 200) -> np.ndarray:
    """Points covering [0, 1.5 R] plus both sides of every breakpoint."""
    R = max(v.range, 1e-300)
    pts = list(np.linspace(0.0, 1.5 * R, n))
    for b in v.breakpoints():
        pts.extend([b, b * (1 - 1e-9), b * (1 + 1e-9)])
    return np.array(sorted(p for p in pts if p >= v.core_radius))
