"""Unit-circle crossings of the root locus and the guaranteed-stable gain interval."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .poly import CLUSTER_RTOL, Poly, RootSet, cluster_roots, eval_poly, reciprocal_bracket, roots
from .realization import TransferFunction

UNIT_CIRCLE_TOL = 1e-7
REAL_AXIS_RTOL = 1e-7
ZERO_ANGLE_TOL = 1e-6
DEGENERATE_GAIN_TOL = 1e-12
STABLE_MARGIN = 1e-9
OUTSIDE_TOL = 1e-9
DEFAULT_GRID = 2001


@dataclass(frozen=True)
class Diagnostic:
    theta: float
    reason: str
    value: complex


@dataclass(frozen=True)
class CrossingSet:
    theta_n: tuple[float, ...]
    theta_p: tuple[float, ...]
    gains: dict[float, float]
    alpha_n: float
    alpha_p: float
    flags: tuple[str, ...] = ()
    diagnostics: tuple[Diagnostic, ...] = field(default=(), repr=False)

    def to_dict(self, places: int = 9) -> dict:
        return {
            "theta_n": [round(t, places) for t in self.theta_n],
            "theta_p": [round(t, places) for t in self.theta_p],
            "gains": {f"{t:.{places}f}": g for t, g in self.gains.items()},
            "alpha_n": None if math.isinf(self.alpha_n) else self.alpha_n,
            "alpha_p": None if math.isinf(self.alpha_p) else self.alpha_p,
            "flags": list(self.flags),
            "diagnostics": [
                {"theta": d.theta, "reason": d.reason, "re": d.value.real, "im": d.value.imag}
                for d in self.diagnostics
            ],
        }


def _newton(h: Poly, dh: Poly, z: complex) -> complex:
    d = eval_poly(dh, z)
    if d == 0:
        return z
    return z - eval_poly(h, z) / d


def _derivative(p: Poly) -> Poly:
    return Poly([k * c for k, c in enumerate(p.coeffs)][1:])


def crossings(G: TransferFunction) -> CrossingSet:
    """Angles where ``G(e^{j theta})`` is real, split by sign, with their gains."""
    h = reciprocal_bracket(G.num, G.den)
    dh = _derivative(h)
    candidates = []
    for z in roots(h).raw:
        if abs(z) < 0.5:
            continue
        z = _newton(h, dh, z)
        if abs(abs(z) - 1.0) >= UNIT_CIRCLE_TOL:
            continue
        theta = math.atan2(z.imag, z.real)
        if theta <= -math.pi + 1e-15:
            theta = math.pi
        if abs(theta) < ZERO_ANGLE_TOL:
            continue
        candidates.append(theta)

    # merge numerically repeated roots of h (tangential crossings)
    merged: list[float] = []
    for t in sorted(candidates):
        if merged and abs(t - merged[-1]) < ZERO_ANGLE_TOL:
            continue
        merged.append(t)
    if len(merged) > 1 and abs(merged[0] + math.pi) < ZERO_ANGLE_TOL and abs(merged[-1] - math.pi) < ZERO_ANGLE_TOL:
        merged.pop(0)

    theta_n, theta_p, gains, diags = [], [], {}, []
    for t in merged:
        if abs(t - math.pi) < ZERO_ANGLE_TOL:
            t = math.pi
        g = G(complex(math.cos(t), math.sin(t)))
        if abs(g) < DEGENERATE_GAIN_TOL:
            diags.append(Diagnostic(t, "G vanishes; gain unbounded", g))
            continue
        if abs(g.imag) >= REAL_AXIS_RTOL * abs(g):
            diags.append(Diagnostic(t, "G not real within band", g))
            continue
        gains[t] = 1.0 / g.real
        (theta_n if g.real < 0 else theta_p).append(t)

    flags = []
    alpha_n = max((gains[t] for t in theta_n), default=-math.inf)
    alpha_p = min((gains[t] for t in theta_p), default=math.inf)
    if not theta_n:
        flags.append("EmptyThetaN")
    if not theta_p:
        flags.append("EmptyThetaP")
    return CrossingSet(tuple(theta_n), tuple(theta_p), gains, alpha_n, alpha_p, tuple(flags), tuple(diags))


def spr_at(G: TransferFunction, alpha: float) -> float:
    return float(np.max(roots(G.closed_loop_poly(alpha)).moduli))


@dataclass(frozen=True)
class SweepResult:
    alphas: np.ndarray
    spr_values: np.ndarray
    root_tracks: list[RootSet] = field(repr=False)
    unit_crossings: tuple[float, ...] = ()


def spr_sweep(G: TransferFunction, alpha_grid, refine: bool = False, xtol: float = 1e-9) -> SweepResult:
    """spr(D - alpha N) over a grid, optionally bisecting each spr = 1 crossing."""
    alphas = np.asarray(alpha_grid, dtype=float)
    if alphas.size == 0:
        raise ValueError("alpha grid is empty")
    tracks = [roots(G.closed_loop_poly(a)) for a in alphas]
    spr = np.array([float(np.max(t.moduli)) for t in tracks])
    found = []
    if refine:
        f = spr - 1.0
        for i in range(len(alphas) - 1):
            if f[i] == 0.0:
                found.append(float(alphas[i]))
            elif f[i] * f[i + 1] < 0:
                found.append(_bisect(lambda a: spr_at(G, a) - 1.0, alphas[i], alphas[i + 1], xtol))
    return SweepResult(alphas, spr, tracks, tuple(found))


def _bisect(f, lo: float, hi: float, xtol: float) -> float:
    flo = f(lo)
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if (fm < 0) == (flo < 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return 0.5 * (lo + hi)


def default_grid(lo: float, hi: float, steps: int = DEFAULT_GRID) -> np.ndarray:
    return np.linspace(lo, hi, steps)


def stable_interval_check(G: TransferFunction, alpha: float, margin: float = STABLE_MARGIN) -> bool:
    """True iff ``p_alpha`` is Schur stable with the given margin.

    Every alpha in (alpha_n, alpha_p) passes, but the stable set can be larger.
    """
    return spr_at(G, alpha) < 1.0 - margin


@dataclass(frozen=True)
class Census:
    count_outside: int
    all_simple: bool


def unstable_root_census(G: TransferFunction, alpha: float, tol: float = OUTSIDE_TOL) -> Census:
    rs = roots(G.closed_loop_poly(alpha))
    outside = [z for z in rs.raw if abs(z) > 1.0 + tol]
    _, counts = cluster_roots(outside, CLUSTER_RTOL)
    return Census(len(outside), all(c == 1 for c in counts))


class SearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class GainThresholds:
    beta_n: float
    beta_p: float


def gain_thresholds(G: TransferFunction, search_bound: float, samples: int = 4001, xtol: float = 1e-10) -> GainThresholds:
    """Sampled evidence for the large-gain thresholds.

    Scanning inward from ``±search_bound``, the threshold is the first gain at
    which the census stops reporting at least ``n - m`` simple outside roots,
    bisected between that sample and its passing neighbour.
    """
    need = G.relative_degree

    def ok(a: float) -> bool:
        c = unstable_root_census(G, a)
        return c.count_outside >= need and c.all_simple

    def scan(grid: np.ndarray) -> float:
        if not ok(grid[0]):
            raise SearchExhausted(f"census fails already at alpha = {grid[0]}")
        for prev, a in zip(grid[:-1], grid[1:]):
            if not ok(a):
                lo, hi = prev, a
                while abs(hi - lo) > xtol:
                    mid = 0.5 * (lo + hi)
                    if ok(mid):
                        lo = mid
                    else:
                        hi = mid
                return float(hi)
        raise SearchExhausted("census never fails before alpha = 0")

    beta_n = scan(np.linspace(-search_bound, 0.0, samples))
    beta_p = scan(np.linspace(search_bound, 0.0, samples))
    return GainThresholds(beta_n, beta_p)
