"""Finite, checkable renderings of the limit results used as test oracles."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .poly import CLUSTER_RTOL

WINDOW_SLACK = 4


@dataclass(frozen=True)
class ExponentialSum:
    """``y_k = sum_i p_i(k) lam_i**k``; each ``p_i`` holds ascending coefficients in k."""

    polys: tuple[tuple[complex, ...], ...]
    bases: tuple[complex, ...]

    def __post_init__(self):
        if len(self.polys) != len(self.bases):
            raise ValueError("one polynomial per base")
        for i, a in enumerate(self.bases):
            for b in self.bases[i + 1 :]:
                if abs(a - b) <= CLUSTER_RTOL * max(1.0, abs(a)):
                    raise ValueError("bases must be distinct")
        for p in self.polys:
            if not any(c != 0 for c in p):
                raise ValueError("polynomials must be nonzero")

    @classmethod
    def from_terms(cls, terms) -> "ExponentialSum":
        return cls(tuple(tuple(complex(c) for c in p) for p, _ in terms), tuple(complex(b) for _, b in terms))

    @property
    def rho(self) -> float:
        return max(abs(b) for b in self.bases)

    @property
    def dominant_degree(self) -> int:
        return max(_deg(p) for p, b in zip(self.polys, self.bases) if math.isclose(abs(b), self.rho, rel_tol=1e-12))

    def evaluate(self, ks: np.ndarray) -> np.ndarray:
        ks = np.asarray(ks, dtype=float)
        out = np.zeros(ks.shape, dtype=complex)
        with np.errstate(over="ignore", invalid="ignore"):
            for p, lam in zip(self.polys, self.bases):
                out += np.polynomial.polynomial.polyval(ks, p) * np.power(complex(lam), ks)
        return out


def _deg(p) -> int:
    d = len(p) - 1
    while d > 0 and p[d] == 0:
        d -= 1
    return d


def probe_window(s: ExponentialSum, threshold: float) -> int:
    """``WINDOW_SLACK * log(threshold) / log(rho)`` plus a fixed margin."""
    rho = s.rho
    if rho <= 1.0:
        return 1000
    return int(WINDOW_SLACK * max(1.0, math.log(max(threshold, math.e))) / math.log(rho)) + 50


@dataclass(frozen=True)
class ProbeResult:
    crossings: dict[float, int | None]
    window: int
    decaying: bool

    @property
    def all_reached(self) -> bool:
        return all(k is not None for k in self.crossings.values())


def limsup_probe(s: ExponentialSum, thresholds, window: int | None = None) -> ProbeResult:
    """First k with ``|y_k| >= T`` for each threshold T; None where not reached.

    ``decaying`` is set when the normalized tail ``|y_k| / (rho^k k^d)`` has
    collapsed, which separates a violated hypothesis from a short window.
    """
    thresholds = sorted(float(t) for t in thresholds)
    K = window if window is not None else max(probe_window(s, t) for t in thresholds)
    ks = np.arange(K + 1)
    mags = np.abs(s.evaluate(ks))
    out = {}
    for t in thresholds:
        hit = np.nonzero(mags >= t)[0]
        out[t] = int(hit[0]) if hit.size else None
    tail = ks[-max(10, K // 10) :]
    d = s.dominant_degree
    with np.errstate(over="ignore", invalid="ignore", divide="ignore"):
        norm = mags[tail] / (s.rho ** tail.astype(float) * np.maximum(tail, 1).astype(float) ** d)
    decaying = bool(s.rho < 1.0 or not np.all(np.isfinite(norm)) or np.max(norm) < 1e-12)
    return ProbeResult(out, K, decaying)


def unit_combo_floor(a, z, K: int) -> float:
    """``max_{0<=k<=K} |sum_i a_i z_i^k|``."""
    a = np.asarray(a, dtype=complex)
    z = np.asarray(z, dtype=complex)
    if np.any(a == 0):
        raise ValueError("coefficients must be nonzero")
    if np.any(np.abs(z) < 1.0 - 1e-12):
        raise ValueError("bases must satisfy |z| >= 1")
    best = 0.0
    term = a.copy()
    with np.errstate(over="ignore", invalid="ignore"):
        for _ in range(K + 1):
            v = abs(term.sum())
            if not np.isfinite(v):
                return math.inf
            best = max(best, v)
            term = term * z
    return best


@dataclass(frozen=True)
class LimitVerdict:
    verdict: str  # "LimitZero" | "NonConvergent" | "NonzeroLimit"
    last: float
    chi_at_one: float
    recurrence_residual: float


DIVERGENCE_CAP = 1e150


def power_sequence(M: np.ndarray, x, y, K: int) -> np.ndarray:
    """``t_k = y^T M^k x`` for k <= K, truncated once |t_k| passes the divergence cap."""
    M = np.asarray(M, dtype=float)
    v = np.asarray(x, dtype=float)
    w = np.asarray(y, dtype=float)
    t = []
    for _ in range(K + 1):
        t.append(float(w @ v))
        if abs(t[-1]) > DIVERGENCE_CAP or np.max(np.abs(v)) > DIVERGENCE_CAP:
            break
        v = M @ v
    return np.array(t)


def recurrence_residual(M: np.ndarray, t: np.ndarray) -> float:
    """Max over k of ``|t_{n+k} + a_1 t_{n+k-1} + ... + a_n t_k|`` relative to its term scale."""
    a = np.poly(np.asarray(M, dtype=float)).real  # [1, a_1, ..., a_n]
    n = len(a) - 1
    worst = 0.0
    for k in range(len(t) - n):
        seg = t[k : k + n + 1][::-1]
        r = abs(float(a @ seg))
        scale = float(np.abs(a) @ np.abs(seg))
        if scale > 0:
            worst = max(worst, r / scale)
    return worst


def cayley_limit_check(M: np.ndarray, x, y, K: int = 2000, tol: float = 1e-9, window: int = 50) -> LimitVerdict:
    """If ``t_k = y^T M^k x`` settles, its limit has to be zero when 1 is not an eigenvalue."""
    M = np.asarray(M, dtype=float)
    chi1 = float(np.real(np.polyval(np.poly(M), 1.0)))
    if abs(chi1) <= tol:
        raise ValueError("1 is (numerically) an eigenvalue of M")
    t = power_sequence(M, x, y, K)
    res = recurrence_residual(M, t)
    if len(t) < K + 1:
        return LimitVerdict("NonConvergent", float(t[-1]), chi1, res)
    scale = max(1.0, float(np.max(np.abs(t))))
    diffs = np.abs(np.diff(t[-window - 1 :]))
    if float(np.max(diffs)) >= tol * scale:
        return LimitVerdict("NonConvergent", float(t[-1]), chi1, res)
    verdict = "LimitZero" if abs(t[-1]) < tol * scale else "NonzeroLimit"
    return LimitVerdict(verdict, float(t[-1]), chi1, res)
