"""Saturated closed loop ``x+ = A x + alpha B sat1(C x)`` and its classification."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, replace
from enum import IntEnum
from fractions import Fraction

import numpy as np

from .exact import (
    K_EXACT_MAX,
    ExactModeUnsupported,
    QuadRat,
    _frac,
    compare_to_minus_one,
    compare_to_one,
    infer_discriminant,
    parse_quadrat,
    squarefree_decompose,
    to_float,
)
from .realization import StateSpace
from .spectral import NearDefective, NotFound, SpectralSplit, find_simple_unstable

OVERFLOW_LIMIT = 1e12


class Mode(IntEnum):
    S1 = 1  # y >= 1, input saturated at +1
    S2 = 2  # |y| < 1, linear region
    S3 = 3  # y <= -1, input saturated at -1


class SimulationOverflow(OverflowError):
    pass


def sat(gamma: float, x: float) -> float:
    if gamma <= 0:
        raise ValueError("saturation level must be positive")
    return min(gamma, max(-gamma, x))


def mode_of(y: float) -> Mode:
    if y >= 1.0:
        return Mode.S1
    if y <= -1.0:
        return Mode.S3
    return Mode.S2


@dataclass(frozen=True)
class Tolerances:
    conv_tol: float = 1e-9
    window: int | None = None  # None -> max(50, 10 n)
    period_tol: float = 1e-6  # relative to the window's state scale
    offX_tol: float = 1e-9  # relative to ||x||
    osc_tol: float = 1e-3

    def window_for(self, n: int) -> int:
        return self.window if self.window is not None else max(50, 10 * n)


@dataclass(frozen=True)
class LureConfig:
    ss: StateSpace
    alpha: float
    x0: tuple = ()
    horizon: int = 2000
    tolerances: Tolerances = field(default_factory=Tolerances)
    mode: str = "float"
    exact_d: int | None = None

    def __post_init__(self):
        n = self.ss.n
        x0 = tuple(self.x0) if len(self.x0) else (0.0,) * n
        object.__setattr__(self, "x0", x0)
        if len(x0) != n:
            raise ValueError(f"x0 has {len(x0)} entries, system order is {n}")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        w = self.tolerances.window_for(n)
        if w >= self.horizon:
            raise ValueError(f"window {w} must be shorter than horizon {self.horizon}")
        t = self.tolerances
        if min(t.conv_tol, t.period_tol, t.offX_tol, t.osc_tol) <= 0:
            raise ValueError("tolerances must be positive")
        if self.mode not in ("float", "exact"):
            raise ValueError(f"unknown arithmetic mode {self.mode!r}")

    @property
    def x0_float(self) -> np.ndarray:
        return np.array([to_float(parse_quadrat(v)) if isinstance(v, (str, QuadRat)) else float(v) for v in self.x0])


@dataclass
class Trajectory:
    x: np.ndarray  # (K+1, n)
    y: np.ndarray
    nu: np.ndarray
    modes: list[Mode]
    proj_norm: np.ndarray | None = None
    transitions: list[tuple[int, Mode, Mode]] = field(default_factory=list)
    alpha: float = 0.0
    exact: bool = False
    x_exact: list | None = None
    y_exact: list | None = None
    nu_exact: list | None = None
    # unnormalized Psi-coordinate w.x_k; zero exactly when x_k lies in X
    proj_exact: list | None = None
    d: int | None = None

    @property
    def horizon(self) -> int:
        return len(self.y) - 1


def _transitions(modes: list[Mode]) -> list[tuple[int, Mode, Mode]]:
    return [(k, modes[k - 1], modes[k]) for k in range(1, len(modes)) if modes[k] != modes[k - 1]]


def simulate(cfg: LureConfig, split: SpectralSplit | None = None) -> Trajectory:
    if cfg.mode == "exact":
        return simulate_exact(cfg, want_projection=split is not None)
    A, B, C = cfg.ss.A, cfg.ss.B[:, 0], cfg.ss.C[0]
    aB = cfg.alpha * B
    K = cfg.horizon
    n = cfg.ss.n
    xs = np.empty((K + 1, n))
    ys = np.empty(K + 1)
    nus = np.empty(K + 1)
    x = cfg.x0_float
    for k in range(K + 1):
        y = float(C @ x)
        if abs(y) > OVERFLOW_LIMIT:
            raise SimulationOverflow(f"|y_{k}| = {abs(y):.3e} exceeds {OVERFLOW_LIMIT:g}")
        xs[k], ys[k] = x, y
        nus[k] = sat(1.0, y)
        if k < K:
            x = A @ x + aB * nus[k]
    modes = [mode_of(v) for v in ys]
    proj = None
    if split is not None:
        proj = np.abs(xs.astype(complex) @ split.psi.conj())
    return Trajectory(xs, ys, nus, modes, proj, _transitions(modes), cfg.alpha)


def exact_setup(cfg: LureConfig):
    """Field, exact system matrices, unstable eigenvalue and its left eigenvector."""
    if cfg.ss.n != 2:
        raise ExactModeUnsupported("exact mode supports second-order systems only")
    alpha = _frac(float(cfg.alpha))
    A = [[_frac(float(v)) for v in row] for row in cfg.ss.A]
    B = [_frac(float(v)) for v in cfg.ss.B[:, 0]]
    C = [_frac(float(v)) for v in cfg.ss.C[0]]
    Acl = [[A[i][j] + alpha * B[i] * C[j] for j in range(2)] for i in range(2)]
    d = infer_discriminant(Acl)
    if cfg.exact_d is not None and d != 1 and cfg.exact_d != d:
        raise ExactModeUnsupported(f"closed-loop eigenvalues lie in Q(sqrt {d}), not Q(sqrt {cfg.exact_d})")
    if d == 1 and cfg.exact_d is not None:
        d = cfg.exact_d
    x0 = []
    for v in cfg.x0:
        try:
            q = parse_quadrat(v, d)
        except ValueError as exc:
            raise ExactModeUnsupported(str(exc)) from exc
        if q.b != 0 and q.d != d:
            raise ExactModeUnsupported(f"x0 entry {v!r} lies outside Q(sqrt {d})")
        x0.append(QuadRat(q.a, q.b, d))
    return d, A, B, C, alpha, Acl, x0


def exact_eigenvalues(Acl, d: int) -> tuple[QuadRat, QuadRat]:
    """Both eigenvalues of a rational 2x2 matrix, smaller first."""
    tr = Acl[0][0] + Acl[1][1]
    det = Acl[0][0] * Acl[1][1] - Acl[0][1] * Acl[1][0]
    disc = tr * tr - 4 * det
    if disc < 0:
        raise ExactModeUnsupported("complex eigenvalues")
    if disc == 0:
        root = QuadRat(0, 0, d)
    else:
        # sqrt(p/q) = s sqrt(sf) / q  with  p q = s**2 sf
        s, sf = squarefree_decompose(disc.numerator * disc.denominator)
        if sf == 1:
            root = QuadRat(Fraction(s, disc.denominator), 0, d)
        elif sf == d:
            root = QuadRat(0, Fraction(s, disc.denominator), d)
        else:
            raise ExactModeUnsupported(f"eigenvalues lie in Q(sqrt {sf}), not Q(sqrt {d})")
    half = QuadRat(tr, 0, d) * Fraction(1, 2)
    return half - root * Fraction(1, 2), half + root * Fraction(1, 2)


def exact_left_eigenvector(Acl, lam: QuadRat) -> list[QuadRat]:
    """Row vector w with w (Acl - lam I) = 0, entries in the field."""
    d = lam.d
    a11, a12 = QuadRat(Acl[0][0], 0, d), QuadRat(Acl[0][1], 0, d)
    a21, a22 = QuadRat(Acl[1][0], 0, d), QuadRat(Acl[1][1], 0, d)
    if not a21.is_zero():
        return [a21, lam - a11]
    return [lam - a22, a12]


def simulate_exact(cfg: LureConfig, want_projection: bool = True) -> Trajectory:
    d, A, B, C, alpha, Acl, x = exact_setup(cfg)
    K = cfg.horizon
    if K > K_EXACT_MAX:
        warnings.warn(f"exact horizon capped at {K_EXACT_MAX} steps; rational sizes grow along the trajectory")
        K = K_EXACT_MAX
    w = None
    w_norm = None
    if want_projection:
        lam = _select_exact_unstable(Acl, d)
        if lam is not None:
            w = exact_left_eigenvector(Acl, lam)
            w_norm = math.hypot(*(to_float(v) for v in w))
    one = QuadRat(1, 0, d)
    xs, ys, nus, projs = [], [], [], []
    for k in range(K + 1):
        y = C[0] * x[0] + C[1] * x[1]
        if compare_to_one(y) >= 0:
            nu = one
        elif compare_to_minus_one(y) <= 0:
            nu = -one
        else:
            nu = y
        xs.append(x)
        ys.append(y)
        nus.append(nu)
        if w is not None:
            projs.append(w[0] * x[0] + w[1] * x[1])
        if k < K:
            x = [A[i][0] * x[0] + A[i][1] * x[1] + alpha * B[i] * nu for i in range(2)]
    yf = np.array([to_float(v) for v in ys])
    if np.max(np.abs(yf)) > OVERFLOW_LIMIT:
        raise SimulationOverflow("exact trajectory exceeded the overflow guard")
    xf = np.array([[to_float(v) for v in row] for row in xs])
    nuf = np.array([to_float(v) for v in nus])
    modes = [Mode.S1 if compare_to_one(v) >= 0 else Mode.S3 if compare_to_minus_one(v) <= 0 else Mode.S2 for v in ys]
    proj = np.array([abs(to_float(p)) / w_norm for p in projs]) if w is not None else None
    return Trajectory(
        xf, yf, nuf, modes, proj, _transitions(modes), cfg.alpha,
        exact=True, x_exact=xs, y_exact=ys, nu_exact=nus, proj_exact=projs if w is not None else None, d=d,
    )


def _select_exact_unstable(Acl, d: int) -> QuadRat | None:
    lams = [l for l in exact_eigenvalues(Acl, d) if abs(to_float(l)) > 1.0]
    if not lams:
        return None
    if len(lams) == 2 and lams[0] == lams[1]:
        return None
    return max(lams, key=lambda l: (abs(to_float(l)), to_float(l)))


@dataclass(frozen=True)
class Bound:
    value: float
    c: float
    rho: float
    block: int


def boundedness_bound(cfg: LureConfig, block_contraction: float = 0.5) -> Bound:
    """Explicit output bound ``||C|| (sup ||A^k|| ||x0|| + |alpha| sum ||A^i B||)``.

    A block length L with ``||A^L|| <= block_contraction`` gives
    ``||A^i|| <= c rho^i`` with ``rho = block_contraction**(1/L)``.
    """
    A, B, C = cfg.ss.A, cfg.ss.B, cfg.ss.C
    if np.max(np.abs(np.linalg.eigvals(A))) >= 1.0:
        raise ValueError("boundedness bound needs an asymptotically stable A")
    n = A.shape[0]
    P = np.eye(n)
    powers = []
    while True:
        powers.append(P)
        P = A @ P
        if np.linalg.norm(P, 2) <= block_contraction:
            break
        if len(powers) > 100000:
            raise RuntimeError("A^k did not contract; spectral radius too close to 1")
    L = len(powers)
    c0 = max(np.linalg.norm(M, 2) for M in powers)
    s_block = sum(np.linalg.norm(M @ B) for M in powers)
    theta = block_contraction
    tail = s_block / (1.0 - theta)
    # hypot rescales, so tiny states do not underflow to a zero bound
    x0n = math.hypot(*cfg.x0_float)
    value = float(np.linalg.norm(C)) * (c0 * x0n + abs(cfg.alpha) * tail)
    rho = theta ** (1.0 / L)
    return Bound(value, c0 / theta, rho, L)


@dataclass
class HypothesisCheck:
    k: int
    norm: float
    passed: bool


@dataclass
class HypothesisReport:
    x0_check: str  # "pass" | "fail" | "not-applicable"
    reentry_checks: list[HypothesisCheck]
    x0_norm: float | None = None

    @property
    def satisfied(self) -> bool:
        return self.x0_check != "fail" and all(c.passed for c in self.reentry_checks)

    def to_dict(self) -> dict:
        return {
            "satisfied": self.satisfied,
            "x0_check": self.x0_check,
            "x0_proj_norm": self.x0_norm,
            "reentry_checks": [{"k": c.k, "proj_norm": c.norm, "passed": c.passed} for c in self.reentry_checks],
        }


def check_off_subspace_entries(traj: Trajectory, split: SpectralSplit | None = None, offX_tol: float = 1e-9) -> HypothesisReport:
    """Off-subspace checks at k = 0 (if starting linear) and at every re-entry into S2.

    Float trajectories compare ``||P x|| > offX_tol * ||x||``; exact ones test
    the field-valued coordinate for zero.
    """
    if traj.exact and traj.proj_exact is None:
        raise ValueError("exact trajectory was simulated without a spectral split")
    if traj.exact:
        norms = traj.proj_norm

        def off(k: int) -> bool:
            return not traj.proj_exact[k].is_zero()
    else:
        if split is None:
            raise ValueError("float trajectories need the spectral split")
        norms = traj.proj_norm if traj.proj_norm is not None else np.abs(traj.x.astype(complex) @ split.psi.conj())

        def off(k: int) -> bool:
            return norms[k] > offX_tol * float(np.linalg.norm(traj.x[k]))

    x0_check, x0_norm = "not-applicable", None
    if traj.modes[0] == Mode.S2:
        x0_norm = float(norms[0])
        x0_check = "pass" if off(0) else "fail"
    checks = []
    for k in range(traj.horizon):
        if traj.modes[k] != Mode.S2 and traj.modes[k + 1] == Mode.S2:
            checks.append(HypothesisCheck(k + 1, float(norms[k + 1]), off(k + 1)))
    return HypothesisReport(x0_check, checks, x0_norm)


@dataclass
class ClassificationReport:
    verdict: str  # "Convergent" | "SelfExcited" | "Inconclusive"
    bounded: bool
    bound: float
    max_abs_y: float
    final_amplitude: float
    limit: float | None = None
    period: int | None = None
    off_subspace: HypothesisReport | None = None
    mode_census: dict[str, int] = field(default_factory=dict)
    diagnostics: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        out = {
            "verdict": self.verdict,
            "limit": self.limit,
            "period": self.period,
            "bounded": self.bounded,
            "bound": self.bound,
            "max_abs_y": self.max_abs_y,
            "final_window_amplitude": self.final_amplitude,
            "mode_census": self.mode_census,
            "diagnostics": self.diagnostics,
        }
        if self.off_subspace is not None:
            out["off_subspace"] = self.off_subspace.to_dict()
        return out


def detect_period(x: np.ndarray, end: int, window: int, tol: float) -> int | None:
    """Smallest p <= window/2 with max ||x_k - x_{k+p}|| < tol over the window ending at ``end``."""
    start = end - window + 1
    if start < 0:
        return None
    seg = x[start : end + 1]
    scale = max(1.0, float(np.max(np.linalg.norm(seg, axis=1))))
    for p in range(1, window // 2 + 1):
        diff = np.linalg.norm(seg[p:] - seg[:-p], axis=1)
        if float(np.max(diff)) < tol * scale:
            return p
    return None


def classify(traj: Trajectory, cfg: LureConfig, split: SpectralSplit | None = None) -> ClassificationReport:
    tol = cfg.tolerances
    K = traj.horizon
    W = min(tol.window_for(cfg.ss.n), K - K // 2)
    tail = traj.y[K - W + 1 :]
    amp = float(np.max(np.abs(tail)))
    max_y = float(np.max(np.abs(traj.y)))
    bound = boundedness_bound(cfg).value
    bounded = max_y <= bound * (1 + 1e-12) + 1e-12
    census = {m.name: sum(1 for v in traj.modes if v == m) for m in Mode}
    diags = []
    hyp = None
    if traj.proj_exact is not None or split is not None:
        hyp = check_off_subspace_entries(traj, split, tol.offX_tol)

    if amp < tol.conv_tol:
        return ClassificationReport("Convergent", bounded, bound, max_y, amp, 0.0, None, hyp, census, diags)
    if amp >= tol.osc_tol and bounded:
        period = None
        p1 = detect_period(traj.x, K, W, tol.period_tol)
        p2 = detect_period(traj.x, K - W, W, tol.period_tol)
        if p1 is not None and p1 == p2:
            period = p1
        return ClassificationReport("SelfExcited", bounded, bound, max_y, amp, None, period, hyp, census, diags)
    if not bounded:
        diags.append("trajectory exceeded the computed bound; this indicates a numerical fault")
    else:
        diags.append(
            f"final-window amplitude {amp:.3e} lies between conv_tol {tol.conv_tol:g} and osc_tol {tol.osc_tol:g};"
            " extend the horizon"
        )
    return ClassificationReport("Inconclusive", bounded, bound, max_y, amp, None, None, hyp, census, diags)


@dataclass(frozen=True)
class CensusResult:
    fraction: float
    counts: dict[str, int]
    trials: int
    has_simple_unstable: bool


def random_x0_census(cfg: LureConfig, split: SpectralSplit | None, trials: int, seed: int = 0, box: float = 10.0) -> CensusResult:
    """Fraction of uniform random initial states in ``[-box, box]^n`` that self-excite."""
    A = cfg.ss.A
    if abs(np.linalg.det(A)) < 1e-12 * max(1.0, np.linalg.norm(A)) ** A.shape[0]:
        raise ValueError("census requires a nonsingular A")
    if split is None:
        try:
            split = find_simple_unstable(A + cfg.alpha * cfg.ss.B @ cfg.ss.C, cfg.alpha)
        except (NotFound, NearDefective):
            split = None
    rng = np.random.default_rng(seed)
    counts = {"Convergent": 0, "SelfExcited": 0, "Inconclusive": 0}
    base = replace(cfg, mode="float")
    for _ in range(trials):
        x0 = tuple(rng.uniform(-box, box, size=cfg.ss.n))
        run = replace(base, x0=x0)
        traj = simulate(run)
        counts[classify(traj, run).verdict] += 1
    return CensusResult(counts["SelfExcited"] / trials, counts, trials, split is not None)
