"""Hypothesis checks on G = N/D and its controllable canonical realization."""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .poly import Poly, PolyError, eval_poly, roots, spectral_radius

COPRIME_RTOL = 1e-10
UNIT_ZERO_TOL = 1e-7
ZERO_AT_ONE_TOL = 1e-9
PROBE_TOL = 1e-9


class Hypothesis(str, Enum):
    NotStrictlyProper = "NotStrictlyProper"
    NotAsymptoticallyStable = "NotAsymptoticallyStable"
    NotCoprime = "NotCoprime"
    NoZeroAtOne = "NoZeroAtOne"
    ExtraUnitCircleZero = "ExtraUnitCircleZero"
    DenNotMonic = "DenNotMonic"


@dataclass(frozen=True)
class Check:
    name: Hypothesis
    passed: bool
    measured: float
    detail: str = ""


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[Check, ...]
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def errors(self) -> list[Hypothesis]:
        return [c.name for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        return {
            "valid": self.ok,
            "errors": [e.value for e in self.errors],
            "warnings": list(self.warnings),
            "checks": [
                {"name": c.name.value, "passed": c.passed, "measured": c.measured, "detail": c.detail}
                for c in self.checks
            ],
        }


class InvalidSystemError(ValueError):
    def __init__(self, report: ValidationReport):
        self.report = report
        super().__init__("invalid system: " + ", ".join(e.value for e in report.errors))


@dataclass(frozen=True)
class TransferFunction:
    num: Poly
    den: Poly
    validation: ValidationReport = field(repr=False)

    @property
    def n(self) -> int:
        return self.den.degree

    @property
    def m(self) -> int:
        return self.num.degree

    @property
    def relative_degree(self) -> int:
        return self.n - self.m

    def __call__(self, z):
        return eval_poly(self.num, z) / eval_poly(self.den, z)

    def closed_loop_poly(self, alpha: float) -> Poly:
        """``p_alpha = D - alpha * N``."""
        return self.den - alpha * self.num


@dataclass(frozen=True)
class StateSpace:
    A: np.ndarray
    B: np.ndarray
    C: np.ndarray

    @property
    def n(self) -> int:
        return self.A.shape[0]


def resultant(p: Poly, q: Poly) -> float:
    """Sylvester-matrix resultant of two nonzero polynomials."""
    m, n = p.degree, q.degree
    size = m + n
    if size == 0:
        return 1.0
    S = np.zeros((size, size))
    pd = np.array(p.coeffs[::-1])
    qd = np.array(q.coeffs[::-1])
    for i in range(n):
        S[i, i : i + m + 1] = pd
    for i in range(m):
        S[n + i, i : i + n + 1] = qd
    return float(np.linalg.det(S))


def check_hypotheses(num: Poly, den: Poly) -> tuple[ValidationReport, Poly, Poly]:
    """Run every standing hypothesis; returns the report and the (normalized) pair."""
    if den.degree is None or den.degree < 1:
        raise PolyError("denominator must have degree >= 1")
    if num.is_zero:
        raise PolyError("numerator must be nonzero")

    notes = []
    checks = []
    lead = den.coeffs[-1]
    monic = lead == 1.0
    checks.append(Check(Hypothesis.DenNotMonic, True, lead, "" if monic else "rescaled N and D by 1/lead(D)"))
    if not monic:
        notes.append(f"denominator leading coefficient {lead!r} normalized to 1")
        num, den = num * (1.0 / lead), den * (1.0 / lead)

    n, m = den.degree, num.degree
    checks.append(Check(Hypothesis.NotStrictlyProper, m < n, float(n - m), f"deg N = {m}, deg D = {n}"))

    spr_d = spectral_radius(den)
    checks.append(Check(Hypothesis.NotAsymptoticallyStable, spr_d < 1.0, spr_d, "spr(D)"))

    scale = max(num.scale, den.scale)
    res = resultant(num, den) if m >= 1 else num.coeffs[0] ** n
    coprime = abs(res) > COPRIME_RTOL * scale ** (n + m)
    checks.append(Check(Hypothesis.NotCoprime, coprime, abs(res), "|resultant(N, D)|"))

    n1 = abs(eval_poly(num, 1.0))
    d1 = abs(eval_poly(den, 1.0))
    zero_at_one = n1 <= ZERO_AT_ONE_TOL * num.scale and d1 > ZERO_AT_ONE_TOL * den.scale
    checks.append(Check(Hypothesis.NoZeroAtOne, zero_at_one, n1, f"|N(1)| = {n1:.3e}, |D(1)| = {d1:.3e}"))

    dist = np.inf
    if m >= 1:
        for z in roots(num).raw:
            if abs(z - 1.0) > UNIT_ZERO_TOL:
                dist = min(dist, abs(abs(z) - 1.0))
    checks.append(
        Check(
            Hypothesis.ExtraUnitCircleZero,
            bool(dist >= UNIT_ZERO_TOL),
            float(dist),
            "min | |z|-1 | over zeros of N other than 1",
        )
    )
    return ValidationReport(tuple(checks), tuple(notes)), num, den


def validate(num: Poly, den: Poly) -> TransferFunction:
    """Return a validated transfer function or raise ``InvalidSystemError``."""
    report, num, den = check_hypotheses(num, den)
    for note in report.warnings:
        warnings.warn(note, stacklevel=2)
    if not report.ok:
        raise InvalidSystemError(report)
    return TransferFunction(num, den, report)


def realize(G: TransferFunction, probes: int = 16, seed: int = 0) -> StateSpace:
    """Controllable canonical form; ``chi_A = D`` by construction."""
    if not G.validation.ok:
        raise InvalidSystemError(G.validation)
    n = G.n
    d = np.asarray(G.den.coeffs)
    A = np.zeros((n, n))
    A[0, :] = -d[-2::-1]
    if n > 1:
        A[1:, :-1] = np.eye(n - 1)
    B = np.zeros((n, 1))
    B[0, 0] = 1.0
    C = G.num.padded(n)[::-1].reshape(1, n)
    ss = StateSpace(A, B, C)

    rng = np.random.default_rng(seed)
    spec = np.linalg.eigvals(A)
    checked = 0
    while checked < probes:
        z = complex(*rng.uniform(-2.0, 2.0, size=2))
        if np.min(np.abs(spec - z)) < 0.1:
            continue
        err = abs(transfer_at(ss, z) - G(z))
        if err > PROBE_TOL * max(1.0, abs(G(z))):
            raise AssertionError(f"realization mismatch {err:.3e} at z = {z}")
        checked += 1
    return ss


def transfer_at(ss: StateSpace, z: complex) -> complex:
    n = ss.n
    x = np.linalg.solve(z * np.eye(n) - ss.A, ss.B.astype(complex))
    return complex((ss.C @ x)[0, 0])


def closed_loop(ss: StateSpace, alpha: float) -> np.ndarray:
    return ss.A + alpha * (ss.B @ ss.C)


def controllability_matrix(ss: StateSpace) -> np.ndarray:
    cols = [ss.B]
    for _ in range(ss.n - 1):
        cols.append(ss.A @ cols[-1])
    return np.hstack(cols)


def observability_matrix(ss: StateSpace) -> np.ndarray:
    rows = [ss.C]
    for _ in range(ss.n - 1):
        rows.append(rows[-1] @ ss.A)
    return np.vstack(rows)


def charpoly(M: np.ndarray) -> Poly:
    """Characteristic polynomial ``det(zI - M)`` in ascending order."""
    return Poly(np.real_if_close(np.poly(M))[::-1].real)


def system(num, den) -> tuple[TransferFunction, StateSpace]:
    """Convenience: validate coefficient lists (ascending) and realize."""
    G = validate(Poly(num), Poly(den))
    return G, realize(G)
