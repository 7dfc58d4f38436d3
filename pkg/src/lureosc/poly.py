"""Real-coefficient polynomials stored in ascending-degree order.

Roots come from companion-matrix eigenvalues; ``reciprocal_bracket`` builds
the polynomial whose unit-circle roots are exactly the points where
``N(z) * conj(D(z))`` is real.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

TRIM_RTOL = 1e-12
CLUSTER_RTOL = 1e-6
ROOT_RESIDUAL_TOL = 1e-8


class PolyError(ValueError):
    pass


def _trim(coeffs: Sequence[float], rtol: float = TRIM_RTOL) -> tuple[float, ...]:
    c = [float(v) for v in coeffs]
    if not c:
        return ()
    scale = max(abs(v) for v in c)
    if scale == 0.0:
        return ()
    cut = rtol * scale
    k = len(c) - 1
    while k >= 0 and abs(c[k]) <= cut:
        k -= 1
    return tuple(c[: k + 1])


@dataclass(frozen=True)
class Poly:
    """Polynomial ``coeffs[0] + coeffs[1] z + ...``; trailing zeros are trimmed.

    The zero polynomial has empty ``coeffs`` and ``degree is None``.
    """

    coeffs: tuple[float, ...]

    def __init__(self, coeffs: Iterable[float] = ()):
        object.__setattr__(self, "coeffs", _trim(list(coeffs)))

    @classmethod
    def from_roots(cls, roots: Iterable[complex], lead: float = 1.0) -> "Poly":
        c = np.polynomial.polynomial.polyfromroots(list(roots)) * lead
        if np.iscomplexobj(c):
            if np.max(np.abs(c.imag), initial=0.0) > 1e-9 * max(1.0, np.max(np.abs(c))):
                raise PolyError("roots are not closed under conjugation")
            c = c.real
        return cls(c)

    @property
    def degree(self) -> int | None:
        return len(self.coeffs) - 1 if self.coeffs else None

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def scale(self) -> float:
        return max((abs(v) for v in self.coeffs), default=0.0)

    def __call__(self, z):
        return eval_poly(self, z)

    def __add__(self, other: "Poly") -> "Poly":
        return Poly(np.polynomial.polynomial.polyadd(self._arr(), other._arr()))

    def __sub__(self, other: "Poly") -> "Poly":
        return Poly(np.polynomial.polynomial.polysub(self._arr(), other._arr()))

    def __mul__(self, other):
        if isinstance(other, Poly):
            if self.is_zero or other.is_zero:
                return Poly()
            return Poly(np.convolve(self._arr(), other._arr()))
        return Poly(self._arr() * float(other))

    __rmul__ = __mul__

    def __neg__(self) -> "Poly":
        return Poly(-self._arr())

    def _arr(self) -> np.ndarray:
        return np.array(self.coeffs if self.coeffs else (0.0,), dtype=float)

    def padded(self, length: int) -> np.ndarray:
        out = np.zeros(length)
        out[: len(self.coeffs)] = self.coeffs
        return out

    def monic(self) -> "Poly":
        if self.is_zero:
            raise PolyError("zero polynomial has no leading coefficient")
        return Poly(self._arr() / self.coeffs[-1])


@dataclass(frozen=True)
class RootSet:
    roots: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    residual: float
    # Every root as returned by the eigensolver, before clustering.
    raw: tuple[complex, ...] = field(default=(), repr=False)

    def __iter__(self):
        return iter(self.raw)

    def __len__(self) -> int:
        return len(self.raw)

    @property
    def moduli(self) -> np.ndarray:
        return np.abs(np.array(self.raw, dtype=complex))


def eval_poly(p: Poly, z):
    """Horner evaluation; accepts scalars or numpy arrays."""
    if p.is_zero:
        return np.zeros_like(z) if isinstance(z, np.ndarray) else 0.0
    acc = 0.0
    for c in reversed(p.coeffs):
        acc = acc * z + c
    return acc


def companion(p: Poly) -> np.ndarray:
    """Companion matrix whose characteristic polynomial is ``p / lead(p)``."""
    if p.degree is None or p.degree < 1:
        raise PolyError("no roots defined")
    c = np.asarray(p.coeffs, dtype=float)
    n = p.degree
    M = np.zeros((n, n))
    M[0, :] = -c[-2::-1] / c[-1]
    if n > 1:
        M[1:, :-1] = np.eye(n - 1)
    return M


def cluster_roots(roots: Sequence[complex], rtol: float = CLUSTER_RTOL):
    """Group roots closer than ``rtol * max(1, |root|)``; returns (centres, counts)."""
    remaining = list(roots)
    centres: list[complex] = []
    counts: list[int] = []
    while remaining:
        seed = remaining.pop(0)
        group = [seed]
        tol = rtol * max(1.0, abs(seed))
        keep = []
        for r in remaining:
            if any(abs(r - g) <= tol for g in group):
                group.append(r)
            else:
                keep.append(r)
        remaining = keep
        centres.append(complex(np.mean(group)))
        counts.append(len(group))
    return centres, counts


def roots(p: Poly, cluster_rtol: float = CLUSTER_RTOL) -> RootSet:
    raw = np.linalg.eigvals(companion(p))
    raw = _pair_conjugates(raw)
    scale = p.scale
    vals = np.abs([eval_poly(p, complex(r)) for r in raw])
    # residual is measured relative to the coefficient scale and root size
    norm = np.array([scale * max(1.0, abs(r)) ** p.degree for r in raw])
    residual = float(np.max(vals / norm)) if len(raw) else 0.0
    centres, counts = cluster_roots(list(raw), cluster_rtol)
    return RootSet(tuple(centres), tuple(counts), residual, tuple(complex(r) for r in raw))


def _pair_conjugates(raw: np.ndarray) -> np.ndarray:
    # numpy already returns exact conjugate pairs for real input; snap
    # near-real roots onto the axis so pairing is explicit
    out = np.array(raw, dtype=complex)
    for i, r in enumerate(out):
        if abs(r.imag) <= 1e-14 * max(1.0, abs(r)):
            out[i] = complex(r.real, 0.0)
    return out


def spectral_radius(p: Poly) -> float:
    return float(np.max(roots(p).moduli))


def reversed_padded(p: Poly, r: int) -> Poly:
    """Coefficients of ``z**r * p(1/z)``; requires ``r >= deg p``."""
    return Poly(p.padded(r + 1)[::-1])


def reciprocal_bracket(N: Poly, D: Poly) -> Poly:
    """``h(z) = z**r [D(z) N(1/z) - N(z) D(1/z)]`` with ``r = max(deg N, deg D)``."""
    if N.is_zero or D.is_zero:
        raise PolyError("reciprocal bracket needs nonzero N and D")
    r = max(N.degree, D.degree)
    Nr = N.padded(r + 1)[::-1]
    Dr = D.padded(r + 1)[::-1]
    h = np.convolve(D.padded(r + 1), Nr) - np.convolve(N.padded(r + 1), Dr)
    scale = max(N.scale, D.scale) ** 2
    h[np.abs(h) <= TRIM_RTOL * scale] = 0.0
    return Poly(h)
