"""Eigenstructure of the closed loop around a simple unstable eigenvalue.

The complement subspace X (span of the generalized eigenvectors of every
other eigenvalue) is computed as the null space of ``q(Acl)`` where
``q(z) = chi(z) / (z - lambda)``; a Jordan-chain construction is kept as a
cross-check and drives the modal output oracle.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np
from scipy.linalg import null_space, subspace_angles

from .poly import cluster_roots

SIMPLE_RTOL = 1e-6
UNSTABLE_MARGIN = 1e-9
ILL_CONDITIONED = 1e10


class NotFound(LookupError):
    """No eigenvalue with modulus above one (plus margin) exists."""


class NearDefective(LookupError):
    """Unstable eigenvalues exist but none passes the simplicity gate."""


class DimensionMismatch(ArithmeticError):
    pass


class IllConditioned(ArithmeticError):
    pass


@dataclass(frozen=True)
class SpectralSplit:
    lam: complex
    xi: np.ndarray
    X_basis: np.ndarray
    psi: np.ndarray
    alpha: float | None = None

    @property
    def projector(self) -> np.ndarray:
        return np.outer(self.psi, self.psi.conj())

    def proj_norm(self, x) -> float:
        return projection_norm(self.psi, x)


def _separation(eigs: np.ndarray, i: int) -> float:
    others = np.delete(eigs, i)
    return float(np.min(np.abs(others - eigs[i]))) if others.size else np.inf


def find_simple_unstable(Acl: np.ndarray, alpha: float | None = None) -> SpectralSplit:
    Acl = np.asarray(Acl, dtype=float)
    eigs, vecs = np.linalg.eig(Acl)
    scale = max(1.0, float(np.max(np.abs(eigs))))
    unstable = [i for i, lam in enumerate(eigs) if abs(lam) > 1.0 + UNSTABLE_MARGIN]
    if not unstable:
        raise NotFound("no eigenvalue outside the unit circle")
    simple = [i for i in unstable if _separation(eigs, i) > SIMPLE_RTOL * scale]
    if not simple:
        raise NearDefective("unstable eigenvalues fail the simplicity tolerance")
    # largest modulus, then largest real part, then positive imaginary part
    best = max(simple, key=lambda i: (round(abs(eigs[i]), 12), round(eigs[i].real, 12), eigs[i].imag))
    lam = complex(eigs[best])
    xi = vecs[:, best].astype(complex)
    xi = xi / np.linalg.norm(xi)
    X, psi = complement_subspace(Acl, lam)
    return SpectralSplit(lam, xi, X, psi, alpha)


def cofactor_poly(Acl: np.ndarray, lam: complex) -> np.ndarray:
    """Descending coefficients of ``chi_Acl(z) / (z - lam)`` by synthetic division."""
    chi = np.poly(Acl).astype(complex)
    q = np.zeros(len(chi) - 1, dtype=complex)
    acc = 0j
    for i in range(len(chi) - 1):
        acc = acc * lam + chi[i]
        q[i] = acc
    return q


def matrix_poly(coeffs_desc: np.ndarray, M: np.ndarray) -> np.ndarray:
    n = M.shape[0]
    out = np.zeros((n, n), dtype=complex)
    for c in coeffs_desc:
        out = out @ M + c * np.eye(n)
    return out


def complement_subspace(Acl: np.ndarray, lam: complex, rtol: float = 1e-8) -> tuple[np.ndarray, np.ndarray]:
    """Orthonormal basis of null(q(Acl)) and the unit normal ``psi`` to it."""
    Acl = np.asarray(Acl, dtype=float)
    n = Acl.shape[0]
    Q = matrix_poly(cofactor_poly(Acl, lam), Acl)
    _, s, Vh = np.linalg.svd(Q)
    if n == 1:
        return np.zeros((1, 0), dtype=complex), np.ones(1, dtype=complex)
    nullity = int(np.sum(s <= rtol * s[0])) if s[0] > 0 else n
    if nullity != n - 1:
        raise DimensionMismatch(f"null space of q(Acl) has dimension {nullity}, expected {n - 1}")
    V = Vh.conj().T
    return V[:, 1:], V[:, 0]


def jordan_complement(Acl: np.ndarray, lam: complex) -> np.ndarray:
    """X as the sum of generalized eigenspaces of every eigenvalue except ``lam``."""
    Acl = np.asarray(Acl, dtype=float)
    n = Acl.shape[0]
    centres, counts = cluster_roots(list(np.linalg.eigvals(Acl)), SIMPLE_RTOL)
    blocks = []
    for mu, k in zip(centres, counts):
        if abs(mu - lam) <= SIMPLE_RTOL * max(1.0, abs(lam)):
            continue
        Mk = np.linalg.matrix_power(Acl - mu * np.eye(n), k)
        blocks.append(_null(Mk, k))
    return np.hstack(blocks) if blocks else np.zeros((n, 0), dtype=complex)


def _null(M: np.ndarray, dim: int) -> np.ndarray:
    _, _, Vh = np.linalg.svd(M)
    return Vh.conj().T[:, M.shape[0] - dim :]


def subspace_gap(U: np.ndarray, V: np.ndarray) -> float:
    """Largest principal angle between two column spaces (radians)."""
    return float(np.max(subspace_angles(U, V)))


def projection_norm(psi, x) -> float:
    """``|psi^* x|``, equal to ``||psi psi^* x||`` for unit ``psi``."""
    return float(abs(np.vdot(np.asarray(psi), np.asarray(x, dtype=complex))))


@dataclass(frozen=True)
class ModalExpansion:
    eigenvalues: tuple[complex, ...]
    multiplicities: tuple[int, ...]
    S: np.ndarray
    beta: np.ndarray
    cond: float

    def output(self, C: np.ndarray, k_max: int) -> np.ndarray:
        """y_k = C S J^k beta evaluated with closed-form Jordan block powers."""
        C = np.asarray(C, dtype=complex).reshape(-1)
        CS = C @ self.S
        ys = np.zeros(k_max + 1, dtype=complex)
        for k in range(k_max + 1):
            acc = 0j
            start = 0
            for lam, nj in zip(self.eigenvalues, self.multiplicities):
                b = self.beta[start : start + nj]
                for i in range(nj):
                    # row i of J^k beta
                    gamma = 0j
                    for l in range(i, nj):
                        d = l - i
                        if d > k:
                            break
                        gamma += comb(k, d) * lam ** (k - d) * b[l]
                    acc += CS[start + i] * gamma
                start += nj
            ys[k] = acc
        return ys

    def terms(self, C: np.ndarray) -> list[tuple[np.ndarray, complex]]:
        """(polynomial-in-k coefficients ascending, base) per eigenvalue."""
        C = np.asarray(C, dtype=complex).reshape(-1)
        CS = C @ self.S
        out = []
        start = 0
        for lam, nj in zip(self.eigenvalues, self.multiplicities):
            b = self.beta[start : start + nj]
            # sum_i CS_i sum_d C(k,d) lam^{-d} b_{i+d}  -> polynomial in k
            poly = np.zeros(nj, dtype=complex)
            for i in range(nj):
                for d in range(nj - i):
                    binom = _binomial_poly(d)
                    poly[: len(binom)] += CS[start + i] * b[i + d] * lam ** (-d) * binom
            out.append((poly, complex(lam)))
            start += nj
        return out


def _binomial_poly(d: int) -> np.ndarray:
    """Ascending coefficients of C(k, d) as a polynomial in k."""
    p = np.array([1.0])
    for j in range(d):
        p = np.convolve(p, [-j, 1.0])
    return p / np.prod(np.arange(1, d + 1)) if d else p


def modal_expansion(Acl: np.ndarray, x0) -> ModalExpansion:
    """Jordan-chain coordinates of ``x0``; assumes one chain per eigenvalue."""
    Acl = np.asarray(Acl, dtype=float)
    n = Acl.shape[0]
    centres, counts = cluster_roots(list(np.linalg.eigvals(Acl)), SIMPLE_RTOL)
    cols = []
    for mu, k in zip(centres, counts):
        N = Acl - mu * np.eye(n)
        if k == 1:
            cols.append(_null(N, 1))
            continue
        if null_space(N, rcond=1e-7).shape[1] == k:
            # semisimple repeated eigenvalue
            cols.append(_null(N, k))
            continue
        top = _null(np.linalg.matrix_power(N, k), k)
        lower = _null(np.linalg.matrix_power(N, k - 1), k - 1)
        # component of the generalized eigenspace outside null(N^{k-1})
        resid = top - lower @ (lower.conj().T @ top)
        j = int(np.argmax(np.linalg.norm(resid, axis=0)))
        v = resid[:, j] / np.linalg.norm(resid[:, j])
        chain = [v]
        for _ in range(k - 1):
            chain.append(N @ chain[-1])
        cols.append(np.column_stack(chain[::-1]))
    S = np.hstack(cols).astype(complex)
    cond = float(np.linalg.cond(S))
    if not np.isfinite(cond) or cond > ILL_CONDITIONED:
        raise IllConditioned(f"chain basis condition number {cond:.3e}")
    beta = np.linalg.solve(S, np.asarray(x0, dtype=complex))
    return ModalExpansion(tuple(complex(c) for c in centres), tuple(counts), S, beta, cond)


def modal_output(Acl: np.ndarray, C, x0, k_max: int) -> np.ndarray:
    ys = modal_expansion(Acl, x0).output(C, k_max)
    return ys.real if np.max(np.abs(ys.imag), initial=0.0) <= 1e-9 * max(1.0, np.max(np.abs(ys))) else ys


def direct_output(Acl: np.ndarray, C, x0, k_max: int) -> np.ndarray:
    C = np.asarray(C, dtype=float).reshape(-1)
    x = np.asarray(x0, dtype=float)
    ys = np.empty(k_max + 1)
    for k in range(k_max + 1):
        ys[k] = C @ x
        x = Acl @ x
    return ys
