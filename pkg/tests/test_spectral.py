import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import LAMBDA_STABLE, LAMBDA_UNSTABLE, random_system
from lureosc.realization import closed_loop
from lureosc.spectral import (
    NearDefective,
    NotFound,
    complement_subspace,
    direct_output,
    find_simple_unstable,
    jordan_complement,
    modal_expansion,
    modal_output,
    projection_norm,
    subspace_gap,
)

# gain at which the second-order closed loop has a double eigenvalue (2 + sqrt 2)/2
DOUBLE_GAIN = 1.0 + math.sqrt(2.0)


def test_second_order_split(second_order):
    _, ss = second_order
    split = find_simple_unstable(closed_loop(ss, -2.5), -2.5)
    assert split.lam.real == pytest.approx(LAMBDA_UNSTABLE, abs=1e-10)
    assert abs(split.lam.imag) < 1e-12
    ref_xi = np.array([LAMBDA_UNSTABLE, 1.0])
    assert subspace_gap(split.xi[:, None], ref_xi[:, None]) < 1e-10
    ref_X = np.array([[LAMBDA_STABLE], [1.0]])
    assert subspace_gap(split.X_basis, ref_X) < 1e-8
    assert split.alpha == -2.5


def test_psi_is_orthogonal_to_X(second_order):
    _, ss = second_order
    split = find_simple_unstable(closed_loop(ss, -2.5))
    assert np.allclose(split.X_basis.conj().T @ split.psi, 0.0, atol=1e-12)
    P = split.projector
    assert np.allclose(P @ P, P, atol=1e-12)
    assert np.linalg.matrix_rank(P) == 1


def test_projection_norm_examples(second_order):
    _, ss = second_order
    split = find_simple_unstable(closed_loop(ss, -2.5))
    on_X = np.array([LAMBDA_STABLE, 1.0])
    assert projection_norm(split.psi, on_X) < 1e-12
    x = np.array([1.0, 0.0])
    assert projection_norm(split.psi, x) == pytest.approx(np.linalg.norm(split.projector @ x), abs=1e-14)


def test_no_unstable_eigenvalue(second_order, pocket):
    _, ss = second_order
    with pytest.raises(NotFound):
        find_simple_unstable(closed_loop(ss, 0.0))
    from lureosc.realization import realize

    with pytest.raises(NotFound):
        find_simple_unstable(closed_loop(realize(pocket), 1.1))


def test_double_unstable_eigenvalue_is_rejected(second_order):
    _, ss = second_order
    with pytest.raises(NearDefective):
        find_simple_unstable(closed_loop(ss, DOUBLE_GAIN))


def test_complex_pair_prefers_positive_imaginary_part(second_order):
    _, ss = second_order
    split = find_simple_unstable(closed_loop(ss, 0.6))
    assert split.lam.imag > 0
    assert abs(split.lam) == pytest.approx(math.sqrt(1.1), abs=1e-12)


def test_complement_is_invariant(random_systems):
    for G, ss in random_systems[:20]:
        Acl = closed_loop(ss, -5.0)
        try:
            split = find_simple_unstable(Acl)
        except NotFound:
            continue
        X = split.X_basis
        AX = Acl @ X
        # A X stays inside span X
        resid = AX - X @ (X.conj().T @ AX)
        assert np.linalg.norm(resid) < 1e-8 * np.linalg.norm(Acl)


def test_two_routes_to_the_complement_agree():
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 20:
        M = rng.normal(size=(4, 4))
        eigs = np.linalg.eigvals(M)
        if np.max(np.abs(eigs)) <= 1.0:
            continue
        split = find_simple_unstable(M)
        J = jordan_complement(M, split.lam)
        assert subspace_gap(split.X_basis, J) < 1e-8
        checked += 1


def test_complement_dimension(random_systems):
    for G, ss in random_systems[:20]:
        Acl = closed_loop(ss, 4.0)
        lam = complex(np.linalg.eigvals(Acl)[0])
        X, psi = complement_subspace(Acl, lam)
        assert X.shape == (G.n, G.n - 1)
        assert np.linalg.norm(psi) == pytest.approx(1.0)


def test_eigenvectors_are_never_invisible(random_systems):
    rng = np.random.default_rng(9)
    for G, ss in random_systems:
        for a in rng.uniform(-10, 10, size=5):
            _, V = np.linalg.eig(closed_loop(ss, a))
            for v in V.T:
                assert abs(ss.C[0] @ v) > 1e-8 * np.linalg.norm(v)


def test_modal_output_matches_direct(random_systems):
    rng = np.random.default_rng(13)
    for G, ss in random_systems[:20]:
        a = rng.uniform(-3, 3)
        Acl = closed_loop(ss, a)
        x0 = rng.normal(size=G.n)
        ym = modal_output(Acl, ss.C, x0, 50)
        yd = direct_output(Acl, ss.C, x0, 50)
        scale = np.maximum(np.abs(yd), 1e-300)
        assert np.max(np.abs(ym - yd) / np.maximum(scale, np.max(np.abs(yd)) * 1e-12)) < 1e-8


def test_modal_output_handles_a_jordan_block(second_order):
    _, ss = second_order
    Acl = closed_loop(ss, DOUBLE_GAIN)
    exp = modal_expansion(Acl, [1.0, -2.0])
    assert exp.multiplicities == (2,)
    ym = exp.output(ss.C, 40).real
    yd = direct_output(Acl, ss.C, [1.0, -2.0], 40)
    assert np.allclose(ym, yd, rtol=1e-7)
    (poly, base), = exp.terms(ss.C)
    assert abs(base) == pytest.approx((2 + math.sqrt(2)) / 2, rel=1e-6)
    ks = np.arange(41)
    assert np.allclose(np.polynomial.polynomial.polyval(ks, poly) * base**ks, yd, rtol=1e-6)


def test_starting_on_the_unstable_mode(second_order):
    _, ss = second_order
    Acl = closed_loop(ss, -2.5)
    xi = np.array([LAMBDA_UNSTABLE, 1.0])
    y = direct_output(Acl, ss.C, xi, 10)
    assert np.allclose(y[1:] / y[:-1], LAMBDA_UNSTABLE, rtol=1e-10)


def test_linear_growth_follows_the_projection(second_order):
    _, ss = second_order
    Acl = closed_loop(ss, -2.5)
    split = find_simple_unstable(Acl)
    on_X = np.array([LAMBDA_STABLE, 1.0])
    # rounding seeds the unstable mode too, so keep the horizon short
    assert np.max(np.abs(direct_output(Acl, ss.C, on_X, 25))) < 1.0
    off_X = on_X + 1e-6 * np.real(split.xi)
    assert np.max(np.abs(direct_output(Acl, ss.C, off_X, 40))) > 1e6


@settings(max_examples=25)
@given(st.integers(0, 10_000), st.floats(-8, 8))
def test_modal_terms_rebuild_the_output(seed, alpha):
    G, ss = random_system(np.random.default_rng(seed))
    Acl = closed_loop(ss, alpha)
    x0 = np.random.default_rng(seed + 1).normal(size=G.n)
    exp = modal_expansion(Acl, x0)
    ks = np.arange(30)
    total = sum(np.polynomial.polynomial.polyval(ks, p) * b**ks for p, b in exp.terms(ss.C))
    yd = direct_output(Acl, ss.C, x0, 29)
    assert np.allclose(total, yd, rtol=1e-7, atol=1e-9 * np.max(np.abs(yd)))
