import math

import numpy as np
import pytest
from scipy.optimize import brentq

from lureosc.poly import eval_poly
from lureosc.stability import (
    CrossingSet,
    crossings,
    gain_thresholds,
    spr_at,
    spr_sweep,
    stable_interval_check,
    unstable_root_census,
)


def grid_crossings(G, points=200_001):
    """Independent oracle: sign changes of Im G(e^{j theta}) on (0, pi], refined by brentq."""
    im = lambda t: G(complex(math.cos(t), math.sin(t))).imag
    ts = np.linspace(1e-4, math.pi, points)
    vals = np.array([im(t) for t in ts])
    found = []
    for i in range(points - 1):
        if vals[i] == 0.0:
            found.append(ts[i])
        elif vals[i] * vals[i + 1] < 0:
            found.append(brentq(im, ts[i], ts[i + 1], xtol=1e-14))
    if abs(vals[-1]) < 1e-12 and (not found or found[-1] != ts[-1]):
        found.append(math.pi)
    return found


def test_second_order_crossings(second_order):
    G, _ = second_order
    cs = crossings(G)
    assert cs.theta_n == (math.pi,)
    acos34 = math.acos(0.75)
    assert sorted(cs.theta_p) == pytest.approx([-acos34, acos34], abs=1e-9)
    assert cs.alpha_n == pytest.approx(-1.25, abs=1e-9)
    assert cs.alpha_p == pytest.approx(0.5, abs=1e-9)
    assert cs.flags == ()


def test_break_in_has_two_positive_crossings(break_in):
    cs = crossings(break_in)
    assert len(cs.theta_p) == 2
    assert cs.theta_p[0] == pytest.approx(-cs.theta_p[1], abs=1e-12)


def test_pocket_alpha_p(pocket):
    cs = crossings(pocket)
    assert 0.58 <= cs.alpha_p <= 0.62


def test_crossings_match_grid_oracle(random_systems):
    for G, _ in random_systems[:20]:
        cs = crossings(G)
        ours = sorted(t for t in cs.theta_n + cs.theta_p if t > 0)
        ref = grid_crossings(G, 20_001)
        assert len(ours) == len(ref)
        assert np.allclose(ours, ref, atol=1e-7)


def test_crossing_sets_are_symmetric(random_systems):
    for G, _ in random_systems:
        cs = crossings(G)
        for group in (cs.theta_n, cs.theta_p):
            for t in group:
                if t != math.pi:
                    assert min(abs(-t - s) for s in group) < 1e-9


def test_gains_are_reciprocals_of_real_values(random_systems):
    for G, _ in random_systems:
        cs = crossings(G)
        for t, g in cs.gains.items():
            val = G(complex(math.cos(t), math.sin(t)))
            assert abs(val.imag) < 1e-6 * abs(val)
            assert g == pytest.approx(1.0 / val.real, rel=1e-9)
        assert all(cs.gains[t] < 0 for t in cs.theta_n)
        assert all(cs.gains[t] > 0 for t in cs.theta_p)


def test_unbounded_ends_serialize_as_null():
    cs = CrossingSet((), (math.pi,), {math.pi: 0.5}, -math.inf, 0.5, ("EmptyThetaN",))
    d = cs.to_dict()
    assert d["alpha_n"] is None and d["alpha_p"] == 0.5
    assert d["flags"] == ["EmptyThetaN"]


def test_spr_at_matches_quadratic_formula(second_order):
    G, _ = second_order
    # p = z^2 - 1.25 z + 0.75 has complex roots of modulus sqrt(0.75)
    assert spr_at(G, 0.25) == pytest.approx(math.sqrt(0.75), abs=1e-12)
    # p = z^2 + 1.5 z - 2 has roots -0.75 +- 0.25 sqrt(41)
    assert spr_at(G, -2.5) == pytest.approx(0.75 + 0.25 * math.sqrt(41), abs=1e-12)


def test_stable_interval_check(second_order):
    G, _ = second_order
    assert stable_interval_check(G, 0.25)
    assert stable_interval_check(G, -1.0)
    assert not stable_interval_check(G, 0.6)
    assert not stable_interval_check(G, -1.3)


def test_unstable_root_census_examples(second_order):
    G, _ = second_order
    c = unstable_root_census(G, -2.5)
    assert c.count_outside == 1 and c.all_simple
    c = unstable_root_census(G, 0.6)
    assert c.count_outside == 2 and c.all_simple
    assert unstable_root_census(G, 0.0).count_outside == 0


def test_sweep_refines_the_interval_ends(second_order):
    G, _ = second_order
    sw = spr_sweep(G, np.linspace(-2.0, 1.0, 301), refine=True)
    assert sw.unit_crossings == pytest.approx([-1.25, 0.5], abs=1e-8)
    assert sw.spr_values.shape == (301,)
    assert len(sw.root_tracks) == 301


def test_pocket_sweep_finds_stable_gains(pocket):
    sw = spr_sweep(pocket, np.linspace(0.0, 1.4, 2001))
    mask = (sw.alphas >= 1.05) & (sw.alphas <= 1.2)
    assert np.any(sw.spr_values[mask] < 1.0)
    # ...and the gains just above alpha_p are unstable
    mid = (sw.alphas > 0.65) & (sw.alphas < 1.0)
    assert np.all(sw.spr_values[mid] > 1.0)


def test_gain_interval_endpoints_sit_on_the_unit_circle(second_order, random_systems):
    systems = [second_order[0]] + [G for G, _ in random_systems[:10]]
    for G in systems:
        cs = crossings(G)
        for a in (cs.alpha_n, cs.alpha_p):
            if math.isfinite(a):
                assert abs(spr_at(G, a) - 1.0) < 1e-6


def test_gain_interval_is_stable(random_systems):
    rng = np.random.default_rng(11)
    for G, _ in random_systems:
        cs = crossings(G)
        lo = cs.alpha_n if math.isfinite(cs.alpha_n) else -50.0
        hi = cs.alpha_p if math.isfinite(cs.alpha_p) else 50.0
        width = hi - lo
        for a in rng.uniform(lo + 1e-6 * width, hi - 1e-6 * width, size=25):
            assert spr_at(G, a) < 1.0


def test_second_order_gain_thresholds(second_order):
    G, _ = second_order
    th = gain_thresholds(G, 20.0)
    # sampled thresholds land within bisection slack of the interval ends
    assert th.beta_n <= -1.25 + 1e-6
    assert th.beta_p <= 0.5 + 1e-6


def test_pocket_positive_threshold_exceeds_pocket(pocket):
    th = gain_thresholds(pocket, 20.0)
    assert th.beta_p > 1.2


def test_large_gains_leave_relative_degree_roots_outside(random_systems):
    for G, _ in random_systems[:15]:
        need = G.n - G.m
        scale = max(abs(c) for c in G.den.coeffs) / abs(G.num.coeffs[-1])
        for a in (1e4 * scale, -1e4 * scale):
            assert unstable_root_census(G, a).count_outside >= need


def test_root_census_counts_match_direct_roots(random_systems):
    for G, _ in random_systems[:10]:
        for a in (-3.0, 3.0):
            direct = np.roots(G.closed_loop_poly(a).coeffs[::-1])
            assert unstable_root_census(G, a).count_outside == int(np.sum(np.abs(direct) > 1 + 1e-9))


def test_zero_at_one_survives_closing_the_loop(random_systems):
    for G, _ in random_systems[:10]:
        for a in (-2.0, 2.0):
            assert eval_poly(G.closed_loop_poly(a), 1.0) == pytest.approx(eval_poly(G.den, 1.0), abs=1e-9)
