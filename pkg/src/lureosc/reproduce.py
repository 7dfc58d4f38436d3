"""Built-in fixtures with their expected values, run as named assertion lists."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import systems
from .exact import QuadRat
from .lure import LureConfig, Mode, boundedness_bound, classify, simulate
from .realization import closed_loop, realize, validate
from .spectral import find_simple_unstable
from .stability import crossings, spr_sweep

EXAMPLES = ("ex1", "ex2", "ex3-exact", "ex3-perturbed")


@dataclass(frozen=True)
class Assertion:
    name: str
    passed: bool
    observed: str

    def line(self) -> str:
        return f"{'PASS' if self.passed else 'FAIL'}  {self.name}  [{self.observed}]"


def _ex1() -> list[Assertion]:
    G = validate(*systems.break_in_example())
    cs = crossings(G)
    return [Assertion("card(theta_p) == 2", len(cs.theta_p) == 2, f"theta_p = {[round(t, 9) for t in cs.theta_p]}")]


def _ex2() -> list[Assertion]:
    G = validate(*systems.stable_pocket_example())
    cs = crossings(G)
    sw = spr_sweep(G, np.linspace(0.0, 1.4, 2001))
    mask = (sw.alphas >= 1.05) & (sw.alphas <= 1.2) & (sw.spr_values < 1.0)
    pocket = sw.alphas[mask]
    return [
        Assertion("alpha_p in [0.58, 0.62]", 0.58 <= cs.alpha_p <= 0.62, f"alpha_p = {cs.alpha_p:.9f}"),
        Assertion(
            "some alpha in [1.05, 1.2] has spr < 1",
            pocket.size > 0,
            f"{pocket.size} grid points, first = {pocket[0]:.6f}" if pocket.size else "none",
        ),
    ]


def second_order_run(perturbed: bool):
    G = validate(*systems.second_order())
    ss = realize(G)
    alpha = systems.SECOND_ORDER_ALPHA
    split = find_simple_unstable(closed_loop(ss, alpha), alpha)
    x0 = systems.SECOND_ORDER_X0_PERTURBED if perturbed else systems.SECOND_ORDER_X0
    cfg = LureConfig(ss, alpha, x0, horizon=200, mode="exact")
    traj = simulate(cfg, split)
    return cfg, split, traj, classify(traj, cfg, split)


def _ex3_exact() -> list[Assertion]:
    cfg, split, traj, rep = second_order_run(perturbed=False)
    d = traj.d
    y2 = QuadRat(Fraction(1, 4), Fraction(13, 4), 41)
    modes = traj.modes
    hyp = rep.off_subspace
    k4 = [c for c in hyp.reentry_checks if c.k == 4]
    return [
        Assertion("field is Q(sqrt 41)", d == 41, f"d = {d}"),
        Assertion("y_1 == 23 exactly", traj.y_exact[1] == 23, str(traj.y_exact[1])),
        Assertion("y_2 == 1/4 + 13/4 sqrt(41) exactly", traj.y_exact[2] == y2, str(traj.y_exact[2])),
        Assertion(
            "modes S1,S1,S1,S1,S2 then S2 through K = 200",
            modes[:4] == [Mode.S1] * 4 and all(m == Mode.S2 for m in modes[4:]) and traj.horizon == 200,
            "".join(str(int(m)) for m in modes[:12]) + "...",
        ),
        Assertion("||P x_4|| == 0 exactly", traj.proj_exact[4].is_zero(), str(traj.proj_exact[4])),
        Assertion("verdict Convergent(0)", rep.verdict == "Convergent" and rep.limit == 0.0, rep.verdict),
        Assertion("re-entry check at k = 4 fails", len(k4) == 1 and not k4[0].passed, f"{len(hyp.reentry_checks)} checks"),
    ]


def _ex3_perturbed() -> list[Assertion]:
    cfg, split, traj, rep = second_order_run(perturbed=True)
    hyp = rep.off_subspace
    k4 = [c for c in hyp.reentry_checks if c.k == 4]
    left = any(m != Mode.S2 for m in traj.modes[5:])
    bound = boundedness_bound(cfg).value
    return [
        Assertion("re-entry check at k = 4 passes", len(k4) == 1 and k4[0].passed, f"||P x_4|| = {traj.proj_norm[4]:.3e}"),
        Assertion("trajectory leaves S2 after k = 4", left, f"transitions = {len(traj.transitions)}"),
        Assertion("verdict SelfExcited", rep.verdict == "SelfExcited", rep.verdict),
        Assertion("period 2 detected", rep.period == 2, f"period = {rep.period}"),
        Assertion("max |y_k| <= boundedness bound", rep.max_abs_y <= bound, f"{rep.max_abs_y:.6g} <= {bound:.6g}"),
    ]


_RUNNERS = {"ex1": _ex1, "ex2": _ex2, "ex3-exact": _ex3_exact, "ex3-perturbed": _ex3_perturbed}


def run_example(example_id: str) -> list[Assertion]:
    try:
        runner = _RUNNERS[example_id]
    except KeyError:
        raise ValueError(f"unknown example {example_id!r}; choose from {', '.join(EXAMPLES)}") from None
    return runner()


def all_passed(results: list[Assertion]) -> bool:
    return bool(results) and all(a.passed for a in results)

