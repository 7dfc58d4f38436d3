"""Random initial-state census over a range of gains for the second-order loop."""

import argparse
import time

import numpy as np

from lureosc import systems
from lureosc.lure import LureConfig, random_x0_census
from lureosc.realization import realize, validate
from lureosc.stability import crossings


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--box", type=float, default=10.0)
    ap.add_argument("--gains", type=float, nargs="*", default=[-4.0, -2.5, -1.5, -1.0, 0.0, 0.25, 0.6, 1.0])
    args = ap.parse_args()

    G = validate(*systems.second_order())
    ss = realize(G)
    cs = crossings(G)
    print(f"stable interval ({cs.alpha_n:g}, {cs.alpha_p:g})")
    print(f"{'alpha':>7} {'self-excited':>13} {'convergent':>11} {'inconclusive':>13} {'simple unstable':>16} {'sec':>6}")
    for a in args.gains:
        t0 = time.perf_counter()
        res = random_x0_census(LureConfig(ss, a, horizon=2000), None, args.trials, args.seed, args.box)
        dt = time.perf_counter() - t0
        c = res.counts
        print(f"{a:7.3g} {c['SelfExcited']:13d} {c['Convergent']:11d} {c['Inconclusive']:13d} "
              f"{str(res.has_simple_unstable):>16} {dt:6.2f}")


if __name__ == "__main__":
    main()
