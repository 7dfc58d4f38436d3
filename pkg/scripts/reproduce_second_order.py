"""Exact knife-edge run of the second-order loop next to its 1e-12 perturbation.

Writes one trajectory CSV per run and prints the classification summary.
"""

import argparse
import csv
from pathlib import Path

from lureosc.cli import trajectory_rows
from lureosc.exact import format_quadrat
from lureosc.reproduce import second_order_run


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out", type=Path, default=Path("runs/second_order"))
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)

    for perturbed in (False, True):
        cfg, split, traj, rep = second_order_run(perturbed)
        tag = "perturbed" if perturbed else "exact"
        header, rows = trajectory_rows(traj)
        with open(args.out / f"trajectory_{tag}.csv", "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            w.writerows(rows)
        modes = "".join(str(int(m)) for m in traj.modes[:40])
        print(f"[{tag}] verdict={rep.verdict} period={rep.period} max|y|={rep.max_abs_y:.6g} bound={rep.bound:.6g}")
        print(f"  y_1..y_4 = {', '.join(format_quadrat(v) for v in traj.y_exact[1:5])}")
        print(f"  modes[0:40] = {modes}")
        for c in rep.off_subspace.reentry_checks[:3]:
            print(f"  re-entry k={c.k}: ||P x_k|| = {c.norm:.3e} -> {'pass' if c.passed else 'FAIL'}")


if __name__ == "__main__":
    main()
