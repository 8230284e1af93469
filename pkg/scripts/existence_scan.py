"""Where does a lift over the translated rectangles exist?

Scans target rectangles (a', b') for the source (1, 1) with phi = psi =
``w -> w + i`` and marks each cell as solved (o) or rejected (.). Solvable
cells sit on the curve ``a' b' = (1 + b') / 2`` with ``b' >= 1``.

    python scripts/existence_scan.py        # about 5 minutes
"""

import argparse

import numpy as np

from heisqc.errors import NoSolution, NonUnique
from heisqc.holomorphic import builtin_biholomorphism
from heisqc.lift_builder import LiftProblem, profile_ode_solve


def classify(a_p, b_p, tr):
    try:
        profile_ode_solve(LiftProblem(1.0, 1.0, a_p, b_p, tr, tr))
        return "o"
    except NoSolution:
        return "."
    except NonUnique:
        return "?"


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.parse_args()
    tr = builtin_biholomorphism("translate_i")

    # rows chosen so that (1, 1), (0.9, 1.25), (0.75, 2) and (0.7, 2.5) lie on the grid
    bps = np.linspace(0.5, 3.0, 11)
    print("grid scan, rows a', columns b' = " + " ".join(f"{bp:g}" for bp in bps))
    for a_p in (1.2, 1.0, 0.9, 0.8, 0.75, 0.7, 0.6):
        print(f"a'={a_p:5.2f} " + " ".join(classify(a_p, bp, tr) for bp in bps))

    print("\npoints on and beside the curve a' = (1 + b') / (2 b')")
    print(f"{'bp':>6} {'on':>3} {'+1%':>4} {'-1%':>4}")
    for bp in (0.5, 0.8, 1.0, 1.5, 2.2, 3.0):
        a_on = (1 + bp) / (2 * bp)
        print(f"{bp:6.2f} {classify(a_on, bp, tr):>3} {classify(1.01 * a_on, bp, tr):>4} "
              f"{classify(0.99 * a_on, bp, tr):>4}")


if __name__ == "__main__":
    main()
