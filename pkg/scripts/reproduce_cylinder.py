"""Cylinder-to-cylinder extremal maps: closed-form numbers vs. the constructed lift.

For each (a, b, a', b') prints the closed-form mean distortion and transported
energy, then solves the lift problem for the identity rectangles and compares
the assembled map with the closed-form one.

    python scripts/reproduce_cylinder.py [--grid 64]
"""

import argparse
import time

import numpy as np

from heisqc.holomorphic import builtin_biholomorphism
from heisqc.lift_builder import LiftProblem, solve_lift
from heisqc.modulus import closed_form_modulus, pushforward_energy
from heisqc.qcmaps import contact_residual_arr, cylinder_extremal_map, distortion_arr, mean_distortion

CASES = [(1, 1, 1, 2), (2, 1, 1, 3), (1, 1, 0.5, 1), (1, 2, 1, 3)]


def samples(rng, n, a, b):
    r = np.sqrt(b) * np.sqrt(rng.uniform(0.01, 0.99, n))
    return r * np.exp(1j * rng.uniform(0, 2 * np.pi, n)), a * rng.uniform(0.01, 0.99, n)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--grid", type=int, default=64)
    ap.add_argument("--n", type=int, default=1000)
    args = ap.parse_args()
    # both integrands depend on |z| only, so spend the nodes radially
    grid = (4 * args.grid, 8, 8)
    rng = np.random.default_rng(0)
    ident = builtin_biholomorphism("identity")

    print(f"{'a':>4} {'b':>4} {'ap':>4} {'bp':>4} {'K max':>9} {'int K^2 rho^4':>15} "
          f"{'energy':>10} {'16pi bp^3/3ap^3':>16} {'lift err':>9} {'contact':>9} {'sec':>6}")
    for a, b, a_p, b_p in CASES:
        t0 = time.perf_counter()
        f = cylinder_extremal_map(a, b, a_p, b_p)
        _, rho = closed_form_modulus("cylinder_horizontal", (a, b))
        z, t = samples(rng, args.n, a, b)
        k_max = float(np.max(distortion_arr(f, z, t)))
        md = mean_distortion(f, rho, grid)
        energy = pushforward_energy(rho, f, grid)
        res = solve_lift(LiftProblem(a, b, a_p, b_p, ident, ident))
        f1, f2 = res.map(z, t)
        g1, g2 = f(z, t)
        err = float(max(np.max(np.abs(f1 - g1)), np.max(np.abs(f2 - g2))))
        contact = float(np.max(contact_residual_arr(res.map, z, t)))
        print(f"{a:4g} {b:4g} {a_p:4g} {b_p:4g} {k_max:9.4f} {md:15.6f} {energy:10.4f} "
              f"{16 * np.pi * b_p ** 3 / (3 * a_p ** 3):16.4f} {err:9.2e} {contact:9.2e} "
              f"{time.perf_counter() - t0:6.1f}")


if __name__ == "__main__":
    main()
