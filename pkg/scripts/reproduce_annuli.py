"""Spherical annuli: the lift over exp-rectangles vs. the closed-form radial stretch.

Solves the lift problem mapping {1 < ||p|| < A} to {1 < ||p|| < A^k}, reports
the profile error, the map error at random points and the norm identity
``||f(p)|| = ||p||^k``, then shows how the slope constraint fails once the
profile anchor is moved off its solved value.

    python scripts/reproduce_annuli.py [--A 2] [--k 0.5]
"""

import argparse

import numpy as np

from heisqc.heis_core import heis_norm_arr
from heisqc.holomorphic import builtin_biholomorphism
from heisqc.lift_builder import LiftProblem, shoot, solve_lift
from heisqc.qcmaps import contact_residual_arr, distortion_arr, spherical_annuli_map


def exact_profile(x, k):
    # cot varphi = cot(x) / k, continued through pi/2
    return np.pi / 2 - np.arctan(1 / (k * np.tan(np.clip(x, 1e-300, None))))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--A", type=float, default=2.0)
    ap.add_argument("--k", type=float, default=0.5)
    ap.add_argument("--n", type=int, default=1000)
    args = ap.parse_args()
    A, k = args.A, args.k
    exp = builtin_biholomorphism("exp")
    prob = LiftProblem(2 * np.log(A), np.pi, 2 * k * np.log(A), np.pi, exp, exp)
    res = solve_lift(prob)

    x = np.linspace(0, np.pi, 2001)
    print(f"profile sup error       {np.max(np.abs(res.profile(x) - exact_profile(x, k))):.3e}")
    print(f"solved anchor           {res.profile.anchor:.10f}  (exact pi/2 = {np.pi / 2:.10f})")

    rng = np.random.default_rng(0)
    s = rng.uniform(0.02, 0.98, args.n) * 2 * np.log(A)
    xi = rng.uniform(0.02, 0.98, args.n) * np.pi
    w = np.exp(s + 1j * xi)
    z = np.sqrt(w.imag) * np.exp(1j * rng.uniform(0, 2 * np.pi, args.n))
    t = w.real
    f1, f2 = res.map(z, t)
    g1, g2 = spherical_annuli_map(A, k)(z, t)
    print(f"map error vs closed form {max(np.max(np.abs(f1 - g1)), np.max(np.abs(f2 - g2))):.3e}")
    print(f"norm identity residual  {np.max(np.abs(heis_norm_arr(f1, f2) - heis_norm_arr(z, t) ** k)):.3e}")
    print(f"contact residual        {np.max(contact_residual_arr(res.map, z, t)):.3e}")
    kk = distortion_arr(res.map, z, t)
    print(f"K range                 [{kk.min():.6f}, {kk.max():.6f}]")

    print("\nanchor offset   min slope margin (negative = slope constraint violated)")
    offsets = np.array([-0.1, -0.05, -0.01, -1e-3, 0.0, 1e-3, 0.01, 0.05, 0.1])
    margins = shoot(prob, res.profile.anchor + offsets).margin(prob.stretch)
    for d, m in zip(offsets, margins):
        print(f"{d:+13.3f}   {m:+.4e}")


if __name__ == "__main__":
    main()
