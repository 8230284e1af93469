"""Reference values for the test suite, computed with mpmath independently of heisqc.

Run from the repository root; writes tests/data/oracles.json. Nothing from
the package is imported, so these values are an independent check.
"""

import json
from pathlib import Path

import mpmath as mp

mp.mp.dps = 30


def cylinder_mean_distortion(a, b, ap, bp):
    # K = 1/(1 + (a'/(ab') - 1/b) r^2)^2, rho = 2r/a on {0<t<a, r^2<b}
    c = mp.mpf(ap) / (a * bp) - mp.mpf(1) / b
    f = lambda r: (1 + c * r * r) ** -4 * (2 * r / a) ** 4 * r  # noqa: E731
    return 2 * mp.pi * a * mp.quad(f, [0, mp.sqrt(b)])


def cylinder_horizontal_energy(a, b):
    f = lambda r: (2 * r / a) ** 4 * r  # noqa: E731
    return 2 * mp.pi * a * mp.quad(f, [0, mp.sqrt(b)])


def cylinder_vertical_energy(a, b):
    c = mp.mpf(2) / (3 * mp.cbrt(b))
    f = lambda r: (c * r ** (-mp.mpf(1) / 3)) ** 4 * r  # noqa: E731
    return 2 * mp.pi * a * mp.quad(f, [0, mp.sqrt(b)])


def annulus_energy(a):
    # cylindrical coordinates over {1 < (r^4 + t^2)^(1/4) < a}
    la = mp.log(a)

    def inner(t):
        lo = mp.sqrt(mp.sqrt(max(1 - t * t, 0)))
        hi = mp.sqrt(mp.sqrt(max(a ** 4 - t * t, 0)))
        g = lambda r: (r / (la * mp.sqrt(t * t + r ** 4))) ** 4 * r  # noqa: E731
        return mp.quad(g, [lo, hi])

    return 2 * mp.pi * mp.quad(inner, [-a * a, -1, 0, 1, a * a])


def annuli_profile(k, x):
    return mp.acot(mp.cot(x) / k) if x <= mp.pi / 2 else mp.pi + mp.acot(mp.cot(x) / k)


def annuli_slope_violation(k, anchor):
    """``k - min_x varphi_D'(x)`` for the trajectory through ``varphi(pi/2) = anchor``.

    Trajectories are ``cot varphi = cot(x)/k + D`` with ``D = cot(anchor)``.
    """
    D = mp.cot(anchor)
    slope = lambda x: (1 / k) / mp.sin(x) ** 2 / (1 + (mp.cot(x) / k + D) ** 2)  # noqa: E731
    xs = [mp.pi * (i + mp.mpf(1) / 2) / 4000 for i in range(4000)]
    i = min(range(len(xs)), key=lambda j: slope(xs[j]))
    lo, hi = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    x_min = mp.findroot(lambda x: mp.diff(slope, x), (lo + hi) / 2)
    return k - slope(x_min)


def main():
    k = mp.mpf(1) / 2
    out = {
        "cylinder_mean_distortion_1_1_1_2": cylinder_mean_distortion(1, 1, 1, 2),
        "cylinder_mean_distortion_2_1_1_3": cylinder_mean_distortion(2, 1, 1, 3),
        "cylinder_horizontal_energy_1_1": cylinder_horizontal_energy(1, 1),
        "cylinder_horizontal_energy_1_2": cylinder_horizontal_energy(1, 2),
        "cylinder_vertical_energy_1_1": cylinder_vertical_energy(1, 1),
        "annulus_energy_e": annulus_energy(mp.e),
        "annulus_energy_2": annulus_energy(mp.mpf(2)),
        "annuli_profile_pi_4": annuli_profile(k, mp.pi / 4),
        "annuli_profile_3pi_4": annuli_profile(k, 3 * mp.pi / 4),
        "annuli_violation_plus_0p05": annuli_slope_violation(k, mp.pi / 2 + mp.mpf("0.05")),
        "annuli_violation_minus_0p05": annuli_slope_violation(k, mp.pi / 2 - mp.mpf("0.05")),
        "heis_norm_1p1i_2": mp.mpf(8) ** (mp.mpf(1) / 4),
        "cylinder_K_half": 1 / (1 - mp.mpf(1) / 4) ** 2,
    }
    path = Path(__file__).resolve().parents[1] / "tests" / "data" / "oracles.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps({k: float(v) for k, v in out.items()}, indent=2, sort_keys=True) + "\n")
    for name, v in out.items():
        print(f"{name:40s} {mp.nstr(v, 15)}")


if __name__ == "__main__":
    main()
