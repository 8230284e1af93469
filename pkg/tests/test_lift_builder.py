from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pytest

from heisqc.domains import Cylinder, Density, PlaneRectangle
from heisqc.errors import NoSolution, NonUnique, PathInconsistent
from heisqc.holomorphic import Biholomorphism, builtin_biholomorphism
from heisqc.lift_builder import (LiftProblem, OdeOptions, Profile, compatibility_check,
                                 profile_ode_solve, shoot, theta_potential_build,
                                 verify_commutation)
from heisqc.modulus import pull_back_density
from heisqc.qcmaps import (QCMap, contact_residual_arr, cylinder_extremal_map, distortion_arr,
                           integrate_heis, spherical_annuli_map)

from .conftest import annuli_problem, annulus_samples, cylinder_problem, cylinder_samples

CONFIGS = Path(__file__).resolve().parents[1] / "scripts" / "configs"
SQUARE = Biholomorphism(lambda w: np.asarray(w) ** 2, lambda w: 2 * np.asarray(w), "square")


def translate_problem(ap, bp, a=1.0, b=1.0):
    tr = builtin_biholomorphism("translate_i")
    return LiftProblem(a, b, ap, bp, tr, tr)


@dataclass(frozen=True)
class DecoupledProblem(LiftProblem):
    """Annuli-type ODE whose x-factor ``csc^2(x) / kappa`` no longer matches the stretch."""

    kappa: float = 0.7

    def rhs_x(self, x):
        return np.sin(np.asarray(x)) ** -2 / self.kappa


def test_builtin_biholomorphisms():
    ex = builtin_biholomorphism("exp")
    w = 0.5 + 0.5j * np.pi
    assert ex(w) == pytest.approx(1j * np.exp(0.5)) and ex.deriv(w) == pytest.approx(1j * np.exp(0.5))
    tr = builtin_biholomorphism("translate_i")
    assert tr(0.3) == 0.3 + 1j and tr.deriv(0.3) == 1
    aff = builtin_biholomorphism("affine", {"c": 2, "d": [0, 1]})
    assert aff(1j) == pytest.approx(3j)
    for bh in (ex, tr, aff, SQUARE):
        info = bh.check(1.0, 1.0)
        assert info["cr_residual"] <= 1e-6 and info["min_imag"] > 0 and info["min_abs_deriv"] > 0


def test_chart_inverse_round_trip():
    ex = builtin_biholomorphism("exp")
    rng = np.random.default_rng(0)
    zeta = rng.uniform(0, 1.3, 200) + 1j * rng.uniform(0.01, 3.1, 200)
    assert np.max(np.abs(ex.inverse(ex(zeta), 1.4, np.pi) - zeta)) < 1e-12


def test_compatibility_check():
    assert compatibility_check(builtin_biholomorphism("identity"), 1, 1) == (True, 0.0)
    ok, var = compatibility_check(builtin_biholomorphism("exp"), 2 * np.log(2), np.pi)
    assert ok and var < 1e-12
    ok, var = compatibility_check(SQUARE, 1, 1)
    assert not ok and var > 1e-8


def test_incompatible_maps_are_refused():
    ident = builtin_biholomorphism("identity")
    with pytest.raises(NoSolution):
        profile_ode_solve(LiftProblem(1, 1, 1, 1, SQUARE, ident))
    with pytest.raises(NoSolution):
        profile_ode_solve(LiftProblem(1, 1, 1, 1, ident, SQUARE))


def test_problem_from_json():
    prob = LiftProblem.from_json(CONFIGS / "annuli.json")
    assert prob.phi.name == "exp" and prob.stretch == pytest.approx(0.5)
    assert prob.ode == OdeOptions(2000, 1e-5, 1e-8)
    with pytest.raises(ValueError):
        LiftProblem(1, -1, 1, 1, prob.phi, prob.psi)


def check_profile(prof, prob):
    x = np.linspace(0, prob.b, 2001)
    v = prof(x)
    assert abs(v[0]) <= prob.ode.tol_bvp and abs(v[-1] - prob.b_p) <= prob.ode.tol_bvp
    assert np.all(np.diff(v) > 0)
    assert np.min(prof.slope(x)) >= prob.stretch - prob.ode.tol_slope
    return x, v


def test_cylinder_profile(cylinder_lift):
    prob, res = cylinder_lift
    x, v = check_profile(res.profile, prob)
    assert np.max(np.abs(v - 2 * x / (2 - x))) <= 1e-6
    assert np.max(np.abs(res.profile.slope(x) - 4 / (2 - x) ** 2)) <= 1e-6


def test_annuli_profile(annuli_lift, oracles):
    prob, res = annuli_lift
    x, v = check_profile(res.profile, prob)
    exact = np.pi / 2 - np.arctan(2 / np.tan(np.clip(x, 1e-300, None)))
    assert np.max(np.abs(v - exact)) <= 1e-6
    assert res.profile(np.pi / 4) == pytest.approx(oracles["annuli_profile_pi_4"], abs=1e-6)
    assert res.profile(3 * np.pi / 4) == pytest.approx(oracles["annuli_profile_3pi_4"], abs=1e-6)


def test_annuli_anchor_perturbation_breaks_slope(annuli_lift, oracles):
    prob, res = annuli_lift
    traj = shoot(prob, [res.profile.anchor + 0.05, res.profile.anchor - 0.05])
    violation = -traj.margin(prob.stretch)
    assert np.all(violation > prob.ode.tol_slope)
    assert violation[0] == pytest.approx(oracles["annuli_violation_plus_0p05"], rel=1e-4)
    assert violation[1] == pytest.approx(oracles["annuli_violation_minus_0p05"], rel=1e-4)


def test_translate_off_condition_has_no_solution():
    with pytest.raises(NoSolution) as err:
        profile_ode_solve(translate_problem(1.0, 2.0))
    assert err.value.mismatch > 1e-5


def test_translate_on_condition_is_solved():
    bp = 2.0
    prob = translate_problem((1 + bp) / (2 * bp), bp)
    check_profile(profile_ode_solve(prob), prob)


def test_continuum_of_anchors_is_reported():
    ex = builtin_biholomorphism("exp")
    prob = DecoupledProblem(2 * np.log(2), np.pi, np.log(2), np.pi, ex, ex)
    with pytest.raises(NonUnique) as err:
        profile_ode_solve(prob)
    lo, hi = err.value.anchors
    assert hi - lo > 1e-2 * np.pi


def test_cylinder_potential(cylinder_lift):
    _, res = cylinder_lift
    s, x = np.meshgrid(np.linspace(0, 1, 41), np.linspace(0, 1, 41))
    assert np.max(np.abs(res.potential(s, x) - s / 4)) <= 1e-8
    assert res.potential.mixed_residual <= 1e-6


def test_annuli_potential(annuli_lift):
    prob, res = annuli_lift
    pot = res.potential
    exact = (res.profile(pot.x) - pot.x) / 2
    assert np.max(np.abs(pot.h - exact[None, :])) <= 1e-8
    # between nodes the bicubic interpolant adds its own error near x = pi/2
    s, x = np.meshgrid(np.linspace(0, prob.a, 41), np.linspace(0, np.pi, 41))
    assert np.max(np.abs(pot(s, x) - (res.profile(x) - x) / 2)) <= 1e-7
    assert pot.mixed_residual <= 1e-6


def test_potential_rejects_non_solutions():
    prob = cylinder_problem()
    x = np.linspace(0, 1, 11)
    linear = Profile(x, 2 * x, np.full(x.shape, 2.0), 1.0, 1.0, 2.0, 1.0)
    with pytest.raises(PathInconsistent):
        theta_potential_build(prob, linear, (16, 16))


def test_assembled_cylinder_lift(cylinder_lift):
    prob, res = cylinder_lift
    z, t = cylinder_samples(np.random.default_rng(1), 1000)
    ref1, ref2 = cylinder_extremal_map(1, 1, 1, 2)(z, t)
    f1, f2 = res.map(z, t)
    assert np.max(np.abs(f1 - ref1)) <= 1e-8 and np.max(np.abs(f2 - ref2)) <= 1e-8
    assert np.max(contact_residual_arr(res.map, z[:200], t[:200])) <= 1e-5
    assert verify_commutation(res.map, prob, res.profile, z, t) <= 1e-12


def test_assembled_annuli_lift(annuli_lift):
    prob, res = annuli_lift
    z, t = annulus_samples(np.random.default_rng(2), 1000)
    ref1, ref2 = spherical_annuli_map(2.0, 0.5)(z, t)
    f1, f2 = res.map(z, t)
    assert max(np.max(np.abs(f1 - ref1)), np.max(np.abs(f2 - ref2))) <= 1e-6
    assert np.max(contact_residual_arr(res.map, z[:200], t[:200])) <= 1e-5
    assert verify_commutation(res.map, prob, res.profile, z, t) <= 1e-6


def test_commutation_ignores_angle_but_contact_does_not(cylinder_lift):
    prob, res = cylinder_lift
    f = res.map
    twisted = QCMap(lambda z, t: f.f1(z, t) * np.exp(1j * f.f2(z, t)), f.f2, f.source, f.target)
    z, t = cylinder_samples(np.random.default_rng(3), 200)
    assert verify_commutation(twisted, prob, res.profile, z, t) <= 1e-6
    assert np.max(contact_residual_arr(twisted, z, t)) > 1e-2


def contact_flow(eps, m, n, steps=40):
    """Time-one flow of the contact Hamiltonian ``eps sin^2(m pi x) sin^2(n pi y)``.

    In the coordinates ``(theta, x, y) = (arg z, t, |z|^2)`` the contact form is
    ``dx + 2y dtheta`` and the field is ``(H_y / 2, H - y H_y, y H_x)``. It fixes
    the boundary of the unit cylinder, so composing with it stays in the class
    of contact maps between the same cylinders.
    """
    def field(x, y):
        sx, cx = np.sin(m * np.pi * x), np.cos(m * np.pi * x)
        sy, cy = np.sin(n * np.pi * y), np.cos(n * np.pi * y)
        h = eps * sx * sx * sy * sy
        hx = eps * 2 * m * np.pi * sx * cx * sy * sy
        hy = eps * 2 * n * np.pi * sx * sx * sy * cy
        return hy / 2, h - y * hy, y * hx

    def flow(z, t):
        th, x, y = np.angle(z), np.asarray(t, dtype=float), np.abs(z) ** 2
        dt = 1.0 / steps
        for _ in range(steps):
            k1 = field(x, y)
            k2 = field(x + 0.5 * dt * k1[1], y + 0.5 * dt * k1[2])
            k3 = field(x + 0.5 * dt * k2[1], y + 0.5 * dt * k2[2])
            k4 = field(x + dt * k3[1], y + dt * k3[2])
            th, x, y = (u + dt / 6 * (a + 2 * b + 2 * c + d)
                        for u, a, b, c, d in zip((th, x, y), k1, k2, k3, k4))
        return np.sqrt(np.maximum(y, 0)) * np.exp(1j * th), x

    return flow


def test_contact_flow_competitors_are_contact():
    flow = contact_flow(0.3, 1, 1)
    g = QCMap(lambda z, t: flow(z, t)[0], lambda z, t: flow(z, t)[1], Cylinder(1, 1), Cylinder(1, 1))
    z, t = cylinder_samples(np.random.default_rng(5), 200)
    assert np.max(contact_residual_arr(g, z, t)) <= 1e-6
    assert np.max(np.abs(g.f1(z, t) - z)) > 1e-2


def test_cylinder_lift_beats_contact_competitors(cylinder_lift):
    _, res = cylinder_lift
    rho = pull_back_density(Density(lambda w: np.ones(np.shape(w)), PlaneRectangle(1, 1), kind="plane"),
                            Cylinder(1, 1))
    grid = (32, 8, 32)

    def mean_k2(f):
        return integrate_heis(lambda z, t: distortion_arr(f, z, t) ** 2 * rho.eval(z, t) ** 4,
                              Cylinder(1, 1), grid)

    lift = res.map
    best = mean_k2(QCMap(lift.f1, lift.f2, Cylinder(1, 1), name="lift"))
    assert best == pytest.approx(128 * np.pi / 3, rel=1e-3)
    count = 0
    for eps in (0.003, 0.01):
        for m, n in ((1, 1), (2, 1), (1, 2), (2, 2), (3, 1)):
            flow = contact_flow(eps, m, n)
            f = QCMap(lambda z, t, fl=flow: lift.f1(*fl(z, t)), lambda z, t, fl=flow: lift.f2(*fl(z, t)),
                      Cylinder(1, 1), name=f"lift o flow({eps},{m},{n})")
            assert best < mean_k2(f)
            count += 1
    assert count >= 10


def test_csv_rows(cylinder_lift):
    _, res = cylinder_lift
    assert res.profile.rows().shape[1] == 3
    rows = res.potential.rows()
    assert rows.shape == ((len(res.potential.s)) * len(res.potential.x), 3)
