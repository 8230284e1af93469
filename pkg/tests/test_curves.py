import numpy as np
import pytest
from hypothesis import given, strategies as st

from heisqc.curves import (HorizontalCurve, PlaneCurve, curve_density_integral,
                           foliation_from_biholomorphism, foliation_gamma0, horizontality_residual,
                           lift_halfplane_curve, sample_curve)
from heisqc.domains import Cylinder, Density
from heisqc.errors import DegenerateCurve, DomainEscape
from heisqc.holomorphic import builtin_biholomorphism


def test_gamma0_curve_is_horizontal():
    c = foliation_gamma0(1.0, 1.0)(1.0, 0.3)
    assert horizontality_residual(c) <= 1e-9


def test_vertical_segment_fails_horizontality():
    c = HorizontalCurve(lambda s: (np.ones(np.shape(s), dtype=complex), s + 0.0), 0.0, 1.0)
    assert horizontality_residual(c) == pytest.approx(1.0, abs=1e-9)


def test_constant_curve_is_horizontal():
    c = HorizontalCurve(lambda s: (np.full(np.shape(s), 1 + 2j), np.full(np.shape(s), 3.0)), 0, 1)
    assert horizontality_residual(c) == 0


def test_lift_of_horizontal_segment():
    c = lift_halfplane_curve(PlaneCurve(lambda s: s + 1j, 0.0, 1.0))
    s = np.linspace(0, 1, 11)
    z, t = c(s)
    assert np.max(np.abs(z - np.exp(-0.5j * s))) < 1e-9
    assert np.allclose(t, s)


def test_lift_of_constant_curve():
    c = lift_halfplane_curve(PlaneCurve(lambda s: np.full(np.shape(s), 2j), 0, 1), theta0=0.7)
    z, t = c(np.linspace(0, 1, 5))
    assert np.allclose(z, np.sqrt(2) * np.exp(0.7j)) and np.allclose(t, 0)


def test_lift_of_vertical_ray_keeps_angle():
    c = lift_halfplane_curve(PlaneCurve(lambda s: np.exp(s + 0.5j * np.pi), 0, 1))
    z, _ = c(np.linspace(0, 1, 9))
    assert np.max(np.abs(np.angle(z))) < 1e-12


def test_lift_rejects_curves_on_real_axis():
    with pytest.raises(DegenerateCurve):
        lift_halfplane_curve(PlaneCurve(lambda s: s + 1j * s, 0, 1))


def test_gamma0_line_integral_is_one():
    rho = Density(lambda z, t: 2 * np.abs(z), Cylinder(1, 1))
    for r in (0.1, 0.5, 1.0):
        c = foliation_gamma0(1.0, 1.0)(r, 1.0)
        assert curve_density_integral(rho, c) == pytest.approx(1.0, abs=1e-9)
    zero = Density(lambda z, t: np.zeros(np.shape(z)), Cylinder(1, 1))
    assert curve_density_integral(zero, c) == 0


def test_curve_leaving_domain_is_reported():
    rho = Density(lambda z, t: np.ones(np.shape(z)), Cylinder(0.5, 1))
    with pytest.raises(DomainEscape):
        curve_density_integral(rho, foliation_gamma0(1.0, 1.0)(0.5, 0.0))


def test_gamma0_point_and_projection():
    c = foliation_gamma0(4.0, 1.0)(1.0, 0.0)
    p = c.point(np.pi)
    assert p.z == pytest.approx(-1j) and p.t == pytest.approx(np.pi)
    c = foliation_gamma0(1.0, 1.0)(0.6, 2.0)
    z, t = c(np.linspace(0, 1, 7))
    assert np.allclose(t + 1j * np.abs(z) ** 2, np.linspace(0, 1, 7) + 0.36j)


def test_identity_foliation_recovers_gamma0():
    lifted = foliation_from_biholomorphism(builtin_biholomorphism("identity"), 1.0, 1.0)
    s = np.linspace(0, 1, 21)
    for x, alpha in ((0.25, 0.0), (0.81, 2.0)):
        z1, t1 = lifted(x, alpha)(s)
        z0, t0 = foliation_gamma0(1.0, 1.0)(np.sqrt(x), alpha)(s)
        assert np.max(np.abs(z1 - z0)) < 1e-9 and np.allclose(t1, t0)


def test_exp_foliation_radial_curves():
    a = 2 * np.log(2.0)
    fol = foliation_from_biholomorphism(builtin_biholomorphism("exp"), a, np.pi)
    x, alpha = 1.1, 0.4
    c = fol(x, alpha)
    s = np.linspace(0, a, 17)
    z, t = c(s)
    assert np.allclose(np.abs(z) ** 2, np.exp(s) * np.sin(x), rtol=1e-12)
    assert np.allclose(t, np.exp(s) * np.cos(x), rtol=1e-12)
    # the lift angle is alpha - s cot(x) / 2
    assert np.max(np.abs(np.angle(z * np.exp(-1j * (alpha - s / (2 * np.tan(x))))))) < 1e-9
    dz, _ = c.velocity_at(s)
    expected = np.exp(s / 2) / (2 * np.sqrt(np.sin(x)))
    assert np.max(np.abs(np.abs(dz) - expected)) < 1e-9
    h = 1e-6
    zp, _ = c(s[1:-1] + h)
    zm, _ = c(s[1:-1] - h)
    assert np.max(np.abs(np.abs((zp - zm) / (2 * h)) - expected[1:-1])) < 1e-6


def test_sample_curve_rows():
    rows = sample_curve(foliation_gamma0(1.0, 1.0)(1.0, 0.0), 5)
    assert rows.shape == (5, 4)
    assert np.allclose(rows[:, 0], rows[:, 3])


def smooth_plane_curve(c0, slope, amp, omega, lift_y, wobble):
    def pos(s):
        return (c0 + slope * s + amp * np.sin(omega * s)
                + 1j * (1.0 + lift_y * s * s + wobble * np.cos(omega * s)))

    def vel(s):
        return slope + amp * omega * np.cos(omega * s) + 1j * (2 * lift_y * s - wobble * omega * np.sin(omega * s))

    return PlaneCurve(pos, 0.0, 2.0, vel)


curve_params = st.tuples(st.floats(-3, 3), st.floats(-2, 2), st.floats(-1, 1), st.floats(0.5, 4),
                         st.floats(0, 2), st.floats(-0.5, 0.5))


@given(curve_params, st.floats(-10, 10))
def test_lift_projects_back_and_is_horizontal(params, theta0):
    pc = smooth_plane_curve(*params)
    c = lift_halfplane_curve(pc, theta0)
    s = np.linspace(0, 2, 41)
    z, t = c(s)
    assert np.max(np.abs(t + 1j * np.abs(z) ** 2 - pc(s))) <= 1e-8 * (1 + np.max(np.abs(pc(s))))
    assert horizontality_residual(c, 200) <= 1e-6


@given(curve_params, st.floats(-5, 5), st.floats(-5, 5))
def test_lift_rotation_equivariance(params, theta0, delta):
    pc = smooth_plane_curve(*params)
    s = np.linspace(0, 2, 23)
    z0, t0 = lift_halfplane_curve(pc, theta0)(s)
    z1, t1 = lift_halfplane_curve(pc, theta0 + delta)(s)
    assert np.max(np.abs(z1 - np.exp(1j * delta) * z0)) <= 1e-12 * (1 + np.max(np.abs(z0)))
    assert np.array_equal(t0, t1)


def test_line_integral_convergence_order():
    rho = Density(lambda z, t: 2 + np.cos(3 * t) * (1 + np.abs(z) ** 2) + np.real(z) ** 2, Cylinder(1, 1))
    c = foliation_from_biholomorphism(builtin_biholomorphism("identity"), 1.0, 1.0)(0.6, 0.2)
    ref = curve_density_integral(rho, c, 2048)
    errs = [abs(curve_density_integral(rho, c, n) - ref) for n in (8, 16, 32)]
    orders = np.log2(np.array(errs[:-1]) / np.array(errs[1:]))
    assert np.all(orders >= 2)
