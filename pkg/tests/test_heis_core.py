import math

import numpy as np
import pytest
from hypothesis import assume, given, strategies as st

from heisqc.errors import AxisPoint
from heisqc.heis_core import (HPoint, HalfPlanePoint, Tangent, chart_from_heis, chart_to_heis,
                              contact_eval, group_inv, group_mul, group_mul_arr, heis_dist,
                              heis_norm, project_pi)

coord = st.floats(-50, 50, allow_nan=False)
points = st.builds(lambda x, y, t: HPoint(complex(x, y), t), coord, coord, coord)
tangents = st.builds(lambda x, y, t: Tangent(complex(x, y), t), coord, coord, coord)


def close(p, q, tol=1e-12):
    scale = max(1.0, abs(p.z), abs(p.t))
    return abs(p.z - q.z) <= tol * scale and abs(p.t - q.t) <= tol * scale


def test_group_law_examples():
    p = HPoint(1 + 2j, 3)
    assert group_mul(HPoint(0, 0), p) == p
    assert group_mul(HPoint(1, 0), HPoint(1j, 0)) == HPoint(1 + 1j, -2)
    assert group_mul(p, HPoint(-p.z, -p.t)) == HPoint(0, 0)


def test_inverse_examples():
    assert group_inv(HPoint(0, 0)) == HPoint(0, 0)
    assert group_inv(HPoint(1 + 1j, 3)) == HPoint(-1 - 1j, -3)


def test_norm_examples(oracles):
    assert heis_norm(HPoint(0, 1)) == 1
    assert heis_norm(HPoint(1, 0)) == 1
    assert heis_norm(HPoint(1 + 1j, 2)) == pytest.approx(oracles["heis_norm_1p1i_2"], rel=1e-15)


def test_distance_examples():
    p = HPoint(0.3 - 1j, 2)
    assert heis_dist(p, p) == 0
    assert heis_dist(HPoint(0, 0), HPoint(0, 1)) == 1
    assert heis_dist(HPoint(1, 0), HPoint(1 + 1j, -2)) == pytest.approx(1.0, abs=1e-15)


def test_projection_examples():
    assert project_pi(HPoint(1 + 1j, 3)).w == pytest.approx(3 + 2j)
    for th in np.linspace(0, 6, 7):
        assert project_pi(HPoint(np.exp(1j * th), 0)).w == pytest.approx(1j)
    with pytest.raises(AxisPoint):
        project_pi(HPoint(0, 1))


def test_chart_examples():
    assert close(chart_to_heis(0, HalfPlanePoint(1j)), HPoint(1, 0))
    assert close(chart_to_heis(math.pi / 2, HalfPlanePoint(3 + 2j)), HPoint(math.sqrt(2) * 1j, 3))
    th, w = chart_from_heis(HPoint(1, 0))
    assert th == 0 and w.w == 1j
    th, w = chart_from_heis(HPoint(math.sqrt(2) * 1j, 3))
    assert th == pytest.approx(math.pi / 2) and w.w == pytest.approx(3 + 2j)
    with pytest.raises(AxisPoint):
        chart_from_heis(HPoint(0, 5))


def test_halfplane_point_rejects_lower_half():
    with pytest.raises(ValueError):
        HalfPlanePoint(1 - 1j)
    with pytest.raises(ValueError):
        HPoint(complex(np.nan, 0), 0)


def test_contact_examples():
    assert contact_eval(HPoint(0, 0), Tangent(3 - 2j, 0)) == 0
    assert contact_eval(HPoint(1, 0), Tangent(1j, -2)) == pytest.approx(0.0, abs=1e-15)
    assert contact_eval(HPoint(1, 0), Tangent(0, 1)) == 1


@given(points, points, points)
def test_associativity(p, q, r):
    assert close(group_mul(group_mul(p, q), r), group_mul(p, group_mul(q, r)), 1e-13)


@given(points)
def test_inverse_property(p):
    assert close(group_mul(p, group_inv(p)), HPoint(0, 0))
    assert close(group_mul(group_inv(p), p), HPoint(0, 0))


small = st.builds(lambda x, y, t: HPoint(complex(x, y), t), *[st.floats(-10, 10)] * 3)


@given(small, small, small)
def test_left_invariance(g, p, q):
    d = heis_dist(p, q)
    dg = heis_dist(group_mul(g, p), group_mul(g, q))
    # the twisted terms cancel up to rounding of size |g||p|, which only
    # matters relative to d when p and q nearly coincide
    assume(d > 0.5)
    assert dg == pytest.approx(d, rel=1e-12)


@given(st.floats(-1e3, 1e3), st.floats(-1e6, 1e6), st.floats(1e-6, 1e6))
def test_chart_projection_consistency(theta, re, im):
    w = HalfPlanePoint(complex(re, im))
    img = project_pi(chart_to_heis(theta, w)).w
    assert img.real == re
    assert img.imag == pytest.approx(im, rel=1e-14)


@given(st.floats(-20, 20), st.floats(-1e3, 1e3), st.floats(1e-3, 1e3))
def test_chart_round_trip(theta, re, im):
    th, w = chart_from_heis(chart_to_heis(theta, HalfPlanePoint(complex(re, im))))
    assert 0 <= th < 2 * math.pi
    assert abs((th - theta + math.pi) % (2 * math.pi) - math.pi) < 1e-9
    assert w.w == pytest.approx(complex(re, im), rel=1e-12)


@given(points, tangents, tangents, st.floats(-10, 10))
def test_contact_linearity(p, u, v, c):
    s = Tangent(u.dz + v.dz, u.dt + v.dt)
    scale = 1 + abs(p.z) * (abs(u.dz) + abs(v.dz)) + abs(u.dt) + abs(v.dt)
    assert contact_eval(p, s) == pytest.approx(contact_eval(p, u) + contact_eval(p, v),
                                               abs=1e-12 * scale)
    cu = Tangent(c * u.dz, c * u.dt)
    assert contact_eval(p, cu) == pytest.approx(c * contact_eval(p, u), abs=1e-12 * scale * 10)


@given(points, points)
def test_array_law_matches_scalar(p, q):
    z, t = group_mul_arr(np.array([p.z]), np.array([p.t]), np.array([q.z]), np.array([q.t]))
    r = group_mul(p, q)
    assert z[0] == r.z
    assert t[0] == pytest.approx(r.t, abs=1e-15 * (1 + abs(p.t) + abs(q.t) + abs(p.z) * abs(q.z)))
