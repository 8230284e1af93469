"""Horizontal curves, horizontal lifts of half-plane curves and line integrals."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline

from .errors import DegenerateCurve, DomainEscape
from .heis_core import HPoint, contact_eval_arr
from .quadrature import simpson_rule

EPS_AXIS = 1e-9
N_ODE = 1000
FD_REL_STEP = 1e-6


@dataclass(frozen=True)
class HorizontalCurve:
    """Curve ``s -> (z(s), t(s))`` on ``[s0, s1]``.

    ``position`` maps an array of parameters to a pair of arrays ``(z, t)``.
    ``velocity`` has the same signature and returns ``(dz, dt)``; when omitted a
    central difference with step ``1e-6 * (s1 - s0)`` is used.
    """

    position: Callable
    s0: float
    s1: float
    velocity: Optional[Callable] = None

    def __call__(self, s):
        return self.position(np.asarray(s, dtype=float))

    def point(self, s: float) -> HPoint:
        z, t = self.position(np.asarray(float(s)))
        return HPoint(complex(z), float(t))

    def velocity_at(self, s):
        s = np.asarray(s, dtype=float)
        if self.velocity is not None:
            return self.velocity(s)
        h = FD_REL_STEP * (self.s1 - self.s0)
        zp, tp = self.position(s + h)
        zm, tm = self.position(s - h)
        return (zp - zm) / (2 * h), (tp - tm) / (2 * h)


@dataclass(frozen=True)
class PlaneCurve:
    """Curve ``s -> w(s)`` in the upper half-plane (vectorized like HorizontalCurve)."""

    position: Callable
    s0: float
    s1: float
    velocity: Optional[Callable] = None

    def __call__(self, s):
        return self.position(np.asarray(s, dtype=float))

    def velocity_at(self, s):
        s = np.asarray(s, dtype=float)
        if self.velocity is not None:
            return self.velocity(s)
        h = FD_REL_STEP * (self.s1 - self.s0)
        return (self.position(s + h) - self.position(s - h)) / (2 * h)


@dataclass(frozen=True)
class Foliation:
    """A family of curves indexed by a box of parameters.

    ``generator(*lam)`` returns one curve; ``parameter_domain`` is a tuple of
    ``(lo, hi)`` pairs, one per parameter.
    """

    generator: Callable
    parameter_domain: tuple
    name: str = ""

    def __call__(self, *lam):
        return self.generator(*lam)

    def parameter_grid(self, n):
        """Cell midpoints, so open parameter intervals are never sampled at their ends."""
        if np.isscalar(n):
            n = (int(n),) * len(self.parameter_domain)
        axes = [lo + (hi - lo) * (np.arange(k) + 0.5) / k
                for (lo, hi), k in zip(self.parameter_domain, n)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)


def horizontality_residual(c: HorizontalCurve, n_samples: int = 200) -> float:
    """Max of ``|dt + 2 Im(conj(z) dz)| / max(1, |dz|)`` on a uniform grid."""
    if n_samples < 2:
        raise ValueError("n_samples must be at least 2")
    s = np.linspace(c.s0, c.s1, n_samples)
    z, _ = c(s)
    dz, dt = c.velocity_at(s)
    res = np.abs(contact_eval_arr(z, dz, dt)) / np.maximum(1.0, np.abs(dz))
    return float(np.max(res))


def _lift_angle(c: PlaneCurve, theta0: float, n_ode: int):
    """Fixed-step RK4 for the lift angle; returns nodes, angles and angle rates."""
    s = np.linspace(c.s0, c.s1, n_ode + 1)
    mid = 0.5 * (s[:-1] + s[1:])
    w_nodes, w_mid = c(s), c(mid)
    if np.min(w_nodes.imag) < EPS_AXIS or np.min(w_mid.imag) < EPS_AXIS:
        raise DegenerateCurve("plane curve comes within eps_axis of the real axis")

    def rate(ss, ww):
        return -np.real(c.velocity_at(ss)) / (2.0 * ww.imag)

    f_nodes = rate(s, w_nodes)
    f_mid = rate(mid, w_mid)
    # the rate does not depend on the angle, so each RK4 step is a Simpson panel
    h = np.diff(s)
    steps = h / 6.0 * (f_nodes[:-1] + 4.0 * f_mid + f_nodes[1:])
    tau = theta0 + np.concatenate([[0.0], np.cumsum(steps)])
    return s, tau, f_nodes


def lift_halfplane_curve(c: PlaneCurve, theta0: float = 0.0, n_ode: int = N_ODE) -> HorizontalCurve:
    """Horizontal lift ``s -> (sqrt(Im c) e^{i tau}, Re c)`` with ``tau(s0) = theta0``."""
    s, tau, rate = _lift_angle(c, theta0, n_ode)
    spline = CubicHermiteSpline(s, tau, rate)

    def position(ss):
        w = c(ss)
        return np.sqrt(w.imag) * np.exp(1j * spline(ss)), w.real

    def velocity(ss):
        w = c(ss)
        dw = c.velocity_at(ss)
        root = np.sqrt(w.imag)
        tau_dot = -dw.real / (2.0 * w.imag)
        dz = np.exp(1j * spline(ss)) * (dw.imag / (2.0 * root) + 1j * root * tau_dot)
        return dz, dw.real

    return HorizontalCurve(position, c.s0, c.s1, velocity)


def _density_values_on_curve(rho, c, n_samples):
    s, w = simpson_rule(c.s0, c.s1, n_samples)
    if isinstance(c, PlaneCurve):
        pts = c(s)
        speed = np.abs(c.velocity_at(s))
        inside = rho.domain.contains_plane(pts)
        vals = rho.eval(pts)
    else:
        z, t = c(s)
        dz, _ = c.velocity_at(s)
        speed = np.abs(dz)
        inside = rho.domain.contains(z, t)
        vals = rho.eval(z, t)
    if not np.all(inside):
        raise DomainEscape(f"curve leaves the domain of density {rho.name!r}")
    with np.errstate(invalid="ignore"):
        prod = vals * speed
    # a curve may start on the axis where the density is singular but integrable
    for end, nxt, far in ((0, 1, 2), (-1, -2, -3)):
        if not np.isfinite(prod[end]):
            prod[end] = 2 * prod[nxt] - prod[far]
    return prod, w


def curve_density_integral(rho, c, n_samples: int = 256) -> float:
    """Simpson approximation of the line integral of ``rho`` along ``c``.

    For Heisenberg curves the length element is ``|dz/ds| ds``; plane curves
    use ``|dw/ds| ds`` with a plane density.
    """
    vals, w = _density_values_on_curve(rho, c, n_samples)
    return float(np.sum(vals * w))


def foliation_gamma0(a: float, b: float) -> Foliation:
    """Lifts of the horizontal segments ``s + iy`` of the rectangle, indexed by ``(r, alpha)``."""

    def generator(r, alpha):
        r2 = r * r

        def position(s):
            return r * np.exp(1j * (alpha - s / (2 * r2))), s + 0.0

        def velocity(s):
            z, _ = position(s)
            return -1j * z / (2 * r2), np.ones_like(s)

        return HorizontalCurve(position, 0.0, a, velocity)

    return Foliation(generator, ((0.0, np.sqrt(b)), (0.0, 2 * np.pi)), "gamma0")


def foliation_from_biholomorphism(phi, a: float, b: float, n_ode: int = N_ODE) -> Foliation:
    """Lifts of ``s -> phi(s + ix)``, ``s in [0, a]``, indexed by ``(x, alpha)``."""

    def generator(x, alpha):
        plane = PlaneCurve(lambda s: phi.eval(s + 1j * x), 0.0, a,
                           lambda s: phi.deriv(s + 1j * x))
        return lift_halfplane_curve(plane, alpha, n_ode)

    return Foliation(generator, ((0.0, b), (0.0, 2 * np.pi)), f"lift[{phi.name}]")


def foliation_vertical(a: float, b: float) -> Foliation:
    """Lifts of the vertical segments of the rectangle: radial rays ``(s e^{i theta}, t)``.

    Parameterized by ``u in [0, 1]`` with ``s = sqrt(b) u^{3/2}`` so that line
    integrals of densities behaving like ``|z|^{-1/3}`` stay smooth.
    """
    rb = np.sqrt(b)

    def generator(t, theta):
        e = np.exp(1j * theta)

        def position(u):
            return rb * u ** 1.5 * e, np.full(np.shape(u), float(t))

        def velocity(u):
            return 1.5 * rb * np.sqrt(u) * e, np.zeros(np.shape(u))

        return HorizontalCurve(position, 0.0, 1.0, velocity)

    return Foliation(generator, ((0.0, a), (0.0, 2 * np.pi)), "vertical")


def foliation_plane_horizontal(a: float, b: float) -> Foliation:
    """Horizontal segments ``s + iy`` of the rectangle ``(0,a) x (0,b)``, indexed by ``y``."""

    def generator(y):
        return PlaneCurve(lambda s: s + 1j * y, 0.0, a, lambda s: np.ones(np.shape(s), dtype=complex))

    return Foliation(generator, ((0.0, b),), "rectangle_horizontal")


def sample_curve(c: HorizontalCurve, n: int = 101):
    """Rows ``(s, Re z, Im z, t)`` for CSV export."""
    s = np.linspace(c.s0, c.s1, n)
    z, t = c(s)
    return np.column_stack([s, z.real, z.imag, np.broadcast_to(t, s.shape)])
