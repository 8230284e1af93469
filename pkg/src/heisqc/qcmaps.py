"""Quasiconformal maps on the Heisenberg group and their horizontal derivatives.

A map is ``f = (f1, f2)`` with ``f1`` complex and ``f2`` real. Its distortion is
read off the horizontal derivatives

    Z f1    = d_z f1    + i conj(z) d_t f1
    Zbar f1 = d_zbar f1 - i z       d_t f1

which are supplied in closed form or computed by central differences.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .domains import Cylinder, SphericalAnnulus
from .errors import BadModuli, BadProfile, BoundaryTooClose, DegenerateDerivative
from .heis_core import HPoint, contact_eval_arr

EPS_DERIV = 1e-12
FD_REL_STEP = 1e-5


@dataclass(frozen=True)
class QCMap:
    f1: Callable
    f2: Callable
    source: object = None
    target: object = None
    zf1: Optional[Callable] = None
    zbarf1: Optional[Callable] = None
    name: str = "custom"
    h_fd: Optional[float] = None

    @property
    def deriv_mode(self) -> str:
        return "analytic" if self.zf1 is not None and self.zbarf1 is not None else "numeric"

    @property
    def step(self) -> float:
        if self.h_fd is not None:
            return self.h_fd
        diam = getattr(self.source, "diameter", 1.0)
        return FD_REL_STEP * max(float(diam), 1e-3)

    def __call__(self, z, t):
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        return self.f1(z, t), self.f2(z, t)

    def derivatives(self, z, t, mode: Optional[str] = None):
        """``(Z f1, Zbar f1)`` at arrays of points; ``mode`` forces analytic or numeric."""
        z = np.asarray(z, dtype=complex)
        t = np.asarray(t, dtype=float)
        mode = mode or self.deriv_mode
        if mode == "analytic":
            return self.zf1(z, t), self.zbarf1(z, t)
        h = self.step
        dx = (self.f1(z + h, t) - self.f1(z - h, t)) / (2 * h)
        dy = (self.f1(z + 1j * h, t) - self.f1(z - 1j * h, t)) / (2 * h)
        dt = (self.f1(z, t + h) - self.f1(z, t - h)) / (2 * h)
        d_z = 0.5 * (dx - 1j * dy)
        d_zbar = 0.5 * (dx + 1j * dy)
        return d_z + 1j * np.conj(z) * dt, d_zbar - 1j * z * dt

    def pushforward_differential(self, z, t, dz, dt):
        """Central-difference image of the tangent ``(dz, dt)``."""
        h = self.step
        f1p, f2p = self(z + h * dz, t + h * dt)
        f1m, f2m = self(z - h * dz, t - h * dt)
        return (f1p - f1m) / (2 * h), (f2p - f2m) / (2 * h)


@dataclass(frozen=True)
class PlaneMap:
    """Map of the half-plane with optional Wirtinger derivatives ``d_w g`` and ``d_wbar g``."""

    g: Callable
    dg: Optional[Callable] = None
    dgbar: Optional[Callable] = None
    name: str = "custom"
    h_fd: float = 1e-6

    def __call__(self, w):
        return self.g(np.asarray(w, dtype=complex))

    def wirtinger(self, w):
        w = np.asarray(w, dtype=complex)
        if self.dg is not None and self.dgbar is not None:
            return self.dg(w), self.dgbar(w)
        h = self.h_fd
        dx = (self.g(w + h) - self.g(w - h)) / (2 * h)
        dy = (self.g(w + 1j * h) - self.g(w - 1j * h)) / (2 * h)
        return 0.5 * (dx - 1j * dy), 0.5 * (dx + 1j * dy)

    def distortion(self, w):
        d, db = self.wirtinger(w)
        return (np.abs(d) + np.abs(db)) / (np.abs(d) - np.abs(db))

    def invert(self, target, seed, tol=1e-13, max_iter=50):
        """Newton solve of ``g(w) = target`` starting from ``seed``."""
        target = np.asarray(target, dtype=complex)
        w = np.array(np.broadcast_to(seed, target.shape), dtype=complex)
        for _ in range(max_iter):
            r = self.g(w) - target
            if np.all(np.abs(r) <= tol * np.maximum(1.0, np.abs(target))):
                break
            d, db = self.wirtinger(w)
            # g(w + p + iq) ~ g + (d + db) p + i (d - db) q
            c1, c2 = d + db, 1j * (d - db)
            det = c1.real * c2.imag - c2.real * c1.imag
            p = (-r.real * c2.imag + r.imag * c2.real) / det
            q = (-c1.real * r.imag + c1.imag * r.real) / det
            w = w + p + 1j * q
        return w


def _point_arrays(p: HPoint):
    return np.asarray(p.z, dtype=complex), np.asarray(p.t, dtype=float)


def _check_interior(f: QCMap, p: HPoint):
    if f.source is None or f.deriv_mode == "analytic":
        return
    h2 = 2 * f.step
    z, t = p.z, p.t
    zs = np.array([z + h2, z - h2, z + 1j * h2, z - 1j * h2, z, z])
    ts = np.array([t, t, t, t, t + h2, t - h2])
    if not np.all(f.source.contains(zs, ts, tol=0.0)):
        raise BoundaryTooClose(f"point {p} is within 2*h_fd of the boundary of {f.name}")


def horizontal_derivatives(f: QCMap, p: HPoint) -> tuple[complex, complex]:
    _check_interior(f, p)
    zf, zbf = f.derivatives(*_point_arrays(p))
    return complex(zf), complex(zbf)


def beltrami(f: QCMap, p: HPoint) -> complex:
    zf, zbf = horizontal_derivatives(f, p)
    if abs(zf) <= EPS_DERIV:
        raise DegenerateDerivative(f"|Z f1| vanishes at {p}")
    return zbf / zf


def distortion_arr(f: QCMap, z, t, mode: Optional[str] = None):
    zf, zbf = f.derivatives(z, t, mode)
    a, b = np.abs(zf), np.abs(zbf)
    return (a + b) / (a - b)


def distortion_K(f: QCMap, p: HPoint) -> float:
    zf, zbf = horizontal_derivatives(f, p)
    a, b = abs(zf), abs(zbf)
    if a - b <= EPS_DERIV:
        raise DegenerateDerivative(f"|Z f1| - |Zbar f1| = {a - b:.3g} at {p}")
    return (a + b) / (a - b)


def contact_residual_arr(f: QCMap, z, t):
    """Contact defect at arrays of points (see ``contact_residual``)."""
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    worst = np.zeros(np.shape(z))
    for dz in (1.0 + 0j, 1j):
        dt = -2.0 * np.imag(np.conj(z) * dz)
        dz_arr = np.full(np.shape(z), dz)
        g1, g2 = f.pushforward_differential(z, t, dz_arr, dt)
        img1, _ = f(z, t)
        omega = np.abs(contact_eval_arr(img1, g1, g2))
        norm = np.sqrt(np.abs(g1) ** 2 + g2 ** 2)
        worst = np.maximum(worst, omega / np.maximum(norm, EPS_DERIV))
    return worst


def contact_residual(f: QCMap, p: HPoint) -> float:
    """Push the horizontal tangents ``dz = 1`` and ``dz = i`` through ``df`` and evaluate
    the contact form at ``f(p)``, normalized by the length of the image vector."""
    _check_interior(f, p)
    return float(contact_residual_arr(f, *_point_arrays(p)))


def integrate_heis(func, domain, grid, radial_power=1.0) -> float:
    """``int func dL^3`` with the domain's tensor rule; zero-weight nodes are skipped."""
    z, t, w = domain.heis_rule(grid, radial_power)
    keep = w != 0
    vals = func(z[keep], t[keep])
    return float(np.sum(vals * w[keep]))


def mean_distortion(f: QCMap, rho, grid=(64, 64, 64), mode: Optional[str] = None) -> float:
    """``int K(p, f)^2 rho(p)^4 dL^3`` over the source of ``f``."""
    domain = f.source if f.source is not None else rho.domain
    return integrate_heis(lambda z, t: distortion_arr(f, z, t, mode) ** 2 * rho.eval(z, t) ** 4,
                          domain, grid, rho.radial_power)


def identity_map(source=None) -> QCMap:
    return QCMap(lambda z, t: z + 0j, lambda z, t: t + 0.0, source, source,
                 lambda z, t: np.ones(np.shape(z), dtype=complex),
                 lambda z, t: np.zeros(np.shape(z), dtype=complex), "identity")


def rotation_map(alpha: float, source=None) -> QCMap:
    e = np.exp(1j * alpha)
    return QCMap(lambda z, t: e * z, lambda z, t: t + 0.0, source, source,
                 lambda z, t: np.full(np.shape(z), e),
                 lambda z, t: np.zeros(np.shape(z), dtype=complex), f"rotation({alpha})")


def cylinder_extremal_map(a: float, b: float, ap: float, bp: float, alpha: float = 0.0) -> QCMap:
    """Closed-form minimizer between the cylinders ``C_{a,b}`` and ``C_{ap,bp}``.

    Requires ``a*bp / (ap*b) > 1``; otherwise BadModuli.
    """
    if min(a, b, ap, bp) <= 0:
        raise BadModuli("cylinder dimensions must be positive")
    ratio = a * bp / (ap * b)
    if not ratio > 1:
        raise BadModuli(f"a*b'/(a'*b) = {ratio:.6g} must exceed 1")
    A = 1.0 - ratio
    B = a * bp / ap
    beta = (1.0 - 1.0 / ratio) / (2.0 * b)
    c = np.sqrt(bp) * np.exp(1j * alpha)

    def f1(z, t):
        u = np.abs(z) ** 2
        return c * z * np.exp(1j * beta * t) / np.sqrt(A * u + B)

    def f2(z, t):
        return (ap / a) * np.asarray(t, dtype=float)

    def zf1(z, t):
        u = np.abs(z) ** 2
        q = A * u + B
        return c * np.exp(1j * beta * t) * q ** -1.5 * ((0.5 * A * u + B) - beta * u * q)

    def zbarf1(z, t):
        u = np.abs(z) ** 2
        q = A * u + B
        return c * np.exp(1j * beta * t) * z * z * q ** -1.5 * (beta * q - 0.5 * A)

    return QCMap(f1, f2, Cylinder(a, b), Cylinder(ap, bp), zf1, zbarf1,
                 f"cylinder({a},{b},{ap},{bp},{alpha})")


def cylinder_distortion_closed_form(a, b, ap, bp, z):
    """``1 / (1 + (a'/(a b') - 1/b)|z|^2)^2``."""
    return 1.0 / (1.0 + (ap / (a * bp) - 1.0 / b) * np.abs(z) ** 2) ** 2


def spherical_annuli_map(a: float, k: float) -> QCMap:
    """Extremal map from ``{1 < ||p|| < a}`` onto ``{1 < ||p|| < a^k}``.

    The half power is the principal branch; on the axis the map is
    ``(0, t) -> (0, t |t|^{k-1})``.
    """
    if not a > 1:
        raise BadModuli("annulus needs a > 1")
    if not 0 < k < 1:
        raise BadModuli("annulus map needs 0 < k < 1")
    sk = np.sqrt(k)

    def f1(z, t):
        u = np.abs(z) ** 2
        on_axis = u == 0
        den = np.where(on_axis, 1.0, t - 1j * k * u)
        ratio = np.where(on_axis, 1.0, (t - 1j * u) / den)
        mod = np.abs(t + 1j * u)
        return np.where(on_axis, 0j, sk * z * np.sqrt(ratio) * mod ** ((k - 1) / 2))

    def f2(z, t):
        u = np.abs(z) ** 2
        mod = np.abs(t + 1j * u)
        on_axis = u == 0
        den = np.where(on_axis, 1.0, np.abs(t + 1j * k * u))
        return np.where(on_axis, t * np.abs(t) ** (k - 1), t * mod ** k / den)

    return QCMap(f1, f2, SphericalAnnulus(1.0, a), SphericalAnnulus(1.0, a ** k),
                 name=f"annuli({a},{k})")


def plane_minimizer_gphi(a, b, ap, bp, profile, dprofile=None, tol=1e-6, n_check=201) -> PlaneMap:
    """``f(x + iy) = (a'/a) x + i profile(y)`` after checking the profile's boundary values and slope.

    ``profile`` is a vectorized callable (a ``Profile`` works); the slope is
    taken from ``dprofile`` or from ``profile.slope`` or by central differences.
    """
    if dprofile is None:
        dprofile = getattr(profile, "slope", None)
    if dprofile is None:
        h = 1e-6 * b

        def dprofile(y):
            return (profile(y + h) - profile(y - h)) / (2 * h)

    y = np.linspace(0.0, b, n_check)
    if abs(float(profile(np.array(0.0)))) > tol * max(bp, 1.0):
        raise BadProfile("profile(0) must be 0")
    if abs(float(profile(np.array(float(b)))) - bp) > tol * max(bp, 1.0):
        raise BadProfile(f"profile(b) must equal b' = {bp}")
    inner = y[1:-1]
    if np.min(dprofile(inner)) < ap / a - tol:
        raise BadProfile(f"profile slope drops below a'/a = {ap / a}")
    stretch = ap / a

    def g(w):
        return stretch * w.real + 1j * profile(w.imag)

    def dg(w):
        return 0.5 * (stretch + dprofile(w.imag)) + 0j

    def dgbar(w):
        return 0.5 * (stretch - dprofile(w.imag)) + 0j

    return PlaneMap(g, dg, dgbar, "g_phi")


def sample_map(f: QCMap, z, t):
    """Rows ``(Re z, Im z, t, Re f1, Im f1, f2, K)`` for CSV export."""
    f1, f2 = f(z, t)
    k = distortion_arr(f, z, t)
    return np.column_stack([np.real(z), np.imag(z), t, f1.real, f1.imag, f2, k])
