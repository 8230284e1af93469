"""Heisenberg group arithmetic, the projection onto the half-plane and its chart.

Points are ``(z, t)`` with ``z`` complex and ``t`` real, multiplied by

    (z, t) * (z', t') = (z + z', t + t' + 2 Im(z conj(z'))).

The scalar API works on the frozen dataclasses below; the ``*_arr`` helpers
take numpy arrays of ``z`` and ``t`` and are what the numerics modules use.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import AxisPoint

TWO_PI = 2.0 * math.pi


def _finite(*values) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class HPoint:
    z: complex
    t: float

    def __post_init__(self):
        z = complex(self.z)
        t = float(self.t)
        if not _finite(z.real, z.imag, t):
            raise ValueError(f"non-finite Heisenberg point ({self.z}, {self.t})")
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "t", t)


@dataclass(frozen=True)
class HalfPlanePoint:
    w: complex

    def __post_init__(self):
        w = complex(self.w)
        if not _finite(w.real, w.imag):
            raise ValueError(f"non-finite half-plane point {self.w}")
        if not w.imag > 0:
            raise ValueError(f"half-plane point needs Im(w) > 0, got {w}")
        object.__setattr__(self, "w", w)


@dataclass(frozen=True)
class Tangent:
    dz: complex
    dt: float

    def __post_init__(self):
        dz = complex(self.dz)
        dt = float(self.dt)
        if not _finite(dz.real, dz.imag, dt):
            raise ValueError("non-finite tangent vector")
        object.__setattr__(self, "dz", dz)
        object.__setattr__(self, "dt", dt)


def group_mul(p: HPoint, q: HPoint) -> HPoint:
    return HPoint(p.z + q.z, p.t + q.t + 2.0 * (p.z * q.z.conjugate()).imag)


def group_inv(p: HPoint) -> HPoint:
    return HPoint(-p.z, -p.t)


def heis_norm(p: HPoint) -> float:
    r2 = abs(p.z) ** 2
    return math.hypot(r2, p.t) ** 0.5


def heis_dist(p: HPoint, q: HPoint) -> float:
    """Left-invariant gauge distance ``||p^-1 * q||``."""
    return heis_norm(group_mul(group_inv(p), q))


def project_pi(p: HPoint) -> HalfPlanePoint:
    if p.z == 0:
        raise AxisPoint(f"projection undefined on the vertical axis at t={p.t}")
    return HalfPlanePoint(complex(p.t, abs(p.z) ** 2))


def chart_to_heis(theta: float, w: HalfPlanePoint) -> HPoint:
    return HPoint(math.sqrt(w.w.imag) * cmath.exp(1j * theta), w.w.real)


def chart_from_heis(p: HPoint) -> tuple[float, HalfPlanePoint]:
    """Inverse chart: angle in ``[0, 2pi)`` and the projected point."""
    w = project_pi(p)
    theta = math.atan2(p.z.imag, p.z.real) % TWO_PI
    # tiny negative angles round up to 2pi itself
    return (0.0 if theta == TWO_PI else theta), w


def contact_eval(p: HPoint, v: Tangent) -> float:
    """The contact form ``dt - i conj(z) dz + i z conj(dz)`` applied to ``v`` at ``p``."""
    return v.dt + 2.0 * (p.z.conjugate() * v.dz).imag


# -- array versions ---------------------------------------------------------

def group_mul_arr(z1, t1, z2, t2):
    z1, z2 = np.asarray(z1, dtype=complex), np.asarray(z2, dtype=complex)
    return z1 + z2, np.asarray(t1) + np.asarray(t2) + 2.0 * np.imag(z1 * np.conj(z2))


def heis_norm_arr(z, t):
    return np.sqrt(np.hypot(np.abs(z) ** 2, t))


def project_pi_arr(z, t):
    """``t + i|z|^2`` elementwise; axis points give a zero imaginary part."""
    return np.asarray(t, dtype=float) + 1j * np.abs(z) ** 2


def chart_to_heis_arr(theta, w):
    w = np.asarray(w, dtype=complex)
    return np.sqrt(w.imag) * np.exp(1j * np.asarray(theta)), w.real


def contact_eval_arr(z, dz, dt):
    return np.asarray(dt) + 2.0 * np.imag(np.conj(z) * dz)
