"""Domain descriptors and densities.

Heisenberg domains know how to build a tensor quadrature for ``dL^3`` and how
to test membership; plane domains do the same for ``dL^2``. Membership tests
are for the closure with a small slack, since curves run along boundaries.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ChartInversion, UnsupportedDomain
from .heis_core import heis_norm_arr
from .quadrature import periodic_rule, simpson_rule, tensor

TOL_IN = 1e-9
TWO_PI = 2 * np.pi


def _as_grid(grid, dims):
    if np.isscalar(grid):
        return (int(grid),) * dims
    grid = tuple(int(g) for g in grid)
    if len(grid) != dims:
        raise ValueError(f"expected a grid of {dims} sizes, got {grid}")
    return grid


def _radial_rule(r_lo, r_hi, n, power):
    """Simpson in ``u`` with ``r = r_lo + (r_hi - r_lo) u^power``; weights include ``dr/du``."""
    u, wu = simpson_rule(0.0, 1.0, n)
    span = r_hi - r_lo
    r = r_lo + span * u ** power
    with np.errstate(divide="ignore", invalid="ignore"):
        jac = span * power * u ** (power - 1.0)
    jac[~np.isfinite(jac)] = 0.0
    return r, wu * jac


class HeisenbergDomain:
    kind = "heisenberg"

    def contains(self, z, t, tol=TOL_IN):
        raise NotImplementedError

    def heis_rule(self, grid, radial_power=1.0):
        raise UnsupportedDomain(f"{type(self).__name__} has no volume parameterization")

    def contains_plane(self, w, tol=TOL_IN):
        raise UnsupportedDomain("not a plane domain")


class PlaneDomain:
    kind = "plane"

    def contains(self, z, t, tol=TOL_IN):
        raise UnsupportedDomain("not a Heisenberg domain")

    def heis_rule(self, grid, radial_power=1.0):
        raise UnsupportedDomain("plane domains have no Heisenberg volume")


@dataclass(frozen=True)
class Cylinder(HeisenbergDomain):
    """``{0 < t < a, |z| < sqrt(b)}``."""

    a: float
    b: float

    def __post_init__(self):
        if not (self.a > 0 and self.b > 0):
            raise ValueError("cylinder dimensions must be positive")

    def contains(self, z, t, tol=TOL_IN):
        t = np.asarray(t)
        return (t >= -tol) & (t <= self.a + tol) & (np.abs(z) ** 2 <= self.b * (1 + tol))

    def heis_rule(self, grid, radial_power=1.0):
        n_r, n_th, n_t = _as_grid(grid, 3)
        (r, th, t), w = tensor(_radial_rule(0.0, np.sqrt(self.b), n_r, radial_power),
                               periodic_rule(0.0, TWO_PI, n_th),
                               simpson_rule(0.0, self.a, n_t))
        return r * np.exp(1j * th), t, w * r

    @property
    def diameter(self):
        return float(np.hypot(self.a, 2 * np.sqrt(self.b)))


@dataclass(frozen=True)
class CylinderShell(HeisenbergDomain):
    """``{0 < t < a, b_lo < |z|^2 < b_hi}``."""

    a: float
    b_lo: float
    b_hi: float

    def __post_init__(self):
        if not (self.a > 0 and 0 <= self.b_lo < self.b_hi):
            raise ValueError("shell needs a > 0 and 0 <= b_lo < b_hi")

    def contains(self, z, t, tol=TOL_IN):
        t = np.asarray(t)
        r2 = np.abs(z) ** 2
        return ((t >= -tol) & (t <= self.a + tol)
                & (r2 >= self.b_lo * (1 - tol) - tol) & (r2 <= self.b_hi * (1 + tol)))

    def heis_rule(self, grid, radial_power=1.0):
        n_r, n_th, n_t = _as_grid(grid, 3)
        (r, th, t), w = tensor(_radial_rule(np.sqrt(self.b_lo), np.sqrt(self.b_hi), n_r, radial_power),
                               periodic_rule(0.0, TWO_PI, n_th),
                               simpson_rule(0.0, self.a, n_t))
        return r * np.exp(1j * th), t, w * r

    @property
    def diameter(self):
        return float(np.hypot(self.a, 2 * np.sqrt(self.b_hi)))


@dataclass(frozen=True)
class SphericalAnnulus(HeisenbergDomain):
    """``{r_lo < ||p|| < r_hi}`` for the Heisenberg norm."""

    r_lo: float
    r_hi: float

    def __post_init__(self):
        if not (0 < self.r_lo < self.r_hi):
            raise ValueError("annulus needs 0 < r_lo < r_hi")

    def contains(self, z, t, tol=TOL_IN):
        n = heis_norm_arr(z, t)
        return (n >= self.r_lo * (1 - tol)) & (n <= self.r_hi * (1 + tol))

    def heis_rule(self, grid, radial_power=1.0):
        # t + i|z|^2 = e^{s + ix}: dL^3 = (1/2) e^{2s} ds dx dalpha
        n_s, n_al, n_x = _as_grid(grid, 3)
        (s, al, x), w = tensor(simpson_rule(2 * np.log(self.r_lo), 2 * np.log(self.r_hi), n_s),
                               periodic_rule(0.0, TWO_PI, n_al),
                               simpson_rule(0.0, np.pi, n_x))
        es = np.exp(s)
        z = np.sqrt(es * np.sin(x)) * np.exp(1j * al)
        return z, es * np.cos(x), 0.5 * w * es ** 2

    @property
    def diameter(self):
        return 2.0 * self.r_hi


@dataclass(frozen=True)
class ChartImage(HeisenbergDomain):
    """Lift ``Psi(S^1 x phi(R_{a,b}))`` of the image of a rectangle under a biholomorphism."""

    phi: object
    a: float
    b: float

    def contains(self, z, t, tol=TOL_IN):
        w = np.asarray(t, dtype=float) + 1j * np.abs(z) ** 2
        try:
            zeta = self.phi.inverse(w, self.a, self.b)
        except ChartInversion:
            return np.zeros(np.shape(w), dtype=bool)
        slack = tol * max(self.a, self.b, 1.0)
        return ((zeta.real >= -slack) & (zeta.real <= self.a + slack)
                & (zeta.imag >= -slack) & (zeta.imag <= self.b + slack))

    def heis_rule(self, grid, radial_power=1.0):
        n_s, n_al, n_x = _as_grid(grid, 3)
        (s, al, x), w = tensor(simpson_rule(0.0, self.a, n_s),
                               periodic_rule(0.0, TWO_PI, n_al),
                               simpson_rule(0.0, self.b, n_x))
        zeta = s + 1j * x
        img = self.phi.eval(zeta)
        z = np.sqrt(np.maximum(img.imag, 0.0)) * np.exp(1j * al)
        return z, img.real, 0.5 * w * np.abs(self.phi.deriv(zeta)) ** 2

    @property
    def diameter(self):
        s, x = np.meshgrid(np.linspace(0, self.a, 9), np.linspace(0, self.b, 9))
        img = self.phi.eval(s + 1j * x)
        return float(np.ptp(img.real) + 2 * np.sqrt(np.max(img.imag)))


@dataclass(frozen=True)
class PlaneRectangle(PlaneDomain):
    a: float
    b: float

    def contains_plane(self, w, tol=TOL_IN):
        w = np.asarray(w, dtype=complex)
        return ((w.real >= -tol) & (w.real <= self.a + tol)
                & (w.imag >= -tol) & (w.imag <= self.b + tol))

    def plane_rule(self, grid):
        n_x, n_y = _as_grid(grid, 2)
        (x, y), w = tensor(simpson_rule(0.0, self.a, n_x), simpson_rule(0.0, self.b, n_y))
        return x + 1j * y, w


@dataclass(frozen=True)
class PlaneImage(PlaneDomain):
    phi: object
    a: float
    b: float

    def contains_plane(self, w, tol=TOL_IN):
        try:
            zeta = self.phi.inverse(np.asarray(w, dtype=complex), self.a, self.b)
        except ChartInversion:
            return np.zeros(np.shape(w), dtype=bool)
        return ((zeta.real >= -tol) & (zeta.real <= self.a + tol)
                & (zeta.imag >= -tol) & (zeta.imag <= self.b + tol))

    def plane_rule(self, grid):
        n_x, n_y = _as_grid(grid, 2)
        (x, y), w = tensor(simpson_rule(0.0, self.a, n_x), simpson_rule(0.0, self.b, n_y))
        zeta = x + 1j * y
        return self.phi.eval(zeta), w * np.abs(self.phi.deriv(zeta)) ** 2


@dataclass(frozen=True)
class Density:
    """Nonnegative scalar field on a domain.

    ``eval`` is vectorized: ``eval(z, t)`` for Heisenberg densities and
    ``eval(w)`` for plane ones. ``radial_power`` selects the substitution
    ``r ~ u^power`` used by cylindrical quadrature (1.5 removes an
    ``|z|^{-1/3}`` singularity).
    """

    eval: Callable
    domain: object
    kind: str = "heisenberg"
    name: str = ""
    radial_power: float = 1.0
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("heisenberg", "plane"):
            raise ValueError(f"unknown density kind {self.kind!r}")

    def __call__(self, *args):
        return self.eval(*args)

    def scaled(self, c: float) -> "Density":
        f = self.eval
        return Density(lambda *a: c * f(*a), self.domain, self.kind, f"{c}*{self.name}",
                       self.radial_power, dict(self.meta))
