"""Energies, admissibility and closed-form moduli of curve families.

The modulus of a family is the infimum of ``int rho^4 dL^3`` over admissible
densities (``int_gamma rho >= 1`` for every curve). Nothing here infimizes:
energies and admissibility are evaluated for given densities, and the known
extremal densities serve as references.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass

import numpy as np

from .curves import curve_density_integral
from .domains import Cylinder, Density, PlaneRectangle, SphericalAnnulus
from .errors import AxisPoint, DegenerateDerivative, UnknownFamily, UnsupportedDomain
from .heis_core import HPoint
from .qcmaps import EPS_DERIV, QCMap, PlaneMap, integrate_heis

TOL_ADM = 1e-6


def density_energy_heis(rho: Density, grid=(64, 64, 64)) -> float:
    """``int rho^4 dL^3`` by the domain's tensor Simpson rule."""
    if rho.kind != "heisenberg":
        raise UnsupportedDomain("density_energy_heis needs a Heisenberg density")
    return integrate_heis(lambda z, t: rho.eval(z, t) ** 4, rho.domain, grid, rho.radial_power)


def density_energy_plane(rho: Density, grid=(64, 64)) -> float:
    """``int rho^2 dL^2`` by tensor Simpson."""
    if rho.kind != "plane":
        raise UnsupportedDomain("density_energy_plane needs a plane density")
    plane_rule = getattr(rho.domain, "plane_rule", None)
    if plane_rule is None:
        raise UnsupportedDomain(f"{type(rho.domain).__name__} has no area parameterization")
    w, weights = plane_rule(grid)
    return float(np.sum(np.asarray(rho.eval(w)) ** 2 * weights))


def density_energy(rho: Density, grid=None) -> float:
    if rho.kind == "plane":
        return density_energy_plane(rho, grid or (64, 64))
    return density_energy_heis(rho, grid or (64, 64, 64))


@dataclass(frozen=True)
class ModulusReport:
    energy: float
    min_curve_integral: float
    argmin: tuple
    admissible: bool

    def to_dict(self) -> dict:
        d = asdict(self)
        d["argmin"] = [float(v) for v in self.argmin]
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict())


def curve_integrals(rho: Density, fam, n_lambda=16, n_s: int = 256):
    """Parameter grid of ``fam`` and the line integral of ``rho`` along each curve."""
    params = fam.parameter_grid(n_lambda)
    vals = np.array([curve_density_integral(rho, fam(*lam), n_s) for lam in params])
    return params, vals


def admissibility_min(rho: Density, fam, n_lambda=16, n_s: int = 256,
                      tol_adm: float = TOL_ADM, energy_grid=None) -> ModulusReport:
    """Smallest line integral of ``rho`` over a parameter grid of the family.

    ``energy_grid=False`` skips the energy integral (reported as NaN).
    """
    params, vals = curve_integrals(rho, fam, n_lambda, n_s)
    k = int(np.argmin(vals))
    energy = float("nan") if energy_grid is False else density_energy(rho, energy_grid)
    m = float(vals[k])
    return ModulusReport(energy, m, tuple(params[k]), bool(m >= 1 - tol_adm))


def _cylinder_horizontal(a, b):
    rho = Density(lambda z, t: 2 * np.abs(z) / a, Cylinder(a, b), name="cylinder_horizontal",
                  meta={"a": a, "b": b})
    return 16 * np.pi * b ** 3 / (3 * a ** 3), rho


def _rectangle_horizontal(a, b):
    rho = Density(lambda w: np.full(np.shape(w), 1.0 / a), PlaneRectangle(a, b), kind="plane",
                  name="rectangle_horizontal", meta={"a": a, "b": b})
    return b / a, rho


def _cylinder_vertical(a, b):
    c = 2.0 / (3.0 * b ** (1.0 / 3.0))

    def ev(z, t):
        with np.errstate(divide="ignore"):
            return c * np.abs(z) ** (-1.0 / 3.0)

    # r = u^3 turns r^{-4/3} r dr into 3u du, smooth and zero on the axis
    rho = Density(ev, Cylinder(a, b), name="cylinder_vertical", radial_power=3.0,
                  meta={"a": a, "b": b})
    return 16 * np.pi * a / (27 * b), rho


def _annulus_radial(a):
    la = np.log(a)

    def ev(z, t):
        r2 = np.abs(z) ** 2
        return np.abs(z) / (la * np.hypot(t, r2))

    rho = Density(ev, SphericalAnnulus(1.0, a), name="annulus_radial", meta={"a": a})
    return np.pi ** 2 / la ** 3, rho


_FAMILIES = {
    "cylinder_horizontal": (_cylinder_horizontal, ("a", "b")),
    "rectangle_horizontal": (_rectangle_horizontal, ("a", "b")),
    "cylinder_vertical": (_cylinder_vertical, ("a", "b")),
    "annulus_radial": (_annulus_radial, ("a",)),
}

FAMILY_IDS = tuple(_FAMILIES)


def closed_form_modulus(family_id: str, params) -> tuple[float, Density]:
    """Known modulus and extremal density.

    ``params`` is a dict keyed by the family's parameter names or a sequence in
    that order: ``(a, b)`` for cylinder and rectangle families, ``(a,)`` with
    ``a > 1`` for the spherical annulus ``{1 < ||p|| < a}``.
    """
    if family_id not in _FAMILIES:
        raise UnknownFamily(f"unknown family {family_id!r}; known: {', '.join(FAMILY_IDS)}")
    build, names = _FAMILIES[family_id]
    if isinstance(params, dict):
        missing = [n for n in names if n not in params]
        if missing:
            raise ValueError(f"{family_id} needs parameters {names}, missing {missing}")
        args = [float(params[n]) for n in names]
    else:
        args = [float(v) for v in np.atleast_1d(params)]
        if len(args) != len(names):
            raise ValueError(f"{family_id} takes {len(names)} parameter(s) {names}")
    if family_id == "annulus_radial":
        if not args[0] > 1:
            raise ValueError("annulus_radial needs a > 1")
    elif min(args) <= 0:
        raise ValueError("dimensions must be positive")
    modulus, rho = build(*args)
    return float(modulus), rho


def pull_back_density(rho: Density, phi_domain=None, strict: bool = False) -> Density:
    """``(z, t) -> 2|z| rho(t + i|z|^2)`` on ``phi_domain``.

    With ``strict`` the evaluator raises AxisPoint on ``z = 0``, where the
    projection is singular; otherwise the axis gets the value ``0``.
    """
    if rho.kind != "plane":
        raise UnsupportedDomain("pull_back_density needs a plane density")
    plane = rho.eval

    def ev(z, t):
        z = np.asarray(z, dtype=complex)
        if strict and np.any(z == 0):
            raise AxisPoint("pull-back density is undefined on the axis z = 0")
        r = np.abs(z)
        return 2 * r * plane(np.asarray(t, dtype=float) + 1j * r ** 2)

    return Density(ev, phi_domain, "heisenberg", f"pullback[{rho.name}]", meta=dict(rho.meta))


def push_forward_at_image(rho: Density, f: QCMap, p: HPoint, eps_deriv: float = EPS_DERIV):
    """``(f(p), rho(p) / (|Z f1(p)| - |Zbar f1(p)|))``: the push-forward at the image point."""
    z, t = np.asarray(p.z, dtype=complex), np.asarray(p.t, dtype=float)
    zf, zbf = f.derivatives(z, t)
    gap = float(np.abs(zf) - np.abs(zbf))
    if gap <= eps_deriv:
        raise DegenerateDerivative(f"|Z f1| - |Zbar f1| = {gap:.3g} at {p}")
    f1, f2 = f(z, t)
    return HPoint(complex(f1), float(f2)), float(rho.eval(z, t)) / gap


def push_forward_arr(rho: Density, f: QCMap, z, t, eps_deriv: float = EPS_DERIV):
    """Array version of ``push_forward_at_image``; returns ``(f1, f2, value)``."""
    zf, zbf = f.derivatives(z, t)
    gap = np.abs(zf) - np.abs(zbf)
    if np.any(gap <= eps_deriv):
        raise DegenerateDerivative("|Z f1| - |Zbar f1| vanishes at some sample")
    f1, f2 = f(z, t)
    return f1, f2, rho.eval(z, t) / gap


def pushforward_energy(rho: Density, f: QCMap, grid=(64, 64, 64)) -> float:
    """``int_{f(Omega)} (f_* rho)^4 dL^3`` transported to the source with the
    Jacobian ``(|Z f1|^2 - |Zbar f1|^2)^2``."""

    def integrand(z, t):
        zf, zbf = f.derivatives(z, t)
        a, b = np.abs(zf), np.abs(zbf)
        return (rho.eval(z, t) / (a - b)) ** 4 * (a * a - b * b) ** 2

    domain = f.source if f.source is not None else rho.domain
    return integrate_heis(integrand, domain, grid, rho.radial_power)


def commutation_residual(rho: Density, g: PlaneMap, f: QCMap, z, t) -> float:
    """Relative mismatch of ``Pi^*(g_* rho)`` and ``f_*(Pi^* rho)`` at the images ``q = f(p)``.

    The left side is evaluated at ``q`` itself: ``w = g^{-1}(Pi(q))`` is found
    by Newton from ``Pi(p)``, then ``2|q_z| rho(w) / (|d g(w)| - |dbar g(w)|)``.
    The right side is ``2|z| rho(Pi(p)) / (|Z f1(p)| - |Zbar f1(p)|)``. Both agree
    when ``Pi o f = g o Pi``.
    """
    z = np.asarray(z, dtype=complex)
    t = np.asarray(t, dtype=float)
    w_src = t + 1j * np.abs(z) ** 2
    f1, f2, right = push_forward_arr(pull_back_density(rho), f, z, t)
    w_img = f2 + 1j * np.abs(f1) ** 2
    w = g.invert(w_img, w_src)
    d, db = g.wirtinger(w)
    gap = np.abs(d) - np.abs(db)
    if np.any(gap <= EPS_DERIV):
        raise DegenerateDerivative("plane map is degenerate at some sample")
    left = 2 * np.abs(f1) * rho.eval(w) / gap
    scale = np.maximum(np.maximum(np.abs(left), np.abs(right)), EPS_DERIV)
    return float(np.max(np.abs(left - right) / scale))


def dilation(f: QCMap, lam: float) -> QCMap:
    """``f`` followed by the Heisenberg dilation ``(z, t) -> (lam z, lam^2 t)``."""
    zf = None if f.zf1 is None else (lambda z, t: lam * f.zf1(z, t))
    zbf = None if f.zbarf1 is None else (lambda z, t: lam * f.zbarf1(z, t))
    return QCMap(lambda z, t: lam * f.f1(z, t), lambda z, t: lam ** 2 * f.f2(z, t),
                 f.source, None, zf, zbf, f"dil[{lam}]({f.name})", f.h_fd)
