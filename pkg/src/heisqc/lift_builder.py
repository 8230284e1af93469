"""Lifting half-plane minimizers to contact maps of the Heisenberg group.

Given biholomorphisms ``phi: R_{a,b} -> Omega`` and ``psi: R_{a',b'} -> Omega'``,
a lift of ``g = psi o f_varphi o phi^{-1}`` with ``f_varphi(s + ix) = (a'/a) s + i varphi(x)``
exists when the boundary profile ``varphi`` solves

    varphi'(x) = (a/a') |phi'|^2 Im(psi)^2 / (Im(phi)^2 |psi'|^2)

with ``phi`` evaluated at ``s0 + ix`` and ``psi`` at ``s0' + i varphi(x)``, plus
``varphi(0) = 0``, ``varphi(b) = b'`` and ``varphi' >= a'/a``. The angular part of
the lift is ``theta + h(s, x)`` where ``h`` integrates a curl-free field.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicHermiteSpline, RectBivariateSpline
from scipy.special import lambertw

from .domains import ChartImage
from .errors import NoSolution, NonUnique, PathInconsistent
from .holomorphic import Biholomorphism, builtin_biholomorphism
from .qcmaps import QCMap

log = logging.getLogger(__name__)

TOL_COMPAT = 1e-8
TOL_BVP = 1e-5
TOL_SLOPE = 1e-8
TOL_MIXED = 1e-5
N_ODE = 2000
N_SCAN = 65
END_REL = 1e-6

_GL_X, _GL_W = np.polynomial.legendre.leggauss(5)

__all__ = [
    "Biholomorphism", "builtin_biholomorphism", "LiftProblem", "OdeOptions", "Profile",
    "ThetaPotential", "compatibility_check", "profile_ode_solve", "theta_potential_build",
    "assemble_lift", "verify_commutation", "shoot", "solve_lift",
]


@dataclass(frozen=True)
class OdeOptions:
    n_steps: int = N_ODE
    tol_bvp: float = TOL_BVP
    tol_slope: float = TOL_SLOPE
    n_scan: int = N_SCAN
    end_rel: float = END_REL


@dataclass(frozen=True)
class LiftProblem:
    a: float
    b: float
    a_p: float
    b_p: float
    phi: Biholomorphism
    psi: Biholomorphism
    ode: OdeOptions = field(default_factory=OdeOptions)

    def __post_init__(self):
        if min(self.a, self.b, self.a_p, self.b_p) <= 0:
            raise ValueError("rectangle dimensions must be positive")

    @property
    def stretch(self) -> float:
        return self.a_p / self.a

    @classmethod
    def from_dict(cls, cfg: dict) -> "LiftProblem":
        def biholo(entry):
            if isinstance(entry, str):
                return builtin_biholomorphism(entry)
            return builtin_biholomorphism(entry["name"], entry.get("params"))

        ode = OdeOptions(**cfg.get("ode", {}))
        return cls(float(cfg["a"]), float(cfg["b"]), float(cfg["a_p"]), float(cfg["b_p"]),
                   biholo(cfg["phi"]), biholo(cfg["psi"]), ode)

    @classmethod
    def from_json(cls, path) -> "LiftProblem":
        with open(path) as fh:
            return cls.from_dict(json.load(fh))

    def rhs_x(self, x):
        """The ``phi`` factor ``(a/a') |phi'|^2 / Im(phi)^2`` at ``a/2 + ix``."""
        wp = 0.5 * self.a + 1j * np.asarray(x)
        return (self.a / self.a_p) * np.abs(self.phi.deriv(wp)) ** 2 / self.phi.eval(wp).imag ** 2

    def rhs_v(self, v):
        """The ``psi`` factor ``Im(psi)^2 / |psi'|^2`` at ``a'/2 + iv``."""
        wq = 0.5 * self.a_p + 1j * np.asarray(v)
        return self.psi.eval(wq).imag ** 2 / np.abs(self.psi.deriv(wq)) ** 2

    def rhs(self, x, v):
        """Right side of the profile ODE."""
        return self.rhs_x(x) * self.rhs_v(v)


def compatibility_check(phi: Biholomorphism, a: float, b: float, grid=(33, 33),
                        tol: float = TOL_COMPAT) -> tuple[bool, float]:
    """Does ``|phi'| / Im(phi)`` depend on ``x`` only?

    Returns the flag and ``max_x (max_s q - min_s q) / mean_s q`` over interior samples.
    """
    n_s, n_x = grid
    s = a * (np.arange(n_s) + 0.5) / n_s
    x = b * (np.arange(n_x) + 0.5) / n_x
    S, X = np.meshgrid(s, x)
    w = S + 1j * X
    q = np.abs(phi.deriv(w)) / phi.eval(w).imag
    variation = float(np.max((q.max(axis=1) - q.min(axis=1)) / np.abs(q.mean(axis=1))))
    return variation <= tol, variation


# -- profile ODE ------------------------------------------------------------

@dataclass
class Trajectory:
    """RK4 trajectories through ``varphi(b/2) = anchor`` for an array of anchors."""

    anchors: np.ndarray
    x: np.ndarray          # nodes, increasing, from eps to b - eps
    v: np.ndarray          # shape (n_anchor, n_nodes)
    slope: np.ndarray
    start: np.ndarray      # linear extrapolation to x = 0
    end: np.ndarray        # linear extrapolation to x = b
    blown: np.ndarray

    def margin(self, stretch):
        """``min_x varphi' - a'/a`` per anchor (``-inf`` for blown-up trajectories)."""
        m = np.min(self.slope, axis=1) - stretch
        return np.where(self.blown, -np.inf, m)


def _rk4_half(prob, anchors, x0, x_end, n):
    """RK4 on a mesh uniform in ``u = ln d + d / D`` with ``d`` the distance to
    the boundary and ``D = d0 / 4``: steps shrink like ``d`` near the end, where
    the right side may be singular, and stay bounded by a multiple of ``D``
    in the middle."""
    sgn = 1.0 if x_end < x0 else -1.0
    boundary = 0.0 if sgn > 0 else prob.b
    d0, d1 = abs(x0 - boundary), abs(x_end - boundary)
    big = 0.25 * d0
    u0, u1 = np.log(d0) + d0 / big, np.log(d1) + d1 / big
    sig = np.linspace(0.0, 1.0, 2 * n + 1)       # nodes and stage midpoints
    u = u0 + (u1 - u0) * sig
    d = big * lambertw(np.exp(u) / big).real
    d[0], d[-1] = d0, d1
    xs = boundary + sgn * d
    px = prob.rhs_x(xs) * sgn * (u1 - u0) * d * big / (d + big)   # dx/dsigma folded in
    dsig = 1.0 / n
    cap = 1e3 * (prob.b_p + 1.0)

    v = np.array(anchors, dtype=float)
    out = np.empty((v.size, n + 1))
    out[:, 0] = v
    blown = np.zeros(v.size, dtype=bool)
    with np.errstate(all="ignore"):
        for i in range(n):
            p0, pm, p1 = px[2 * i], px[2 * i + 1], px[2 * i + 2]
            k1 = p0 * prob.rhs_v(v)
            k2 = pm * prob.rhs_v(v + 0.5 * dsig * k1)
            k3 = pm * prob.rhs_v(v + 0.5 * dsig * k2)
            k4 = p1 * prob.rhs_v(v + dsig * k3)
            v = v + dsig / 6.0 * (k1 + 2 * k2 + 2 * k3 + k4)
            bad = ~np.isfinite(v) | (np.abs(v) > cap)
            if bad.any():
                blown |= bad
                v = np.where(bad, np.sign(np.nan_to_num(v, nan=1.0)) * cap, v)
            out[:, i + 1] = v
    return xs[::2], out, blown


def _half(prob, anchors, x0, x_end, n, richardson):
    xs, v, blown = _rk4_half(prob, anchors, x0, x_end, n)
    if richardson:
        _, fine, blown_f = _rk4_half(prob, anchors, x0, x_end, 2 * n)
        fine = fine[:, ::2]
        with np.errstate(all="ignore"):
            v = np.where(blown | blown_f, fine, fine + (fine - v) / 15.0)
        blown = blown | blown_f
    return xs, v, blown


def shoot(prob: LiftProblem, anchors, opts: OdeOptions | None = None,
          richardson: bool = False) -> Trajectory:
    """Integrate from the anchor ``x0 = b/2`` toward both ends.

    With ``richardson`` the RK4 solutions on the mesh and on its refinement
    are combined to cancel the leading error term.
    """
    opts = opts or prob.ode
    anchors = np.atleast_1d(np.asarray(anchors, dtype=float))
    eps = opts.end_rel * prob.b
    n_half = max(opts.n_steps // 2, 8)
    x0 = 0.5 * prob.b
    xl, vl, bl = _half(prob, anchors, x0, eps, n_half, richardson)
    xr, vr, br = _half(prob, anchors, x0, prob.b - eps, n_half, richardson)
    x = np.concatenate([xl[::-1], xr[1:]])
    v = np.concatenate([vl[:, ::-1], vr[:, 1:]], axis=1)
    with np.errstate(all="ignore"):
        slope = prob.rhs(x[None, :], v)
    blown = bl | br
    start = v[:, 0] - eps * slope[:, 0]
    end = v[:, -1] + eps * slope[:, -1]
    start = np.where(bl, np.sign(v[:, 0]) * np.inf, start)
    end = np.where(br, np.sign(v[:, -1]) * np.inf, end)
    slope = np.where(np.isfinite(slope), slope, -np.inf)
    return Trajectory(anchors, x, v, slope, start, end, blown)


@dataclass(frozen=True)
class Profile:
    """Boundary profile ``varphi`` on ``[0, b]`` with Hermite interpolation."""

    x: np.ndarray
    values: np.ndarray
    slopes: np.ndarray
    anchor: float
    b: float
    b_p: float
    stretch: float
    boundary_mismatch: float = 0.0
    slope_margin: float = 0.0
    rate: Optional[Callable] = None

    def __post_init__(self):
        object.__setattr__(self, "_spline", CubicHermiteSpline(self.x, self.values, self.slopes))

    def __call__(self, x):
        return self._spline(np.asarray(x, dtype=float))

    def slope(self, x):
        """``rate(x, varphi(x))`` for ODE profiles, else the spline derivative."""
        x = np.asarray(x, dtype=float)
        if self.rate is None:
            return self._spline(x, 1)
        # the rate is 0/0 on the ends, so within eps of them it is extended
        # linearly from the values at eps and 2 eps
        eps = END_REL * self.b
        xc = np.clip(x, eps, self.b - eps)
        inner = xc + np.sign(xc - x) * eps
        r0 = self.rate(xc, self._spline(xc))
        r1 = self.rate(inner, self._spline(inner))
        return r0 + (r0 - r1) * np.abs(x - xc) / eps

    def rows(self):
        return np.column_stack([self.x, self.values, self.slopes])


def _profile_from(prob, traj, i, mismatch):
    # end slopes extrapolated linearly and end values by the trapezoid rule,
    # so the short Hermite pieces at the ends stay consistent when evaluated
    # slightly outside [0, b]
    x = np.concatenate([[0.0], traj.x, [prob.b]])
    sl, xs, vs = traj.slope[i], traj.x, traj.v[i]
    d0 = sl[0] - (sl[1] - sl[0]) / (xs[1] - xs[0]) * xs[0]
    d1 = sl[-1] + (sl[-1] - sl[-2]) / (xs[-1] - xs[-2]) * (prob.b - xs[-1])
    v0 = vs[0] - 0.5 * xs[0] * (sl[0] + d0)
    v1 = vs[-1] + 0.5 * (prob.b - xs[-1]) * (sl[-1] + d1)
    v = np.concatenate([[v0], vs, [v1]])
    d = np.concatenate([[d0], sl, [d1]])
    margin = float(np.min(traj.slope[i]) - prob.stretch)
    return Profile(x, v, d, float(traj.anchors[i]), prob.b, prob.b_p, prob.stretch,
                   float(mismatch), margin, prob.rhs)


def _quantity(traj, name, stretch):
    if name == "start":
        return traj.start
    if name == "end":
        return traj.end
    return traj.margin(stretch)


def _multisection(prob, opts, brackets, n_iter=12, n_pts=15):
    """Shrink each bracket ``(lo, hi, quantity, level, rising)`` around the switch
    of a monotone predicate: ``q >= level`` if rising else ``q < level``, false at
    ``lo`` and true at ``hi``. All brackets share one shooting pass per round,
    each round narrowing them by a factor ``n_pts + 1``.
    """
    if not brackets:
        return []
    lo = np.array([b[0] for b in brackets], dtype=float)
    hi = np.array([b[1] for b in brackets], dtype=float)
    frac = np.arange(1, n_pts + 1) / (n_pts + 1)
    rows = np.arange(len(brackets))
    for _ in range(n_iter):
        if np.all(hi - lo <= 1e-15 * np.maximum(1.0, np.abs(hi))):
            break
        c = lo[:, None] + (hi - lo)[:, None] * frac[None, :]
        traj = shoot(prob, c.ravel(), opts)
        ok = np.empty(c.shape, dtype=bool)
        for r, (_, _, name, level, rising) in enumerate(brackets):
            q = _quantity(traj, name, prob.stretch)[r * n_pts:(r + 1) * n_pts]
            ok[r] = q >= level if rising else q < level
        first = np.where(ok.any(axis=1), ok.argmax(axis=1), n_pts)
        new_hi = np.where(first < n_pts, c[rows, np.minimum(first, n_pts - 1)], hi)
        new_lo = np.where(first > 0, c[rows, np.maximum(first - 1, 0)], lo)
        lo, hi = new_lo, new_hi
    return list(zip(lo, hi))


def _first_true(mask):
    idx = np.flatnonzero(mask)
    return int(idx[0]) if idx.size else None


def profile_ode_solve(prob: LiftProblem, opts: OdeOptions | None = None) -> Profile:
    """Shooting from the interior anchor ``x0 = b/2`` for the boundary profile.

    The anchors compatible with each boundary condition form an interval
    (trajectories never cross, so endpoint values are monotone in the anchor).
    A narrow intersection pins the anchor at a root of the boundary error. A
    wide one means the boundary conditions hold for a continuum of
    trajectories; the slope constraint ``varphi' >= a'/a`` then selects the
    anchor where the slope margin peaks, located as the centre of the set
    where the margin is within ``1e-6 a'/a`` of its maximum.

    Raises NoSolution or NonUnique.
    """
    opts = opts or prob.ode
    for name, bh, a, b in (("phi", prob.phi, prob.a, prob.b), ("psi", prob.psi, prob.a_p, prob.b_p)):
        ok, var = compatibility_check(bh, a, b)
        if not ok:
            raise NoSolution(f"{name} fails the compatibility check (s-variation {var:.3g})", var)

    bp, tol, stretch = prob.b_p, opts.tol_bvp, prob.stretch
    scan = bp * (1e-9 + (1 - 2e-9) * np.linspace(0.0, 1.0, opts.n_scan))
    traj = shoot(prob, scan, opts)
    errs = {"start": traj.start, "end": traj.end - bp}
    targets = {"start": 0.0, "end": bp}
    best_scan = float(np.min(np.maximum(np.abs(errs["start"]), np.abs(errs["end"]))))

    def no_solution():
        return NoSolution(
            f"no anchor meets both boundary conditions within {tol:g} "
            f"(best boundary mismatch on the scan {best_scan:.3g})", best_scan)

    # band edges: L = inf{e >= -tol}, U = sup{e <= tol}
    edges, brackets, slots = {}, [], []
    for name, e in errs.items():
        i = _first_true(e >= -tol)
        j = _first_true(e > tol)
        if i is None or j == 0:
            raise no_solution()
        if i == 0:
            edges[name, "L"] = scan[0]
        else:
            brackets.append((scan[i - 1], scan[i], name, targets[name] - tol, True))
            slots.append((name, "L", 1))
        if j is None:
            edges[name, "U"] = scan[-1]
        else:
            brackets.append((scan[j - 1], scan[j], name, targets[name] + tol + 1e-300, True))
            slots.append((name, "U", 0))
        k = _first_true(e >= 0)
        if k is not None and k > 0:
            brackets.append((scan[k - 1], scan[k], name, targets[name], True))
            slots.append((name, "root", 1))
    for (name, kind, side), br in zip(slots, _multisection(prob, opts, brackets)):
        edges[name, kind] = br[side]

    lo_i = max(edges["start", "L"], edges["end", "L"])
    hi_i = min(edges["start", "U"], edges["end", "U"])
    if lo_i > hi_i:
        raise no_solution()

    def mismatch_of(t):
        return np.maximum(np.abs(t.start), np.abs(t.end - bp))

    narrow = [n for n in errs if edges[n, "U"] - edges[n, "L"] <= 1e-3 * bp]
    if narrow:
        cands = np.array([min(max(edges[n, "root"], lo_i), hi_i)
                          for n in narrow if (n, "root") in edges] or [0.5 * (lo_i + hi_i)])
        anchor = float(cands[np.argmin(mismatch_of(shoot(prob, cands, opts)))])
    else:
        anchor = _peak_margin_anchor(prob, opts, scan, traj, lo_i, hi_i)

    final = shoot(prob, np.array([anchor]), opts, richardson=True)
    mismatch = float(mismatch_of(final)[0])
    if mismatch > tol:
        raise NoSolution(f"boundary mismatch {mismatch:.3g} exceeds tol_bvp", mismatch)
    m = float(final.margin(stretch)[0])
    if m < -opts.tol_slope:
        raise NoSolution(f"slope constraint varphi' >= a'/a violated by {-m:.3g}", mismatch)
    log.debug("profile anchor %.15g, mismatch %.3g, slope margin %.3g", anchor, mismatch, m)
    return _profile_from(prob, final, 0, mismatch)


def _peak_margin_anchor(prob, opts, scan, traj, lo_i, hi_i):
    bp, stretch = prob.b_p, prob.stretch
    inside = (scan > lo_i) & (scan < hi_i)
    cs = np.concatenate([[lo_i], scan[inside], [hi_i]])
    ms = np.concatenate([[np.nan], traj.margin(stretch)[inside], [np.nan]])
    ms[[0, -1]] = shoot(prob, cs[[0, -1]], opts).margin(stretch)

    feasible = ms >= -opts.tol_slope
    clusters = int(np.sum(np.diff(np.concatenate([[0], feasible.astype(int)])) == 1))
    if clusters > 1:
        raise NonUnique("separated anchors satisfy the boundary and slope conditions",
                        tuple(cs[feasible]))

    # refine the peak estimate on nested local grids
    for _ in range(3):
        k = int(np.argmax(ms))
        left, right = cs[max(k - 1, 0)], cs[min(k + 1, cs.size - 1)]
        fine = np.linspace(left, right, 33)
        fm = shoot(prob, fine, opts).margin(stretch)
        cs = np.concatenate([cs, fine])
        ms = np.concatenate([ms, fm])
        order = np.argsort(cs)
        cs, ms = cs[order], ms[order]
    k = int(np.argmax(ms))
    peak = ms[k]
    level = peak - 1e-6 * stretch

    brackets, sides = [], []
    for lvl, tag in ((level, "level"), (-opts.tol_slope, "feasible")):
        if lvl > peak:
            continue
        below_left = np.flatnonzero(ms[:k] < lvl)
        if below_left.size:
            i = below_left[-1]
            brackets.append((cs[i], cs[i + 1], "margin", lvl, True))
            sides.append((tag, "L"))
        below_right = np.flatnonzero(ms[k + 1:] < lvl)
        if below_right.size:
            j = k + 1 + below_right[0]
            brackets.append((cs[j - 1], cs[j], "margin", lvl, False))
            sides.append((tag, "U"))
    found = {key: br for key, br in zip(sides, _multisection(prob, opts, brackets))}
    lev_l = found[("level", "L")][1] if ("level", "L") in found else None
    lev_u = found[("level", "U")][0] if ("level", "U") in found else None
    feas_l = found[("feasible", "L")][1] if ("feasible", "L") in found else lo_i
    feas_u = found[("feasible", "U")][0] if ("feasible", "U") in found else hi_i

    if peak >= -opts.tol_slope and feas_u - feas_l > 1e-2 * bp:
        raise NonUnique("a continuum of anchors satisfies the boundary and slope conditions",
                        (feas_l, feas_u))
    if lev_l is None or lev_u is None:
        return float(cs[k])
    return 0.5 * (lev_l + lev_u)


# -- angular potential ----------------------------------------------------

def _field(prob, profile, s, x):
    """``(2 h_s, 2 h_x)`` at arrays ``s, x``."""
    k = prob.stretch
    w = s + 1j * x
    ph, dph = prob.phi.eval(w), prob.phi.deriv(w)
    wq = k * s + 1j * profile(x)
    ps, dps = prob.psi.eval(wq), prob.psi.deriv(wq)
    hs2 = dph.real / ph.imag - k * dps.real / ps.imag
    hx2 = dps.imag / ps.imag * profile.slope(x) - dph.imag / ph.imag
    return hs2, hx2


def _curl(prob, profile, s, x):
    """``d_x(2 h_s) - d_s(2 h_x)`` in closed form.

    Differentiating the field by the chain rule, the second-derivative terms
    of ``phi`` and ``psi`` cancel, leaving
    ``(a'/a) varphi' |psi'|^2 / Im(psi)^2 - |phi'|^2 / Im(phi)^2``.
    """
    k = prob.stretch
    w = s + 1j * x
    wq = k * s + 1j * profile(x)
    src = np.abs(prob.phi.deriv(w)) ** 2 / prob.phi.eval(w).imag ** 2
    dst = np.abs(prob.psi.deriv(wq)) ** 2 / prob.psi.eval(wq).imag ** 2
    return k * profile.slope(x) * dst - src


def _cell_gauss(lo_nodes, hi_nodes):
    """Gauss-Legendre points and weights for each cell ``[lo, hi]``; shapes (cells, 5)."""
    half = 0.5 * (hi_nodes - lo_nodes)[:, None]
    mid = 0.5 * (hi_nodes + lo_nodes)[:, None]
    return mid + half * _GL_X[None, :], half * _GL_W[None, :]


@dataclass(frozen=True)
class ThetaPotential:
    s: np.ndarray
    x: np.ndarray
    h: np.ndarray          # shape (len(s), len(x))
    mixed_residual: float

    def __post_init__(self):
        object.__setattr__(self, "_spline", RectBivariateSpline(self.s, self.x, self.h, kx=3, ky=3))

    def __call__(self, s, x):
        # the spline clamps outside its box; extend linearly instead so that
        # difference quotients on the boundary stay one-sided-free
        s, x = np.asarray(s, dtype=float), np.asarray(x, dtype=float)
        sc = np.clip(s, self.s[0], self.s[-1])
        xc = np.clip(x, self.x[0], self.x[-1])
        val = self._spline.ev(sc, xc)
        out_s, out_x = s != sc, x != xc
        if np.any(out_s):
            val = val + np.where(out_s, (s - sc) * self._spline.ev(sc, xc, dx=1), 0.0)
        if np.any(out_x):
            val = val + np.where(out_x, (x - xc) * self._spline.ev(sc, xc, dy=1), 0.0)
        return val

    def rows(self):
        S, X = np.meshgrid(self.s, self.x, indexing="ij")
        return np.column_stack([S.ravel(), X.ravel(), self.h.ravel()])


def theta_potential_build(prob: LiftProblem, profile: Profile, grid=(128, 128),
                          tol_mixed: float = TOL_MIXED) -> ThetaPotential:
    """Integrate ``h`` from ``h(0, b/2) = 0``: first along ``s = 0`` in ``x``, then along ``s``.

    Each grid cell is integrated with 5-point Gauss-Legendre. Raises
    PathInconsistent when the discrete curl of the field exceeds ``tol_mixed``.
    """
    n_s, n_x = grid
    n_x += n_x % 2
    s = np.linspace(0.0, prob.a, n_s + 1)
    x = np.linspace(0.0, prob.b, n_x + 1)

    xg, wg = _cell_gauss(x[:-1], x[1:])
    _, hx2 = _field(prob, profile, np.zeros_like(xg), xg)
    cells = np.sum(0.5 * hx2 * wg, axis=1)
    h0 = np.concatenate([[0.0], np.cumsum(cells)])
    h0 -= h0[n_x // 2]

    sg, wsg = _cell_gauss(s[:-1], s[1:])
    inner = x[1:-1]
    shape = (inner.size,) + sg.shape
    hs2, _ = _field(prob, profile, np.broadcast_to(sg[None], shape),
                    np.broadcast_to(inner[:, None, None], shape))
    cells_s = np.sum(0.5 * hs2 * wsg[None, :, :], axis=2)       # (n_x-1, n_s)
    along = np.concatenate([np.zeros((inner.size, 1)), np.cumsum(cells_s, axis=1)], axis=1)
    # the field cancels two terms of size 1/dist near the rectangle's
    # horizontal sides, so the boundary rows are extrapolated from interior ones
    first = np.polynomial.polynomial.polyfit(inner[:4], along[:4], 3)
    last = np.polynomial.polynomial.polyfit(inner[-4:], along[-4:], 3)
    along = np.vstack([np.polynomial.polynomial.polyval(x[0], first),
                       along,
                       np.polynomial.polynomial.polyval(x[-1], last)])
    h = (h0[:, None] + along).T                                 # (n_s+1, n_x+1)

    Sg, Xg = np.meshgrid(s[1:-1], x[1:-1], indexing="ij")
    mixed = float(np.max(np.abs(_curl(prob, profile, Sg, Xg)))) if Sg.size else 0.0
    if not mixed <= tol_mixed:
        raise PathInconsistent(f"mixed-partial residual {mixed:.3g} exceeds {tol_mixed:g}")
    return ThetaPotential(s, x, h, mixed)


# -- the lifted map -------------------------------------------------------

def _chart_coords(prob, z, t):
    w = np.asarray(t, dtype=float) + 1j * np.abs(z) ** 2
    zeta = prob.phi.inverse(w, prob.a, prob.b)
    return zeta.real, zeta.imag


def assemble_lift(prob: LiftProblem, profile: Profile, hpot: ThetaPotential,
                  alpha: float = 0.0) -> QCMap:
    """``(s, x, theta) -> (a's/a, varphi(x), theta + h(s, x) + alpha)`` in the charts
    built from ``phi`` and ``psi``, as a numeric-derivative QCMap."""
    k = prob.stretch

    def image(z, t):
        z = np.asarray(z, dtype=complex)
        s, x = _chart_coords(prob, z, t)
        wq = prob.psi.eval(k * s + 1j * profile(x))
        angle = np.angle(z) + hpot(s, x) + alpha
        return np.sqrt(np.maximum(wq.imag, 0.0)) * np.exp(1j * angle), wq.real

    return QCMap(lambda z, t: image(z, t)[0], lambda z, t: image(z, t)[1],
                 ChartImage(prob.phi, prob.a, prob.b), ChartImage(prob.psi, prob.a_p, prob.b_p),
                 name=f"lift[{prob.phi.name}->{prob.psi.name}]")


def verify_commutation(f: QCMap, prob: LiftProblem, profile: Profile, z, t) -> float:
    """Max of ``|Pi(f(p)) - psi(f_varphi(phi^{-1}(Pi(p))))|`` over the samples."""
    f1, f2 = f(z, t)
    left = f2 + 1j * np.abs(f1) ** 2
    s, x = _chart_coords(prob, z, t)
    right = prob.psi.eval(prob.stretch * s + 1j * profile(x))
    return float(np.max(np.abs(left - right)))


@dataclass
class LiftResult:
    problem: LiftProblem
    profile: Profile
    potential: ThetaPotential
    map: QCMap


def solve_lift(prob: LiftProblem, alpha: float = 0.0, grid=(128, 128)) -> LiftResult:
    profile = profile_ode_solve(prob)
    hpot = theta_potential_build(prob, profile, grid)
    return LiftResult(prob, profile, hpot, assemble_lift(prob, profile, hpot, alpha))
