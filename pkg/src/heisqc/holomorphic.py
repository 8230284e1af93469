"""Holomorphic maps from rectangles into the upper half-plane, with Newton inversion."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ChartInversion, UnknownName

_SEED_GRID = 33
_CHUNK = 4096


@dataclass(frozen=True)
class Biholomorphism:
    """A holomorphic map ``w -> eval(w)`` together with its complex derivative.

    Both callables must accept numpy arrays. Injectivity on the rectangle is the
    caller's responsibility; ``check`` only samples positivity, the derivative
    and the Cauchy-Riemann consistency of the pair.
    """

    eval: Callable
    deriv: Callable
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __call__(self, w):
        return self.eval(w)

    def cr_residual(self, a: float, b: float, n: int = 9, h: float = 1e-6) -> float:
        s, x = np.meshgrid(np.linspace(a / (n + 1), a * n / (n + 1), n),
                           np.linspace(b / (n + 1), b * n / (n + 1), n))
        w = (s + 1j * x).ravel()
        d = self.deriv(w)
        hs = h * max(a, b)
        d_re = (self.eval(w + hs) - self.eval(w - hs)) / (2 * hs)
        d_im = (self.eval(w + 1j * hs) - self.eval(w - 1j * hs)) / (2j * hs)
        scale = np.maximum(np.abs(d), 1.0)
        return float(np.max(np.maximum(np.abs(d_re - d), np.abs(d_im - d)) / scale))

    def check(self, a: float, b: float, n: int = 9) -> dict:
        s, x = np.meshgrid(np.linspace(a / (n + 1), a * n / (n + 1), n),
                           np.linspace(b / (n + 1), b * n / (n + 1), n))
        w = (s + 1j * x).ravel()
        return {
            "min_imag": float(np.min(self.eval(w).imag)),
            "min_abs_deriv": float(np.min(np.abs(self.deriv(w)))),
            "cr_residual": self.cr_residual(a, b, n),
        }

    def inverse(self, target, a: float, b: float, tol: float = 1e-13, max_iter: int = 60):
        """Solve ``eval(zeta) = target`` for ``zeta`` near the rectangle ``(0,a) x (0,b)``.

        Damped Newton, seeded by the nearest image of a coarse interior grid.
        Raises ChartInversion when some target does not converge.
        """
        target = np.asarray(target, dtype=complex)
        flat = target.ravel()
        zeta = self._seed(flat, a, b)
        res = self.eval(zeta) - flat
        scale = np.maximum(np.abs(flat), 1.0)
        for _ in range(max_iter):
            err = np.abs(res)
            active = err > tol * scale
            if not active.any():
                break
            d = self.deriv(zeta[active])
            step = np.where(np.abs(d) > 0, res[active] / np.where(d == 0, 1, d), 0)
            z_act = zeta[active]
            r_act = err[active]
            lam = np.ones(step.shape)
            for _ in range(30):
                cand = z_act - lam * step
                new = self.eval(cand) - flat[active]
                worse = ~(np.abs(new) < r_act) & (lam > 1e-9)
                if not worse.any():
                    break
                lam = np.where(worse, lam * 0.5, lam)
            zeta[active] = cand
            res[active] = new
        bad = ~(np.abs(res) <= 1e3 * tol * scale)
        if bad.any():
            raise ChartInversion(
                f"{self.name}: Newton inversion failed for {int(bad.sum())} point(s), "
                f"e.g. target {flat[bad][0]}")
        return zeta.reshape(target.shape)

    def _seed(self, flat, a, b):
        n = _SEED_GRID
        s, x = np.meshgrid(np.linspace(0, a, n + 2)[1:-1], np.linspace(0, b, n + 2)[1:-1])
        pre = (s + 1j * x).ravel()
        img = self.eval(pre)
        out = np.empty(flat.shape, dtype=complex)
        for k in range(0, flat.size, _CHUNK):
            part = flat[k:k + _CHUNK]
            idx = np.argmin(np.abs(part[:, None] - img[None, :]), axis=1)
            out[k:k + _CHUNK] = pre[idx]
        return out


def _affine(c, d):
    c, d = complex(c), complex(d)
    return Biholomorphism(lambda w: c * np.asarray(w) + d,
                          lambda w: np.full(np.shape(w), c, dtype=complex),
                          "affine", {"c": c, "d": d})


def builtin_biholomorphism(name: str, params: dict | None = None) -> Biholomorphism:
    """Registry: ``identity``, ``exp``, ``translate_i`` and ``affine`` (params ``c``, ``d``)."""
    params = dict(params or {})
    if name == "identity":
        return Biholomorphism(lambda w: np.asarray(w, dtype=complex) + 0,
                              lambda w: np.ones(np.shape(w), dtype=complex), "identity")
    if name == "exp":
        return Biholomorphism(np.exp, np.exp, "exp")
    if name == "translate_i":
        return Biholomorphism(lambda w: np.asarray(w, dtype=complex) + 1j,
                              lambda w: np.ones(np.shape(w), dtype=complex), "translate_i")
    if name == "affine":
        c = params.get("c", 1.0)
        d = params.get("d", 0.0)
        if isinstance(c, (list, tuple)):
            c = complex(*c)
        if isinstance(d, (list, tuple)):
            d = complex(*d)
        return _affine(c, d)
    raise UnknownName(f"unknown biholomorphism {name!r}")
