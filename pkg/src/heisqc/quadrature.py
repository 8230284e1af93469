"""Composite Simpson rules and tensor grids."""

from __future__ import annotations

import numpy as np


def even(n: int) -> int:
    n = max(int(n), 2)
    return n + (n % 2)


def simpson_rule(lo: float, hi: float, n: int):
    """Nodes and weights of composite Simpson with ``n`` intervals (rounded up to even)."""
    n = even(n)
    x = np.linspace(lo, hi, n + 1)
    w = np.ones(n + 1)
    w[1:-1:2] = 4.0
    w[2:-1:2] = 2.0
    w *= (hi - lo) / (3.0 * n)
    return x, w


def periodic_rule(lo: float, hi: float, n: int):
    """Trapezoid rule for a full period; spectrally accurate for smooth periodic integrands."""
    n = max(int(n), 1)
    x = lo + (hi - lo) * np.arange(n) / n
    return x, np.full(n, (hi - lo) / n)


def simpson(values, lo: float, hi: float) -> float:
    """Simpson integral of samples on a uniform grid with an even number of intervals."""
    values = np.asarray(values, dtype=float)
    n = values.shape[-1] - 1
    if n < 2 or n % 2:
        raise ValueError("simpson needs an even number of intervals")
    _, w = simpson_rule(lo, hi, n)
    return float(np.sum(values * w, axis=-1))


def tensor(*rules):
    """Flattened tensor product of 1D rules: returns (list of coordinate arrays, weights)."""
    grids = np.meshgrid(*[r[0] for r in rules], indexing="ij")
    weights = np.ones_like(grids[0])
    for k, r in enumerate(rules):
        shape = [1] * len(rules)
        shape[k] = -1
        weights = weights * r[1].reshape(shape)
    return [g.ravel() for g in grids], weights.ravel()
