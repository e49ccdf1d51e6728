"""Shared quadrature helpers: composite Gauss-Legendre panels with dyadic
refinement toward singular points and oscillation-aware subdivision.

scipy.integrate.quad (QUADPACK: adaptive Gauss-Kronrod) is used directly for
generic 1D integrals; the helpers here build deterministic vectorizable node
sets for the heavily structured integrands (Fejer kernels, near-unit-root
spectral peaks) where adaptivity per call would be too slow.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=32)
def _leggauss(k: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(k)
    return x, w


def panel_nodes(edges: np.ndarray, k: int = 12) -> tuple[np.ndarray, np.ndarray]:
    """Gauss-Legendre nodes/weights on each interval of `edges` (ascending)."""
    gx, gw = _leggauss(k)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    x = (mid[:, None] + half[:, None] * gx[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return x, w


def dyadic_edges(lo: float, hi: float) -> np.ndarray:
    """Geometric edge ladder hi, hi/2, ..., down to lo, then 0 appended at the
    bottom is NOT included; interval (0, lo] must be handled by the caller."""
    out = [hi]
    e = hi
    while e / 2.0 > lo:
        e /= 2.0
        out.append(e)
    out.append(lo)
    return np.array(out[::-1])


def refine_edges(edges: np.ndarray, freq: float, per_osc: int = 3) -> np.ndarray:
    """Subdivide each interval so no subinterval spans more than
    ~1/per_osc of an oscillation period 2*pi/freq."""
    if freq <= 0:
        return edges
    period = 2.0 * np.pi / freq
    out = [edges[0]]
    for a, b in zip(edges[:-1], edges[1:]):
        nsub = max(1, int(np.ceil(per_osc * (b - a) / period)))
        out.extend(np.linspace(a, b, nsub + 1)[1:])
    return np.array(out)


def axis_grid(freq: float, floor: float, hi: float = np.pi, k: int = 12,
              per_osc: int = 3) -> tuple[np.ndarray, np.ndarray]:
    """Composite grid on (0, hi]: dyadic toward 0 down to `floor`, every panel
    resolved against oscillation frequency `freq`, closed by a final [0, floor]
    panel (Gauss nodes are interior, so endpoint singularities are never hit;
    pick `floor` below the smallest structure scale)."""
    floor = min(floor, hi / 4.0)
    edges = np.concatenate([[0.0], dyadic_edges(floor, hi)])
    edges = refine_edges(edges, freq, per_osc)
    return panel_nodes(edges, k)


def graded_edges(lo: float, hi: float, n: int, power: float = 2.0) -> np.ndarray:
    """n+1 edges on [lo, hi] clustered toward lo like a power law."""
    u = np.linspace(0.0, 1.0, n + 1) ** power
    return lo + (hi - lo) * u
