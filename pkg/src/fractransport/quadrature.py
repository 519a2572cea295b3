"""Quadrature rules for weakly singular integrals.

Two independent families are provided so that every singular integral in the
package can be computed twice:

* Gauss-Jacobi on ``(0, h]`` with weight ``d**p`` factored out of the integrand
  (nodes from scipy).
* Double-exponential (tanh-sinh) on ``(0, h]`` that evaluates the raw integrand
  and needs nothing about the singularity except that it sits at ``d = 0``.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np
from scipy.special import roots_jacobi, roots_legendre

__all__ = [
    "gauss_legendre",
    "gauss_jacobi_01",
    "jacobi_panel",
    "tanh_sinh_panel",
    "graded_panels",
    "legendre_panels",
]


@lru_cache(maxsize=64)
def _legendre(n: int):
    x, w = roots_legendre(n)
    return x, w


def gauss_legendre(a: float, b: float, n: int = 20):
    x, w = _legendre(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


@lru_cache(maxsize=256)
def gauss_jacobi_01(n: int, p: float):
    """Nodes/weights on (0, 1) for the weight ``t**p`` (p > -1)."""
    # scipy's roots_jacobi(n, a, b) uses (1-x)^a (1+x)^b on [-1, 1]
    x, w = roots_jacobi(n, 0.0, p)
    t = 0.5 * (x + 1.0)
    return t, w * 0.5 ** (p + 1.0)


def jacobi_panel(smooth, h: float, p: float, n: int = 40) -> float | complex:
    """Integrate ``d**p * smooth(d)`` over ``(0, h]``."""
    t, w = gauss_jacobi_01(n, float(p))
    d = h * t
    return h ** (p + 1.0) * np.sum(w * smooth(d))


@lru_cache(maxsize=16)
def _tanh_sinh_nodes(step: float, tmax: float):
    t = np.arange(-tmax, tmax + 0.5 * step, step)
    u = 0.5 * np.pi * np.sinh(t)
    with np.errstate(over="ignore"):
        # distance of the node from the left end of (0, 1), computed without cancellation
        d = 1.0 / (1.0 + np.exp(-2.0 * u))
        w = 0.5 * np.pi * np.cosh(t) / np.cosh(u) ** 2 * 0.5 * step
    keep = (d > 1e-300) & (d < 1.0) & (w > 0)
    return d[keep], w[keep]


def tanh_sinh_panel(func, h: float, step: float = 1.0 / 64, tmax: float = 6.5):
    """Integrate ``func(d)`` over ``(0, h]`` by the tanh-sinh rule.

    ``func`` receives the distance from the singular end ``d = 0``.
    """
    d, w = _tanh_sinh_nodes(step, tmax)
    nodes = h * d
    keep = nodes < h
    return h * np.sum(w[keep] * func(nodes[keep]))


def graded_panels(a: float, b: float, ratio: float = 2.0, min_width: float = 1e-30):
    """Break points of ``[a, b]`` refined geometrically toward ``a``."""
    if b <= a:
        return np.array([a, b])
    pts = [b]
    width = b - a
    while width > min_width * max(1.0, abs(b)):
        width /= ratio
        pts.append(a + width)
        if len(pts) > 400:
            break
    pts.append(a)
    return np.array(sorted(pts))


def legendre_panels(breaks, n: int = 20):
    """Composite Gauss-Legendre nodes and weights over consecutive break points."""
    breaks = np.asarray(breaks, dtype=float)
    x, w = _legendre(n)
    a = breaks[:-1, None]
    b = breaks[1:, None]
    half = 0.5 * (b - a)
    nodes = a + half * (x[None, :] + 1.0)
    weights = half * w[None, :]
    return nodes.ravel(), weights.ravel()
