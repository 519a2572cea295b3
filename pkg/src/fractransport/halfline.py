"""Weighted integrals and Mellin transforms of odd profiles on (0, inf).

All integrals are taken in the logarithmic variable t = log x.  Between
``x_lo`` and ``x_hi`` the integrand is sampled directly; outside, it is
replaced by its power-law asymptote ``g(x) ~ g(x_edge) (x/x_edge)^p``, whose
contribution is added in closed form (weighted integrals) or continued onto
the uniform t-grid (Mellin transforms).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .quadrature import legendre_panels

__all__ = [
    "HalfLineModel",
    "weighted_integral",
    "mellin_on_line",
    "mellin_fft",
    "mellin_pair",
]


@dataclass(frozen=True)
class HalfLineModel:
    """A function on (0, inf) with power-law behaviour at both ends.

    ``p_hi = None`` means the function is negligible beyond ``x_hi``.
    """

    func: Callable
    x_lo: float
    x_hi: float
    p_lo: float
    p_hi: Optional[float] = None

    def edge_values(self):
        v = self.func(np.array([self.x_lo, self.x_hi]))
        return float(v[0]), float(v[1])

    def extended(self, x):
        """Function values with the asymptotes used outside [x_lo, x_hi]."""
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        g_lo, g_hi = self.edge_values()
        inside = (x >= self.x_lo) & (x <= self.x_hi)
        out[inside] = self.func(x[inside])
        low = x < self.x_lo
        out[low] = g_lo * (x[low] / self.x_lo) ** self.p_lo
        if self.p_hi is not None:
            high = x > self.x_hi
            out[high] = g_hi * (x[high] / self.x_hi) ** self.p_hi
        return out


def weighted_integral(model: HalfLineModel, power: float, panel: float = 0.1,
                      n_nodes: int = 20) -> float:
    """int_0^inf g(x) x^power dx with Gauss-Legendre panels in log x."""
    t_lo, t_hi = np.log(model.x_lo), np.log(model.x_hi)
    m = max(1, int(np.ceil((t_hi - t_lo) / panel)))
    ts, ws = legendre_panels(np.linspace(t_lo, t_hi, m + 1), n_nodes)
    xs = np.exp(ts)
    body = float(np.sum(ws * model.func(xs) * xs ** (power + 1.0)))
    g_lo, g_hi = model.edge_values()
    e_lo = model.p_lo + power + 1.0
    if e_lo <= 0:
        raise ValueError("integral diverges at the origin")
    body += g_lo * model.x_lo ** (power + 1.0) / e_lo
    if model.p_hi is not None:
        e_hi = model.p_hi + power + 1.0
        if e_hi >= 0:
            raise ValueError("integral diverges at infinity")
        body -= g_hi * model.x_hi ** (power + 1.0) / e_hi
    return body


def _t_window(model: HalfLineModel, sigma: float, tol: float = 1e-17):
    rate_lo = model.p_lo + sigma
    if rate_lo <= 0:
        raise ValueError("Mellin integrand does not decay as x -> 0 on this line")
    t_lo = np.log(model.x_lo) + np.log(tol) / rate_lo
    if model.p_hi is None:
        t_hi = np.log(model.x_hi)
    else:
        rate_hi = model.p_hi + sigma
        if rate_hi >= 0:
            raise ValueError("Mellin integrand does not decay as x -> infinity on this line")
        t_hi = np.log(model.x_hi) + np.log(tol) / rate_hi
    return t_lo, t_hi


def _sample_line(model, sigma, dt, window=None):
    t_lo, t_hi = window if window is not None else _t_window(model, sigma)
    t = np.arange(t_lo, t_hi + dt, dt)
    with np.errstate(under="ignore"):
        h = model.extended(np.exp(t)) * np.exp(sigma * t)
    return t, h


def mellin_on_line(model: HalfLineModel, sigma: float, lam, dt: float = 0.01,
                   window=None) -> np.ndarray:
    """int_0^inf g(x) x^{sigma + i lam - 1} dx at the requested lambdas."""
    lam = np.asarray(lam, dtype=float)
    t, h = _sample_line(model, sigma, dt, window)
    flat = lam.ravel()
    out = np.empty(flat.size, dtype=complex)
    for s in range(0, flat.size, 128):
        chunk = flat[s:s + 128]
        out[s:s + 128] = dt * (np.exp(1j * np.outer(chunk, t)) @ h)
    return out.reshape(lam.shape)


def mellin_fft(model: HalfLineModel, sigma: float, dt: float = 0.01, dlam: float = 0.02):
    """Mellin transform on the uniform grid lambda_k = k * dlam' (k >= 0) via one FFT.

    Returns ``(lambdas, values)``; the actual spacing is ``2 pi / (N dt)`` for
    the smallest power-of-two N that makes it at most ``dlam``.
    """
    t, h = _sample_line(model, sigma, dt)
    n = 1 << int(np.ceil(np.log2(max(t.size, 2.0 * np.pi / (dlam * dt)))))
    spec = np.fft.ifft(h, n) * n  # sum_j h_j exp(+i lam_k t'_j)
    lam = 2.0 * np.pi * np.arange(n // 2) / (n * dt)
    values = dt * np.exp(1j * lam * t[0]) * spec[: n // 2]
    return lam, values


def _profile_models(profile, alpha: float):
    scale = float(getattr(profile, "scale", 1.0))
    extent = float(profile.extent)
    x_lo = 1e-5 * scale
    w = HalfLineModel(lambda x: profile.riesz(x, alpha), x_lo, 1e4 * extent, 1.0,
                      alpha - 2.0 if alpha > 0 else None)
    du = HalfLineModel(profile.derivative, x_lo, 3.0 * extent, 0.0, None)
    if alpha == 0:
        w = HalfLineModel(profile.value, x_lo, 3.0 * extent, 1.0, None)
    return w, du


def mellin_pair(profile, alpha: float, delta: float, lam):
    """A(lambda) for w = Lambda^{-alpha} u and B(lambda) for u'.

    A = int w x^{i lam - delta/2 - 1} dx,  B = int u' x^{i lam - delta/2 + alpha} dx.
    """
    w, du = _profile_models(profile, alpha)
    lam = np.asarray(lam, dtype=float)
    dt = min(0.01, np.pi / (float(np.max(np.abs(lam), initial=0.0)) + 300.0))
    a_vals = mellin_on_line(w, -0.5 * delta, lam, dt)
    b_vals = mellin_on_line(du, alpha - 0.5 * delta + 1.0, lam, dt)
    return a_vals, b_vals
