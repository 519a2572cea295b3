"""Fractional Laplacian Lambda^s: spectral realisation on the periodic box and
real-space singular-integral evaluators on the line used to cross-check it.

The real-space kernels carry normalisation constants (``C_alpha`` for the
Riesz potential, ``C_beta`` for Lambda^beta).  They are calibrated once, by
matching a Gaussian test function against the Fourier definition evaluated
with adaptive quadrature, and cached.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterable, Literal, Optional

import numpy as np
from scipy import integrate

from .quadrature import gauss_jacobi_01, legendre_panels
from .spectral import Field, Grid, apply_multiplier

__all__ = [
    "FractionalMultiplier",
    "frac_laplacian",
    "drift_term",
    "dealias_mask",
    "riesz_constant",
    "laplacian_constant",
    "calibration_table",
    "odd_kernel_difference",
    "riesz_potential_odd",
    "frac_laplacian_realspace",
    "frac_laplacian_odd",
    "positivity_integral",
    "boundary_fraction",
    "ConvergenceWarning",
]


class ConvergenceWarning(RuntimeWarning):
    pass


@dataclass(frozen=True)
class FractionalMultiplier:
    """Fourier symbol |k|^s on a grid, zero at k=0 and at the Nyquist mode."""

    exponent: float
    grid: Grid
    zero_mode_policy: Literal["zero", "reject_nonzero_mean"] = "zero"

    def __post_init__(self):
        if not -1.0 < self.exponent <= 2.0:
            raise ValueError(f"exponent must lie in (-1, 2], got {self.exponent}")
        if self.zero_mode_policy not in ("zero", "reject_nonzero_mean"):
            raise ValueError(f"unknown zero-mode policy {self.zero_mode_policy!r}")

    @cached_property
    def symbol(self) -> np.ndarray:
        k = np.abs(self.grid.wavenumbers)
        sym = np.zeros_like(k)
        nz = k > 0
        sym[nz] = k[nz] ** self.exponent
        sym[self.grid.nyquist] = 0.0
        return sym

    def __call__(self, field: Field) -> Field:
        if field.grid != self.grid:
            raise ValueError("field lives on a different grid")
        if self.exponent < 0 and self.zero_mode_policy == "reject_nonzero_mean":
            mean = abs(float(np.mean(field.values)))
            if mean >= 1e-10 * max(field.sup_norm(), np.finfo(float).tiny):
                raise ValueError(f"field mean {mean:.3e} is not zero; Lambda^{self.exponent} undefined")
        return apply_multiplier(field, self.symbol)


def frac_laplacian(field: Field, s: float, policy: str = "zero") -> Field:
    return FractionalMultiplier(float(s), field.grid, policy)(field)


def dealias_mask(grid: Grid) -> np.ndarray:
    """Boolean mask of modes kept by the 2/3 rule (|j| <= n/3), FFT order."""
    return np.abs(grid.mode_index) <= grid.n_points // 3


def drift_term(u: Field, alpha: float) -> Field:
    """(Lambda^{-alpha} u) * u_x with both factors truncated to |j| <= n/3."""
    if not 0.0 <= alpha < 1.0:
        raise ValueError(f"alpha must lie in [0, 1), got {alpha}")
    grid = u.grid
    spec = u.spectrum * dealias_mask(grid)
    spec[grid.nyquist] = 0.0
    k = grid.wavenumbers
    absk = np.abs(k)
    riesz_sym = np.where(absk > 0, absk ** (-alpha) if alpha else 1.0, 0.0)
    n = grid.n_points
    velocity = np.fft.ifft(spec * riesz_sym * n).real
    gradient = np.fft.ifft(spec * 1j * k * n).real
    out = Field(grid, velocity * gradient)
    if u.parity == "odd":
        out.parity = "even"
    elif u.parity == "even":
        out.parity = "odd"
    return out


def positivity_integral(field: Field, p: float, beta: float) -> float:
    """Grid quadrature of int |f|^{p-2} f Lambda^beta f dx."""
    lam = frac_laplacian(field, beta).values
    f = field.values
    return float(np.sum(np.abs(f) ** (p - 2.0) * f * lam) * field.grid.spacing)


def boundary_fraction(values: np.ndarray, outer: float = 0.1) -> float:
    """max |u| over the outer ``outer`` fraction of the box, relative to max |u|."""
    n = values.size
    m = max(1, int(round(0.5 * outer * n)))
    peak = float(np.max(np.abs(values)))
    if peak == 0.0:
        return 0.0
    edge = np.concatenate((values[:m], values[-m:]))
    return float(np.max(np.abs(edge))) / peak


# ---------------------------------------------------------------------------
# calibration of the real-space constants


def odd_kernel_difference(x, y, power):
    """|x-y|^p - (x+y)^p for x, y > 0, evaluated without cancellation."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    big = np.maximum(x, y)
    r = np.minimum(x, y) / big
    with np.errstate(divide="ignore"):
        return big ** power * (1.0 + r) ** power * np.expm1(-2.0 * power * np.arctanh(r))


def _line_riesz_spectral(alpha, x):
    # Lambda^{-alpha} of y exp(-y^2) from its sine transform (sqrt(pi)/4) xi exp(-xi^2/4)
    val, _ = integrate.quad(
        lambda xi: xi ** (1.0 - alpha) * np.exp(-0.25 * xi * xi) * np.sin(xi * x),
        0.0, 60.0, limit=400, epsabs=1e-15, epsrel=1e-13,
    )
    return 2.0 / np.pi * np.sqrt(np.pi) / 4.0 * val


@lru_cache(maxsize=256)
def riesz_constant(alpha: float) -> float:
    """C_alpha with Lambda^{-alpha} f(x) = C_alpha int f(y) |x-y|^{alpha-1} dy."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    raw = _riesz_odd_raw(lambda y: y * np.exp(-y * y), np.array([1.0]), alpha,
                         support=12.0, breakpoints=())[0]
    return float(_line_riesz_spectral(alpha, 1.0) / raw)


@lru_cache(maxsize=256)
def laplacian_constant(beta: float) -> float:
    """C_beta with Lambda^beta f(x) = C_beta PV int (f(x)-f(y)) |x-y|^{-1-beta} dy."""
    if not 0.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (0, 2), got {beta}")
    spectral, _ = integrate.quad(lambda xi: xi ** beta * np.exp(-0.25 * xi * xi), 0.0, 60.0,
                                 limit=400, epsabs=1e-15, epsrel=1e-13)
    spectral /= np.sqrt(np.pi)
    # 2 int_0^inf (1 - exp(-h^2)) h^{-1-beta} dh, Jacobi near 0 and an exact tail
    t, w = gauss_jacobi_01(40, 1.0 - beta)
    near = np.sum(w * -np.expm1(-t * t) / (t * t))
    nodes, weights = legendre_panels(np.geomspace(1.0, 12.0, 30), 20)
    mid = np.sum(weights * -np.expm1(-nodes ** 2) * nodes ** (-1.0 - beta))
    tail = 12.0 ** (-beta) / beta
    raw = 2.0 * (near + mid + tail)
    return float(spectral / raw)


def calibration_table(alphas: Iterable[float] = (), betas: Iterable[float] = ()) -> dict:
    table = {}
    for a in alphas:
        if 0 < a < 1:
            table[f"C_alpha[{a:g}]"] = riesz_constant(float(a))
    for b in betas:
        if 0 < b < 2:
            table[f"C_beta[{b:g}]"] = laplacian_constant(float(b))
    return table


# ---------------------------------------------------------------------------
# Riesz potential of odd functions on the line


def _segments(points, lo, hi):
    pts = sorted({p for p in points if lo < p < hi} | {lo, hi})
    return list(zip(pts[:-1], pts[1:]))


def _panels_toward(a, b, toward_a, toward_b, levels=40, max_width=None):
    """Panel breaks on [a, b] refined geometrically toward the flagged ends."""
    length = b - a
    breaks = {a, b}
    if toward_a and toward_b:
        mid = 0.5 * (a + b)
        breaks.add(mid)
        for i in range(1, levels):
            breaks.add(a + 0.5 * length * 2.0 ** -i)
            breaks.add(b - 0.5 * length * 2.0 ** -i)
    elif toward_a:
        for i in range(1, levels):
            breaks.add(a + length * 2.0 ** -i)
    elif toward_b:
        for i in range(1, levels):
            breaks.add(b - length * 2.0 ** -i)
    pts = np.array(sorted(breaks))
    if max_width is not None:
        refined = [pts[0]]
        for p, q in zip(pts[:-1], pts[1:]):
            m = int(math.ceil((q - p) / max_width))
            refined.extend(np.linspace(p, q, m + 1)[1:])
        pts = np.array(refined)
    return pts


def _riesz_odd_raw(u, x_eval, alpha, support, breakpoints, tail_power=None,
                   n_nodes=24, max_width=None):
    """int_0^R u(y) (|x-y|^{a-1} - (x+y)^{a-1}) dy without the constant."""
    x_eval = np.asarray(x_eval, dtype=float)
    out = np.zeros(x_eval.shape)
    p = alpha - 1.0
    tj, wj = gauss_jacobi_01(n_nodes, p)
    R = float(support)
    for idx, x in np.ndenumerate(x_eval):
        if x <= 0.0:
            continue
        total = 0.0
        specials = [0.0, x, R] + [b for b in breakpoints]
        for a, b in _segments(specials, 0.0, R):
            near_a = a == x
            near_b = b == x
            # innermost panel next to y = x carries the Jacobi weight
            if near_a or near_b:
                h = (b - a) * 2.0 ** -12
                if near_a:
                    ys = x + h * tj
                else:
                    ys = x - h * tj
                uy = u(ys)
                total += h ** alpha * np.sum(wj * uy)
                _, wl = legendre_panels([0.0, h], n_nodes)
                yl, _ = legendre_panels([x, x + h] if near_a else [x - h, x], n_nodes)
                total -= np.sum(wl * u(yl) * (x + yl) ** p)
                a, b = (a + h, b) if near_a else (a, b - h)
            breaks = _panels_toward(a, b, toward_a=(a == 0.0) or near_a or (a in breakpoints),
                                    toward_b=near_b or (b in breakpoints), max_width=max_width)
            ys, ws = legendre_panels(breaks, n_nodes)
            total += np.sum(ws * u(ys) * odd_kernel_difference(x, ys, p))
        if tail_power is not None:
            # u(y) ~ u(R) (R/y)^q beyond R, kernel ~ 2(1-alpha) x y^{alpha-2}
            q = float(tail_power)
            uR = float(u(np.array([R]))[0])
            total += 2.0 * (1.0 - alpha) * x * uR * R ** (alpha - 1.0) / (1.0 + q - alpha)
        out[idx] = total
    return out


def riesz_potential_odd(u: Callable, x_eval, alpha: float, support: float = 50.0,
                        breakpoints=(), tail_power: Optional[float] = None,
                        n_nodes: int = 24, max_width: Optional[float] = None) -> np.ndarray:
    """Lambda^{-alpha} u for odd ``u`` via the half-line kernel.

    ``u`` is evaluated on (0, support]; beyond ``support`` it is taken to be
    zero unless ``tail_power`` q is given, in which case ``u(y) ~ y^{-q}`` and
    the remaining integral is added in closed form.  Kinks or jumps of ``u``
    must be listed in ``breakpoints``.  Negative evaluation points use oddness.
    """
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    x = np.asarray(x_eval, dtype=float)
    ax = np.abs(x)
    raw = _riesz_odd_raw(u, ax, alpha, support, tuple(float(b) for b in breakpoints),
                         tail_power, n_nodes, max_width)
    return np.sign(x) * riesz_constant(float(alpha)) * raw


# ---------------------------------------------------------------------------
# Lambda^beta in real space


def _second_difference_integral(g, x, beta, eps, upper, max_width, n_nodes):
    pts = [eps]
    while pts[-1] < upper:
        step = min(pts[-1], max_width)
        pts.append(min(pts[-1] + step, upper))
    hs, ws = legendre_panels(np.array(pts), n_nodes)
    d = 2.0 * g(np.full(hs.shape, x)) - g(x + hs) - g(x - hs)
    return float(np.sum(ws * d * hs ** (-1.0 - beta)))


def frac_laplacian_realspace(g: Callable, x_eval, beta: float, support_radius: float = 10.0,
                             scale: float = 1.0, n_levels: int = 5, n_nodes: int = 20,
                             return_info: bool = False):
    """Lambda^beta g by the principal-value integral with Richardson in epsilon.

    The principal value is written with symmetric pairs, ``2g(x) - g(x+h) -
    g(x-h)``; for beta >= 1 this is the same as adding the ``g'(x)(y-x)``
    regularisation.  ``g`` must vanish (to working precision) outside
    ``|y| <= support_radius``.  The truncated integrals I(eps) for eps =
    eps0 / 2^m are extrapolated using their expansion in eps^(2-beta),
    eps^(4-beta), ...; a non-contracting sequence is flagged with a
    :class:`ConvergenceWarning`.
    """
    if not 0.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (0, 2), got {beta}")
    xs = np.atleast_1d(np.asarray(x_eval, dtype=float))
    cb = laplacian_constant(float(beta))
    eps0 = 0.05 * scale
    epsilons = eps0 * 2.0 ** -np.arange(n_levels)
    max_width = 0.1 * scale
    out = np.empty(xs.shape)
    infos = []
    for i, x in enumerate(xs):
        upper = abs(x) + support_radius
        gx = float(g(np.array([x]))[0])
        vals = []
        tail_inner = _second_difference_integral(g, x, beta, eps0, upper, max_width, n_nodes)
        for e in epsilons:
            inner = 0.0
            if e < eps0:
                inner = _second_difference_integral(g, x, beta, e, eps0, max_width, n_nodes)
            vals.append(inner + tail_inner + 2.0 * gx * upper ** (-beta) / beta)
        vals = np.array(vals)
        table = _richardson_eps(vals, epsilons, beta)
        diffs = np.abs(np.diff(vals))
        converging = bool(np.all(diffs[1:] <= diffs[:-1] * (1 + 1e-12) + 1e-300))
        if not converging:
            warnings.warn(f"epsilon sequence not contracting at x={x:g}", ConvergenceWarning)
        out[i] = cb * table
        infos.append({"x": float(x), "partial": vals * cb, "converging": converging})
    result = out.reshape(np.shape(x_eval)) if np.ndim(x_eval) else out[0]
    return (result, infos) if return_info else result


def _richardson_eps(vals, epsilons, beta):
    m = len(vals)
    powers = (2.0 - beta) + 2.0 * np.arange(m - 1)
    mat = np.column_stack([np.ones(m)] + [epsilons ** p for p in powers])
    return float(np.linalg.solve(mat, vals)[0])


def frac_laplacian_odd(f: Callable, x_eval, beta: float, support: float,
                       breakpoints=(), tail_power: Optional[float] = None,
                       n_nodes: int = 24) -> np.ndarray:
    """Lambda^beta f for odd ``f`` through the half-line representation.

    ``f`` may be singular like y^{-delta} (delta < 2) at the origin.  Beyond
    ``support`` it is zero, or continued as ``f(R) (R/y)^q`` when
    ``tail_power`` q is given.  The near field |y - x| < h0 uses symmetric
    pairs with a Jacobi rule for the h^{1-beta} weight.
    """
    if not 0.0 < beta < 2.0:
        raise ValueError(f"beta must lie in (0, 2), got {beta}")
    xs = np.asarray(x_eval, dtype=float)
    out = np.zeros(xs.shape)
    cb = laplacian_constant(float(beta))
    tj, wj = gauss_jacobi_01(n_nodes, 1.0 - beta)
    bps = tuple(float(b) for b in breakpoints)
    R = float(support)
    q = -1.0 - beta
    for idx, xv in np.ndenumerate(xs):
        x = abs(xv)
        if x == 0.0:
            continue
        h0 = 0.5 * x
        for b in bps:
            if b != x and abs(b - x) < h0:
                h0 = abs(b - x)
        fx = float(f(np.array([x]))[0])
        # near field: int_0^h0 (2f(x) - f(x+h) - f(x-h)) h^{-1-beta} dh
        hs = h0 * tj
        d = 2.0 * fx - f(x + hs) - f(x - hs)
        total = h0 ** (2.0 - beta) * np.sum(wj * d / (hs * hs))
        # far field of the |x-y| kernel, plus the whole (x+y) kernel
        for a, b in _segments([0.0, x - h0, x + h0, R] + list(bps), 0.0, R):
            if a == x - h0 and b == x + h0:
                # (x+y) kernel only inside the near zone
                ys, ws = legendre_panels(np.linspace(a, b, 5), n_nodes)
                total += np.sum(ws * (fx + f(ys)) * (x + ys) ** q)
                continue
            near = (x - h0, x + h0)
            breaks = _panels_toward(a, b, toward_a=(a == 0.0) or (a in bps) or (a in near),
                                    toward_b=(b in bps) or (b in near))
            ys, ws = legendre_panels(breaks, n_nodes)
            fy = f(ys)
            with np.errstate(divide="ignore", invalid="ignore"):
                summ = np.abs(x - ys) ** q + (x + ys) ** q
            total += np.sum(ws * (fx * summ - fy * odd_kernel_difference(x, ys, q)))
        total += fx * ((R - x) ** -beta + (R + x) ** -beta) / beta
        if tail_power is not None:
            # kernel difference ~ 2(1+beta) x y^{-2-beta} for y >> x
            fR = float(f(np.array([R]))[0])
            total -= 2.0 * (1.0 + beta) * x * fR * R ** (-1.0 - beta) / (tail_power + 1.0 + beta)
        out[idx] = np.sign(xv) * cb * total
    return out
