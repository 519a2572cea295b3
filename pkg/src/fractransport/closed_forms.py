"""Fractional operators applied to pure power laws.

For g(x) = |x|^{-delta} sgn(x) homogeneity gives

    Lambda^{-alpha} g = C_{alpha,delta} |x|^{alpha-delta} sgn(x),
    Lambda^{beta}  g = C_{beta,delta}  |x|^{-delta-beta} sgn(x),

and the constants reduce to one-dimensional integrals over y = |y/x| that
are evaluated here twice: split-domain Gauss-Jacobi with exponents matched
to each endpoint singularity, and tanh-sinh on the same panels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .fractional import laplacian_constant, odd_kernel_difference, riesz_constant, riesz_potential_odd
from .gamma_mellin import complex_gamma
from .quadrature import jacobi_panel, legendre_panels, tanh_sinh_panel

__all__ = [
    "PowerLawConstant",
    "riesz_power_constant",
    "laplacian_power_constant",
    "TruncatedRieszBound",
    "truncated_riesz_bound",
    "fourier_power_law",
    "fourier_power_law_quadrature",
    "even_power_symbol",
]


@dataclass(frozen=True)
class PowerLawConstant:
    kind: str
    alpha_or_beta: float
    delta: float
    value: float
    quadrature_error_estimate: float
    raw_integral: float
    calibration: float


def _smooth_quotient(power):
    """r -> ((1-r)^p - (1+r)^p) / r, finite at r = 0."""

    def e(r):
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        small = r < 1e-8
        out[small] = -2.0 * power
        rr = r[~small]
        out[~small] = odd_kernel_difference(1.0, rr, power) / rr
        return out

    return e


def _riesz_panels(alpha, delta):
    """(smooth factor, weight exponent) for the four panels of the Riesz integral."""
    p = alpha - 1.0
    e = _smooth_quotient(p)
    return [
        # y in (0, 1/2]: y^{-delta} D(y) = y^{1-delta} E(y)
        (lambda y: e(y), 0.5, 1.0 - delta, "y"),
        # y = 1 - d: d^{alpha-1} (1-d)^{-delta}, minus a smooth remainder
        (lambda d: (1.0 - d) ** -delta, 0.5, p, "d"),
        (lambda d: (1.0 + d) ** -delta, 1.0, p, "d"),
        # y = 2/s on [2, inf): 2^{alpha-delta-1} s^{delta-alpha} E(s/2)
        (lambda s: 2.0 ** (alpha - delta - 1.0) * e(0.5 * s), 1.0, delta - alpha, "s"),
    ]


def _riesz_smooth_parts(alpha, delta):
    p = alpha - 1.0

    def left(d):
        return -((2.0 - d) ** p) * (1.0 - d) ** -delta

    def right(d):
        return -((2.0 + d) ** p) * (1.0 + d) ** -delta

    return left, right


def _riesz_integral_jacobi(alpha, delta, n=40):
    total = 0.0
    for smooth, h, w, _ in _riesz_panels(alpha, delta):
        total += jacobi_panel(smooth, h, w, n)
    left, right = _riesz_smooth_parts(alpha, delta)
    for fn, h in ((left, 0.5), (right, 1.0)):
        xs, ws = legendre_panels(np.linspace(0.0, h, 5), 20)
        total += np.sum(ws * fn(xs))
    return float(total)


def _tanh_sinh_weighted(smooth, h, w):
    """tanh-sinh for d^w smooth(d) on (0, h].

    For w close to -1 the mass below the smallest representable node is not
    negligible, so d = h v^k with k = 1/(1+w) is substituted first.
    """
    if w > -0.8:
        return tanh_sinh_panel(lambda d: d ** w * smooth(d), h)
    k = 1.0 / (1.0 + w)
    return h ** (1.0 + w) * k * tanh_sinh_panel(lambda v: smooth(h * v ** k), 1.0)


def _riesz_integral_tanh_sinh(alpha, delta):
    total = 0.0
    for smooth, h, w, _ in _riesz_panels(alpha, delta):
        total += _tanh_sinh_weighted(smooth, h, w)
    left, right = _riesz_smooth_parts(alpha, delta)
    total += tanh_sinh_panel(left, 0.5) + tanh_sinh_panel(right, 1.0)
    return float(total)


def riesz_power_constant(alpha: float, delta: float) -> PowerLawConstant:
    """C_{alpha,delta} in Lambda^{-alpha}(|x|^{-delta} sgn x) = C |x|^{alpha-delta} sgn x."""
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < delta < 2.0:
        raise ValueError(f"delta must lie in (0, 2), got {delta}; the integral diverges otherwise")
    a = _riesz_integral_jacobi(alpha, delta)
    b = _riesz_integral_tanh_sinh(alpha, delta)
    cal = riesz_constant(float(alpha))
    return PowerLawConstant("riesz", alpha, delta, cal * a, abs(a - b) / abs(a), a, cal)


def _laplacian_parts(beta, delta):
    """Jacobi-weighted and smooth pieces of the Lambda^beta power-law integral."""
    q = -1.0 - beta
    e = _smooth_quotient(q)

    def near_zero_smooth(y):
        return (1.0 - y) ** q + (1.0 + y) ** q

    def one_minus_pow_over(d, sign):
        # (1 - (1 + sign d)^{-delta}) / d, stable for small d
        d = np.asarray(d, dtype=float)
        safe = np.where(d > 0, d, 0.5)
        return np.where(d > 0, -np.expm1(-delta * np.log1p(sign * safe)) / safe, sign * delta)

    weighted = [
        # y in (0, 1/2]: -y^{1-delta} E(y)
        (lambda y: -e(y), 0.5, 1.0 - delta),
        # y = 1 -+ d: (1 - y^{-delta}) / d^{1+beta}
        (lambda d: one_minus_pow_over(d, -1.0), 0.5, -beta),
        (lambda d: one_minus_pow_over(d, 1.0), 1.0, -beta),
        # y = 2/s: both power families of the far field
        (lambda s: 2.0 ** -beta * ((1.0 - 0.5 * s) ** q + (1.0 + 0.5 * s) ** q), 1.0, beta - 1.0),
        (lambda s: -(2.0 ** (-delta - beta - 1.0)) * e(0.5 * s), 1.0, delta + beta),
    ]
    smooth = [
        (near_zero_smooth, 0.5),
        (lambda d: (1.0 + (1.0 - d) ** -delta) * (2.0 - d) ** q, 0.5),
        (lambda d: (1.0 + (1.0 + d) ** -delta) * (2.0 + d) ** q, 1.0),
    ]
    return weighted, smooth


def laplacian_power_constant(beta: float, delta: float) -> PowerLawConstant:
    """C_{beta,delta} in Lambda^{beta}(|x|^{-delta} sgn x) = C |x|^{-delta-beta} sgn x."""
    if beta == 0.0:
        return PowerLawConstant("laplacian", 0.0, delta, 1.0, 0.0, 1.0, 1.0)
    if not 0.0 < beta < 1.0:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    if not 0.0 < delta < 2.0:
        raise ValueError(f"delta must lie in (0, 2), got {delta}; the integral diverges otherwise")
    weighted, smooth = _laplacian_parts(beta, delta)
    a = sum(jacobi_panel(fn, h, w, 40) for fn, h, w in weighted)
    b = sum(_tanh_sinh_weighted(fn, h, w) for fn, h, w in weighted)
    for fn, h in smooth:
        xs, ws = legendre_panels(np.linspace(0.0, h, 5), 20)
        a += np.sum(ws * fn(xs))
        b += tanh_sinh_panel(fn, h)
    a, b = float(a), float(b)
    cal = laplacian_constant(float(beta))
    return PowerLawConstant("laplacian", beta, delta, cal * a, abs(a - b) / abs(a), a, cal)


class TruncatedRieszBound(NamedTuple):
    value: float
    sup_inner: float
    sup_outer: float
    argmax: float
    stable: bool


def truncated_riesz_bound(alpha: float, alpha1: float, inner: float = 1e2,
                          outer: float = 1e3, n_points: int = 400) -> TruncatedRieszBound:
    """sup |Lambda^{-alpha} g| for g = |x|^{-alpha1} sgn(x) on |x| >= 1.

    The sup is taken over x > 0 (the output is odd) on a grid that is dense
    around the jump at x = 1 and log-spaced out to ``outer``.  ``stable``
    reports whether the sup over ``|x| <= inner`` is within 1% of the sup over
    ``|x| <= outer``; a sup still growing at the window edge is not stable.
    """
    if not 0.0 < alpha < alpha1 < 1.0:
        raise ValueError(f"need 0 < alpha < alpha1 < 1, got ({alpha}, {alpha1})")

    def g(y):
        y = np.asarray(y, dtype=float)
        return np.where(y >= 1.0, np.abs(y) ** -alpha1, 0.0)

    near = 1.0 + np.concatenate((-np.geomspace(0.5, 1e-6, 60), [0.0], np.geomspace(1e-6, 1.0, 80)))
    xs = np.unique(np.concatenate((np.geomspace(1e-3, outer, n_points), near)))
    support = 1e6 * outer
    vals = np.abs(riesz_potential_odd(g, xs, alpha, support=support, breakpoints=(1.0,),
                                      tail_power=alpha1))
    sup_outer = float(vals.max())
    sup_inner = float(vals[xs <= inner].max())
    stable = bool(abs(sup_outer - sup_inner) <= 0.01 * sup_outer and vals[-1] < sup_outer)
    return TruncatedRieszBound(sup_outer, sup_inner, sup_outer, float(xs[np.argmax(vals)]), stable)


def _check_strip(z):
    if not 0.0 < np.real(z) < 1.0:
        raise ValueError(f"need 0 < Re z < 1, got {z}")


def fourier_power_law(z, xi):
    """int |x|^{-z} e^{-i x xi} dx in closed form."""
    _check_strip(z)
    xi = np.asarray(xi, dtype=float)
    if np.any(xi == 0):
        raise ValueError("xi must be nonzero")
    z = complex(z)
    out = (np.sqrt(np.pi) * 2.0 ** (1.0 - z) * complex_gamma((1.0 - z) / 2.0)
           / complex_gamma(z / 2.0) * np.abs(xi) ** (z - 1.0))
    return out


def _dyadic_power_integral(fn, z, h, levels=60, n=20):
    """int_0^h t^{-z} fn(t) dt for complex z; fn smooth with fn(0) known."""
    breaks = h * 2.0 ** -np.arange(levels, -1, -1, dtype=float)
    ts, ws = legendre_panels(breaks, n)
    body = np.sum(ws * ts ** (-z) * fn(ts))
    eps = breaks[0]
    return body + fn(np.array([0.0]))[0] * eps ** (1.0 - z) / (1.0 - z)


def fourier_power_law_quadrature(z, xi) -> complex:
    """Oscillatory quadrature of int |x|^{-z} e^{-i x xi} dx, independent of Gamma.

    The even integrand gives 2 xi^{z-1} int_0^inf t^{-z} cos t dt.  The piece on
    (0, 1] is done with dyadic Gauss-Legendre panels and an analytic remainder
    at the origin; the oscillatory tail uses QUADPACK's Fourier-weight routine,
    which sums cycle integrals with epsilon-algorithm extrapolation.
    """
    _check_strip(z)
    xi = abs(float(xi))
    if xi == 0:
        raise ValueError("xi must be nonzero")
    z = complex(z)
    head = _dyadic_power_integral(np.cos, z, 1.0)

    def re_part(t):
        return np.real(t ** (-z))

    def im_part(t):
        return np.imag(t ** (-z))

    tail_re, _ = integrate.quad(re_part, 1.0, np.inf, weight="cos", wvar=1.0, limlst=200)
    tail_im, _ = integrate.quad(im_part, 1.0, np.inf, weight="cos", wvar=1.0, limlst=200)
    return 2.0 * xi ** (z - 1.0) * (head + tail_re + 1j * tail_im)


def even_power_symbol(alpha: float, theta: float, lam: float):
    """-x^{theta+alpha+1-i lam} d/dx Lambda^alpha |x|^{i lam - theta}, by real-space quadrature.

    Lambda^alpha |x|^{-z} = K(z) |x|^{-z-alpha} with
    K(z) = C int_0^inf (1 - y^{-z}) (|1-y|^{-1-alpha} + (1+y)^{-1-alpha}) dy,
    so the returned value is (z + alpha) K(z), to be compared with
    2^{alpha+1} F_{alpha,theta}(lam).
    """
    z = complex(theta, -lam)
    q = -1.0 - alpha
    # y in (0, 1/2]: int (1 - y^{-z}) k(y), k smooth with k(0) = 2
    k = lambda y: (1.0 - y) ** q + (1.0 + y) ** q
    xs, ws = legendre_panels(np.linspace(0.0, 0.5, 5), 20)
    total = np.sum(ws * k(xs)) - _dyadic_power_integral(k, z, 0.5)

    # y = 1 -+ d: (1 - (1 -+ d)^{-z}) / d * d^{-alpha}, smooth factor complex
    def ratio(d, sign):
        return -np.expm1(-z * np.log1p(sign * d)) / d

    total += jacobi_panel(lambda d: ratio(d, -1.0), 0.5, -alpha, 40)
    total += jacobi_panel(lambda d: ratio(d, 1.0), 1.0, -alpha, 40)
    xs, ws = legendre_panels(np.linspace(0.0, 0.5, 5), 20)
    total += np.sum(ws * (1.0 - (1.0 - xs) ** -z) * (2.0 - xs) ** q)
    xs, ws = legendre_panels(np.linspace(0.0, 1.0, 5), 20)
    total += np.sum(ws * (1.0 - (1.0 + xs) ** -z) * (2.0 + xs) ** q)
    # y = 2/s: (1 - y^{-z}) y^{q} S(s/2) 2/s^2
    S = lambda s: (1.0 - 0.5 * s) ** q + (1.0 + 0.5 * s) ** q
    total += 2.0 ** -alpha * jacobi_panel(S, 1.0, alpha - 1.0, 40)
    # second family: 2^{-z-alpha} s^{z+alpha-1} S(s/2); dyadic because of s^{-i lam}
    total -= 2.0 ** (-z - alpha) * _dyadic_power_integral(S, 1.0 - z - alpha, 1.0)
    return (z + alpha) * laplacian_constant(float(alpha)) * total
