"""Complex Gamma function, the Mellin symbol F_{alpha,theta} and numerical Mellin transforms."""

from __future__ import annotations

import contextlib
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

__all__ = [
    "log_gamma",
    "complex_gamma",
    "corrupted_lanczos",
    "binomial_series_coefficients",
    "MellinSymbol",
    "mellin_symbol",
    "mellin_symbol_series",
    "SharpBound",
    "sharp_bound_check",
    "MellinSample",
    "mellin_transform",
    "SymbolRelationReport",
    "verify_symbol_relation",
]

# Godfrey's coefficients for g = 607/128
_LANCZOS_G = 607.0 / 128.0
_LANCZOS_COEF = np.array([
    0.99999999999999709182,
    57.156235665862923517,
    -59.597960355475491248,
    14.136097974741747174,
    -0.49191381609762019978,
    0.33994649984811888699e-4,
    0.46523628927048575665e-4,
    -0.98374475304879564677e-4,
    0.15808870322491248884e-3,
    -0.21026444172410488319e-3,
    0.21743961811521264320e-3,
    -0.16431810653676389022e-3,
    0.84418223983852743293e-4,
    -0.26190838401581408670e-4,
    0.36899182659531622704e-5,
])
_coef = _LANCZOS_COEF.copy()
_HALF_LOG_2PI = 0.5 * np.log(2.0 * np.pi)


@contextlib.contextmanager
def corrupted_lanczos(scale: float = 1.01):
    """Test hook: perturb the Lanczos coefficients inside the block."""
    global _coef
    saved = _coef
    _coef = _LANCZOS_COEF * np.linspace(1.0, scale, _LANCZOS_COEF.size)
    try:
        yield
    finally:
        _coef = saved


def _lanczos_log(z):
    # valid for Re z >= 0.5
    z = z - 1.0
    series = np.full(z.shape, _coef[0], dtype=complex)
    for i in range(1, _coef.size):
        series = series + _coef[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * np.log(t) - t + np.log(series)


def _log_sin_pi(z):
    out = np.empty(z.shape, dtype=complex)
    small = np.abs(z.imag) <= 20.0
    out[small] = np.log(np.sin(np.pi * z[small]))
    up = ~small & (z.imag > 0)
    zu = z[up]
    out[up] = -1j * np.pi * zu + np.log(0.5j) + np.log1p(-np.exp(2j * np.pi * zu))
    down = ~small & (z.imag < 0)
    zd = np.conj(z[down])
    out[down] = np.conj(-1j * np.pi * zd + np.log(0.5j) + np.log1p(-np.exp(2j * np.pi * zd)))
    return out


def log_gamma(z):
    """A logarithm of Gamma(z) (branch unspecified; ``exp`` of it is exact)."""
    z = np.asarray(z, dtype=complex)
    scalar = z.ndim == 0
    z = np.atleast_1d(z)
    pole = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(pole):
        raise ValueError(f"Gamma has a pole at {z[pole][0].real:g}")
    out = np.empty(z.shape, dtype=complex)
    refl = z.real < 0.5
    out[~refl] = _lanczos_log(z[~refl])
    if np.any(refl):
        zr = z[refl]
        out[refl] = np.log(np.pi) - _log_sin_pi(zr) - _lanczos_log(1.0 - zr)
    return out[0] if scalar else out


def complex_gamma(z):
    """Gamma function for complex arguments (Lanczos with reflection)."""
    return np.exp(log_gamma(z))


def binomial_series_coefficients(alpha: float, n: int) -> np.ndarray:
    """``C_k = (-1)^k binom(-alpha-1, k) = (alpha+1)...(alpha+k)/k!`` for k < n."""
    k = np.arange(1, n)
    return np.concatenate(([1.0], np.cumprod((alpha + k) / k)))


def _check_symbol_domain(alpha, theta):
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not 0.0 < theta < 1.0 - alpha:
        raise ValueError(f"theta must lie in (0, 1 - alpha) = (0, {1 - alpha}), got {theta}")


def mellin_symbol(alpha: float, theta: float, lam):
    """F_{alpha,theta}(lambda), the multiplier of -d/dx Lambda^alpha on |x|^{i lambda - theta}.

    Evaluated as a ratio of four Gamma values in log form, so it stays finite
    for |lambda| in the tens of thousands.
    """
    _check_symbol_domain(alpha, theta)
    lam = np.asarray(lam, dtype=float)
    il = 1j * lam
    logf = (
        log_gamma((1.0 - theta + il) / 2.0)
        - log_gamma((theta - il) / 2.0)
        + log_gamma(1.0 + (theta + alpha - il) / 2.0)
        - log_gamma((1.0 - theta - alpha + il) / 2.0)
    )
    return np.exp(logf)


def _partial_series(alpha, theta, lam, n_terms):
    """Cumulative partial sums (over even k) of the real and imaginary series."""
    coef = binomial_series_coefficients(alpha, 2 * n_terms + 1)
    k = np.arange(0, 2 * n_terms, 2, dtype=float)
    ck = coef[0:2 * n_terms:2]
    ck1 = coef[1:2 * n_terms + 1:2]
    a = k + 1.0 - theta
    b = k + theta + alpha + 2.0
    lam2 = np.asarray(lam, dtype=float)[..., None] ** 2
    real_terms = ck * (
        1.0 / (k + 1.0) + 1.0 / (k + alpha)
        - (k + alpha + 1.0) / (k + 1.0) * (a / (a * a + lam2) + b / (b * b + lam2))
    )
    imag_terms = ck1 * (1.0 / (a * a + lam2) - 1.0 / (b * b + lam2))
    return np.cumsum(real_terms, axis=-1), np.cumsum(imag_terms, axis=-1)


def _richardson_tail(partial, alpha, n_terms):
    # partial sums behave like S + c1 N^(a-1) + c2 N^(a-2) + c3 N^(a-3)
    ns = np.array([n_terms // 8, n_terms // 4, n_terms // 2, n_terms])
    sums = partial[..., ns - 1]
    powers = alpha - np.array([1.0, 2.0, 3.0])
    mat = np.column_stack([np.ones(4)] + [ns.astype(float) ** p for p in powers])
    sol = np.linalg.solve(mat, np.moveaxis(sums, -1, 0).reshape(4, -1))
    return sol[0].reshape(sums.shape[:-1])


def mellin_symbol_series(alpha: float, theta: float, lam, n_terms: int = 10_000,
                         extrapolate: bool = True):
    """Binomial-series form of F_{alpha,theta}(lambda).

    The series only fixes F up to a positive constant; it is pinned by
    matching the Gamma form at lambda = 0.  The partial sums converge like
    N^(alpha-1), so by default the tail is removed by Richardson
    extrapolation over N/8, N/4, N/2, N.
    """
    _check_symbol_domain(alpha, theta)
    if n_terms < 10:
        raise ValueError("n_terms must be at least 10")
    lam = np.asarray(lam, dtype=float)
    grid = np.concatenate(([0.0], np.atleast_1d(lam).ravel()))
    re_part, im_part = _partial_series(alpha, theta, grid, n_terms)
    if extrapolate and n_terms >= 80:
        re_sum = _richardson_tail(re_part, alpha, n_terms)
        im_sum = _richardson_tail(im_part, alpha, n_terms)
    else:
        re_sum, im_sum = re_part[..., -1], im_part[..., -1]
    g = re_sum + 1j * grid * im_sum
    const = mellin_symbol(alpha, theta, 0.0).real / (theta * g[0].real)
    out = const * (theta - 1j * grid[1:]) * g[1:]
    return out.reshape(lam.shape) if lam.ndim else out[0]


@dataclass(frozen=True)
class MellinSymbol:
    alpha: float
    theta: float

    def __post_init__(self):
        _check_symbol_domain(self.alpha, self.theta)

    def __call__(self, lam):
        return mellin_symbol(self.alpha, self.theta, lam)

    def series(self, lam, n_terms: int = 10_000):
        return mellin_symbol_series(self.alpha, self.theta, lam, n_terms)

    @classmethod
    def from_weight(cls, alpha: float, delta: float) -> "MellinSymbol":
        """Symbol paired with the weight x^{-delta}: theta = delta/2 - alpha."""
        return cls(alpha, 0.5 * delta - alpha)


class SharpBound(NamedTuple):
    c_low: float
    c_high: float
    ratio_at_1e3: float
    ratio_at_max: float
    min_real_part: float
    real_part_at_zero: float


def sharp_bound_check(alpha: float, theta: float, lambda_max: float = 1e4,
                      n_samples: int = 4000) -> SharpBound:
    """Empirical range of Re F(lambda) / (1 + |lambda|^alpha) over a log sweep.

    ``ratio_at_*`` report Re F(lambda) / lambda^alpha, which should settle to a
    constant for large lambda.
    """
    if lambda_max < 100:
        raise ValueError("lambda_max must be at least 100")
    lam = np.concatenate(([0.0], np.logspace(-3, np.log10(lambda_max), n_samples)))
    re = mellin_symbol(alpha, theta, lam).real
    ratio = re / (1.0 + lam ** alpha)
    tail = mellin_symbol(alpha, theta, np.array([1e3, lambda_max])).real
    return SharpBound(
        c_low=float(ratio.min()),
        c_high=float(ratio.max()),
        ratio_at_1e3=float(tail[0] / 1e3 ** alpha),
        ratio_at_max=float(tail[1] / lambda_max ** alpha),
        min_real_part=float(re.min()),
        real_part_at_zero=float(re[0]),
    )


@dataclass
class MellinSample:
    lambda_grid: np.ndarray
    values: np.ndarray
    line_abscissa: float

    def parseval_norm(self) -> float:
        """(1/2pi) * integral of |values|^2 d lambda (trapezoid on the grid)."""
        return float(np.trapezoid(np.abs(self.values) ** 2, self.lambda_grid) / (2 * np.pi))


def _log_grid_extent(h, tol, start=(-10.0, 10.0), step=5.0, limit=300.0):
    lo, hi = start
    probe = np.linspace(lo, hi, 2001)
    peak = np.max(np.abs(h(probe)))
    if not np.isfinite(peak) or peak == 0:
        return lo, hi, peak
    while abs(h(np.array([lo])))[0] > tol * peak:
        lo -= step
        if lo < -limit:
            raise ValueError("Mellin integrand does not decay as x -> 0 on this line")
    while abs(h(np.array([hi])))[0] > tol * peak:
        hi += step
        if hi > limit:
            raise ValueError("Mellin integrand does not decay as x -> infinity on this line")
    return lo, hi, peak


def mellin_transform(f, line_abscissa: float, lambda_grid, tol: float = 1e-10,
                     dt: float | None = None) -> MellinSample:
    """Mellin transform ``int_0^inf f(x) x^{sigma + i lambda - 1} dx``.

    With ``x = e^t`` this is the Fourier integral of ``f(e^t) e^{sigma t}``,
    which is sampled on a uniform t-grid wide enough that the integrand has
    dropped below ``tol`` times its peak at both ends.
    """
    sigma = float(line_abscissa)
    lam = np.asarray(lambda_grid, dtype=float)

    def h(t):
        with np.errstate(over="ignore", under="ignore"):
            return f(np.exp(t)) * np.exp(sigma * t)

    lo, hi, peak = _log_grid_extent(h, tol)
    if dt is None:
        lam_max = float(np.max(np.abs(lam))) if lam.size else 0.0
        dt = min(0.05, np.pi / (lam_max + 40.0))
    t = np.arange(lo, hi + dt, dt)
    ht = h(t)
    edge = max(abs(ht[0]), abs(ht[-1]))
    if edge > tol * peak:
        raise ValueError(f"Mellin integrand tail {edge:.3e} exceeds {tol:g} of peak")
    values = np.empty(lam.size, dtype=complex)
    flat = lam.ravel()
    for s in range(0, flat.size, 256):
        chunk = flat[s:s + 256]
        values[s:s + 256] = dt * (np.exp(1j * np.outer(chunk, t)) @ ht)
    return MellinSample(lam, values.reshape(lam.shape), sigma)


class SymbolRelationReport(NamedTuple):
    lambdas: np.ndarray
    a_values: np.ndarray
    b_values: np.ndarray
    predicted_b: np.ndarray
    max_relative_deviation: float
    resolved: np.ndarray


def verify_symbol_relation(profile, alpha: float, delta: float, lambda_max: float = 20.0,
                           n_lambda: int = 201) -> SymbolRelationReport:
    """Compare B(lambda) with 2^{alpha+1} F(lambda) A(lambda).

    ``A`` is the Mellin transform of ``Lambda^{-alpha} u`` against
    ``x^{i lambda - delta/2 - 1}`` and ``B`` that of ``u'`` against
    ``x^{i lambda - delta/2 + alpha}``; both are computed by direct quadrature
    on the half line.  Only the band where ``|A| > 1e-6 max|A|`` is compared.
    """
    from .halfline import mellin_pair

    symbol = MellinSymbol.from_weight(alpha, delta)
    lam = np.linspace(-lambda_max, lambda_max, n_lambda)
    a_vals, b_vals = mellin_pair(profile, alpha, delta, lam)
    predicted = 2.0 ** (alpha + 1.0) * symbol(lam) * a_vals
    amax = float(np.max(np.abs(a_vals)))
    if amax == 0.0:
        if np.any(np.abs(b_vals) > 0):
            raise ValueError("A vanishes identically while B does not")
        return SymbolRelationReport(lam, a_vals, b_vals, predicted, 0.0,
                                    np.zeros(lam.shape, dtype=bool))
    resolved = np.abs(a_vals) > 1e-6 * amax
    if not np.any(resolved):
        raise ValueError("A(lambda) has no resolved band")
    dev = np.abs(b_vals - predicted)[resolved] / np.abs(predicted)[resolved]
    return SymbolRelationReport(lam, a_vals, b_vals, predicted, float(dev.max()), resolved)
