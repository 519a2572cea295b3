"""Certificates evaluated on numerical solutions and test profiles.

* the weighted blowup functional a(t) = int_0^inf (Lambda^{-alpha} u) x^{-delta} dx
  and a Riccati fit da/dt >= C a^2 - K;
* the weighted inequality for odd profiles, computed by direct quadrature and
  through the Mellin/Parseval representation;
* moduli of continuity omega, Omega and the rescaled modulus ratio monitor;
* time integrals of the continuation-criterion quantities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple, Optional

import numpy as np
from scipy.interpolate import PchipInterpolator

from .closed_forms import riesz_power_constant
from .fractional import laplacian_constant, riesz_constant
from .gamma_mellin import MellinSymbol
from .halfline import HalfLineModel, mellin_fft, weighted_integral
from .quadrature import legendre_panels
from .spectral import Field

__all__ = [
    "DiagnosticsRecord",
    "WeightedFunctional",
    "weighted_functional",
    "RiccatiReport",
    "riccati_check",
    "WeightedInequalityResult",
    "weighted_inequality_check",
    "conjectured_inequality_probe",
    "ModulusSpec",
    "build_modulus",
    "modulus_ratio",
    "max_ratio_pair",
    "calibrate_rescale",
    "continuation_criterion_integral",
    "measured_modulus",
    "concave_majorant",
    "riesz_modulus_bound",
    "dissipation_modulus_bound",
    "ContainmentReport",
    "modulus_containment_check",
    "DissipationReport",
    "dissipation_bound_check",
]

_SERIES = (
    "times",
    "sup_norm",
    "l1_norm",
    "lp_norm",
    "gradient_sup",
    "drift_criterion_integrand",
    "remark_criterion_integrand",
    "weighted_a",
    "modulus_ratio",
    "spectral_tail",
    "boundary_fraction",
    "min_positive_side",
    "dt",
    "gradient_l2_sq",
)


@dataclass
class DiagnosticsRecord:
    """Time series sampled at the solver's output times.

    ``step_times`` / ``step_drift`` / ``step_remark`` hold the criterion
    integrands at every time step, for accurate time integrals.
    """

    lp_exponent: float = 4.0
    delta: float = math.nan
    verdict: str = ""
    blowup_time_estimate: Optional[float] = None
    step_times: list = field(default_factory=list)
    step_drift: list = field(default_factory=list)
    step_remark: list = field(default_factory=list)

    def __post_init__(self):
        for name in _SERIES:
            setattr(self, "_" + name, [])

    def append(self, time, **values):
        times = self._times
        if times and not time > times[-1]:
            raise ValueError(f"times must increase strictly ({time} after {times[-1]})")
        times.append(float(time))
        for name in _SERIES[1:]:
            getattr(self, "_" + name).append(float(values.get(name, math.nan)))

    def append_step(self, time, drift, remark):
        self.step_times.append(float(time))
        self.step_drift.append(float(drift))
        self.step_remark.append(float(remark))

    def finalize(self, verdict: str, blowup_time: Optional[float]):
        self.verdict = verdict
        self.blowup_time_estimate = blowup_time

    def __len__(self):
        return len(self._times)

    def as_dict(self) -> dict:
        return {name: np.asarray(getattr(self, "_" + name)) for name in _SERIES}

    def __getattr__(self, name):
        if name in _SERIES:
            return np.asarray(self.__dict__["_" + name])
        raise AttributeError(name)


# ---------------------------------------------------------------------------
# weighted functional a(t)


class WeightedFunctional(NamedTuple):
    value: float
    tail_fraction: float
    contaminated: bool


def _grid_weighted(u: Field, alpha, delta, margin=0.1, panel=0.25, n_nodes=16):
    grid = u.grid
    k = grid.wavenumbers
    absk = np.abs(k)
    sym = np.zeros_like(absk)
    nz = absk > 0
    sym[nz] = absk[nz] ** -alpha if alpha else 1.0
    sym[grid.nyquist] = 0.0
    c = u.spectrum * grid.phase * sym  # coefficients about x = 0
    dx = grid.spacing
    x_lo = 0.5 * dx
    x_max = (0.5 - margin) * grid.box_length
    breaks = np.exp(np.arange(np.log(x_lo), np.log(x_max) + panel, panel))
    breaks[-1] = x_max
    xs, ws = legendre_panels(breaks, n_nodes)
    # odd trigonometric interpolant: w(x) = -2 sum_{k>0} Im(c_k) sin(kx)
    pos = (k > 0) & (np.arange(k.size) != grid.nyquist)
    kp, cp = k[pos], c[pos].imag
    w = np.empty(xs.size)
    for s in range(0, xs.size, 256):
        w[s:s + 256] = -2.0 * np.sin(np.outer(xs[s:s + 256], kp)) @ cp
    slope = -2.0 * float(np.sum(kp * cp))  # w'(0)
    body = float(np.sum(ws * w * xs ** -delta))
    near = slope * x_lo ** (2.0 - delta) / (2.0 - delta)
    w_edge = -2.0 * float(np.sin(x_max * kp) @ cp)
    tail = abs(w_edge) * x_max ** (1.0 - delta) / (delta + 1.0 - alpha)
    total = body + near
    return total, tail


def weighted_functional(u, alpha: float, delta: float, return_info: bool = False):
    """a = int_0^inf (Lambda^{-alpha} u) x^{-delta} dx for odd ``u``.

    ``u`` is a grid :class:`Field` (spectral Riesz potential, integral in log
    x from spacing/2 with the linear model below, up to the half box minus a
    10% margin) or a profile with a ``riesz`` method (analytic tails).  The
    tail beyond the window is estimated from the x^{alpha-2} far field; if it
    exceeds 1% of the total the result is flagged as contaminated.
    """
    if not 2.0 * alpha < delta < 2.0:
        raise ValueError(f"need 2 alpha < delta < 2, got alpha={alpha}, delta={delta}")
    if isinstance(u, Field):
        if u.sup_norm() == 0.0:
            out = WeightedFunctional(0.0, 0.0, False)
        else:
            total, tail = _grid_weighted(u, alpha, delta)
            frac = tail / abs(total) if total != 0 else math.inf
            out = WeightedFunctional(total, frac, frac > 0.01)
    else:
        scale = float(getattr(u, "scale", 1.0))
        model = HalfLineModel(lambda x: u.riesz(x, alpha), 1e-5 * scale, 1e4 * u.extent, 1.0,
                              alpha - 2.0 if alpha > 0 else None)
        total = weighted_integral(model, -delta)
        out = WeightedFunctional(total, 0.0, False)
    return out if return_info else out.value


# ---------------------------------------------------------------------------
# Riccati fit


class RiccatiReport(NamedTuple):
    c_fit: float
    k_fit: float
    c_certified: float
    holds: bool
    n_samples: int
    k_scale: float


def riccati_check(record, u0_l1: float, min_samples: int = 20) -> RiccatiReport:
    """Largest C with da/dt >= C a^2 - K over the a(t) series.

    K = C' (1 + ||u0||_1)^2 is taken from a least-squares fit of da/dt against
    (a^2, 1) and clipped at 0; the certified C is then the smallest
    (da/dt + K) / a^2 over the samples.  A positive certified C is the
    blowup signal.  ``record`` is a DiagnosticsRecord or a (times, a) pair.
    """
    if isinstance(record, DiagnosticsRecord):
        t, a = record.times, record.weighted_a
    else:
        t, a = (np.asarray(v, dtype=float) for v in record)
    ok = np.isfinite(a)
    t, a = t[ok], a[ok]
    if t.size < min_samples:
        raise ValueError(f"a(t) series too short for a fit ({t.size} < {min_samples} samples)")
    dadt = np.gradient(a, t)
    k_scale = (1.0 + u0_l1) ** 2
    if np.all(a == 0):
        return RiccatiReport(0.0, 0.0, 0.0, bool(np.all(dadt == 0)), t.size, k_scale)
    mat = np.column_stack((a * a, -np.ones_like(a)))
    (c_fit, k_fit), *_ = np.linalg.lstsq(mat, dadt, rcond=None)
    k = max(float(k_fit), 0.0)
    nz = a != 0
    c_cert = float(np.min((dadt[nz] + k) / a[nz] ** 2))
    return RiccatiReport(float(c_fit), k / k_scale, c_cert, c_cert > 0, t.size, k_scale)


# ---------------------------------------------------------------------------
# weighted inequality for odd profiles


class WeightedInequalityResult(NamedTuple):
    lhs: float
    rhs_raw: float
    ratio: float
    lhs_mellin: float
    rhs_mellin: float
    route_deviation: float
    indeterminate: bool


def _profile_models(profile, alpha):
    scale = float(getattr(profile, "scale", 1.0))
    ext = float(profile.extent)
    x_lo = 1e-5 * scale
    w = lambda x: profile.riesz(x, alpha)
    return scale, ext, x_lo, w


def weighted_inequality_check(profile, alpha: float, delta: float, mellin: bool = True,
                           dlam: float = 0.02) -> WeightedInequalityResult:
    """Both sides of the weighted inequality for an odd profile.

    lhs = C_{alpha,delta} int_0^inf w u' x^{alpha-delta} dx with w = Lambda^{-alpha} u
    (the outer Riesz potential moved onto the weight), rhs_raw =
    int_0^inf w^2 x^{-1-delta} dx.  With ``mellin`` the same two integrals are
    recomputed as lambda-integrals of |A|^2 weighted by Re(2^{alpha+1} F) and 1.
    """
    if not 0.0 < alpha < 1.0 or not 2.0 * alpha < delta < 2.0:
        raise ValueError(f"need 0 < alpha < 1 and 2 alpha < delta < 2, got ({alpha}, {delta})")
    scale, ext, x_lo, w = _profile_models(profile, alpha)
    const = riesz_power_constant(alpha, delta).value
    prod = HalfLineModel(lambda x: w(x) * profile.derivative(x), x_lo, 3.0 * ext, 1.0, None)
    sq = HalfLineModel(lambda x: w(x) ** 2, x_lo, 1e4 * ext, 2.0, 2.0 * (alpha - 2.0))
    lhs = const * weighted_integral(prod, alpha - delta)
    rhs = weighted_integral(sq, -1.0 - delta)
    lhs_m = rhs_m = dev = math.nan
    if mellin:
        model = HalfLineModel(w, x_lo, 1e4 * ext, 1.0, alpha - 2.0)
        lam, a_vals = mellin_fft(model, -0.5 * delta, dt=0.01, dlam=dlam)
        mag = np.abs(a_vals) ** 2
        sym = 2.0 ** (alpha + 1.0) * MellinSymbol.from_weight(alpha, delta)(lam).real
        dl = lam[1] - lam[0]
        # even integrands on the whole line: trapezoid = dl (f0 + 2 sum f_k)
        rhs_m = dl * (mag[0] + 2.0 * np.sum(mag[1:])) / (2.0 * np.pi)
        lhs_m = const * dl * (sym[0] * mag[0] + 2.0 * np.sum(sym[1:] * mag[1:])) / (2.0 * np.pi)
        dev = abs(lhs_m - lhs) / abs(lhs) if lhs != 0 else math.inf
    indeterminate = not rhs >= 1e-14
    ratio = math.nan if indeterminate else lhs / rhs
    return WeightedInequalityResult(lhs, rhs, ratio, float(lhs_m), float(rhs_m), float(dev), indeterminate)


def conjectured_inequality_probe(profile, alpha: float, delta: float) -> dict:
    """Both sides of the stronger inequality int w u' x^{alpha-delta} >~ int u^2 x^{2alpha-1-delta}.

    Nothing is asserted; small ratios over a family flag candidate
    counterexamples.
    """
    scale, ext, x_lo, w = _profile_models(profile, alpha)
    prod = HalfLineModel(lambda x: w(x) * profile.derivative(x), x_lo, 3.0 * ext, 1.0, None)
    usq = HalfLineModel(lambda x: profile.value(x) ** 2, x_lo, 3.0 * ext, 2.0, None)
    left = weighted_integral(prod, alpha - delta)
    right = weighted_integral(usq, 2.0 * alpha - 1.0 - delta)
    return {"left": left, "right": right, "ratio": left / right if right else math.nan}


# ---------------------------------------------------------------------------
# moduli of continuity


@dataclass(frozen=True)
class ModulusSpec:
    """omega with omega'' = -delta / (r^alpha + r^p), omega(0) = 0, omega'(inf) = 0.

    p = 2 in the critical case, 5 in the subcritical case.  ``Omega`` is
    r^alpha omega(r) + r int_r^inf omega(s) s^{alpha-2} ds (constant set to 1).
    """

    case: str
    alpha: float
    beta: float
    delta_param: float
    r: np.ndarray = field(repr=False)
    omega_values: np.ndarray = field(repr=False)
    omega_prime_values: np.ndarray = field(repr=False)
    Omega_values: np.ndarray = field(repr=False)
    omega_prime_zero: float = 0.0

    @property
    def power(self) -> float:
        return 2.0 if self.case == "critical" else 5.0

    def omega(self, r):
        r = np.asarray(r, dtype=float)
        out = np.empty(r.shape)
        small = r < self.r[0]
        out[small] = self.omega_prime_zero * r[small]
        big = r > self.r[-1]
        mid = ~small & ~big
        out[mid] = self._interp(np.log(r[mid]))
        if np.any(big):
            # omega' ~ delta r^{1-p}/(p-1) beyond the table
            p = self.power
            rb = r[big]
            r1 = self.r[-1]
            if p == 2.0:
                out[big] = self.omega_values[-1] + self.delta_param * np.log(rb / r1)
            else:
                out[big] = self.omega_values[-1] + self.delta_param / ((p - 1) * (p - 2)) * (
                    r1 ** (2 - p) - rb ** (2 - p))
        return out

    @cached_property
    def _interp(self):
        return PchipInterpolator(np.log(self.r), self.omega_values)

    def omega_prime(self, r):
        return np.interp(np.log(r), np.log(self.r), self.omega_prime_values)

    def Omega(self, r):
        return np.interp(np.log(r), np.log(self.r), self.Omega_values)


def build_modulus(case: str, alpha: float, beta: float, delta_param: float,
                  r_min: float = 1e-8, r_max: float = 1e8, per_decade: int = 64) -> ModulusSpec:
    """Tabulate omega, omega' and Omega on a log grid by Gauss-Legendre panels."""
    if case not in ("critical", "subcritical"):
        raise ValueError(f"unknown case {case!r}")
    if not 0.0 < alpha < 1.0:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    crit = abs(beta - (1.0 - alpha)) < 1e-12
    if case == "critical" and not crit:
        raise ValueError(f"critical case needs beta = 1 - alpha, got beta={beta}, alpha={alpha}")
    if case == "subcritical" and not (1.0 - alpha < beta < 2.0):
        raise ValueError(f"subcritical case needs 1 - alpha < beta < 2, got beta={beta}")
    if delta_param <= 0:
        raise ValueError("delta_param must be positive")
    p = 2.0 if case == "critical" else 5.0
    m = int(round(np.log10(r_max / r_min) * per_decade))
    r = np.geomspace(r_min, r_max, m + 1)
    second = lambda s: -delta_param / (s ** alpha + s ** p)
    t_nodes, t_w = np.polynomial.legendre.leggauss(12)

    def panel_integrals(fn, edges):
        a, b = edges[:-1, None], edges[1:, None]
        half = 0.5 * (b - a)
        xs = a + half * (t_nodes[None, :] + 1.0)
        return np.sum(half * t_w[None, :] * fn(xs), axis=1)

    # omega'(r) = int_r^inf delta/(s^a + s^p) ds, tail beyond r_max ~ delta r^{1-p}/(p-1)
    pieces = panel_integrals(lambda s: -second(s), r)
    tail = delta_param * r_max ** (1.0 - p) / (p - 1.0)
    omega_p = np.concatenate((np.cumsum(pieces[::-1])[::-1], [0.0])) + tail
    # omega'(0) adds int_0^{r_min} ~ delta r_min^{1-alpha}/(1-alpha)
    op0 = float(omega_p[0] + delta_param * r_min ** (1.0 - alpha) / (1.0 - alpha))

    def omega_prime_at(s):
        # omega'(s) = omega'(r_k) + int_s^{r_k} with r_k the next table point
        idx = np.clip(np.searchsorted(r, s), 1, r.size - 1)
        half = 0.5 * (r[idx] - s)
        xs = s[..., None] + half[..., None] * (t_nodes + 1.0)
        return omega_p[idx] + np.sum(half[..., None] * t_w * (-second(xs)), axis=-1)

    incr = panel_integrals(omega_prime_at, r)
    omega = np.concatenate(([op0 * r_min], op0 * r_min + np.cumsum(incr)))
    # Omega(r) = r^alpha omega(r) + r int_r^inf omega(s) s^{alpha-2} ds
    interp = PchipInterpolator(np.log(r), omega)
    g = lambda s: interp(np.log(s)) * s ** (alpha - 2.0)
    tail_pieces = panel_integrals(g, r)
    if p == 2.0:
        # omega ~ omega(R) + delta log(s/R): tail integral in closed form
        R, wR = r_max, omega[-1]
        far = wR * R ** (alpha - 1) / (1 - alpha) + delta_param * R ** (alpha - 1) / (1 - alpha) ** 2
    else:
        far = omega[-1] * r_max ** (alpha - 1.0) / (1.0 - alpha)
    inner_int = np.concatenate((np.cumsum(tail_pieces[::-1])[::-1], [0.0])) + far
    Omega = r ** alpha * omega + r * inner_int
    return ModulusSpec(case, alpha, beta, delta_param, r, omega, omega_p, Omega, op0)


def _pair_sup(values, dx, stride):
    """max over offsets m of max_i |v[i+m] - v[i]|, returned per distance."""
    v = values[::stride]
    n = v.size
    dists = np.arange(1, n) * dx * stride
    best = np.empty(n - 1)
    for m in range(1, n):
        best[m - 1] = np.max(np.abs(v[m:] - v[:-m]))
    return dists, best


def _stride_for(n, max_pairs=10 ** 7):
    s = 1
    while (n // s) ** 2 // 2 > max_pairs:
        s += 1
    return s


def modulus_ratio(u: Field, spec: ModulusSpec, rescale: float, alpha: Optional[float] = None,
                  beta: Optional[float] = None, stride: Optional[int] = None) -> float:
    """sup over grid pairs of lambda^{alpha+beta-1} |u(X)-u(Y)| / omega(|X-Y|/lambda)."""
    a = spec.alpha if alpha is None else alpha
    b = spec.beta if beta is None else beta
    vals = u.values if isinstance(u, Field) else np.asarray(u)
    if not np.any(vals):
        return 0.0
    dx = u.grid.spacing
    s = stride or _stride_for(vals.size)
    dists, best = _pair_sup(vals, dx, s)
    scale = rescale ** (a + b - 1.0)
    return float(np.max(scale * best / spec.omega(dists / rescale)))


def max_ratio_pair(values, dx, x0, omega):
    """Maximising pair (x, y) of (u(x) - u(y)) / omega(|x - y|) over a 1D sample."""
    n = values.size
    best, arg = -np.inf, (0, 0)
    for m in range(1, n):
        diff = values[m:] - values[:-m]
        ratio_row = diff / omega(np.array([m * dx]))[0]
        i = int(np.argmax(np.abs(ratio_row)))
        if abs(ratio_row[i]) > best:
            best = abs(ratio_row[i])
            arg = (i + m, i) if ratio_row[i] > 0 else (i, i + m)
    return best, x0 + arg[0] * dx, x0 + arg[1] * dx


def calibrate_rescale(u: Field, spec: ModulusSpec, target: float = 0.5, alpha=None, beta=None,
                      lo: float = 1e-6, hi: float = 1e6) -> float:
    """lambda with modulus_ratio(u, spec, lambda) = target, by bisection in log lambda.

    The bracket [lo, hi] is widened by factors of 1e3 (up to 1e-30 and 1e30)
    until it contains the target.
    """
    s = _stride_for(u.values.size)
    f = lambda lam: modulus_ratio(u, spec, lam, alpha, beta, s) - target
    while f(lo) > 0 and lo > 1e-30:
        lo *= 1e-3
    while f(hi) < 0 and hi < 1e30:
        hi *= 1e3
    if f(lo) > 0 or f(hi) < 0:
        raise ValueError("target ratio not bracketed by the rescale interval")
    a, b = np.log(lo), np.log(hi)
    for _ in range(60):
        mid = 0.5 * (a + b)
        if f(np.exp(mid)) > 0:
            b = mid
        else:
            a = mid
    return float(np.exp(a))


def continuation_criterion_integral(record: DiagnosticsRecord, variant: str = "drift") -> float:
    """Trapezoid integral in time of ||d_x Lambda^{-alpha} u||_inf (or ||Lambda^{1-alpha} u||_inf)."""
    if variant not in ("drift", "remark"):
        raise ValueError(f"unknown variant {variant!r}")
    if record.step_times:
        t = np.asarray(record.step_times)
        y = np.asarray(record.step_drift if variant == "drift" else record.step_remark)
    else:
        t = record.times
        y = record.drift_criterion_integrand if variant == "drift" else record.remark_criterion_integrand
    if t.size < 2:
        return 0.0
    return float(np.trapezoid(y, t))


# ---------------------------------------------------------------------------
# modulus estimates on sampled functions


def measured_modulus(values, dx, max_offset=None):
    """(r, sup_{|x-y| = r} |f(x) - f(y)|) over grid offsets."""
    n = values.size
    m_max = n - 1 if max_offset is None else min(max_offset, n - 1)
    r = np.arange(1, m_max + 1) * dx
    out = np.array([np.max(np.abs(values[m:] - values[:-m])) for m in range(1, m_max + 1)])
    return r, out


def concave_majorant(r, w):
    """Least concave majorant through the origin of (r, w), evaluated at r."""
    pts_r = np.concatenate(([0.0], r))
    pts_w = np.concatenate(([0.0], np.maximum.accumulate(w)))
    hull = [0]
    for i in range(1, pts_r.size):
        while len(hull) >= 2:
            i0, i1 = hull[-2], hull[-1]
            # drop i1 if it lies below the chord i0 -> i
            cross = (pts_r[i1] - pts_r[i0]) * (pts_w[i] - pts_w[i0]) - (pts_w[i1] - pts_w[i0]) * (pts_r[i] - pts_r[i0])
            if cross >= 0:
                hull.pop()
            else:
                break
        hull.append(i)
    return np.interp(r, pts_r[hull], pts_w[hull])


def riesz_modulus_bound(r, omega, alpha):
    """Explicit Omega bound for the modulus of Lambda^{-alpha} u from a concave modulus omega of u.

    Splitting the difference kernel at |s| = r gives
    2 C_a ((3/2)^a + (1/2)^a)/a r^a omega(r) + 2 C_a (1-a) 2^{2-a} r int_r^inf omega(s) s^{a-2} ds;
    omega is continued as a constant beyond the last tabulated r.
    """
    ca = riesz_constant(float(alpha))
    r = np.asarray(r, dtype=float)
    om = np.asarray(omega, dtype=float)
    g = om * r ** (alpha - 2.0)
    # cumulative trapezoid from the right, plus a constant-omega tail
    seg = 0.5 * (g[1:] + g[:-1]) * np.diff(r)
    tail = om[-1] * r[-1] ** (alpha - 1.0) / (1.0 - alpha)
    integral = np.concatenate((np.cumsum(seg[::-1])[::-1], [0.0])) + tail
    near = 2.0 * ca * (1.5 ** alpha + 0.5 ** alpha) / alpha * r ** alpha * om
    far = 2.0 * ca * (1.0 - alpha) * 2.0 ** (2.0 - alpha) * r * integral
    return near + far


def dissipation_modulus_bound(omega, r: float, beta: float, n_nodes: int = 24) -> float:
    """Right side of the dissipation estimate at a breakthrough pair with separation r.

    C_b int_0^{r/2} (omega(r+2e) + omega(r-2e) - 2 omega(r)) e^{-1-b} de
      + C_b int_{r/2}^inf (omega(2e+r) - omega(2e-r) - 2 omega(r)) e^{-1-b} de
    """
    cb = laplacian_constant(float(beta))
    w_r = float(omega(np.array([r]))[0])
    # below e0 the second difference cancels; use 4 e^2 omega''(r) there
    e0 = 1e-3 * r
    second_diff = lambda e: omega(r + 2 * e) + omega(r - 2 * e) - 2 * w_r
    curv = float(second_diff(np.array([e0]))[0]) / (4.0 * e0 * e0)
    breaks = np.geomspace(e0, 0.5 * r, 80)
    es, ws = legendre_panels(breaks, n_nodes)
    first = np.sum(ws * second_diff(es) * es ** (-1.0 - beta))
    first += 4.0 * curv * e0 ** (2.0 - beta) / (2.0 - beta)
    upper = r * 1e8
    breaks = np.geomspace(0.5 * r, upper, 400)
    es, ws = legendre_panels(breaks, n_nodes)
    second = np.sum(ws * (omega(2 * es + r) - omega(2 * es - r) - 2 * w_r) * es ** (-1.0 - beta))
    # beyond ``upper`` omega(2e+r) - omega(2e-r) is negligible against 2 omega(r)
    second -= 2.0 * w_r * upper ** -beta / beta
    return float(cb * (first + second))


class ContainmentReport(NamedTuple):
    r: np.ndarray
    measured: np.ndarray
    bound: np.ndarray
    worst_ratio: float
    holds: bool


def modulus_containment_check(profile, alpha: float, half_width: Optional[float] = None,
                              n_samples: int = 2001, slack: float = 0.05) -> ContainmentReport:
    """Measured modulus of Lambda^{-alpha} u against the explicit bound built from u's modulus.

    ``profile`` needs ``value`` and ``riesz``; both are sampled on
    [-half_width, half_width].  The modulus of u is the least concave majorant
    of its measured modulus.
    """
    if half_width is None:
        half_width = 3.0 * float(profile.extent)
    x = np.linspace(-half_width, half_width, n_samples)
    dx = x[1] - x[0]
    r, om_u = measured_modulus(profile.value(x), dx)
    omega = concave_majorant(r, om_u)
    _, om_w = measured_modulus(profile.riesz(x, alpha), dx)
    bound = riesz_modulus_bound(r, omega, alpha)
    ratio = float(np.max(om_w / bound))
    return ContainmentReport(r, om_w, bound, ratio, ratio <= 1.0 + slack)


class DissipationReport(NamedTuple):
    x: float
    y: float
    rho: float
    lhs: float
    bound: float
    holds: bool


def dissipation_bound_check(profile, omega, beta: float, half_width: Optional[float] = None,
                            n_samples: int = 1201, slack: float = 0.05) -> DissipationReport:
    """-Lambda^beta u(x) + Lambda^beta u(y) at the pair maximising (u(x)-u(y))/omega(|x-y|).

    The modulus is scaled to omega~ = rho omega with rho the maximal ratio, so
    u has modulus omega~ and touches it at (x, y); the left side must not
    exceed the dissipation bound for omega~ (a negative number) by more than
    ``slack`` of its size.  The grid maximiser is polished by Nelder-Mead.
    """
    from scipy.optimize import minimize

    if half_width is None:
        half_width = 3.0 * float(profile.extent)
    xs = np.linspace(-half_width, half_width, n_samples)
    dx = xs[1] - xs[0]
    _, x0, y0 = max_ratio_pair(profile.value(xs), dx, xs[0], omega)

    def neg_ratio(p):
        d = abs(p[0] - p[1])
        if d == 0:
            return 0.0
        diff = profile.value(np.array([p[0]]))[0] - profile.value(np.array([p[1]]))[0]
        return -diff / omega(np.array([d]))[0]

    res = minimize(neg_ratio, [x0, y0], method="Nelder-Mead",
                   options={"xatol": 1e-10, "fatol": 1e-14, "maxiter": 4000})
    x, y = (float(v) for v in res.x)
    rho = -float(res.fun)
    scaled = lambda s: rho * omega(s)
    r = abs(x - y)
    lam = profile.fractional(np.array([x, y]), beta)
    lhs = float(-lam[0] + lam[1])
    bound = dissipation_modulus_bound(scaled, r, beta)
    return DissipationReport(x, y, rho, lhs, bound, lhs <= bound + slack * abs(bound))
