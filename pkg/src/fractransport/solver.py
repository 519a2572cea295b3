"""Pseudo-spectral integration of u_t = (Lambda^{-alpha} u) u_x - nu Lambda^beta u.

Time stepping is integrating-factor RK4 on the real-FFT coefficients: the
linear propagator exp(-nu |k|^beta t) is applied exactly, the quadratic drift
is advanced by the four RK stages with 2/3-rule dealiasing in every stage.
"""

from __future__ import annotations

import math
import time as _time
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .diagnostics import DiagnosticsRecord, ModulusSpec, modulus_ratio, weighted_functional
from .fractional import boundary_fraction, laplacian_constant, riesz_constant
from .spectral import Field, Grid, bump

__all__ = [
    "InitialDataSpec",
    "SimConfig",
    "StepState",
    "RunResult",
    "NonFiniteState",
    "step",
    "adapt_dt",
    "run",
    "estimate_blowup_time",
    "KernelReport",
    "linear_kernel_check",
    "VERDICTS",
]

VERDICTS = ("completed", "blowup_detected", "resolution_lost", "boundary_contaminated")


class NonFiniteState(FloatingPointError):
    """Raised when a step produces NaN or Inf."""


@dataclass(frozen=True)
class InitialDataSpec:
    family: str = "odd_gaussian"
    amplitude: float = 1.0
    width: float = 1.0
    samples: Optional[tuple] = None

    def __post_init__(self):
        if self.family not in ("odd_gaussian", "odd_bump", "custom_samples"):
            raise ValueError(f"unknown initial data family {self.family!r}")
        if self.width <= 0:
            raise ValueError("width must be positive")
        if self.family == "custom_samples" and self.samples is None:
            raise ValueError("custom_samples needs samples")

    def evaluate(self, grid: Grid) -> Field:
        x = grid.x
        if self.family == "odd_gaussian":
            vals = self.amplitude * x * np.exp(-(x / self.width) ** 2)
            return Field(grid, vals, parity="odd")
        if self.family == "odd_bump":
            vals = self.amplitude * x * bump(x / self.width)
            return Field(grid, vals, parity="odd")
        vals = np.asarray(self.samples, dtype=float)
        if vals.shape != (grid.n_points,):
            raise ValueError(f"custom samples have shape {vals.shape}, grid needs {grid.n_points}")
        f = Field(grid, vals)
        if f.parity_error("odd") <= 1e-12 * max(1.0, f.sup_norm()):
            f.parity = "odd"
        return f

    @property
    def support_radius(self) -> float:
        if self.family == "odd_gaussian":
            return 4.0 * self.width
        if self.family == "odd_bump":
            return 2.0 * self.width
        return math.inf


@dataclass(frozen=True)
class SimConfig:
    alpha: float
    beta: float
    nu: float
    grid: Grid
    initial_data: InitialDataSpec
    t_end: float
    cfl_safety: float = 0.5
    blowup_gradient_threshold: float = 1e6
    spectral_tail_threshold: float = 1e-3
    output_stride: int = 10
    dt_max: Optional[float] = None
    boundary_threshold: float = 5e-2
    confirm_blowup: bool = True
    filter_order: int = 36
    filter_strength: float = 36.0
    lp_exponent: float = 4.0
    weighted_delta: Optional[float] = None
    modulus: Optional[ModulusSpec] = None
    modulus_rescale: Optional[float] = None
    enable_drift: bool = True
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.alpha < 1.0:
            raise ValueError(f"alpha must lie in [0, 1), got {self.alpha}")
        if not 0.0 <= self.beta <= 2.0:
            raise ValueError(f"beta must lie in [0, 2], got {self.beta}")
        if self.nu < 0:
            raise ValueError("nu must be nonnegative")
        if not self.t_end > 0:
            raise ValueError("t_end must be positive")
        if not 0.0 < self.cfl_safety <= 1.0:
            raise ValueError("cfl_safety must lie in (0, 1]")
        if self.output_stride < 1:
            raise ValueError("output_stride must be at least 1")
        if self.spectral_tail_threshold <= 0 or self.blowup_gradient_threshold <= 0:
            raise ValueError("thresholds must be positive")

    @property
    def supercritical(self) -> bool:
        return self.beta < 1.0 - self.alpha

    @property
    def dt_min(self) -> float:
        return 1e-12 * self.t_end

    @property
    def max_step(self) -> float:
        return self.dt_max if self.dt_max is not None else self.t_end / 100.0

    @property
    def delta(self) -> float:
        """Weight exponent of the blowup functional a(t)."""
        if self.weighted_delta is not None:
            return self.weighted_delta
        hi = min(2.0, 2.0 * (1.0 - self.beta))
        lo = 2.0 * self.alpha
        if hi <= lo:
            hi = 2.0
        return lo + 0.5 * (hi - lo)

    def refined(self) -> "SimConfig":
        """Same run at twice the resolution on the same box."""
        g = Grid(2 * self.grid.n_points, self.grid.box_length)
        data = self.initial_data
        if data.family == "custom_samples":
            raise ValueError("custom samples cannot be refined")
        return replace(self, grid=g, confirm_blowup=False)


@dataclass
class StepState:
    field: Field
    time: float
    dt: float
    step_count: int = 0
    drift_sup: float = 0.0

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError("dt must be positive")


class _Operators:
    """Precomputed real-FFT tables for one (config, dt) pair."""

    def __init__(self, config: SimConfig):
        grid = config.grid
        n = grid.n_points
        self.n = n
        j = np.arange(n // 2 + 1)
        k = 2.0 * np.pi * j / grid.box_length
        self.ik = 1j * k
        self.ik[-1] = 0.0
        riesz = np.zeros_like(k)
        riesz[1:] = k[1:] ** -config.alpha if config.alpha else 1.0
        riesz[-1] = 0.0
        self.riesz = riesz
        self.mask = (j <= n // 3).astype(float)
        if config.nu > 0:
            sym = k ** config.beta if config.beta else np.ones_like(k)
            sym[0] = 0.0
            self.linear = -config.nu * sym
        else:
            self.linear = np.zeros_like(k)
        self.filter = None
        if config.nu == 0:
            self.filter = np.exp(-config.filter_strength * (j / (n / 2)) ** config.filter_order)
        self.drift = config.enable_drift
        self._dt = None

    def factors(self, dt):
        if dt != self._dt:
            self._dt = dt
            self.e1 = np.exp(self.linear * dt)
            self.e2 = np.exp(self.linear * dt / 2.0)
        return self.e1, self.e2

    def nonlinear(self, uh):
        if not self.drift:
            return np.zeros_like(uh)
        uh = uh * self.mask
        v = np.fft.irfft(uh * self.riesz, self.n)
        ux = np.fft.irfft(uh * self.ik, self.n)
        return np.fft.rfft(v * ux) * self.mask

    def sups(self, uh):
        """(||Lambda^{-alpha} u||_inf, ||d_x Lambda^{-alpha} u||_inf)."""
        v = np.fft.irfft(uh * self.riesz, self.n)
        vx = np.fft.irfft(uh * self.riesz * self.ik, self.n)
        return float(np.max(np.abs(v))), float(np.max(np.abs(vx)))


def _rk4(ops: _Operators, uh, dt):
    e1, e2 = ops.factors(dt)
    k1 = ops.nonlinear(uh)
    k2 = ops.nonlinear(e2 * (uh + 0.5 * dt * k1))
    k3 = ops.nonlinear(e2 * uh + 0.5 * dt * k2)
    k4 = ops.nonlinear(e1 * uh + dt * e2 * k3)
    out = e1 * uh + dt / 6.0 * (e1 * k1 + 2.0 * e2 * (k2 + k3) + k4)
    if ops.filter is not None:
        out = out * ops.filter
    return out


def _antisymmetrize(uh):
    # x_j = -L/2 + j dx is symmetric about 0, so odd samples have purely
    # imaginary real-FFT coefficients
    out = 1j * uh.imag
    return out


def step(state: StepState, config: SimConfig, _ops: Optional[_Operators] = None) -> StepState:
    """Advance one integrating-factor RK4 step of size ``state.dt``."""
    ops = _ops or _Operators(config)
    f = state.field
    odd = f.parity == "odd"
    uh = np.fft.rfft(f.values)
    new = _rk4(ops, uh, state.dt)
    if odd:
        new = _antisymmetrize(new)
    if not np.all(np.isfinite(new)):
        raise NonFiniteState(f"non-finite field at t={state.time + state.dt:g}")
    values = np.fft.irfft(new, config.grid.n_points)
    out = Field(config.grid, values)
    out.parity = f.parity
    _, drift_sup = ops.sups(new)
    return StepState(out, state.time + state.dt, state.dt, state.step_count + 1, drift_sup)


def adapt_dt(state: StepState, config: SimConfig, velocity_sup: Optional[float] = None) -> float:
    """Transport/criterion-limited step with a 2x growth limiter.

    Returns ``config.dt_min`` (not less) when the rule asks for a smaller step;
    the caller treats that as suspected blowup.
    """
    eps = 1e-12
    if velocity_sup is None:
        ops = _Operators(config)
        velocity_sup, drift_sup = ops.sups(np.fft.rfft(state.field.values))
    else:
        drift_sup = state.drift_sup
    dt = config.cfl_safety * min(config.grid.spacing / max(velocity_sup, eps), 1.0 / max(drift_sup, eps))
    dt = min(dt, 2.0 * state.dt, config.max_step)
    return max(dt, config.dt_min)


def _spectral_tail(uh, n):
    """Energy fraction in the top sixth of the modes kept by the 2/3 rule."""
    energy = np.abs(uh) ** 2
    total = float(np.sum(energy[1:]))
    if total == 0.0:
        return 0.0
    j = np.arange(uh.size)
    kept = n // 3
    return float(np.sum(energy[(j > kept - kept // 6) & (j <= kept)])) / total


def estimate_blowup_time(times, gradients, floor: float = 0.0) -> float:
    """Extrapolate G^{-1} ~ c (T* - t) over the last decade of growth."""
    t = np.asarray(times, dtype=float)
    g = np.asarray(gradients, dtype=float)
    if t.size < 3:
        return float(t[-1]) if t.size else math.nan
    gmax = g[-1]
    sel = (g >= gmax / 10.0) & (g >= floor)
    # keep the contiguous final stretch
    idx = np.nonzero(~sel)[0]
    start = idx[-1] + 1 if idx.size else 0
    tt, gg = t[start:], g[start:]
    if tt.size < 3:
        tt, gg = t[-3:], g[-3:]
    slope, intercept = np.polyfit(tt, 1.0 / gg, 1)
    if slope >= 0:
        return float(t[-1])
    return float(-intercept / slope)


@dataclass
class RunResult:
    record: DiagnosticsRecord
    verdict: str
    blowup_time_estimate: Optional[float] = None
    final_field: Optional[Field] = None
    snapshots: list = field(default_factory=list)
    confirmation: Optional["RunResult"] = None
    wall_time: float = 0.0
    calibrated_constants: dict = field(default_factory=dict)
    raw_verdict: str = ""


def _record_sample(rec: DiagnosticsRecord, config, ops, f: Field, t, dt, tail, drift_sup):
    uh = np.fft.rfft(f.values)
    grid = config.grid
    vals = f.values
    dx = grid.spacing
    ux = np.fft.irfft(uh * ops.ik, grid.n_points)
    lam = np.fft.irfft(uh * _remark_symbol(ops, config), grid.n_points)
    try:
        a = weighted_functional(f, config.alpha, config.delta)
    except ValueError:
        a = math.nan
    mod = math.nan
    if config.modulus is not None and config.modulus_rescale is not None:
        mod = modulus_ratio(f, config.modulus, config.modulus_rescale, config.alpha, config.beta)
    positive = grid.x >= 0
    rec.append(
        time=t,
        sup_norm=float(np.max(np.abs(vals))),
        l1_norm=float(np.sum(np.abs(vals)) * dx),
        lp_norm=float((np.sum(np.abs(vals) ** config.lp_exponent) * dx) ** (1.0 / config.lp_exponent)),
        gradient_sup=float(np.max(np.abs(ux))),
        drift_criterion_integrand=drift_sup,
        remark_criterion_integrand=float(np.max(np.abs(lam))),
        weighted_a=a,
        modulus_ratio=mod,
        spectral_tail=tail,
        boundary_fraction=boundary_fraction(vals),
        min_positive_side=float(np.min(vals[positive])),
        dt=dt,
        gradient_l2_sq=float(np.sum(ux * ux) * dx),
    )


def _remark_symbol(ops, config):
    k = np.abs(ops.ik)
    out = np.zeros_like(k)
    out[1:] = k[1:] ** (1.0 - config.alpha)
    out[-1] = 0.0
    return out


def run(config: SimConfig, keep_snapshots: bool = False, max_steps: int = 10_000_000) -> RunResult:
    """Integrate to ``t_end`` or to an early verdict.

    Termination rules, checked after every step:

    * non-finite field, gradient above ``blowup_gradient_threshold`` with the
      spectral tail still below its threshold, or dt at ``dt_min``: blowup
      candidate;
    * spectral tail above its threshold first: ``resolution_lost``;
    * field magnitude in the outer 10% of the box above
      ``boundary_threshold * ||u||_inf``: ``boundary_contaminated``.

    A blowup candidate is re-run at twice the resolution; it becomes
    ``blowup_detected`` only if the blowup-time estimates agree within 5%.
    """
    t0 = _time.perf_counter()
    grid = config.grid
    ops = _Operators(config)
    u = config.initial_data.evaluate(grid)
    uh = np.fft.rfft(u.values)
    vsup, dsup = ops.sups(uh)
    state = StepState(u, 0.0, config.max_step, 0, dsup)
    dt = adapt_dt(state, config, vsup)
    rec = DiagnosticsRecord(lp_exponent=config.lp_exponent, delta=config.delta)
    _record_sample(rec, config, ops, u, 0.0, dt, _spectral_tail(uh, grid.n_points), dsup)
    remark = _remark_symbol(ops, config)
    rec.append_step(0.0, dsup, float(np.max(np.abs(np.fft.irfft(uh * remark, grid.n_points)))))
    snapshots = [(0.0, u.values.copy())] if keep_snapshots else []
    raw = "completed"
    g_times, g_vals = [0.0], [rec.gradient_sup[0]]
    while state.time < config.t_end * (1 - 1e-14) and state.step_count < max_steps:
        dt = min(dt, config.t_end - state.time)
        state.dt = dt
        try:
            state = step(state, config, ops)
        except NonFiniteState:
            raw = "blowup_candidate"
            break
        uh = np.fft.rfft(state.field.values)
        vsup, dsup = ops.sups(uh)
        tail = _spectral_tail(uh, grid.n_points)
        grad = float(np.max(np.abs(np.fft.irfft(uh * ops.ik, grid.n_points))))
        g_times.append(state.time)
        g_vals.append(grad)
        rec.append_step(state.time, dsup, float(np.max(np.abs(np.fft.irfft(uh * remark, grid.n_points)))))
        bfrac = boundary_fraction(state.field.values)
        last = state.time >= config.t_end * (1 - 1e-14)
        stop = None
        if grad > config.blowup_gradient_threshold and tail < config.spectral_tail_threshold:
            stop = "blowup_candidate"
        elif tail >= config.spectral_tail_threshold:
            stop = "resolution_lost"
        elif bfrac > config.boundary_threshold:
            stop = "boundary_contaminated"
        if stop or last or state.step_count % config.output_stride == 0:
            _record_sample(rec, config, ops, state.field, state.time, dt, tail, dsup)
            if keep_snapshots:
                snapshots.append((state.time, state.field.values.copy()))
        if stop:
            raw = stop
            break
        new_dt = adapt_dt(state, config, vsup)
        if new_dt <= config.dt_min and state.time < config.t_end:
            raw = "blowup_candidate"
            break
        dt = new_dt
    blowup_time = None
    verdict = raw
    confirmation = None
    if raw == "blowup_candidate":
        blowup_time = estimate_blowup_time(g_times, g_vals, floor=0.0)
        verdict = "blowup_detected"
        if config.confirm_blowup:
            confirmation = run(config.refined(), keep_snapshots=False, max_steps=max_steps)
            other = confirmation.blowup_time_estimate
            if confirmation.raw_verdict != "blowup_candidate" or other is None or \
                    abs(other - blowup_time) >= 0.05 * abs(blowup_time):
                verdict = "resolution_lost"
    rec.finalize(verdict, blowup_time)
    consts = {}
    if 0 < config.alpha < 1:
        consts[f"C_alpha[{config.alpha:g}]"] = riesz_constant(float(config.alpha))
    if 0 < config.beta < 2:
        consts[f"C_beta[{config.beta:g}]"] = laplacian_constant(float(config.beta))
    if config.nu == 0:
        consts["filter_strength"] = config.filter_strength
        consts["filter_order"] = float(config.filter_order)
    return RunResult(rec, verdict, blowup_time, state.field, snapshots, confirmation,
                     _time.perf_counter() - t0, consts, raw)


@dataclass
class KernelReport:
    beta: float
    nu: float
    t: float
    x: np.ndarray
    kernel: np.ndarray
    min_ratio: float
    symmetry_error: float
    monotonicity_violation: float
    mass_error: float
    nonnegative: bool
    symmetric: bool
    radially_decreasing: bool
    unit_mass: bool
    box_length: float = math.nan

    @property
    def passed(self) -> bool:
        return self.nonnegative and self.symmetric and self.radially_decreasing and self.unit_mass


def linear_kernel_check(beta: float, nu: float, t: float, n_points: Optional[int] = None,
                        box_length: Optional[float] = None) -> KernelReport:
    """Fundamental solution of u_t = -nu Lambda^beta u on the periodic box.

    The kernel is the inverse transform of exp(-nu |k|^beta t); on the box it
    is the periodisation of the line kernel.  By default the box is 200 (40
    for beta = 2) kernel widths wide and the grid fine enough that the symbol
    has decayed below e^{-37} at the Nyquist frequency.
    """
    if not 0.0 < beta <= 2.0:
        raise ValueError(f"beta must lie in (0, 2], got {beta}")
    if nu <= 0 or t <= 0:
        raise ValueError("nu and t must be positive")
    scale = (nu * t) ** (1.0 / beta)
    if box_length is None:
        box_length = scale * (40.0 if beta == 2 else 200.0)
    if n_points is None:
        k_needed = 37.0 ** (1.0 / beta) / scale
        n_points = max(4096, 1 << int(math.ceil(math.log2(box_length * k_needed / math.pi))))
    grid = Grid(n_points, box_length)
    k = np.abs(grid.wavenumbers)
    sym = np.exp(-nu * k ** beta * t)
    vals = np.fft.ifft(sym * grid.phase).real * n_points / box_length
    x = grid.x
    peak = float(vals.max())
    min_ratio = float(vals.min()) / peak
    mirror = vals[(-np.arange(n_points)) % n_points]
    sym_err = float(np.max(np.abs(vals - mirror))) / peak
    right = vals[x >= 0]
    viol = float(max(0.0, np.max(np.diff(right)))) / peak
    mass_err = abs(float(np.sum(vals) * grid.spacing) - 1.0)
    return KernelReport(beta, nu, t, x, vals, min_ratio, sym_err, viol, mass_err,
                        min_ratio >= -1e-8, sym_err <= 1e-8, viol <= 1e-8, mass_err <= 1e-8,
                        box_length)
