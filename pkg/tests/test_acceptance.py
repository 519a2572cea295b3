"""Acceptance suite: one PASS/FAIL line per criterion, at the required tolerances.

The lines are printed as each test finishes and repeated in the pytest
terminal summary.
"""

import math
import time

import numpy as np
import pytest

from fractransport.closed_forms import (
    fourier_power_law,
    fourier_power_law_quadrature,
    laplacian_power_constant,
    riesz_power_constant,
)
from fractransport.config import parse_text, SWEEP_SCHEMA
from fractransport.diagnostics import build_modulus, calibrate_rescale, weighted_inequality_check, riccati_check
from fractransport.fractional import frac_laplacian, frac_laplacian_odd, positivity_integral, riesz_potential_odd
from fractransport.gamma_mellin import mellin_symbol, mellin_symbol_series, sharp_bound_check
from fractransport.profiles import random_odd_family
from fractransport.solver import (
    InitialDataSpec,
    SimConfig,
    StepState,
    _Operators,
    linear_kernel_check,
    run,
    step,
)
from fractransport.spectral import Field, Grid
from fractransport.sweep import run_sweep

RESULTS = {}


def report(number, title, passed, detail, started):
    line = f"criterion {number:2d} {'PASS' if passed else 'FAIL'}  {title}: {detail} ({time.perf_counter() - started:.1f} s)"
    RESULTS[number] = line
    print(line)
    assert passed, line


@pytest.fixture(scope="module")
def dichotomy_runs():
    """The two runs of the regularity/blowup dichotomy (alpha = 0.4, nu = 1, n = 4096, L = 80)."""
    grid = Grid(4096, 80.0)
    t0 = time.perf_counter()
    spec = build_modulus("subcritical", 0.4, 1.0, 1.0)
    data = InitialDataSpec("odd_gaussian", 5.0, 1.0)
    lam = calibrate_rescale(data.evaluate(grid), spec, 0.5)
    regular = run(SimConfig(0.4, 1.0, 1.0, grid, data, t_end=10.0, blowup_gradient_threshold=50.0,
                            modulus=spec, modulus_rescale=lam))
    # stop at 3 A: past |u_x| ~ 70 the front outruns n = 4096 and Gibbs undershoot
    # breaks the 1e-8 positivity tolerance
    singular = run(SimConfig(0.4, 0.1, 1.0, grid, InitialDataSpec("odd_gaussian", 20.0, 1.0), t_end=2.0,
                             blowup_gradient_threshold=60.0, output_stride=1))
    return regular, singular, time.perf_counter() - t0


class TestAcceptance:
    def test_c01_operator_exactness(self):
        t0 = time.perf_counter()
        grid = Grid(256, 2 * np.pi)
        worst = 0.0
        for s in (-0.7, -0.3, 0.5, 1.0, 1.5, 2.0):
            for k in range(1, 128):
                mode = np.sin(k * grid.x)
                out = frac_laplacian(Field(grid, mode), s).values
                worst = max(worst, abs(out @ mode / (mode @ mode) / k ** s - 1.0))
        report(1, "operator exactness", worst <= 1e-12, f"max relative eigenvalue error {worst:.2e}", t0)

    def test_c02_power_law_operators(self):
        t0 = time.perf_counter()
        x = np.array([0.25, 0.5, 1.0, 2.0, 4.0])
        worst = 0.0
        for a, d in ((0.3, 0.5), (0.5, 1.2), (0.7, 0.4), (0.4, 1.6)):
            c = riesz_power_constant(a, d).value
            got = riesz_potential_odd(lambda y, d=d: y ** -d, x, a, support=1e3, tail_power=d)
            worst = max(worst, float(np.max(np.abs(got / (c * x ** (a - d)) - 1))))
        for b, d in ((0.3, 0.5), (0.5, 1.2), (0.8, 0.9), (0.6, 0.3)):
            c = laplacian_power_constant(b, d).value
            got = frac_laplacian_odd(lambda y, d=d: y ** -d, x, b, support=1e3, tail_power=d)
            worst = max(worst, float(np.max(np.abs(got / (c * x ** (-b - d)) - 1))))
        report(2, "power-law constants", worst <= 1e-3, f"max relative error {worst:.2e} over 8 pairs", t0)

    def test_c03_fourier_power_law(self):
        t0 = time.perf_counter()
        worst = 0.0
        for z, xi in ((0.3, 1.0), (0.5 + 0.5j, 2.0), (0.8 - 1.0j, 0.7)):
            exact = complex(fourier_power_law(z, np.array([xi]))[0])
            worst = max(worst, abs(fourier_power_law_quadrature(z, xi) - exact) / abs(exact))
        report(3, "Fourier transform of |x|^-z", worst <= 1e-4, f"max relative error {worst:.2e}", t0)

    def test_c04_mellin_symbol(self):
        t0 = time.perf_counter()
        pairs = [(a, f * (1 - a)) for a in (0.2, 0.5, 0.8) for f in (0.1, 0.5, 0.9)]
        lam = np.linspace(-1e4, 1e4, 200_001)
        excess, low, drift, series = math.inf, math.inf, 0.0, 0.0
        for a, t in pairs:
            re = mellin_symbol(a, t, lam).real
            re0 = float(mellin_symbol(a, t, 0.0).real)
            excess = min(excess, (re.min() - re0) / re0 if re0 > 0 else -math.inf)
            rep = sharp_bound_check(a, t)
            low = min(low, rep.c_low)
            drift = max(drift, abs(rep.ratio_at_max / rep.ratio_at_1e3 - 1))
            probe = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
            g = mellin_symbol(a, t, probe)
            series = max(series, float(np.max(np.abs(mellin_symbol_series(a, t, probe) - g) / np.abs(g))))
        ok = excess >= -1e-12 and low > 0 and drift <= 0.05 and series <= 1e-6
        report(4, "Mellin symbol", ok,
               f"min (ReF-ReF0)/ReF0 {excess:.1e}, min ReF/(1+|l|^a) {low:.3f}, "
               f"tail drift {drift:.2%}, series error {series:.1e}", t0)

    def test_c05_weighted_inequality(self):
        t0 = time.perf_counter()
        family = random_odd_family(200, seed=2024)
        low, dev, n = math.inf, 0.0, 0
        for a, d in ((0.3, 0.7), (0.4, 0.9), (0.45, 1.0)):
            for prof in family:
                res = weighted_inequality_check(prof, a, d)
                low = min(low, res.ratio)
                dev = max(dev, res.route_deviation)
                n += 1
        ok = low > 0 and dev <= 1e-2
        report(5, "weighted inequality", ok, f"{n} checks, min ratio {low:.3e}, max route deviation {dev:.1e}", t0)

    def test_c06_monotonicity(self, dichotomy_runs):
        t0 = time.perf_counter()
        regular, singular, _ = dichotomy_runs
        worst_sup = worst_l1 = worst_neg = 0.0
        for rec in (regular.record, singular.record, singular.confirmation.record):
            s0 = rec.sup_norm[0]
            worst_sup = max(worst_sup, float(np.max(np.diff(rec.sup_norm))) / s0)
            worst_l1 = max(worst_l1, float(np.max(np.diff(rec.l1_norm))) / rec.l1_norm[0])
            worst_neg = max(worst_neg, float(-rec.min_positive_side.min()) / s0)
        ok = worst_sup <= 1e-8 and worst_l1 <= 1e-8 and worst_neg <= 1e-8
        report(6, "monotonicity", ok, f"max relative increase sup {worst_sup:.1e}, L1 {worst_l1:.1e}; "
               f"negativity on x>=0 {worst_neg:.1e}", t0)

    def test_c07_dissipation_positivity(self):
        t0 = time.perf_counter()
        rng = np.random.default_rng(7)
        grid = Grid(256, 2 * np.pi)
        k = np.arange(1, 33)
        worst, count = math.inf, 0
        for _ in range(50):
            coef = rng.standard_normal(k.size) / k ** 1.5
            phase = rng.uniform(0, 2 * np.pi, k.size)
            f = Field(grid, np.sin(np.outer(grid.x, k) + phase) @ coef)
            for p in (1.5, 2.0, 3.0, 4.0):
                norm = np.sum(np.abs(f.values) ** p) * grid.spacing
                for b in (0.25, 0.5, 1.0, 1.5, 2.0):
                    worst = min(worst, positivity_integral(f, p, b) / norm)
                    count += 1
        report(7, "dissipation positivity", worst >= -1e-9, f"{count} integrals, min normalised value {worst:.2e}", t0)

    def test_c08_dichotomy(self, dichotomy_runs):
        t0 = time.perf_counter()
        regular, singular, wall = dichotomy_runs
        rec = regular.record
        ok_reg = (regular.verdict == "completed" and rec.times[-1] == pytest.approx(10.0)
                  and float(np.nanmax(rec.modulus_ratio)) < 1.0)
        shift = math.nan
        if singular.confirmation is not None and singular.confirmation.blowup_time_estimate is not None:
            shift = abs(singular.confirmation.blowup_time_estimate / singular.blowup_time_estimate - 1)
        ok_sing = singular.verdict == "blowup_detected" and shift < 0.05
        report(8, "regularity/blowup dichotomy", ok_reg and ok_sing and wall < 1200,
               f"beta=1: {regular.verdict}, max|u_x| {rec.gradient_sup.max():.2f}, "
               f"max modulus ratio {np.nanmax(rec.modulus_ratio):.3f}; beta=0.1: {singular.verdict}, "
               f"T* {singular.blowup_time_estimate:.4f}, shift under n->2n {shift:.2%}; wall {wall:.0f} s", t0)

    def test_c09_phase_boundary(self):
        t0 = time.perf_counter()
        text = """\
schema_version = 1
[physics]
nu = 1.0
[grid]
n_points = 2048
box_length = 80.0
[initial_data]
amplitude = 7.0
[solver]
t_end = 5.0
[diagnostics]
modulus = none
[axes]
alpha = 0.3, 0.5, 0.7
beta = 0.1:0.9:0.2
[sweep]
bisection_steps = 3
gradient_threshold_per_amplitude = 5.0
"""
        result = run_sweep(parse_text(text, SWEEP_SCHEMA), None, workers=3)
        errs = {}
        for a in (0.3, 0.5, 0.7):
            label = f"alpha={a!r},nu=1.0,amplitude=7.0"
            est = result.boundary_estimate[label]
            errs[a] = math.inf if est is None else abs(est - (1 - a))
        ok = all(e <= 0.15 for e in errs.values())
        detail = ", ".join(f"alpha={a}: |beta_c-(1-alpha)|={e:.3f}" for a, e in errs.items())
        report(9, "phase boundary", ok, detail, t0)

    def test_c10_riccati(self, dichotomy_runs):
        t0 = time.perf_counter()
        _, singular, _ = dichotomy_runs
        reps = [riccati_check(r.record, float(r.record.l1_norm[0]))
                for r in (singular, singular.confirmation) if r.verdict == "blowup_detected"
                or r.raw_verdict == "blowup_candidate"]
        ok = bool(reps) and all(r.holds for r in reps)
        detail = ", ".join(f"C={r.c_certified:.3f} ({r.n_samples} samples)" for r in reps)
        report(10, "Riccati certificate", ok, detail or "no blowup runs", t0)

    def test_c11_solver_order(self):
        t0 = time.perf_counter()
        cfg = SimConfig(0.4, 1.0, 1.0, Grid(512, 40.0), InitialDataSpec("odd_gaussian", 2.0, 1.0), t_end=0.5)
        ops = _Operators(cfg)

        def solve(m):
            s = StepState(cfg.initial_data.evaluate(cfg.grid), 0.0, cfg.t_end / m)
            for _ in range(m):
                s = step(s, cfg, ops)
            return s.field.values

        a, b, c = solve(20), solve(40), solve(80)
        ratio = float(np.max(np.abs(a - b)) / np.max(np.abs(b - c)))
        report(11, "solver order", 12 <= ratio <= 20, f"Richardson ratio {ratio:.2f}", t0)

    def test_c12_linear_kernel(self):
        t0 = time.perf_counter()
        reps = {b: linear_kernel_check(b, 1.0, 1.0) for b in (0.5, 1.0, 2.0)}
        p = reps[1.0]
        c = 2 * np.pi / p.box_length
        poisson = np.sinh(c) / (p.box_length * (np.cosh(c) - np.cos(c * p.x)))
        err1 = float(np.max(np.abs(p.kernel - poisson)))
        g = reps[2.0]
        err2 = float(np.max(np.abs(g.kernel - np.exp(-g.x ** 2 / 4) / math.sqrt(4 * math.pi))))
        ok = all(r.passed for r in reps.values()) and err1 <= 1e-6 and err2 <= 1e-6
        report(12, "linear kernel", ok, f"properties {[r.passed for r in reps.values()]}, "
               f"Poisson error {err1:.1e}, Gaussian error {err2:.1e}", t0)
