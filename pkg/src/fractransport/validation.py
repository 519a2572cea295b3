"""Certification suite behind ``fractransport validate``.

Every check returns a :class:`CheckResult`; ``run_checks`` executes the
checks of a level and never raises (an exception inside a check is a
failure with the message recorded).
"""

from __future__ import annotations

import math
import time
import traceback
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .closed_forms import (
    even_power_symbol,
    fourier_power_law,
    fourier_power_law_quadrature,
    laplacian_power_constant,
    riesz_power_constant,
    truncated_riesz_bound,
)
from .diagnostics import (
    build_modulus,
    dissipation_bound_check,
    modulus_containment_check,
    weighted_inequality_check,
    riccati_check,
)
from .fractional import frac_laplacian, frac_laplacian_odd, positivity_integral, riesz_potential_odd
from .gamma_mellin import (
    complex_gamma,
    mellin_symbol,
    mellin_symbol_series,
    sharp_bound_check,
    verify_symbol_relation,
)
from .profiles import random_odd_family
from .solver import InitialDataSpec, SimConfig, linear_kernel_check, run
from .spectral import Field, Grid

__all__ = ["CheckResult", "CHECKS", "run_checks"]


@dataclass
class CheckResult:
    name: str
    passed: bool
    details: dict = field(default_factory=dict)
    seconds: float = 0.0


def _operator_eigenvalues(full):
    grid = Grid(256, 2 * np.pi)
    worst = 0.0
    for s in (-0.7, -0.3, 0.5, 1.0, 1.5, 2.0):
        for k in (1, 3, 17, 60, 127):
            mode = np.sin(k * grid.x)
            out = frac_laplacian(Field(grid, mode), s).values
            eig = float(out @ mode) / float(mode @ mode)
            worst = max(worst, abs(eig / k ** s - 1.0))
    return worst <= 1e-12, {"max_relative_error": worst}


def _gamma_identities(full):
    z = np.array([0.3 + 0.2j, 1.7 - 4.0j, 5.5 + 10.0j, -2.3 + 0.5j, 0.5])
    rec = np.abs(complex_gamma(z + 1) - z * complex_gamma(z)) / np.abs(z * complex_gamma(z))
    half = abs(complex_gamma(0.5) - math.sqrt(math.pi)) / math.sqrt(math.pi)
    refl = abs(complex_gamma(0.3) * complex_gamma(0.7) - math.pi / math.sin(0.3 * math.pi)) / 10.0
    worst = float(max(rec.max(), half, refl))
    return worst <= 1e-12, {"max_relative_error": worst}


def _power_law_riesz(full):
    pairs = [(0.3, 0.5), (0.5, 1.2), (0.7, 0.4), (0.4, 1.6)] if full else [(0.3, 0.5), (0.5, 1.2)]
    x = np.array([0.5, 1.0, 2.0])
    worst = 0.0
    for a, d in pairs:
        c = riesz_power_constant(a, d).value
        got = riesz_potential_odd(lambda y, d=d: y ** -d, x, a, support=1e3, tail_power=d)
        worst = max(worst, float(np.max(np.abs(got / (c * x ** (a - d)) - 1.0))))
    return worst <= 1e-3, {"max_relative_error": worst, "pairs": pairs}


def _power_law_laplacian(full):
    pairs = [(0.3, 0.5), (0.5, 1.2), (0.8, 0.9), (0.6, 0.3)] if full else [(0.3, 0.5), (0.5, 1.2)]
    x = np.array([0.5, 1.0, 2.0])
    worst = 0.0
    for b, d in pairs:
        c = laplacian_power_constant(b, d).value
        got = frac_laplacian_odd(lambda y, d=d: y ** -d, x, b, support=1e3, tail_power=d)
        worst = max(worst, float(np.max(np.abs(got / (c * x ** (-b - d)) - 1.0))))
    return worst <= 1e-3, {"max_relative_error": worst, "pairs": pairs}


def _fourier_power_law(full):
    cases = [(0.3, 1.0), (0.5 + 0.5j, 2.0), (0.8 - 1.0j, 0.7)]
    worst = 0.0
    for z, xi in cases:
        exact = complex(fourier_power_law(z, np.array([xi]))[0])
        quad = fourier_power_law_quadrature(z, xi)
        worst = max(worst, abs(quad - exact) / abs(exact))
    return worst <= 1e-4, {"max_relative_error": worst}


def _truncated_bound(full):
    rep = truncated_riesz_bound(0.3, 0.6)
    return bool(rep.stable and math.isfinite(rep.value)), {"sup": rep.value, "argmax": rep.argmax}


_SYMBOL_PAIRS = [(a, f * (1.0 - a)) for a in (0.2, 0.5, 0.8) for f in (0.1, 0.5, 0.9)]


def _symbol_positivity(full):
    lam = np.linspace(-1e4, 1e4, 200_001 if full else 20_001)
    worst = math.inf
    for a, t in _SYMBOL_PAIRS:
        re = mellin_symbol(a, t, lam).real
        re0 = float(mellin_symbol(a, t, 0.0).real)
        worst = min(worst, float(re.min() - re0) / re0 if re0 > 0 else -math.inf)
    return worst >= -1e-12, {"min_relative_excess": worst}


def _symbol_sharp_bound(full):
    spread = 0.0
    low = math.inf
    for a, t in _SYMBOL_PAIRS:
        rep = sharp_bound_check(a, t)
        low = min(low, rep.c_low)
        spread = max(spread, abs(rep.ratio_at_max / rep.ratio_at_1e3 - 1.0))
    return bool(low > 0 and spread <= 0.05), {"min_ratio": low, "max_tail_drift": spread}


def _symbol_series(full):
    lam = np.array([0.0, 0.5, 1.0, 3.0, 10.0])
    worst = 0.0
    for a, t in _SYMBOL_PAIRS:
        g = mellin_symbol(a, t, lam)
        s = mellin_symbol_series(a, t, lam)
        worst = max(worst, float(np.max(np.abs(s - g) / np.abs(g))))
    return worst <= 1e-6, {"max_relative_error": worst}


def _symbol_triangulation(full):
    worst = 0.0
    for a, t in ((0.3, 0.4), (0.6, 0.2)):
        for lam in (0.0, 1.0, 5.0):
            direct = even_power_symbol(a, t, lam)
            pred = 2.0 ** (a + 1.0) * complex(mellin_symbol(a, t, lam))
            worst = max(worst, abs(direct - pred) / abs(pred))
    return worst <= 1e-6, {"max_relative_error": worst}


def _mellin_relation(full):
    fam = random_odd_family(4 if full else 2, seed=11)
    worst = 0.0
    for prof in fam:
        rep = verify_symbol_relation(prof, 0.4, 0.9)
        worst = max(worst, rep.max_relative_deviation)
    return worst <= 1e-3, {"max_relative_deviation": worst}


def _weighted_inequality(full):
    fam = random_odd_family(20 if full else 4, seed=5)
    low, dev = math.inf, 0.0
    for a, d in ((0.3, 0.7), (0.4, 0.9), (0.45, 1.0)):
        for prof in fam:
            rep = weighted_inequality_check(prof, a, d)
            low = min(low, rep.ratio)
            dev = max(dev, rep.route_deviation)
    return bool(low > 0 and dev <= 1e-2), {"min_ratio": low, "max_route_deviation": dev}


def _dissipation_positivity(full):
    rng = np.random.default_rng(7)
    grid = Grid(256, 2 * np.pi)
    k = np.arange(1, 33)
    worst = math.inf
    for _ in range(20 if full else 5):
        coef = rng.standard_normal(k.size) / k ** 1.5
        phase = rng.uniform(0, 2 * np.pi, k.size)
        f = Field(grid, np.sin(np.outer(grid.x, k) + phase) @ coef)
        for p in (2.0, 3.0, 4.0):
            for b in (0.5, 1.0, 1.5):
                val = positivity_integral(f, p, b)
                norm = np.sum(np.abs(f.values) ** p) * grid.spacing
                worst = min(worst, val / norm)
    return worst >= -1e-9, {"min_normalized_value": worst}


def _kernel_properties(full):
    reps = [linear_kernel_check(b, 1.0, 1.0) for b in (0.5, 1.0, 2.0)]
    rep1 = reps[1]
    # Poisson kernel summed over the periodic images of the box
    box = rep1.box_length
    c = 2 * np.pi / box
    poisson = np.sinh(c) / (box * (np.cosh(c) - np.cos(c * rep1.x)))
    err1 = float(np.max(np.abs(rep1.kernel - poisson)))
    rep2 = reps[2]
    gauss = np.exp(-rep2.x ** 2 / 4.0) / math.sqrt(4.0 * math.pi)
    err2 = float(np.max(np.abs(rep2.kernel - gauss)))
    ok = all(r.passed for r in reps) and err1 <= 1e-6 and err2 <= 1e-6
    return ok, {"poisson_error": err1, "gaussian_error": err2,
                "passed": [r.passed for r in reps]}


def _modulus_construction(full):
    ok = True
    details = {}
    for case, b in (("critical", 0.6), ("subcritical", 1.0)):
        m = build_modulus(case, 0.4, b, 0.5)
        slope = np.diff(m.omega_values) / np.diff(m.r)
        concave = bool(np.all(np.diff(slope) <= 1e-12 * slope[0]))
        small = abs(m.omega_values[0] / m.r[0] / m.omega_prime_zero - 1.0)
        ok &= concave and small < 1e-6 and m.omega_values[0] > 0
        details[case] = {"concave": concave, "omega_prime_zero": m.omega_prime_zero}
    return ok, details


def _riesz_containment(full):
    fam = random_odd_family(20 if full else 5, seed=13)
    worst = max(modulus_containment_check(p, 0.4).worst_ratio for p in fam)
    return worst <= 1.05, {"max_measured_over_bound": worst}


def _dissipation_bound(full):
    fam = random_odd_family(10 if full else 3, seed=17)
    m = build_modulus("subcritical", 0.4, 1.0, 1.0)
    ok = True
    margin = -math.inf
    for b in (0.5, 1.0, 1.5):
        for p in fam:
            rep = dissipation_bound_check(p, m.omega, b)
            ok &= rep.holds
            margin = max(margin, rep.lhs - rep.bound)
    return ok, {"max_lhs_minus_bound": margin}


def _solver_laws(full):
    n = 4096 if full else 2048
    cfg = SimConfig(0.4, 1.0, 1.0, Grid(n, 80.0), InitialDataSpec("odd_gaussian", 5.0, 1.0),
                    t_end=2.0 if full else 0.5)
    rec = run(cfg).record
    sup0 = rec.sup_norm[0]
    sup_inc = float(np.max(np.diff(rec.sup_norm))) / sup0
    l1_inc = float(np.max(np.diff(rec.l1_norm))) / rec.l1_norm[0]
    neg = float(-rec.min_positive_side.min()) / sup0
    ok = sup_inc <= 1e-8 and l1_inc <= 1e-8 and neg <= 1e-8
    return ok, {"sup_increase": sup_inc, "l1_increase": l1_inc, "negativity": neg}


def _blowup_certificate(full):
    cfg = SimConfig(0.4, 0.1, 1.0, Grid(2048, 80.0), InitialDataSpec("odd_gaussian", 20.0, 1.0),
                    t_end=1.0, blowup_gradient_threshold=150.0, output_stride=1)
    res = run(cfg)
    rep = riccati_check(res.record, res.record.l1_norm[0])
    ok = res.verdict == "blowup_detected" and rep.c_certified > 0
    return ok, {"verdict": res.verdict, "blowup_time": res.blowup_time_estimate,
                "riccati_c": rep.c_certified}


CHECKS: dict[str, tuple[Callable, bool]] = {
    # name: (function, included in the fast level)
    "operator_eigenvalues": (_operator_eigenvalues, True),
    "gamma_identities": (_gamma_identities, True),
    "power_law_riesz": (_power_law_riesz, True),
    "power_law_laplacian": (_power_law_laplacian, True),
    "fourier_power_law": (_fourier_power_law, True),
    "truncated_power_law_bound": (_truncated_bound, True),
    "symbol_positivity": (_symbol_positivity, True),
    "symbol_sharp_bound": (_symbol_sharp_bound, True),
    "symbol_series": (_symbol_series, True),
    "symbol_triangulation": (_symbol_triangulation, True),
    "mellin_relation": (_mellin_relation, True),
    "weighted_inequality": (_weighted_inequality, True),
    "dissipation_positivity": (_dissipation_positivity, True),
    "kernel_properties": (_kernel_properties, True),
    "modulus_construction": (_modulus_construction, True),
    "riesz_modulus_containment": (_riesz_containment, True),
    "dissipation_modulus_bound": (_dissipation_bound, True),
    "solver_monotonicity": (_solver_laws, True),
    "blowup_certificate": (_blowup_certificate, False),
}


def _jsonable(value):
    if isinstance(value, dict):
        return {k: _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, (np.bool_, bool)):
        return bool(value)
    if isinstance(value, (np.floating, float)):
        return float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value


def run_checks(level: str = "fast", names=None) -> list[CheckResult]:
    if level not in ("fast", "full"):
        raise ValueError(f"level must be 'fast' or 'full', got {level!r}")
    full = level == "full"
    out = []
    for name, (fn, fast) in CHECKS.items():
        if names is not None and name not in names:
            continue
        if not (fast or full):
            continue
        t0 = time.perf_counter()
        try:
            passed, details = fn(full)
        except Exception as exc:  # a crashing check is a failing check
            passed, details = False, {"error": f"{type(exc).__name__}: {exc}",
                                      "traceback": traceback.format_exc(limit=3)}
        out.append(CheckResult(name, bool(passed), _jsonable(details), time.perf_counter() - t0))
    return out
