"""Odd test profiles on the line with exactly known fractional transforms.

Every term is a Gaussian dipole ``c x exp(-x^2/s^2)`` or an odd Gaussian
pair ``c (exp(-(x-x0)^2/s^2) - exp(-(x+x0)^2/s^2))``.  For these the
Fourier integral defining Lambda^{s} reduces to a confluent hypergeometric
function, so Riesz potentials (s < 0) and fractional Laplacians (s > 0)
are available in closed form.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.special import hyp1f1

__all__ = ["GaussianTerm", "GaussianMixture", "CallableProfile", "random_odd_family"]


@dataclass(frozen=True)
class GaussianTerm:
    kind: str  # "dipole" or "pair"
    coef: float
    width: float
    center: float = 0.0

    def __post_init__(self):
        if self.kind not in ("dipole", "pair"):
            raise ValueError(f"unknown term kind {self.kind!r}")
        if self.width <= 0:
            raise ValueError("width must be positive")


def _prefactor(s_exp, width):
    # Lambda^{s} exp(-x^2/w^2) = P * 1F1((1+s)/2; 1/2; -x^2/w^2)
    return width ** (-s_exp) * 2.0 ** s_exp * math.gamma(0.5 * (1.0 + s_exp)) / math.sqrt(math.pi)


@dataclass(frozen=True)
class GaussianMixture:
    terms: tuple = field(default_factory=tuple)

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for t in self.terms:
            w2 = t.width ** 2
            if t.kind == "dipole":
                out += t.coef * x * np.exp(-x * x / w2)
            else:
                out += t.coef * (np.exp(-(x - t.center) ** 2 / w2) - np.exp(-(x + t.center) ** 2 / w2))
        return out

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros(x.shape)
        for t in self.terms:
            w2 = t.width ** 2
            if t.kind == "dipole":
                out += t.coef * (1.0 - 2.0 * x * x / w2) * np.exp(-x * x / w2)
            else:
                m, p = x - t.center, x + t.center
                out += t.coef * (-2.0 * m / w2 * np.exp(-m * m / w2) + 2.0 * p / w2 * np.exp(-p * p / w2))
        return out

    def fractional(self, x, s_exp: float):
        """Lambda^{s} of the profile for -1 < s < 2 (s < 0 is a Riesz potential)."""
        if not -1.0 < s_exp < 2.0:
            raise ValueError(f"exponent must lie in (-1, 2), got {s_exp}")
        x = np.asarray(x, dtype=float)
        a = 0.5 * (1.0 + s_exp)
        out = np.zeros(x.shape)
        for t in self.terms:
            w2 = t.width ** 2
            pre = _prefactor(s_exp, t.width)
            if t.kind == "dipole":
                # x exp(-x^2/w^2) = -(w^2/2) d/dx exp(-x^2/w^2)
                out += t.coef * pre * 2.0 * a * x * hyp1f1(a + 1.0, 1.5, -x * x / w2)
            else:
                out += t.coef * pre * (hyp1f1(a, 0.5, -(x - t.center) ** 2 / w2)
                                       - hyp1f1(a, 0.5, -(x + t.center) ** 2 / w2))
        return out

    def riesz(self, x, alpha: float):
        if alpha == 0.0:
            return self.value(x)
        return self.fractional(x, -alpha)

    def first_moment(self) -> float:
        """int_0^inf y u(y) dy, the coefficient of the far-field decay."""
        total = 0.0
        for t in self.terms:
            w = t.width
            if t.kind == "dipole":
                total += t.coef * math.sqrt(math.pi) * w ** 3 / 4.0
            else:
                total += t.coef * math.sqrt(math.pi) * w * t.center
        return total

    @property
    def scale(self) -> float:
        return min(t.width for t in self.terms)

    @property
    def extent(self) -> float:
        return max(t.center + 7.0 * t.width for t in self.terms)


@dataclass
class CallableProfile:
    """Odd profile given by callables; Riesz potentials by quadrature."""

    value_fn: Callable
    derivative_fn: Callable
    support: float
    breakpoints: Sequence[float] = ()
    scale: float = 1.0

    def __call__(self, x):
        return self.value(x)

    def value(self, x):
        return self.value_fn(np.asarray(x, dtype=float))

    def derivative(self, x):
        return self.derivative_fn(np.asarray(x, dtype=float))

    def riesz(self, x, alpha: float):
        from .fractional import riesz_potential_odd

        if alpha == 0.0:
            return self.value(x)
        return riesz_potential_odd(self.value_fn, x, alpha, support=self.support,
                                   breakpoints=self.breakpoints)

    @property
    def extent(self) -> float:
        return self.support


def random_odd_family(count: int, seed: Optional[int] = 0, max_terms: int = 3):
    """Reproducible random odd mixtures with widths in [0.3, 3]."""
    rng = np.random.default_rng(seed)
    family = []
    for _ in range(count):
        n_terms = int(rng.integers(1, max_terms + 1))
        terms = []
        for j in range(n_terms):
            width = float(np.exp(rng.uniform(np.log(0.3), np.log(3.0))))
            coef = float(rng.normal())
            if j == 0 or rng.random() < 0.5:
                terms.append(GaussianTerm("dipole", coef, width))
            else:
                terms.append(GaussianTerm("pair", coef, width, float(rng.uniform(0.2, 3.0))))
        family.append(GaussianMixture(tuple(terms)))
    return family
