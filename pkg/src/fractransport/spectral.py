"""Periodic grid, Fourier transforms, multipliers and Littlewood-Paley projectors.

Conventions
-----------
The box is ``[-L/2, L/2)`` sampled at ``x_j = -L/2 + j*dx``.  Spectra are
stored in numpy FFT order and normalised by ``1/n`` so that ``cos(k x)`` has
coefficients of magnitude 1/2 at ``+-k``.  The index mirror of ``x_j`` is
``x_{(n-j) mod n}``, which makes parity checks a simple array reversal.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from functools import cached_property
from typing import Literal, Optional

import numpy as np

__all__ = [
    "Grid",
    "Field",
    "LPProjector",
    "make_grid",
    "forward",
    "inverse",
    "apply_multiplier",
    "lp_project",
    "bump",
    "mirror_index",
]


@dataclass(frozen=True)
class Grid:
    n_points: int
    box_length: float

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 8 or self.n_points % 2:
            raise ValueError(f"n_points must be an even integer >= 8, got {self.n_points}")
        if not self.box_length > 0:
            raise ValueError(f"box_length must be positive, got {self.box_length}")

    @property
    def spacing(self) -> float:
        return self.box_length / self.n_points

    @cached_property
    def x(self) -> np.ndarray:
        return -0.5 * self.box_length + self.spacing * np.arange(self.n_points)

    @cached_property
    def wavenumbers(self) -> np.ndarray:
        """Wavenumbers ``2*pi*j/L`` in FFT order; the Nyquist mode is ``j = -n/2``."""
        return 2 * np.pi * np.fft.fftfreq(self.n_points, d=self.spacing)

    @cached_property
    def mode_index(self) -> np.ndarray:
        """Integer mode numbers ``j`` in FFT order."""
        return np.fft.fftfreq(self.n_points, d=1.0 / self.n_points).astype(int)

    @property
    def nyquist(self) -> int:
        """Position of the Nyquist coefficient in FFT order."""
        return self.n_points // 2

    @cached_property
    def phase(self) -> np.ndarray:
        # spectrum relative to the physical origin x=0 is (-1)^j times the FFT
        return np.where(self.mode_index % 2 == 0, 1.0, -1.0)


def make_grid(n_points: int, box_length: float) -> Grid:
    return Grid(int(n_points) if float(n_points).is_integer() else n_points, float(box_length))


def mirror_index(n: int) -> np.ndarray:
    return (-np.arange(n)) % n


class Field:
    """Real grid function with a lazily computed, cached spectrum.

    ``parity`` is an optional tag ('odd' or 'even'); it is checked on
    construction and used by the solver to re-symmetrise.
    """

    def __init__(self, grid: Grid, values, parity: Optional[str] = None):
        values = np.asarray(values, dtype=float)
        if values.shape != (grid.n_points,):
            raise ValueError(f"expected {grid.n_points} samples, got shape {values.shape}")
        if parity not in (None, "odd", "even"):
            raise ValueError(f"unknown parity tag {parity!r}")
        self.grid = grid
        self._values = values
        self._spectrum: Optional[np.ndarray] = None
        self.parity = parity
        if parity is not None:
            err = self.parity_error(parity)
            if err > 1e-12 * max(1.0, float(np.max(np.abs(values)))):
                raise ValueError(f"values are not {parity} (residual {err:.3e})")

    @classmethod
    def from_function(cls, grid: Grid, func, parity: Optional[str] = None) -> "Field":
        return cls(grid, func(grid.x), parity=parity)

    @property
    def values(self) -> np.ndarray:
        return self._values

    @values.setter
    def values(self, new):
        new = np.asarray(new, dtype=float)
        if new.shape != self._values.shape:
            raise ValueError("cannot change the number of samples")
        self._values = new
        self._spectrum = None

    @property
    def spectrum(self) -> np.ndarray:
        if self._spectrum is None:
            self._spectrum = np.fft.fft(self._values) / self.grid.n_points
        return self._spectrum

    def parity_error(self, parity: str = "odd") -> float:
        mirrored = self._values[mirror_index(self.grid.n_points)]
        sign = -1.0 if parity == "odd" else 1.0
        return float(np.max(np.abs(self._values - sign * mirrored)))

    def sup_norm(self) -> float:
        return float(np.max(np.abs(self._values)))

    def lp_norm(self, p: float) -> float:
        return float((np.sum(np.abs(self._values) ** p) * self.grid.spacing) ** (1.0 / p))

    def evaluate(self, x) -> np.ndarray:
        """Trigonometric interpolant at arbitrary points (Nyquist term dropped)."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        c = self.spectrum * self.grid.phase
        k = self.grid.wavenumbers.copy()
        c = c.copy()
        c[self.grid.nyquist] = 0.0
        out = np.empty(x.shape)
        for start in range(0, x.size, 512):
            chunk = x[start:start + 512]
            out[start:start + 512] = np.real(np.exp(1j * np.outer(chunk, k)) @ c)
        return out

    def copy(self) -> "Field":
        f = Field(self.grid, self._values.copy())
        f.parity = self.parity
        return f

    def __repr__(self):
        return f"Field(n={self.grid.n_points}, L={self.grid.box_length}, parity={self.parity})"


def forward(field: Field) -> np.ndarray:
    return field.spectrum


def inverse(grid: Grid, spectrum: np.ndarray) -> np.ndarray:
    """Complex inverse of :func:`forward`."""
    return np.fft.ifft(np.asarray(spectrum) * grid.n_points)


def apply_multiplier(field: Field, symbol) -> Field:
    """Multiply the spectrum pointwise by ``symbol`` (FFT order).

    Raises ``ValueError`` if the result is not real, i.e. the symbol is not
    Hermitian-compatible for this field.
    """
    symbol = np.asarray(symbol)
    n = field.grid.n_points
    if symbol.shape != (n,):
        raise ValueError(f"symbol length {symbol.shape} does not match n_points={n}")
    out = inverse(field.grid, field.spectrum * symbol)
    scale = max(float(np.max(np.abs(out.real))), field.sup_norm(), np.finfo(float).tiny)
    residue = float(np.max(np.abs(out.imag)))
    if residue > 1e-10 * scale:
        raise ValueError(f"multiplier output is not real (imaginary residue {residue:.3e})")
    result = Field(field.grid, out.real)
    result.parity = field.parity
    return result


def _smooth_step(t):
    t = np.asarray(t, dtype=float)
    out = np.zeros_like(t)
    pos = t > 0
    out[pos] = np.exp(-1.0 / t[pos])
    return out


def bump(x):
    """C-infinity profile: 1 on |x| <= 1, 0 on |x| >= 2, monotone in between."""
    a = np.abs(np.asarray(x, dtype=float))
    up = _smooth_step(2.0 - a)
    down = _smooth_step(a - 1.0)
    return up / (up + down)


@dataclass(frozen=True)
class LPProjector:
    """Smooth frequency cutoff.

    ``below``: phi(k/N); ``above``: 1 - phi(k/N); ``band``: phi(k/N2) - phi(k/N1)
    with ``cutoffs = (N1, N2)``, ``N1 < N2``.
    """

    kind: Literal["below", "above", "band"]
    cutoffs: tuple = dc_field(default=())

    def __post_init__(self):
        cut = tuple(float(c) for c in np.atleast_1d(self.cutoffs))
        object.__setattr__(self, "cutoffs", cut)
        if self.kind not in ("below", "above", "band"):
            raise ValueError(f"unknown projector kind {self.kind!r}")
        expected = 2 if self.kind == "band" else 1
        if len(cut) != expected:
            raise ValueError(f"{self.kind} projector needs {expected} cutoff(s)")
        if any(c <= 0 for c in cut):
            raise ValueError("cutoffs must be positive")
        if self.kind == "band" and not cut[0] < cut[1]:
            raise ValueError(f"band cutoffs out of order: {cut}")

    def symbol(self, k) -> np.ndarray:
        k = np.asarray(k, dtype=float)
        if self.kind == "below":
            return bump(k / self.cutoffs[0])
        if self.kind == "above":
            return 1.0 - bump(k / self.cutoffs[0])
        return bump(k / self.cutoffs[1]) - bump(k / self.cutoffs[0])


def lp_project(field: Field, proj: LPProjector) -> Field:
    sym = proj.symbol(field.grid.wavenumbers)
    sym[field.grid.nyquist] = 0.0
    return apply_multiplier(field, sym)
