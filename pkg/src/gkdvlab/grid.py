"""Uniform periodic grid and the field containers living on it.

The spatial domain is a large periodic box [-L/2, L/2) standing in for the
real line.  Wrap-around contamination is quantified (see
`boundary_mass_fraction` in `spectral`) rather than prevented.

Spectral coefficients follow the symmetric continuum convention

    uhat(xi) = (2*pi)**(-1/2) * integral u(x) * exp(-i*x*xi) dx

approximated by the trapezoid rule on the box, so Fourier-side norms carry
no conversion factors.  Coefficients are stored in FFT layout, i.e. in the
order produced by ``numpy.fft.fftfreq``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidFieldError


@dataclass(frozen=True)
class GridSpec:
    """Uniform periodic grid with an even number of points on [-L/2, L/2)."""

    n: int
    length: float

    coordinates: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.n <= 0 or self.n % 2 != 0:
            raise ValueError(f"grid size must be a positive even integer, got {self.n}")
        if not self.length > 0:
            raise ValueError(f"grid length must be positive, got {self.length}")
        dx = self.length / self.n
        x = -0.5 * self.length + dx * np.arange(self.n)
        xi = 2.0 * np.pi * np.fft.fftfreq(self.n, d=dx)
        x.setflags(write=False)
        xi.setflags(write=False)
        object.__setattr__(self, "coordinates", x)
        object.__setattr__(self, "wavenumbers", xi)

    @property
    def dx(self) -> float:
        return self.length / self.n

    @property
    def dxi(self) -> float:
        return 2.0 * np.pi / self.length

    @property
    def nyquist_index(self) -> int:
        return self.n // 2


@dataclass(frozen=True)
class RealField:
    """Real-valued profile u(x_j) sampled on a grid."""

    grid: GridSpec
    samples: np.ndarray

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=np.float64)
        if samples.shape != (self.grid.n,):
            raise InvalidFieldError(
                f"expected {self.grid.n} samples, got shape {samples.shape}"
            )
        object.__setattr__(self, "samples", samples)

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.samples)))


@dataclass(frozen=True)
class SpectralField:
    """Continuum-normalized Fourier coefficients uhat(xi_k) in FFT layout."""

    grid: GridSpec
    coeffs: np.ndarray

    def __post_init__(self):
        coeffs = np.asarray(self.coeffs, dtype=np.complex128)
        if coeffs.shape != (self.grid.n,):
            raise InvalidFieldError(
                f"expected {self.grid.n} coefficients, got shape {coeffs.shape}"
            )
        object.__setattr__(self, "coeffs", coeffs)
