"""Fourier analysis on the periodic box: transforms, the Airy propagator,
and spectral multiplier operators.

With x_j = -L/2 + j*dx and xi_k = 2*pi*k/L, the trapezoid rule for the
continuum transform reduces to an FFT up to an alternating phase:

    uhat(xi_k) = dx/sqrt(2*pi) * (-1)**k * FFT(u)[k]

(exp(+i*pi*k) from the -L/2 offset; n even makes the sign well defined in
FFT layout).  The inverse mirrors it, and the round trip is exact up to
rounding.
"""

from __future__ import annotations

import functools
import warnings

import numpy as np

from .errors import (
    BoundaryMassWarning,
    InvalidFieldError,
    SymmetryError,
    UnsupportedOrderError,
)
from .grid import GridSpec, RealField, SpectralField

BOUNDARY_ADVISORY_THRESHOLD = 1e-8
SYMMETRY_TOLERANCE = 1e-12


@functools.lru_cache(maxsize=32)
def _plan(grid: GridSpec):
    """Shared per-grid arrays (immutable, safe to cache across threads)."""
    n = grid.n
    sign = np.ones(n)
    sign[1::2] = -1.0
    forward_scale = sign * (grid.dx / np.sqrt(2.0 * np.pi))
    inverse_scale = sign * (grid.dxi * n / np.sqrt(2.0 * np.pi))
    return forward_scale, inverse_scale


def forward_transform(u: RealField) -> SpectralField:
    """Continuum-normalized Fourier coefficients of a real field."""
    if not u.is_finite():
        raise InvalidFieldError("cannot transform a field with non-finite samples")
    forward_scale, _ = _plan(u.grid)
    return SpectralField(u.grid, forward_scale * np.fft.fft(u.samples))


def inverse_transform(f: SpectralField) -> RealField:
    """Real samples from conjugate-symmetric coefficients.

    The imaginary residue of the inversion must stay below
    ``SYMMETRY_TOLERANCE`` relative to the field norm; larger residue means
    the coefficients do not represent a real profile.
    """
    _, inverse_scale = _plan(f.grid)
    u = np.fft.ifft(inverse_scale * f.coeffs)
    norm = np.linalg.norm(u)
    residue = np.linalg.norm(u.imag)
    if residue > SYMMETRY_TOLERANCE * norm:
        raise SymmetryError(
            f"imaginary residue {residue:.3e} exceeds {SYMMETRY_TOLERANCE:.0e} "
            f"of field norm {norm:.3e}; coefficients are not conjugate-symmetric"
        )
    return RealField(f.grid, u.real)


def airy_propagate(f: SpectralField, t: float) -> SpectralField:
    """Free dispersive flow: multiply each mode by exp(i*t*xi**3).

    Unimodular per mode, so moduli are preserved exactly and the group law
    V(t)V(s) = V(t+s) holds to rounding.
    """
    if t == 0.0:
        return SpectralField(f.grid, f.coeffs.copy())
    xi = f.grid.wavenumbers
    return SpectralField(f.grid, np.exp(1j * t * xi**3) * f.coeffs)


def spatial_derivative(f: SpectralField, k: int) -> SpectralField:
    """k-th spectral derivative, k in 0..4; Nyquist zeroed for odd k."""
    if not isinstance(k, (int, np.integer)) or k < 0:
        raise UnsupportedOrderError(f"derivative order must be a nonnegative integer, got {k}")
    if k > 4:
        raise UnsupportedOrderError(f"derivative order {k} exceeds the supported maximum 4")
    if k == 0:
        return SpectralField(f.grid, f.coeffs.copy())
    mult = (1j * f.grid.wavenumbers) ** k
    coeffs = mult * f.coeffs
    if k % 2 == 1:
        coeffs[f.grid.nyquist_index] = 0.0
    return SpectralField(f.grid, coeffs)


def fractional_derivative(f: SpectralField, s: float) -> SpectralField:
    """Riesz-type derivative |D_x|^s for s >= 0: multiply by |xi|**s.

    The zero mode maps to 0 for s > 0 and is kept for s = 0.  The unpaired
    Nyquist coefficient is zeroed unless s is an even integer (for which
    the multiplier coincides with an integer-order derivative).
    """
    if s < 0:
        raise UnsupportedOrderError(
            "negative-order potentials are not supported (inverse Riesz out of scope)"
        )
    if s == 0:
        return SpectralField(f.grid, f.coeffs.copy())
    xi = f.grid.wavenumbers
    mult = np.abs(xi) ** s
    coeffs = mult * f.coeffs
    even_integer = float(s).is_integer() and int(s) % 2 == 0
    if not even_integer:
        coeffs[f.grid.nyquist_index] = 0.0
    return SpectralField(f.grid, coeffs)


def boundary_mass_fraction(u: RealField) -> float:
    """Fraction of the squared mass sitting in the outer 10% of the box."""
    n = u.grid.n
    outer = max(1, n // 20)
    s = u.samples
    total = float(np.sum(s * s))
    if total == 0.0:
        return 0.0
    edge = float(np.sum(s[:outer] * s[:outer]) + np.sum(s[-outer:] * s[-outer:]))
    return edge / total


def multiply_by_x(u: RealField, warn: bool = True) -> RealField:
    """Pointwise product with the physical coordinate of the truncated box.

    Advisory only: the x-weight of a field with appreciable boundary mass
    mixes in wrap-around artifacts, so a warning is raised above the
    threshold; the product is returned regardless.
    """
    if warn:
        frac = boundary_mass_fraction(u)
        if frac > BOUNDARY_ADVISORY_THRESHOLD:
            warnings.warn(
                f"boundary mass fraction {frac:.2e} exceeds "
                f"{BOUNDARY_ADVISORY_THRESHOLD:.0e}; x-weighted diagnostics are "
                "contaminated by wrap-around",
                BoundaryMassWarning,
                stacklevel=2,
            )
    return RealField(u.grid, u.grid.coordinates * u.samples)
