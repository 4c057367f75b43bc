"""Exception and warning types shared across the package."""


class GkdvError(Exception):
    """Base class for package errors."""


class InvalidFieldError(GkdvError):
    """A field contains non-finite samples or has the wrong shape."""


class SymmetryError(GkdvError):
    """Spectral coefficients are not conjugate-symmetric enough to be real."""


class UnsupportedOrderError(GkdvError):
    """Derivative order outside the supported range."""


class BlowUpError(GkdvError):
    """Non-finite values or runaway amplitude detected during time stepping.

    Carries the last good state so a partial trajectory can be returned.
    """

    def __init__(self, message, last_state=None, time=None):
        super().__init__(message)
        self.last_state = last_state
        self.time = time


class ResolutionError(GkdvError):
    """Too few stored slices (or too coarse a grid) for the requested quantity."""


class ConfigError(GkdvError):
    """Configuration document rejected; message carries the offending path."""


class IntegrityError(GkdvError):
    """A run directory is missing files or holds inconsistent data."""


class BoundaryMassWarning(UserWarning):
    """More than the advisory fraction of the field's mass sits near the box edge."""
