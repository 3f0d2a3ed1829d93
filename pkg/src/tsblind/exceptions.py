"""Named errors raised by tsblind."""

import numpy as np


class NonPositiveSpectrum(ValueError):
    """The spectral density is not bounded away from zero on the grid."""


class LagOutOfRange(ValueError):
    """A covariance lag is needed beyond the stored support of a sequence with a nonzero tail."""


class LagTooLarge(ValueError):
    """An empirical autocovariance was requested at a lag p >= N."""


class WindowTooLarge(ValueError):
    """The prediction window K does not satisfy 2K < N."""


class HorizonTooSmall(ValueError):
    """A truncation horizon cannot reach the requested tolerance."""


class DomainError(ValueError):
    """An argument lies outside the domain of a closed-form rule."""


class NotPositiveDefinite(np.linalg.LinAlgError):
    """A covariance minor failed to factorise as positive definite."""


class VerificationError(AssertionError):
    """A numerical verification check did not hold."""


__all__ = [
    "DomainError",
    "HorizonTooSmall",
    "LagOutOfRange",
    "LagTooLarge",
    "NonPositiveSpectrum",
    "NotPositiveDefinite",
    "VerificationError",
    "WindowTooLarge",
]
