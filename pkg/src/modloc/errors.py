"""Exception types raised by the modloc numerical machinery."""


class ModlocError(Exception):
    """Base class for all modloc errors."""


class DecompositionFailure(ModlocError):
    """Iwasawa factorization hit a numerically degenerate coset representative."""


class EigenFailure(ModlocError):
    """A dense or tridiagonal eigensolver failed to converge."""


class QuadratureUnderResolved(ModlocError):
    """Matrix-element quadrature left an asymmetry above the build gate."""


class SingularH(ModlocError):
    """H is not safely positive definite on the truncated space."""


class SpectrumOutOfDomain(ModlocError):
    """A matrix function (log, inverse square root) was asked for outside its domain."""


class SupportEscapesGrid(ModlocError):
    """A transformed wavefunction would leave the sampling grid."""


class NyquistViolation(ModlocError):
    """The energy-side resolution cannot represent the x-side sampling."""


class ProjectionLoss(ModlocError):
    """Too much state mass falls outside the truncated basis."""


class DegenerateInterval(ModlocError):
    """An interval is too narrow for the requested sampling."""


class OverflowAbort(ModlocError):
    """An intermediate norm exceeded the overflow guard; the result is inconclusive."""


class ConfigError(ModlocError):
    """A run configuration failed validation."""
