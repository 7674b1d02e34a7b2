"""Exception hierarchy shared by all modules."""


class RenormError(Exception):
    """Base class for library errors."""


class DomainError(RenormError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class UnsupportedOrderError(DomainError):
    """Bessel order outside the supported range."""


class StructureError(RenormError, ValueError):
    """Series or model does not have the shape an operation requires."""


class ConditioningError(RenormError):
    """Least-squares basis is rank deficient on the sampling grid."""

    def __init__(self, message, terms=()):
        super().__init__(message)
        self.terms = tuple(terms)


class TruncationError(RenormError):
    """Quadrature tail beyond the cutoff is not negligible."""


class DivergenceError(RenormError):
    """Integrand does not decay fast enough to be integrated."""


class ConvergenceError(RenormError):
    """An extrapolated limit failed its self-consistency check."""


class AccuracyError(RenormError):
    """Quadrature grid too coarse for the requested tolerance."""


class ConfigError(RenormError, ValueError):
    """Invalid run configuration."""
