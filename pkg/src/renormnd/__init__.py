"""Renormalized Neumann-to-Dirichlet maps for the weighted extension problem."""

__version__ = "0.1.0"

from .errors import (  # noqa: E402
    AccuracyError,
    ConditioningError,
    ConfigError,
    ConvergenceError,
    DivergenceError,
    DomainError,
    RenormError,
    StructureError,
    TruncationError,
    UnsupportedOrderError,
)
from .logseries import LogLaurentSeries, SingularModel, mul, series_khat, series_ktilde, split_singular  # noqa: E402
from .renorm import EnergyCurve, FitResult, derezinski_bilinear, hadamard_tail_integral, renorm_limit_fit  # noqa: E402
from .specfun import Order, ScaledKind, bessel_i, bessel_k, digamma  # noqa: E402
from .spectral import MultiplierSymbol, SpectralProfile, gaussian_profile, make_symbol, pairing  # noqa: E402
