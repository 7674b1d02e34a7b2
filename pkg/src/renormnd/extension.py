"""The weighted extension problem div(y^(1+2nu) grad u) = 0 on the upper half-space.

With Neumann data -lim y^(1+2nu) d_y u = f, the horizontal Fourier transform is

    u_hat(xi, y) = hat K_nu(|xi| y) |xi|^(2nu) fhat(xi) / (2^nu Gamma(1+nu)),

and integration by parts reduces the energy above height eps to the boundary
form  int u_hat(xi, eps) (-eps^(1+2nu) d_y u_hat(xi, eps)) dxi, whose integrand
per frequency r = |xi| is

    mode_energy(nu, r, eps) = c^2 r^(2nu) z K_nu(z) K_(nu+1)(z),  z = r eps,

with c = 1 / (2^nu Gamma(1+nu)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import AccuracyError, DomainError
from .logseries import LogLaurentSeries, SingularModel, mul, series_khat, series_ktilde, split_singular
from .renorm import EnergyCurve
from .spectral import MultiplierSymbol, SpectralProfile, pairing
from .specfun import Order, as_order, k_product, kv

#: series order used for per-mode expansions
MODE_ORDER = 24.0
#: highest positive exponent turned into a fit correction term
CORRECTION_ORDER = 8.0


def flux_constant(nu) -> float:
    """c = 1 / (2^nu Gamma(1 + nu))."""
    nu = float(nu)
    return 1.0 / (2.0 ** nu * math.gamma(1.0 + nu))


def _check_nu(nu: float):
    if not nu > -1.0:
        raise DomainError(f"order must exceed -1, got {nu}")


def _khat(nu: float, z):
    # hat K_nu = z^(-nu) K_nu; K is even in nu so negative orders are fine
    if np.ndim(z) == 0:
        return z ** (-nu) * kv(nu, float(z))
    z = np.asarray(z, dtype=float)
    return z ** (-nu) * np.vectorize(lambda t: kv(nu, t))(z)


def phi_sturm(nu, lam: float, y: float) -> float:
    """Decaying solution of lam phi - y^-(1+2nu) (y^(1+2nu) phi')' = 0 with unit flux at 0."""
    nu = float(nu)
    _check_nu(nu)
    if not lam > 0 or not y > 0:
        raise DomainError("lambda and y must be positive")
    return lam ** nu * flux_constant(nu) * _khat(nu, math.sqrt(lam) * y)


def u_hat(nu, f: SpectralProfile, r: float, y: float) -> float:
    nu = float(nu)
    _check_nu(nu)
    if not r > 0 or not y > 0:
        raise DomainError("r and y must be positive")
    return flux_constant(nu) * _khat(nu, r * y) * r ** (2.0 * nu) * float(f(r))


def flux_hat(nu, f: SpectralProfile, r: float, y: float) -> float:
    """-y^(1+2nu) d_y u_hat = tilde K_(1+nu)(r y) fhat(r) / (2^nu Gamma(1+nu))."""
    nu = float(nu)
    _check_nu(nu)
    if not r > 0 or not y > 0:
        raise DomainError("r and y must be positive")
    z = r * y
    return flux_constant(nu) * z ** (1.0 + nu) * kv(1.0 + nu, z) * float(f(r))


def mode_energy(nu, r, eps):
    """Per-frequency boundary energy c^2 hatK_nu(r eps) tildeK_(1+nu)(r eps) r^(2nu).

    ``r`` and ``eps`` broadcast against each other.
    """
    nu = float(nu)
    _check_nu(nu)
    c2 = flux_constant(nu) ** 2
    if np.ndim(r) == 0 and np.ndim(eps) == 0:
        if not r > 0 or not eps > 0:
            raise DomainError("r and eps must be positive")
        return c2 * r ** (2.0 * nu) * k_product(nu, r * eps)
    rr, ee = np.broadcast_arrays(np.asarray(r, dtype=float), np.asarray(eps, dtype=float))
    if np.any(rr <= 0) or np.any(ee <= 0):
        raise DomainError("r and eps must be positive")
    z = (rr * ee).ravel()
    kp = np.fromiter((k_product(nu, t) for t in z), float, count=z.size).reshape(rr.shape)
    return c2 * rr ** (2.0 * nu) * kp


def mode_series(nu, order: float = MODE_ORDER) -> LogLaurentSeries:
    """Expansion in z of c^2 hatK_nu(z) tildeK_(1+nu)(z) (mode_energy at r = 1)."""
    o = as_order(nu)
    _check_nu(o.nu)
    if o.nu < 0 and not o.is_nonneg_integer:
        # for -1 < nu < 0, hat K_nu = tilde K_|nu| is regular at 0
        left = series_ktilde(-o.nu, order)
        lead = 0.0
    else:
        left = series_khat(o, order + 2.0 * max(o.nu, 0.0))
        lead = -2.0 * o.nu
    right = series_ktilde(1.0 + o.nu, order - lead)
    return mul(left, right, order).scale(flux_constant(o.nu) ** 2)


@dataclass(frozen=True)
class ModeEnergyExpansion:
    nu: Order
    r: float
    series: LogLaurentSeries
    model: SingularModel
    finite: float

    def singular_value(self, eps):
        return self.series.singular_part().eval(eps)

    def nonconstant_value(self, eps):
        return self.series.without_constant().eval(eps)


def mode_energy_expansion(nu, r: float, order: float = MODE_ORDER,
                          correction_order: float = CORRECTION_ORDER) -> ModeEnergyExpansion:
    """Expansion in eps of mode_energy(nu, r, eps) and its divergence model."""
    o = as_order(nu)
    if not r > 0:
        raise DomainError("r must be positive")
    s = mode_series(o, order).rescale(r).scale(r ** (2.0 * o.nu))
    model, finite, _ = split_singular(s, correction_order)
    return ModeEnergyExpansion(o, float(r), s, model, finite)


def energy_curve(nu, f: SpectralProfile, g: SpectralProfile, eps_grid) -> EnergyCurve:
    """E(eps) = (2pi)^-d omega_(d-1) int mode_energy(nu, r, eps) fhat ghat r^(d-1) dr on a grid."""
    o = as_order(nu)
    _check_nu(o.nu)
    if f.d != g.d:
        raise DomainError(f"dimension mismatch: {f.d} vs {g.d}")
    eps = np.asarray(eps_grid, dtype=float)
    values = [pairing(f, g, MultiplierSymbol(lambda r, e=e: mode_energy(o.nu, r, e), 0.0, "mode"))
              for e in eps]
    meta = {"nu": o.nu, "description": f"energy {f.label} x {g.label}", "d": f.d}
    return EnergyCurve(eps, np.array(values), meta)


@dataclass(frozen=True)
class EnergyExpansion:
    """Expansion in eps of E(eps) for a pair of profiles.

    Each coefficient of ``series`` is a pairing of f, g against the
    r-dependent coefficient of the per-mode expansion.  ``model`` describes
    the divergences; ``finite`` is the predicted renormalized limit.
    """

    nu: Order
    series: LogLaurentSeries
    model: SingularModel
    finite: float
    log_coefficient: float

    @property
    def coefficients(self):
        out = {}
        if self.model.has_log:
            out["log(1/eps)"] = self.log_coefficient
        for a in self.model.power_exponents:
            out[f"eps^{a:g}"] = self.series.coefficient(a, 0)
        return out

    def singular_value(self, eps):
        return self.series.singular_part().eval(eps)

    def nonconstant_value(self, eps):
        return self.series.without_constant().eval(eps)


def moment_symbol(nu: float, a: float, q: int) -> MultiplierSymbol:
    """r -> r^(2nu + a) (log r)^q."""
    return MultiplierSymbol(lambda r: r ** (2.0 * nu + a) * np.log(r) ** q, 0.0,
                            f"r^{2 * nu + a:g} log^{q}")


def energy_singular_model(nu, f: SpectralProfile, g: SpectralProfile,
                          order: float = 16.0,
                          correction_order: float = CORRECTION_ORDER) -> EnergyExpansion:
    """Singular structure of E(eps) with coefficients paired against f, g.

    A per-mode term c z^a (log z)^p with z = r eps contributes
    c C(p, k) eps^a (log eps)^k <r^(2nu+a) (log r)^(p-k)> for k = 0..p.
    """
    o = as_order(nu)
    if f.d != g.d:
        raise DomainError(f"dimension mismatch: {f.d} vs {g.d}")
    ps = mode_series(o, order)
    cache = {}
    terms = []
    for a, p, c in ps.terms:
        for k in range(p + 1):
            key = (round(a, 9), p - k)
            if key not in cache:
                cache[key] = pairing(f, g, moment_symbol(o.nu, a, p - k))
            terms.append((a, k, c * math.comb(p, k) * cache[key]))
    s = LogLaurentSeries.from_terms(terms, ps.truncation_order)
    model, finite, logc = split_singular(s, correction_order)
    return EnergyExpansion(o, s, model, finite, logc)


# ----------------------------------------------------------------------------
# physical-space oracle for nu = 0, d = 1
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class SampledFunction:
    """Samples f(x0 + i h), i = 0..n-1, on a uniform grid."""

    x0: float
    h: float
    values: np.ndarray

    @property
    def x(self):
        return self.x0 + self.h * np.arange(len(self.values))

    @classmethod
    def from_callable(cls, fn, half_width: float, h: float):
        n = int(round(2 * half_width / h)) + 1
        x = -half_width + h * np.arange(n)
        return cls(-half_width, h, np.asarray(fn(x), dtype=float))


def _kernel_sum(fs: SampledFunction, x, y: float, power: float, stride: int = 1):
    z = fs.x[::stride]
    fv = fs.values[::stride]
    x = np.atleast_1d(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    chunk = max(1, 2_000_000 // max(len(z), 1))
    for s in range(0, len(x), chunk):
        xx = x[s:s + chunk, None]
        out[s:s + chunk] = ((xx - z) ** 2 + y * y) ** (-power) @ fv
    return out * fs.h * stride


def _checked(fs: SampledFunction, x, y, power, tol):
    if len(fs.values) < 5:
        raise AccuracyError("need at least five samples")
    edge = max(abs(fs.values[0]), abs(fs.values[-1]))
    if edge > 1e-12 * np.max(np.abs(fs.values)):
        raise AccuracyError("samples do not cover the support of f")
    fine = _kernel_sum(fs, x, y, power)
    coarse = _kernel_sum(fs, x, y, power, stride=2)
    err = np.max(np.abs(fine - coarse))
    if err > tol * max(np.max(np.abs(fine)), 1e-300):
        raise AccuracyError(f"grid spacing {fs.h:g} too coarse at y={y:g} (estimated error {err:.2e})")
    return fine


def poisson_u0(f_samples: SampledFunction, x, y: float, tol: float = 1e-8):
    """u_f(x, y) = 1/2 int f(z) ((x - z)^2 + y^2)^(-1/2) dz (trapezoidal rule, d = 1).

    The error estimate compares against the rule on every other sample.
    """
    if not y > 0:
        raise DomainError("y must be positive")
    out = 0.5 * _checked(f_samples, x, y, 0.5, tol)
    return float(out[0]) if np.ndim(x) == 0 else out


def poisson_flux0(f_samples: SampledFunction, x, y: float, tol: float = 1e-8):
    """-y d_y u_f(x, y) = y^2/2 int f(z) ((x - z)^2 + y^2)^(-3/2) dz."""
    if not y > 0:
        raise DomainError("y must be positive")
    out = 0.5 * y * y * _checked(f_samples, x, y, 1.5, tol)
    return float(out[0]) if np.ndim(x) == 0 else out


def poisson_energy0(f_samples: SampledFunction, eps: float, half_width: float = 60.0,
                    h: float | None = None, tol: float = 1e-8) -> float:
    """Boundary form int u_f(x, eps) (-eps d_y u_f(x, eps)) dx from the Poisson kernel."""
    h = f_samples.h if h is None else h
    n = int(round(2 * half_width / h)) + 1
    x = -half_width + h * np.arange(n)
    u = poisson_u0(f_samples, x, eps, tol)
    q = poisson_flux0(f_samples, x, eps, tol)
    w = np.full(n, h)
    w[0] = w[-1] = 0.5 * h
    return float(np.dot(w, u * q))


__all__ = [
    "EnergyExpansion",
    "ModeEnergyExpansion",
    "SampledFunction",
    "energy_curve",
    "energy_singular_model",
    "flux_constant",
    "flux_hat",
    "mode_energy",
    "mode_energy_expansion",
    "mode_series",
    "phi_sturm",
    "poisson_energy0",
    "poisson_flux0",
    "poisson_u0",
    "u_hat",
]
