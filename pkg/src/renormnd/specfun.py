"""Gamma, digamma and modified Bessel functions of real order.

``bessel_k`` evaluates the Macdonald function K_nu together with the two
power-scaled variants used throughout the package::

    hat(nu, z)   = z**(-nu) * K_nu(z)
    tilde(nu, z) = z**nu    * K_nu(z)

K is computed with Temme's method: the order is split as ``nu = n + mu`` with
``|mu| <= 1/2``, the pair (K_mu, K_{mu+1}) is obtained from Temme's series for
``z <= 2`` (which reduces to the logarithmic expansion at integer order, so no
limit ``mu -> 0`` is ever taken numerically) or from Steed's continued fraction
for ``z > 2``, and the order is raised by the upward recurrence, which is stable
for K.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DomainError, UnsupportedOrderError

EULER_GAMMA = 0.57721566490153286061
LOG2 = math.log(2.0)

#: distance below which an order is treated as an integer
INTEGER_TOL = 1e-12
#: largest |nu| accepted by the public ``bessel_k``
MAX_ORDER = 6.0

_SERIES_RTOL = 1e-16
_SERIES_CAP = 60
_EPS = 1e-16
_CF_MAXIT = 10_000

# Taylor coefficients of 1/Gamma(1 + x) about x = 0.
_RGAMMA1 = (
    1.0,
    0.57721566490153286061,
    -0.65587807152025388108,
    -0.042002635034095235529,
    0.1665386113822914895,
    -0.042197734555544336748,
    -0.0096219715278769735621,
    0.0072189432466630995424,
    -0.0011651675918590651121,
    -0.00021524167411495097282,
    0.00012805028238811618615,
    -0.000020134854780788238656,
    -1.2504934821426706573e-6,
    1.1330272319816958824e-6,
    -2.0563384169776071035e-7,
    6.1160951044814158179e-9,
    5.0020076444692229301e-9,
    -1.1812745704870201446e-9,
    1.0434267116911005105e-10,
    7.782263439905071254e-12,
    -3.6968056186422057082e-12,
    5.100370287454475979e-13,
    -2.0583260535665067832e-14,
    -5.3481225394230179824e-15,
    1.2267786282382607902e-15,
    -1.1812593016974587695e-16,
)


class ScaledKind(str, Enum):
    """Power prefactor applied to K_nu(z): z**0, z**(-nu) or z**nu."""

    PLAIN = "plain"
    HAT = "hat"
    TILDE = "tilde"


@dataclass(frozen=True)
class Order:
    """A real Bessel order with its integer classification."""

    nu: float

    def __post_init__(self):
        object.__setattr__(self, "nu", float(self.nu))
        if not math.isfinite(self.nu):
            raise DomainError(f"order must be finite, got {self.nu}")

    @property
    def is_nonneg_integer(self) -> bool:
        return self.nu > -INTEGER_TOL and abs(self.nu - round(self.nu)) < INTEGER_TOL

    @property
    def n(self) -> int:
        """Nearest integer (meaningful when ``is_nonneg_integer``)."""
        return int(round(self.nu))

    @property
    def frac(self) -> float:
        return 0.0 if self.is_nonneg_integer else self.nu - math.floor(self.nu)

    def __float__(self):
        return self.nu


def as_order(nu) -> Order:
    return nu if isinstance(nu, Order) else Order(nu)


def gamma(x: float) -> float:
    return math.gamma(x)


def digamma(x: float) -> float:
    """Logarithmic derivative of the gamma function for ``x > 0``.

    Upward recurrence to ``x >= 10`` followed by the Stirling series
    with Bernoulli terms through ``x**-14``.
    """
    x = float(x)
    if not x > 0.0 or not math.isfinite(x):
        raise DomainError(f"digamma requires x > 0, got {x}")
    acc = 0.0
    while x < 10.0:
        acc -= 1.0 / x
        x += 1.0
    x2 = 1.0 / (x * x)
    tail = x2 * (1 / 12 - x2 * (1 / 120 - x2 * (1 / 252 - x2 * (
        1 / 240 - x2 * (1 / 132 - x2 * (691 / 32760 - x2 / 12))))))
    return acc + math.log(x) - 0.5 / x - tail


def _rgamma1_parts(mu: float):
    """Return (gam1, gam2, 1/Gamma(1+mu), 1/Gamma(1-mu)) for |mu| <= 1/2."""
    even = 0.0
    odd = 0.0
    for k in range(len(_RGAMMA1) - 1, -1, -1):
        if k % 2:
            odd = odd * mu * mu + _RGAMMA1[k]
        else:
            even = even * mu * mu + _RGAMMA1[k]
    # odd holds sum_{k odd} c_k mu^(k-1), even holds sum_{k even} c_k mu^k
    gampl = even + mu * odd
    gammi = even - mu * odd
    return -odd, even, gampl, gammi


def _k_temme_series(mu: float, x: float):
    x2 = 0.5 * x
    pimu = math.pi * mu
    fact = 1.0 if abs(pimu) < _EPS else pimu / math.sin(pimu)
    d = -math.log(x2)
    e = mu * d
    fact2 = 1.0 if abs(e) < _EPS else math.sinh(e) / e
    gam1, gam2, gampl, gammi = _rgamma1_parts(mu)
    ff = fact * (gam1 * math.cosh(e) + gam2 * fact2 * d)
    total = ff
    e = math.exp(e)
    p = 0.5 * e / gampl
    q = 0.5 / (e * gammi)
    c = 1.0
    dd = x2 * x2
    total1 = p
    mu2 = mu * mu
    i = 1
    while True:
        ff = (i * ff + p + q) / (i * i - mu2)
        c *= dd / i
        p /= i - mu
        q /= i + mu
        term = c * ff
        total += term
        total1 += c * (p - i * ff)
        if abs(term) < abs(total) * _EPS:
            break
        i += 1
        if i > _CF_MAXIT:  # pragma: no cover - x <= 2 converges in < 30 terms
            raise RuntimeError("Temme series did not converge")
    return total, total1 * 2.0 / x


def _k_steed_cf(mu: float, x: float):
    mu2 = mu * mu
    b = 2.0 * (1.0 + x)
    d = 1.0 / b
    h = delh = d
    q1, q2 = 0.0, 1.0
    a1 = 0.25 - mu2
    q = c = a1
    a = -a1
    s = 1.0 + q * delh
    for i in range(2, _CF_MAXIT):
        a -= 2 * (i - 1)
        c = -a * c / i
        qnew = (q1 - b * q2) / a
        q1, q2 = q2, qnew
        q += c * qnew
        b += 2.0
        d = 1.0 / (b + a * d)
        delh = (b * d - 1.0) * delh
        h += delh
        dels = q * delh
        s += dels
        if abs(dels / s) < _EPS:
            break
    else:  # pragma: no cover
        raise RuntimeError("continued fraction did not converge")
    h = a1 * h
    kmu = math.sqrt(math.pi / (2.0 * x)) * math.exp(-x) / s
    kmu1 = kmu * (mu + x + 0.5 - h) / x
    return kmu, kmu1


def _snap(nu: float) -> float:
    r = round(nu)
    return float(r) if abs(nu - r) < INTEGER_TOL else nu


def _k_pair(nu: float, x: float):
    """(K_nu(x), K_{nu+1}(x)) for nu >= -1/2, x > 0."""
    nu = _snap(nu)
    nl = math.floor(nu + 0.5)
    mu = nu - nl
    if x <= 2.0:
        k0, k1 = _k_temme_series(mu, x)
    else:
        k0, k1 = _k_steed_cf(mu, x)
    for i in range(1, nl + 1):
        k0, k1 = k1, k0 + 2.0 * (mu + i) / x * k1
    return k0, k1


def kv(nu: float, x: float) -> float:
    """K_nu(x) for any real order; no range check on the order."""
    nu = abs(float(nu))
    if not x > 0.0:
        raise DomainError(f"bessel_k requires z > 0, got {x}")
    return _k_pair(nu, x)[0]


def k_product(nu: float, x: float) -> float:
    """x * K_nu(x) * K_{nu+1}(x) for nu > -1 (one recurrence for both factors)."""
    if not x > 0.0:
        raise DomainError(f"z must be positive, got {x}")
    if nu >= -0.5:
        k0, k1 = _k_pair(nu, x)
    else:
        k0 = _k_pair(-nu, x)[0]
        k1 = _k_pair(nu + 1.0, x)[0]
    return x * k0 * k1


def _vectorize(scalar_fn, *args, z):
    if np.ndim(z) == 0:
        return scalar_fn(*args, float(z))
    zz = np.asarray(z, dtype=float)
    out = np.empty_like(zz)
    flat = out.reshape(-1)
    for i, v in enumerate(zz.reshape(-1)):
        flat[i] = scalar_fn(*args, float(v))
    return out


def _bessel_k_scalar(kind: ScaledKind, nu: float, z: float) -> float:
    if not z > 0.0:
        raise DomainError(f"bessel_k requires z > 0, got {z}")
    k = kv(nu, z)
    if kind is ScaledKind.PLAIN:
        return k
    if kind is ScaledKind.HAT:
        return z ** (-nu) * k
    return z ** nu * k


def bessel_k(kind, nu: float, z):
    """Macdonald function K_nu(z), optionally scaled by z**(-nu) or z**nu.

    Parameters
    ----------
    kind : ScaledKind or {"plain", "hat", "tilde"}
    nu : float
        Real order, ``|nu| <= 6``.
    z : float or array_like
        Positive argument.
    """
    kind = ScaledKind(kind)
    nu = float(nu)
    if abs(nu) > MAX_ORDER:
        raise UnsupportedOrderError(f"|nu| <= {MAX_ORDER} required, got {nu}")
    return _vectorize(_bessel_k_scalar, kind, nu, z=z)


def _bessel_i_scalar(nu: float, z: float) -> float:
    if not z > 0.0:
        raise DomainError(f"bessel_i requires z > 0, got {z}")
    q = 0.25 * z * z
    term = (0.5 * z) ** nu / math.gamma(nu + 1.0)
    total = term
    # the peak term sits near j ~ z/2, so the cap grows with z
    cap = _SERIES_CAP + 2 * int(math.ceil(z))
    for j in range(1, cap + 1):
        term *= q / (j * (j + nu))
        total += term
        if abs(term) < _SERIES_RTOL * abs(total):
            break
    return total


def bessel_i(nu: float, z):
    """Modified Bessel function of the first kind by its ascending series."""
    nu = float(nu)
    if not nu > -1.0:
        raise DomainError(f"bessel_i requires nu > -1, got {nu}")
    return _vectorize(_bessel_i_scalar, nu, z=z)
