"""Truncated expansions  sum c * z**a * (log z)**p  with real exponents.

These hold the small-argument expansions of the scaled Macdonald functions
and their products.  Coefficients are plain floats; exponents that agree to
``EXPONENT_TOL`` are merged so that irrational exponents (non-integer order)
do not fragment.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from math import comb
from typing import Iterable

import numpy as np

from .errors import DomainError, StructureError
from .specfun import INTEGER_TOL, LOG2, MAX_ORDER, Order, as_order, digamma

EXPONENT_TOL = 1e-9
MAX_LOG_POWER = 2


def _normalize(terms):
    items = sorted((float(a), int(p), float(c)) for a, p, c in terms)
    reps = []
    acc = {}
    for a, p, c in items:
        # cluster on the exponent first so that log powers share one representative
        if not reps or abs(a - reps[-1]) >= EXPONENT_TOL:
            reps.append(a)
        key = (reps[-1], p)
        acc[key] = acc.get(key, 0.0) + c
    return tuple((a, p, c) for (a, p), c in sorted(acc.items()) if c != 0.0)


@dataclass(frozen=True)
class LogLaurentSeries:
    """Finite sum of ``c * z**a * (log z)**p`` terms.

    ``truncation_order`` bounds the omitted tail: every dropped term has an
    exponent strictly greater than it.
    """

    terms: tuple = ()
    truncation_order: float = math.inf

    def __post_init__(self):
        norm = _normalize(self.terms)
        for a, p, c in norm:
            if not 0 <= p <= MAX_LOG_POWER:
                raise StructureError(f"log power {p} outside 0..{MAX_LOG_POWER}")
        object.__setattr__(self, "terms", norm)
        object.__setattr__(self, "truncation_order", float(self.truncation_order))

    @classmethod
    def from_terms(cls, terms: Iterable, truncation_order: float = math.inf):
        keep = [(a, p, c) for a, p, c in terms if a <= truncation_order + EXPONENT_TOL]
        return cls(tuple(keep), truncation_order)

    def __len__(self):
        return len(self.terms)

    def __iter__(self):
        return iter(self.terms)

    def coefficient(self, exponent: float, logpower: int = 0) -> float:
        for a, p, c in self.terms:
            if p == logpower and abs(a - exponent) < EXPONENT_TOL:
                return c
        return 0.0

    @property
    def constant(self) -> float:
        return self.coefficient(0.0, 0)

    @property
    def exponents(self):
        out = []
        for a, _, _ in self.terms:
            if not out or abs(out[-1] - a) >= EXPONENT_TOL:
                out.append(a)
        return tuple(out)

    def truncate(self, order: float) -> "LogLaurentSeries":
        return LogLaurentSeries.from_terms(self.terms, min(order, self.truncation_order))

    def scale(self, factor: float) -> "LogLaurentSeries":
        return LogLaurentSeries(tuple((a, p, c * factor) for a, p, c in self.terms),
                                self.truncation_order)

    def shift(self, k: float) -> "LogLaurentSeries":
        """Multiply by z**k."""
        return LogLaurentSeries(tuple((a + k, p, c) for a, p, c in self.terms),
                                self.truncation_order + k)

    def __add__(self, other: "LogLaurentSeries") -> "LogLaurentSeries":
        order = min(self.truncation_order, other.truncation_order)
        return LogLaurentSeries.from_terms(self.terms + other.terms, order)

    def __neg__(self):
        return self.scale(-1.0)

    def __sub__(self, other):
        return self + (-other)

    def singular_part(self) -> "LogLaurentSeries":
        """Terms with negative exponent plus the log term at exponent 0."""
        keep = [(a, p, c) for a, p, c in self.terms
                if a < -EXPONENT_TOL or (abs(a) < EXPONENT_TOL and p > 0)]
        return LogLaurentSeries(tuple(keep), self.truncation_order)

    def without_constant(self) -> "LogLaurentSeries":
        keep = [(a, p, c) for a, p, c in self.terms if not (abs(a) < EXPONENT_TOL and p == 0)]
        return LogLaurentSeries(tuple(keep), self.truncation_order)

    def __call__(self, z):
        return self.eval(z)

    def eval(self, z):
        lz = np.log(z)
        total = 0.0
        for a, p, c in self.terms:
            total = total + c * z ** a * lz ** p
        return total

    def rescale(self, r: float) -> "LogLaurentSeries":
        """Substitute z = r * eps and return the series in eps.

        z**a (log z)**p = r**a eps**a (log eps + log r)**p.
        """
        lr = math.log(r)
        out = []
        for a, p, c in self.terms:
            base = c * r ** a
            for k in range(p + 1):
                out.append((a, k, base * comb(p, k) * lr ** (p - k)))
        return LogLaurentSeries(tuple(out), self.truncation_order)

    def to_rows(self):
        return [{"exponent": a, "logpower": p, "coefficient": c} for a, p, c in self.terms]


def mul(a: LogLaurentSeries, b: LogLaurentSeries, order: float) -> LogLaurentSeries:
    """Product of two series truncated at ``order``.

    The result is exact through min(order, a.trunc + min exp(b), b.trunc + min exp(a)).
    """
    lim = order
    if a.terms and b.terms:
        lim = min(order, a.truncation_order + b.terms[0][0], b.truncation_order + a.terms[0][0])
    out = []
    for ea, pa, ca in a.terms:
        for eb, pb, cb in b.terms:
            e = ea + eb
            if e > lim + EXPONENT_TOL:
                continue
            if pa + pb > MAX_LOG_POWER:
                raise StructureError("product needs log power > 2")
            out.append((e, pa + pb, ca * cb))
    return LogLaurentSeries.from_terms(out, lim)


# ----------------------------------------------------------------------------
# Expansions of the scaled Macdonald functions
# ----------------------------------------------------------------------------

def _reflection_series(nu: float, order: float, shift: float) -> list:
    """pi/(2 sin pi nu) sum_j [ z^(2j-2nu)/(2^(2j-nu) j! G(j-nu+1)) - z^(2j)/(2^(2j+nu) j! G(j+nu+1)) ]

    multiplied by z**shift; terms with final exponent <= order only.
    """
    pref = math.pi / (2.0 * math.sin(math.pi * nu))
    out = []
    j = 0
    while 2 * j - 2 * nu + shift <= order + EXPONENT_TOL:
        out.append((2 * j - 2 * nu + shift, 0,
                    pref / (2.0 ** (2 * j - nu) * math.factorial(j) * math.gamma(j - nu + 1))))
        j += 1
    j = 0
    while 2 * j + shift <= order + EXPONENT_TOL:
        out.append((2 * j + shift, 0,
                    -pref / (2.0 ** (2 * j + nu) * math.factorial(j) * math.gamma(j + nu + 1))))
        j += 1
    return out


def _integer_khat_terms(n: int, order: float) -> list:
    """Standard log-bearing expansion of z**(-n) K_n(z)."""
    out = []
    for j in range(n):
        out.append((-2.0 * (n - j), 0,
                    (-1) ** j * math.factorial(n - j - 1) / (2.0 ** (2 * j - n + 1) * math.factorial(j))))
    j = 0
    while 2 * j <= order + EXPONENT_TOL:
        denom = 2.0 ** (2 * j + n + 1) * math.factorial(j) * math.factorial(n + j)
        sign = (-1) ** n
        out.append((2.0 * j, 0,
                    sign * (digamma(j + 1) + digamma(j + n + 1) + 2 * LOG2) / denom))
        out.append((2.0 * j, 1, sign * (-2.0) / denom))
        j += 1
    return out


def series_khat(nu, order: float) -> LogLaurentSeries:
    """Expansion of z**(-nu) K_nu(z) through exponent ``order``.

    For non-integer ``nu`` the singular block carries the sign
    ``+pi/(2 sin pi nu)`` and the constant term is
    ``-pi / (2**(nu+1) Gamma(nu+1) sin(pi nu)) = Gamma(-nu) / 2**(nu+1)``.
    For integer ``nu = n`` the constant term is
    ``(-1)**n/(2**(n+1) n!) (psi(1) + psi(n+1) + 2 log 2)`` with log term
    ``(-1)**(n+1)/(2**n n!) log z``.
    """
    o = as_order(nu)
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    if not -INTEGER_TOL < o.nu <= 6.0:
        raise DomainError(f"series_khat supports nu in [0, 6], got {o.nu}")
    if o.is_nonneg_integer:
        terms = _integer_khat_terms(o.n, order)
    else:
        terms = _reflection_series(o.nu, order, 0.0)
    return LogLaurentSeries.from_terms(terms, order)



def series_ktilde(mu: float, order: float) -> LogLaurentSeries:
    """Expansion of z**mu K_mu(z) through exponent ``order``; constant 2**(mu-1) Gamma(mu)."""
    if not 0 < mu <= MAX_ORDER + 1:
        raise DomainError(f"series_ktilde requires 0 < mu <= {MAX_ORDER + 1:g}, got {mu}")
    if order < 0:
        raise DomainError(f"order must be >= 0, got {order}")
    o = Order(mu)
    if o.is_nonneg_integer:
        n = o.n
        base = LogLaurentSeries.from_terms(_integer_khat_terms(n, order - 2 * n), order - 2 * n)
        return base.shift(2 * n)
    # z^mu * z^mu * khat  ==  reflection series shifted by 2 mu
    return LogLaurentSeries.from_terms(_reflection_series(o.nu, order, 2 * o.nu), order)


def khat_printed_finite_part(nu) -> float:
    """Constant term of K-hat as printed in the source statement of the expansion.

    Non-integer: +pi / (2**(nu+1) Gamma(nu+1) sin(pi nu)).
    Integer:     (-1)**n / (2**n n!) (psi(1) + psi(n+1) + 2 log 2).
    Kept for the errata audit only.
    """
    o = as_order(nu)
    if o.is_nonneg_integer:
        n = o.n
        return (-1) ** n / (2.0 ** n * math.factorial(n)) * (
            digamma(1) + digamma(n + 1) + 2 * LOG2)
    return math.pi / (2.0 ** (o.nu + 1) * math.gamma(o.nu + 1) * math.sin(math.pi * o.nu))


# ----------------------------------------------------------------------------
# Divergence models
# ----------------------------------------------------------------------------

def _uniq(values):
    out = []
    for v in sorted(float(x) for x in values):
        if not out or abs(out[-1] - v) >= EXPONENT_TOL:
            out.append(v)
    return tuple(out)


@dataclass(frozen=True)
class SingularModel:
    """Divergence structure  a0 log(1/eps) + sum a_k eps**(-lam_k) + chi(eps).

    ``power_exponents`` are the (negative) exponents -lam_k.  The remaining
    fields name extra fit-basis terms that describe how chi approaches its
    limit: eps**a, eps**a log(eps) and eps**a log(eps)**2.
    """

    power_exponents: tuple = ()
    has_log: bool = False
    correction_exponents: tuple = ()
    log_corrections: tuple = ()
    log2_corrections: tuple = field(default=())

    def __post_init__(self):
        for name in ("power_exponents", "correction_exponents", "log_corrections", "log2_corrections"):
            object.__setattr__(self, name, _uniq(getattr(self, name)))
        if any(a >= 0 for a in self.power_exponents):
            raise StructureError("power exponents must be negative")
        for name in ("correction_exponents", "log_corrections", "log2_corrections"):
            if any(a <= 0 for a in getattr(self, name)):
                raise StructureError(f"{name} must be positive")

    @property
    def is_empty(self) -> bool:
        return not self.power_exponents and not self.has_log

    def basis_labels(self):
        labels = ["1"]
        if self.has_log:
            labels.append("log(1/eps)")
        labels += [f"eps^{a:g}" for a in self.power_exponents]
        labels += [f"eps^{a:g}" for a in self.correction_exponents]
        labels += [f"eps^{a:g} log(eps)" for a in self.log_corrections]
        labels += [f"eps^{a:g} log(eps)^2" for a in self.log2_corrections]
        return labels

    def basis(self, eps):
        eps = np.asarray(eps, dtype=float)
        le = np.log(eps)
        cols = [np.ones_like(eps)]
        if self.has_log:
            cols.append(-le)
        cols += [eps ** a for a in self.power_exponents]
        cols += [eps ** a for a in self.correction_exponents]
        cols += [eps ** a * le for a in self.log_corrections]
        cols += [eps ** a * le ** 2 for a in self.log2_corrections]
        return np.column_stack(cols)

    def with_corrections(self, corrections=(), log_corrections=(), log2_corrections=()):
        return SingularModel(self.power_exponents, self.has_log,
                             tuple(self.correction_exponents) + tuple(corrections),
                             tuple(self.log_corrections) + tuple(log_corrections),
                             tuple(self.log2_corrections) + tuple(log2_corrections))

    def to_dict(self):
        return {
            "power_exponents": list(self.power_exponents),
            "has_log": self.has_log,
            "correction_exponents": list(self.correction_exponents),
            "log_corrections": list(self.log_corrections),
            "log2_corrections": list(self.log2_corrections),
        }

    @classmethod
    def from_dict(cls, d):
        return cls(tuple(d.get("power_exponents", ())), bool(d.get("has_log", False)),
                   tuple(d.get("correction_exponents", ())), tuple(d.get("log_corrections", ())),
                   tuple(d.get("log2_corrections", ())))


def split_singular(s: LogLaurentSeries, correction_order: float = math.inf):
    """Split a series into its divergence model, finite part and log(1/z) coefficient.

    Positive-exponent terms up to ``correction_order`` become correction terms
    of the returned model.
    """
    powers, corr, logc, log2c = [], [], [], []
    has_log = False
    finite = 0.0
    log_coeff = 0.0
    for a, p, c in s.terms:
        if a < -EXPONENT_TOL:
            if p:
                raise StructureError(f"log term at negative exponent {a} is outside the model")
            powers.append(a)
        elif abs(a) < EXPONENT_TOL:
            if p == 0:
                finite = c
            elif p == 1:
                has_log = True
                log_coeff = -c
            else:
                raise StructureError("log^2 term at exponent 0 is outside the model")
        elif a <= correction_order + EXPONENT_TOL:
            (corr, logc, log2c)[p].append(a)
    model = SingularModel(tuple(powers), has_log, tuple(corr), tuple(logc), tuple(log2c))
    return model, finite, log_coeff


__all__ = [
    "EXPONENT_TOL",
    "LogLaurentSeries",
    "SingularModel",
    "khat_printed_finite_part",
    "mul",
    "series_khat",
    "series_ktilde",
    "split_singular",
]
