"""Extraction of the renormalized boundary symbol and the errata report.

Two extraction routes are offered for every quantity:

* ``fit``: least-squares renormalized limit of a sampled energy curve in the
  basis of its singular model;
* ``subtract``: the full audited singular series is removed from the energy
  and the remainder is read off at small eps, with a Richardson-style
  stability check at eps/2.

Each report entry compares the extracted value with an oracle (closed form or
audited series constant) and with the constant as printed in the source
statement.  ``pass`` means both agree, ``flag`` means the oracle agrees but
the printed constant does not, ``fail`` means the oracle disagrees or the
computation raised.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from . import __version__
from .errors import ConfigError, ConvergenceError, DomainError, RenormError
from .extension import energy_curve, energy_singular_model, mode_energy, mode_energy_expansion, mode_series
from .logseries import khat_printed_finite_part
from .renorm import DEFAULT_EPS_COUNT, DEFAULT_EPS_MAX, DEFAULT_EPS_MIN, EnergyCurve, eps_grid, renorm_limit_fit
from .specfun import LOG2, ScaledKind, as_order, bessel_k, digamma
from .spectral import MultiplierSymbol, SpectralProfile, gaussian_profile, pairing

METHODS = ("fit", "subtract")
#: the subtract path stops shrinking eps once eps^(-2 nu) reaches this ratio
CANCELLATION_LIMIT = 1e3
SUBTRACT_EPS_FLOOR = 1e-3
RICHARDSON_RTOL = 1e-7
#: argument at which small-z limits are sampled
LIMIT_Z = 1e-8


def _check_order(nu: float):
    if not nu > -1.0:
        raise DomainError(f"order must exceed -1, got {nu}")


# ----------------------------------------------------------------------------
# symbols
# ----------------------------------------------------------------------------

def _integer_constants(n: int):
    """(c0, c1) with corrected symbol r^(2n) (c0 + c1 log r) for integer order n."""
    s = mode_series(n)
    return s.coefficient(0.0, 0), s.coefficient(0.0, 1)


def corrected_constant(nu) -> float:
    """Gamma(-nu) / (2^(2 nu + 1) Gamma(1 + nu)) for non-integer nu."""
    o = as_order(nu)
    if o.is_nonneg_integer:
        raise DomainError("integer orders have a log-dependent symbol")
    return math.gamma(-o.nu) / (2.0 ** (2.0 * o.nu + 1.0) * math.gamma(1.0 + o.nu))


def printed_constant(nu) -> float:
    """Non-integer constant pi / (2^(nu+1) Gamma(nu+1) sin(pi nu)) as printed."""
    o = as_order(nu)
    if o.is_nonneg_integer:
        raise DomainError("integer orders have a log-dependent symbol")
    return khat_printed_finite_part(o)


def symbol_function(nu, variant: str = "corrected"):
    """Vectorized r -> symbol(r) for the given variant."""
    o = as_order(nu)
    _check_order(o.nu)
    p = 2.0 * o.nu
    if variant == "corrected":
        if o.is_nonneg_integer:
            c0, c1 = _integer_constants(o.n)
            return lambda r: np.asarray(r, dtype=float) ** p * (c0 + c1 * np.log(r))
        c = corrected_constant(o)
        return lambda r: c * np.asarray(r, dtype=float) ** p
    if variant == "printed":
        if o.is_nonneg_integer:
            n = o.n
            a = (-1) ** n / (2.0 ** n * math.factorial(n))
            b = digamma(1.0) + digamma(n + 1.0) + 2.0 * LOG2
            return lambda r: a * (b - np.log(np.asarray(r, dtype=float) ** 2)) * np.asarray(r, dtype=float) ** p
        c = printed_constant(o)
        return lambda r: c * np.asarray(r, dtype=float) ** p
    raise DomainError(f"unknown symbol variant {variant!r}; expected printed or corrected")


def paper_symbol(nu, r: float, variant: str = "corrected") -> float:
    """Boundary symbol at frequency r, either as printed or as corrected."""
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    return float(symbol_function(nu, variant)(float(r)))


def symbol_multiplier(nu, variant: str = "corrected") -> MultiplierSymbol:
    fn = symbol_function(nu, variant)
    return MultiplierSymbol(fn, 0.0, f"{variant}:nu={as_order(nu).nu:g}")


# ----------------------------------------------------------------------------
# extraction
# ----------------------------------------------------------------------------

def subtract_eps(nu: float, scale: float = 1.0) -> float:
    """Sampling point for the subtract path.

    ``scale`` is the natural length (1/r for a single mode).  The point is
    the larger of the floor and the eps at which (eps/scale)^(-2 nu) reaches
    CANCELLATION_LIMIT, so the subtraction never cancels more than three digits.
    """
    z = SUBTRACT_EPS_FLOOR
    if nu > 0:
        z = max(z, CANCELLATION_LIMIT ** (-1.0 / (2.0 * nu)))
    return z * scale


def _richardson(values, rtol: float = RICHARDSON_RTOL) -> float:
    v0, v1 = values
    if abs(v0 - v1) > rtol * max(1.0, abs(v0)):
        raise ConvergenceError(
            f"subtracted energy not converged: {v0:.17g} vs {v1:.17g} at eps/2")
    return float(v0)


def mode_symbol(nu, r: float, method: str = "subtract", eps=None) -> float:
    """Renormalized limit of mode_energy(nu, r, .) by fit or subtraction.

    ``eps`` overrides the fit grid (fit) or the sampling point (subtract).
    """
    o = as_order(nu)
    _check_order(o.nu)
    if not r > 0:
        raise DomainError(f"r must be positive, got {r}")
    ex = mode_energy_expansion(o, r)
    if method == "subtract":
        e = subtract_eps(o.nu, 1.0 / r) if eps is None else float(eps)
        return _richardson([mode_energy(o.nu, r, t) - ex.nonconstant_value(t) for t in (e, e / 2)])
    if method == "fit":
        grid = eps_grid() if eps is None else np.asarray(eps, dtype=float)
        curve = EnergyCurve(grid, mode_energy(o.nu, r, grid), {"nu": o.nu, "r": r})
        return renorm_limit_fit(curve, ex.model).finite_part
    raise DomainError(f"unknown method {method!r}; expected fit or subtract")


def pairing_symbol_check(nu, f: SpectralProfile, method: str = "subtract",
                         g: SpectralProfile | None = None, length_scale: float = 1.0):
    """(extracted, predicted) for the pairing of f with itself (or with g).

    ``extracted`` is the renormalized limit of the energy curve, ``predicted``
    the pairing against the corrected symbol.
    """
    o = as_order(nu)
    _check_order(o.nu)
    g = f if g is None else g
    ex = energy_singular_model(o, f, g)
    if method == "subtract":
        e = subtract_eps(o.nu, length_scale)
        vals = energy_curve(o, f, g, [e, e / 2]).values
        extracted = _richardson([vals[0] - ex.nonconstant_value(e),
                                 vals[1] - ex.nonconstant_value(e / 2)])
    elif method == "fit":
        grid = eps_grid(DEFAULT_EPS_MIN * length_scale, DEFAULT_EPS_MAX * length_scale)
        extracted = renorm_limit_fit(energy_curve(o, f, g, grid), ex.model).finite_part
    else:
        raise DomainError(f"unknown method {method!r}; expected fit or subtract")
    predicted = pairing(f, g, symbol_multiplier(o))
    return extracted, predicted


# ----------------------------------------------------------------------------
# report
# ----------------------------------------------------------------------------

@dataclass(frozen=True)
class VerificationEntry:
    nu: float
    target: str
    method: str
    quantity: str
    extracted: float | None
    oracle: float | None
    oracle_source: str
    paper_printed: float | None
    abs_residual: float | None
    rel_residual: float | None
    ratio: float | None
    tolerance: float
    status: str
    error: str | None = None


_FIELDS = [f.name for f in fields(VerificationEntry)]


def _status(extracted, oracle, printed, tol):
    def close(a, b):
        return abs(a - b) <= tol * max(1.0, abs(b))

    if extracted is None or oracle is None or not math.isfinite(extracted):
        return "fail"
    if not close(extracted, oracle):
        return "fail"
    if printed is not None and not close(extracted, printed):
        return "flag"
    return "pass"


def make_entry(nu, target, method, quantity, extracted, oracle, oracle_source,
               printed, tol) -> VerificationEntry:
    abs_res = rel_res = ratio = None
    if extracted is not None and oracle is not None:
        abs_res = abs(extracted - oracle)
        rel_res = abs_res / max(1.0, abs(oracle))
    if extracted is not None and printed not in (None, 0.0):
        ratio = extracted / printed
    return VerificationEntry(float(nu), target, method, quantity, extracted, oracle,
                             oracle_source, printed, abs_res, rel_res, ratio, tol,
                             _status(extracted, oracle, printed, tol))


def _failed_entry(nu, target, method, quantity, oracle_source, tol, exc):
    return VerificationEntry(float(nu), target, method, quantity, None, None, oracle_source,
                             None, None, None, None, tol, "fail", f"{type(exc).__name__}: {exc}")


@dataclass(frozen=True)
class VerificationReport:
    entries: tuple
    environment: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(e.status != "fail" for e in self.entries)

    def counts(self):
        out = {"pass": 0, "flag": 0, "fail": 0}
        for e in self.entries:
            out[e.status] += 1
        return out

    def to_dict(self):
        return {"environment": self.environment, "entries": [asdict(e) for e in self.entries]}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_dict(), indent=indent, allow_nan=False)

    @classmethod
    def from_dict(cls, data):
        entries = tuple(VerificationEntry(**{k: e.get(k) for k in _FIELDS}) for e in data["entries"])
        return cls(entries, dict(data.get("environment", {})))

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(_FIELDS)
        for e in self.entries:
            w.writerow(["" if v is None else format(v, ".17g") if isinstance(v, float) else v
                        for v in (getattr(e, k) for k in _FIELDS)])
        return buf.getvalue()


@dataclass(frozen=True)
class VerifyConfig:
    nus: tuple = (0.0, 0.5, 1.0, 1.5)
    rs: tuple = (0.5, 1.0, 2.0)
    methods: tuple = METHODS
    widths: tuple = (1.0,)
    d: int = 1
    tol_fit: float = 1e-5
    tol_subtract: float = 1e-8
    tol_pairing: float = 1e-5
    tol_limit: float = 1e-6
    include_limits: bool = True

    def __post_init__(self):
        if not self.nus:
            raise ConfigError("at least one order is required")
        if not self.rs and not self.widths:
            raise ConfigError("need at least one frequency r or profile width")
        bad = [m for m in self.methods if m not in METHODS]
        if bad or not self.methods:
            raise ConfigError(f"methods must be drawn from {METHODS}, got {self.methods}")
        if any(not nu > -1.0 for nu in self.nus):
            raise ConfigError("orders must exceed -1")
        if any(not r > 0 for r in self.rs) or any(not w > 0 for w in self.widths):
            raise ConfigError("frequencies and widths must be positive")

    def tolerance(self, method):
        return self.tol_fit if method == "fit" else self.tol_subtract


def _mode_entries(cfg, nu):
    o = as_order(nu)
    source = "audited series constant" if o.is_nonneg_integer else "Gamma(-nu)/(2^(2nu+1) Gamma(1+nu)) r^(2nu)"
    for r in cfg.rs:
        for method in cfg.methods:
            tol = cfg.tolerance(method)
            target = f"r={r:g}"
            try:
                oracle = paper_symbol(o, r, "corrected")
                printed = paper_symbol(o, r, "printed") if o.nu >= 0 else None
                value = mode_symbol(o, r, method)
                yield make_entry(o.nu, target, method, "mode_symbol", value, oracle, source, printed, tol)
            except (RenormError, ValueError, ArithmeticError) as exc:
                yield _failed_entry(o.nu, target, method, "mode_symbol", source, tol, exc)


def _pairing_entries(cfg, nu):
    o = as_order(nu)
    for w in cfg.widths:
        for method in cfg.methods:
            f = gaussian_profile(cfg.d, w)
            tol = cfg.tol_pairing
            try:
                extracted, predicted = pairing_symbol_check(o, f, method, length_scale=w)
                printed = pairing(f, f, symbol_multiplier(o, "printed")) if o.nu >= 0 else None
                yield make_entry(o.nu, f.label, method, "pairing", extracted, predicted,
                                 "pairing against corrected symbol", printed, tol)
            except (RenormError, ValueError, ArithmeticError) as exc:
                yield _failed_entry(o.nu, f.label, method, "pairing",
                                    "pairing against corrected symbol", tol, exc)


def _limit_entry(cfg, nu):
    """Small-z limit of tilde K_(1+nu) against the series value and the printed constant."""
    mu = 1.0 + as_order(nu).nu
    source = "series value 2^(mu-1) Gamma(mu)"
    try:
        value = float(bessel_k(ScaledKind.TILDE, mu, LIMIT_Z))
        oracle = 2.0 ** (mu - 1.0) * math.gamma(mu)
        printed = math.gamma(mu) / 2.0 ** (mu + 1.0)
        return make_entry(nu, f"mu={mu:g},z={LIMIT_Z:g}", "series", "ktilde_limit",
                          value, oracle, source, printed, cfg.tol_limit)
    except (RenormError, ValueError, ArithmeticError) as exc:
        return _failed_entry(nu, f"mu={mu:g}", "series", "ktilde_limit", source, cfg.tol_limit, exc)


def verify_run(config: VerifyConfig | None = None) -> VerificationReport:
    """Run every (order, target, method) combination of ``config`` in order."""
    cfg = VerifyConfig() if config is None else config
    entries = []
    for nu in cfg.nus:
        entries.extend(_mode_entries(cfg, nu))
        entries.extend(_pairing_entries(cfg, nu))
        if cfg.include_limits:
            entries.append(_limit_entry(cfg, nu))
    env = {
        "version": __version__,
        "config": {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(cfg).items()},
        "fit_grid": {"eps_min": DEFAULT_EPS_MIN, "eps_max": DEFAULT_EPS_MAX, "eps_count": DEFAULT_EPS_COUNT},
        "subtract": {"eps_floor": SUBTRACT_EPS_FLOOR, "cancellation_limit": CANCELLATION_LIMIT,
                     "richardson_rtol": RICHARDSON_RTOL},
    }
    return VerificationReport(tuple(entries), env)


__all__ = [
    "METHODS",
    "VerificationEntry",
    "VerificationReport",
    "VerifyConfig",
    "corrected_constant",
    "mode_symbol",
    "paper_symbol",
    "pairing_symbol_check",
    "printed_constant",
    "subtract_eps",
    "symbol_function",
    "symbol_multiplier",
    "verify_run",
]
