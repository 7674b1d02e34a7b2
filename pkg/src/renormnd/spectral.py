"""Radial Schwartz data on the frequency side and Fourier-multiplier pairings.

Fourier convention: ``F f(xi) = int exp(i xi.x) f(x) dx``, so that Plancherel
reads ``int f g dx = (2 pi)**-d int fhat ghat dxi`` and a multiplier
``h(-Delta)`` acts by ``h(|xi|**2)``.  For radial data the pairing is

    <h(-Delta) f, g> = (2 pi)**-d * omega_{d-1} * int_0^inf m(r) fhat(r) ghat(r) r**(d-1) dr

with ``omega_{d-1} = 2 pi**(d/2) / Gamma(d/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DivergenceError, DomainError
from .quadrature import radial_rule

#: relative size of fhat beyond the decay radius
DECAY_FLOOR = 1e-16
_TAIL_RTOL = 1e-10


@dataclass(frozen=True)
class SpectralProfile:
    """Radial frequency-side profile fhat(r) of a Schwartz function on R^d."""

    d: int
    fhat: Callable
    decay_radius: float
    label: str = ""

    def __post_init__(self):
        if self.d not in (1, 2, 3):
            raise DomainError(f"dimension must be 1, 2 or 3, got {self.d}")
        if not self.decay_radius > 0:
            raise DomainError("decay radius must be positive")

    def __call__(self, r):
        return self.fhat(r)


@dataclass(frozen=True)
class MultiplierSymbol:
    m: Callable
    zero_mode: float = 0.0
    label: str = ""

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = np.asarray(self.m(np.where(r > 0, r, 1.0)), dtype=float)
        return np.where(r > 0, out, self.zero_mode)


def gaussian_profile(d: int, w: float) -> SpectralProfile:
    """f(x) = exp(-|x|^2 / (2 w^2)), fhat(r) = (2 pi)^(d/2) w^d exp(-w^2 r^2 / 2)."""
    if not w > 0:
        raise DomainError(f"width must be positive, got {w}")
    amp = (2.0 * math.pi) ** (d / 2.0) * w ** d
    radius = math.sqrt(-2.0 * math.log(DECAY_FLOOR)) / w

    def fhat(r):
        return amp * np.exp(-0.5 * (w * np.asarray(r, dtype=float)) ** 2)

    return SpectralProfile(d, fhat, radius, f"gaussian(d={d},w={w:g})")


def gaussian_space_inner(d: int, w1: float, w2: float) -> float:
    """Closed form of int exp(-|x|^2/(2 w1^2)) exp(-|x|^2/(2 w2^2)) dx over R^d."""
    s = 1.0 / (2.0 * w1 * w1) + 1.0 / (2.0 * w2 * w2)
    return (math.pi / s) ** (d / 2.0)


def make_symbol(kind: str, *params: float) -> MultiplierSymbol:
    """Build a radial multiplier.

    ``"frac", sigma``        m(r) = r**(2 sigma)
    ``"log"``                m(r) = log(r**2)
    ``"affine-log", c0, cl`` m(r) = c0 + cl * log(r**2)

    Log kinds get ``zero_mode = 0``; quadrature never samples r = 0, so the
    value only makes the evaluator total.
    """
    if kind == "frac":
        (sigma,) = params
        sigma = float(sigma)
        zero = 0.0 if sigma > 0 else (1.0 if sigma == 0 else math.inf)
        return MultiplierSymbol(lambda r: r ** (2.0 * sigma), zero, f"frac:{sigma:g}")
    if kind == "log":
        if params:
            raise DomainError("log symbol takes no parameters")
        return MultiplierSymbol(lambda r: np.log(r * r), 0.0, "log")
    if kind in ("affine-log", "affine"):
        c0, cl = (float(p) for p in params)
        return MultiplierSymbol(lambda r: c0 + cl * np.log(r * r), 0.0, f"affine:{c0:g},{cl:g}")
    raise DomainError(f"unknown symbol kind {kind!r}")


def parse_symbol(text: str) -> MultiplierSymbol:
    """Parse ``frac:SIGMA``, ``log`` or ``affine:C0,CLOG``."""
    head, _, rest = text.partition(":")
    if head == "log" and not rest:
        return make_symbol("log")
    if head == "frac" and rest:
        return make_symbol("frac", float(rest))
    if head in ("affine", "affine-log") and rest:
        parts = rest.split(",")
        if len(parts) == 2:
            return make_symbol("affine-log", *map(float, parts))
    raise DomainError(f"cannot parse symbol {text!r}; expected frac:S, log or affine:C0,CLOG")


def sphere_area(d: int) -> float:
    """Surface measure of the unit sphere S^{d-1}."""
    return 2.0 * math.pi ** (d / 2.0) / math.gamma(d / 2.0)


def radial_weight(d: int) -> float:
    return sphere_area(d) / (2.0 * math.pi) ** d


def pairing(f: SpectralProfile, g: SpectralProfile, m) -> float:
    """(2 pi)^-d omega_{d-1} int_0^inf m(r) fhat(r) ghat(r) r^(d-1) dr."""
    if f.d != g.d:
        raise DomainError(f"dimension mismatch: {f.d} vs {g.d}")
    d = f.d
    R = min(f.decay_radius, g.decay_radius)
    r, w = radial_rule(R)
    vals = np.asarray(m(r), dtype=float) * f(r) * g(r) * r ** (d - 1)
    if not np.all(np.isfinite(vals)):
        raise DivergenceError(f"non-finite integrand for symbol {getattr(m, 'label', m)!r}")
    edge = abs(float(np.asarray(m(np.array([R])), dtype=float)[0]) * f(R) * g(R) * R ** (d - 1))
    peak = float(np.max(np.abs(vals)))
    if peak > 0 and edge > _TAIL_RTOL * peak:
        raise DivergenceError(
            f"symbol growth outpaces profile decay at r={R:g} (edge/peak={edge / peak:.2e})")
    return radial_weight(d) * float(np.dot(w, vals))
