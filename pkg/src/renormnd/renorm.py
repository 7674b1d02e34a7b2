"""Renormalized limits of sampled curves and Hadamard finite-part integrals.

A curve Psi(eps) that behaves like

    a0 log(1/eps) + sum_k a_k eps**(-lam_k) + chi(eps),   chi(eps) -> chi0,

has renormalized limit chi0.  ``renorm_limit_fit`` recovers chi0 by weighted
linear least squares in the basis described by a :class:`SingularModel`;
``hadamard_tail_integral`` applies it to eps -> int_eps^inf h(y) dy.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import ConditioningError, DomainError, TruncationError
from .logseries import SingularModel
from .quadrature import composite, geometric_rule
from .specfun import digamma, kv

DEFAULT_EPS_MIN = 1e-3
DEFAULT_EPS_MAX = 1e-1
DEFAULT_EPS_COUNT = 48
#: columns whose singular values fall below this fraction of the largest are collinear
RANK_RTOL = 1e-13
_TAIL_RTOL = 1e-12
_REFINE_STEPS = 2


def eps_grid(eps_min: float = DEFAULT_EPS_MIN, eps_max: float = DEFAULT_EPS_MAX,
             count: int = DEFAULT_EPS_COUNT) -> np.ndarray:
    """Strictly decreasing geometric grid from eps_max down to eps_min."""
    if not 0 < eps_min < eps_max:
        raise DomainError(f"need 0 < eps_min < eps_max, got {eps_min}, {eps_max}")
    if count < 2:
        raise DomainError("eps grid needs at least two points")
    return np.geomspace(eps_max, eps_min, int(count))


@dataclass(frozen=True)
class EnergyCurve:
    eps: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        eps = np.asarray(self.eps, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if eps.ndim != 1 or eps.shape != values.shape:
            raise DomainError("eps and values must be 1-D arrays of equal length")
        if np.any(eps <= 0) or np.any(np.diff(eps) >= 0):
            raise DomainError("eps must be positive and strictly decreasing")
        if not np.all(np.isfinite(values)):
            raise DomainError("curve values must be finite")
        object.__setattr__(self, "eps", eps)
        object.__setattr__(self, "values", values)

    def __len__(self):
        return len(self.eps)


@dataclass(frozen=True)
class FitResult:
    finite_part: float
    coefficients: dict
    max_residual: float
    condition_estimate: float

    def to_dict(self):
        return {
            "finite_part": self.finite_part,
            "coefficients": dict(self.coefficients),
            "max_residual": self.max_residual,
            "condition_estimate": self.condition_estimate,
        }


def _colliding_terms(A, labels):
    _, s, vt = np.linalg.svd(A, full_matrices=False)
    null = np.abs(vt[-1])
    idx = np.argsort(null)[::-1]
    top = [labels[i] for i in idx if null[i] > 0.1 * null[idx[0]]]
    return top, s


def renorm_limit_fit(curve: EnergyCurve, model: SingularModel) -> FitResult:
    """Fit ``curve`` in the basis of ``model`` and return the constant coefficient.

    Rows are scaled by 1/max(1, max|basis entry|) so that the strongly divergent
    small-eps samples do not dominate; columns are then equilibrated and the
    system is solved through an SVD with two steps of iterative refinement.
    """
    labels = model.basis_labels()
    B = model.basis(curve.eps)
    nb = B.shape[1]
    if len(curve) < nb + 4:
        raise DomainError(f"need at least {nb + 4} samples for {nb} basis terms, got {len(curve)}")
    row = 1.0 / np.maximum(1.0, np.max(np.abs(B), axis=1))
    A = B * row[:, None]
    y = curve.values * row
    col = np.linalg.norm(A, axis=0)
    if np.any(col == 0):
        bad = [labels[i] for i in np.flatnonzero(col == 0)]
        raise ConditioningError(f"basis terms vanish on the grid: {', '.join(bad)}", bad)
    As = A / col
    u, s, vt = np.linalg.svd(As, full_matrices=False)
    if s[-1] < RANK_RTOL * s[0]:
        terms, _ = _colliding_terms(As, labels)
        raise ConditioningError(
            f"basis is rank deficient on this grid; colliding terms: {', '.join(terms)}", terms)
    x = vt.T @ ((u.T @ y) / s)
    # refinement recovers the digits lost to the spread of column scales
    for _ in range(_REFINE_STEPS):
        x = x + vt.T @ ((u.T @ (y - As @ x)) / s)
    coef = x / col
    resid = B @ coef - curve.values
    return FitResult(
        finite_part=float(coef[0]),
        coefficients={lab: float(c) for lab, c in zip(labels, coef)},
        max_residual=float(np.max(np.abs(resid))),
        condition_estimate=float(s[0] / s[-1]),
    )


@dataclass(frozen=True)
class QuadConfig:
    """Outer quadrature and sampling settings for truncated integrals.

    The integral is carried to ``cutoff = 50 / decay_rate``; the tail beyond
    is estimated on [cutoff, 2 cutoff].
    """

    eps_min: float = DEFAULT_EPS_MIN
    eps_max: float = DEFAULT_EPS_MAX
    eps_count: int = DEFAULT_EPS_COUNT
    decay_rate: float = 1.0
    nodes: int = 20
    per_decade: int = 4

    @property
    def cutoff(self) -> float:
        return 50.0 / self.decay_rate

    def grid(self):
        return eps_grid(self.eps_min, self.eps_max, self.eps_count)


def truncated_integrals(integrand: Callable, eps, quad: QuadConfig = QuadConfig()):
    """Return int_eps^Y integrand(y) dy for each eps in a decreasing grid, plus a tail estimate."""
    eps = np.asarray(eps, dtype=float)
    Y = quad.cutoff
    # pieces between consecutive grid points, then one block from eps[0] to Y
    x, w = composite(np.concatenate([eps[::-1]]), quad.nodes)
    vals = np.asarray(integrand(x), dtype=float) * w
    pieces = vals.reshape(len(eps) - 1, quad.nodes).sum(axis=1)[::-1]
    edges = [p for p in 10.0 ** np.arange(-20, 5) if eps[0] < p < Y]
    xb, wb = geometric_rule(eps[0], Y, quad.per_decade, quad.nodes, breakpoints=edges)
    block = float(np.dot(np.asarray(integrand(xb), dtype=float), wb))
    xt, wt = geometric_rule(Y, 2 * Y, quad.per_decade, quad.nodes)
    tail = float(np.dot(np.asarray(integrand(xt), dtype=float), wt))
    out = block + np.concatenate([[0.0], np.cumsum(pieces)])
    return out, tail


def hadamard_tail_integral(integrand: Callable, model: SingularModel,
                           quad: QuadConfig = QuadConfig(), return_fit: bool = False):
    """Hadamard finite part of int_0^inf integrand(y) dy.

    ``integrand`` must accept a NumPy array.  The truncated integrals over
    [eps, inf) are formed on the geometric eps grid of ``quad`` and passed to
    :func:`renorm_limit_fit` with ``model``.
    """
    eps = quad.grid()
    values, tail = truncated_integrals(integrand, eps, quad)
    scale = max(float(np.max(np.abs(values))), 1e-300)
    if abs(tail) > _TAIL_RTOL * scale:
        raise TruncationError(
            f"tail beyond cutoff {quad.cutoff:g} is {tail:.3e}, not negligible against {scale:.3e}")
    curve = EnergyCurve(eps, values, {"method": "hadamard"})
    fit = renorm_limit_fit(curve, model)
    return fit if return_fit else fit.finite_part


def derezinski_bilinear(nu: int, b: float) -> float:
    """Hadamard-regularized int_0^inf K_nu(b y)^2 y dy for integer nu >= 0.

    b^2 times the integral equals (-1)^nu / 2 (1 + nu log(b^2/4) + 2 nu (1 - psi(1 + nu))).
    """
    if isinstance(nu, bool) or not float(nu).is_integer() or nu < 0:
        raise DomainError(f"nu must be a non-negative integer, got {nu}")
    if not b > 0:
        raise DomainError(f"b must be positive, got {b}")
    nu = int(nu)
    bracket = 1.0 + nu * math.log(b * b / 4.0) + 2.0 * nu * (1.0 - digamma(1.0 + nu))
    return (-1) ** nu * 0.5 * bracket / (b * b)


def bilinear_integrand(nu: float, b: float):
    """y -> y K_nu(b y)^2 as a vectorized callable."""
    def h(y):
        y = np.asarray(y, dtype=float)
        return np.array([t * kv(nu, b * t) ** 2 for t in y.ravel()]).reshape(y.shape)
    return h


def bilinear_model(nu: int) -> SingularModel:
    """Divergence structure of int_eps^inf y K_nu(y)^2 dy for integer nu.

    y K_nu(y)^2 ~ y^(1 - 2 nu) (1 + y^2 + ...) plus log terms, giving powers
    eps^(2 - 2 nu), ..., eps^-2, a log(1/eps) for nu >= 1, and corrections
    eps^2, eps^4 with single and double logs.
    """
    powers = tuple(-2.0 * k for k in range(1, nu))
    return SingularModel(powers, nu >= 1, (2.0, 4.0), (2.0, 4.0), (2.0, 4.0))
