"""Composite Gauss-Legendre rules."""

from __future__ import annotations

from functools import lru_cache

import numpy as np


@lru_cache(maxsize=None)
def gauss_legendre(n: int):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


def composite(edges, n: int = 32):
    """Nodes and weights of an n-point rule on each [edges[i], edges[i+1]]."""
    x, w = gauss_legendre(n)
    edges = np.asarray(edges, dtype=float)
    a, b = edges[:-1, None], edges[1:, None]
    half = 0.5 * (b - a)
    nodes = (a + b) * 0.5 + half * x
    weights = half * w
    return nodes.ravel(), weights.ravel()


def radial_rule(R: float, panels: int = 12, n: int = 32, graded: float = 1e-6,
                graded_panels: int = 6, tail_t: float = 40.0):
    """Rule for the integral over [0, R] of integrands with an integrable
    singularity (log or power) at r = 0.

    [0, delta] with delta = graded * R is mapped by r = delta * exp(-t);
    [delta, R/panels] is covered by geometric panels and [R/panels, R] by
    ``panels - 1`` uniform panels.
    """
    delta = graded * R
    h = R / panels
    t_nodes, t_w = composite(np.linspace(0.0, tail_t, 5), 16)
    r0 = delta * np.exp(-t_nodes)
    w0 = t_w * r0
    g_nodes, g_w = composite(np.geomspace(delta, h, graded_panels + 1), n)
    u_nodes, u_w = composite(np.linspace(h, R, panels), n)
    nodes = np.concatenate([r0[::-1], g_nodes, u_nodes])
    weights = np.concatenate([w0[::-1], g_w, u_w])
    return nodes, weights


def geometric_rule(a: float, b: float, per_decade: int = 4, n: int = 20, breakpoints=()):
    """Rule on [a, b] with panels geometric in r (suited to integrands varying on the scale r)."""
    decades = max(1, int(np.ceil(np.log10(b / a) * per_decade)))
    edges = set(np.geomspace(a, b, decades + 1).tolist())
    edges.update(float(p) for p in breakpoints if a < p < b)
    return composite(sorted(edges), n)
