"""Coordinate tensor calculus for metrics given as callables.

Everything here works in any dimension ``n`` and with any signature. A metric
is a function ``x -> (n, n)`` array; its derivative, when supplied, is a
function ``x -> (n, n, n)`` array with ``dg[k, i, j] = d_k g_ij``.

Curvature convention::

    R^a_{bcd} = d_c Gamma^a_{db} - d_d Gamma^a_{cb}
                + Gamma^a_{ce} Gamma^e_{db} - Gamma^a_{de} Gamma^e_{cb}
    Ric_{bd}  = R^a_{bad}

With this convention the unit de Sitter surface has Gauss curvature +1.
"""

from __future__ import annotations

import numpy as np

from .errors import DegenerateMetric

METRIC_STEP = 1e-5
CURVATURE_STEP = 1e-4
DET_FLOOR = 1e-12


def central_diff(f, x, h):
    """Stack of central differences ``out[k] = (f(x + h e_k) - f(x - h e_k)) / 2h``."""
    x = np.asarray(x, dtype=float)
    out = []
    for k in range(x.size):
        e = np.zeros_like(x)
        e[k] = h
        out.append((np.asarray(f(x + e)) - np.asarray(f(x - e))) / (2 * h))
    return np.stack(out)


def checked_inverse(g):
    det = np.linalg.det(g)
    if abs(det) < DET_FLOOR:
        raise DegenerateMetric(f"|det g| = {abs(det):.3e}")
    return np.linalg.inv(g)


def christoffel_from(g, dg):
    """``Gamma[a, b, c] = Gamma^a_{bc}`` from the metric and its first derivatives."""
    ginv = checked_inverse(g)
    # lowered[d, b, c] = 1/2 (d_b g_dc + d_c g_db - d_d g_bc)
    lowered = 0.5 * (
        np.einsum("bdc->dbc", dg) + np.einsum("cdb->dbc", dg) - dg
    )
    return np.einsum("ad,dbc->abc", ginv, lowered)


class MetricField:
    """Wraps a metric callable with an optional analytic derivative."""

    def __init__(self, metric, metric_deriv=None, h=METRIC_STEP):
        self.metric = metric
        self._deriv = metric_deriv
        self.h = h

    def g(self, x):
        return np.asarray(self.metric(np.asarray(x, dtype=float)), dtype=float)

    def dg(self, x):
        x = np.asarray(x, dtype=float)
        if self._deriv is not None:
            return np.asarray(self._deriv(x), dtype=float)
        return central_diff(self.g, x, self.h)

    def christoffel(self, x):
        return christoffel_from(self.g(x), self.dg(x))

    def riemann(self, x, h=CURVATURE_STEP):
        """``R[a, b, c, d] = R^a_{bcd}``."""
        x = np.asarray(x, dtype=float)
        gam = self.christoffel(x)
        dgam = central_diff(self.christoffel, x, h)  # dgam[k, a, b, c]
        term = np.einsum("cadb->abcd", dgam)
        term = term - np.einsum("abcd->abdc", term)
        quad = np.einsum("ace,edb->abcd", gam, gam)
        quad = quad - np.einsum("abcd->abdc", quad)
        return term + quad

    def riemann_lowered(self, x, h=CURVATURE_STEP):
        return np.einsum("ae,ebcd->abcd", self.g(x), self.riemann(x, h))

    def ricci(self, x, h=CURVATURE_STEP):
        return np.einsum("abad->bd", self.riemann(x, h))

    def scalar(self, x, h=CURVATURE_STEP):
        return float(np.einsum("bd,bd->", checked_inverse(self.g(x)), self.ricci(x, h)))


def weyl_tensor(g, riem_low, ric, scal):
    """Weyl tensor (all indices down) in dimension ``n > 2``."""
    n = g.shape[0]
    gg = np.einsum("ac,bd->abcd", g, g) - np.einsum("ad,bc->abcd", g, g)
    gric = (
        np.einsum("ac,bd->abcd", g, ric)
        - np.einsum("ad,bc->abcd", g, ric)
        + np.einsum("bd,ac->abcd", g, ric)
        - np.einsum("bc,ad->abcd", g, ric)
    )
    return riem_low - gric / (n - 2) + scal * gg / ((n - 1) * (n - 2))
