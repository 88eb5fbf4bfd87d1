"""Lorentzian surfaces given by a single coordinate chart.

A :class:`SurfaceChart` stores the metric ``g(u, v)`` of signature (+, -) and an
orientation sign.  The para-complex structure ``j`` is the unique involution
with ``g(jX, jY) = -g(X, Y)`` compatible with that orientation; in matrix form

    j = orientation * g^{-1} * sqrt|det g| * [[0, 1], [-1, 0]],

which on the Minkowski chart ``dx^2 - dy^2`` sends ``d/dx`` to ``d/dy``.  The
symplectic form is ``omega(X, Y) = g(jX, Y)``.

Curves are unit speed, non-null, and obey the Frenet equation
``D_T T = k * j T``; hence ``k = -eps * g(D_T T, jT)`` where ``eps = g(T, T)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .errors import DegenerateMetric, LeftDomain, NullCurve, NullTangent
from .tensors import CURVATURE_STEP, DET_FLOOR, MetricField, central_diff, checked_inverse

_EPS_ROT = np.array([[0.0, 1.0], [-1.0, 0.0]])
UNIT_SPEED_TOL = 1e-9


@dataclass(frozen=True)
class SurfaceChart:
    """Coordinate patch ``(u, v)`` of a Lorentzian surface.

    Parameters
    ----------
    name : str
        Catalogue descriptor, e.g. ``"desitter(1)"``.
    metric : callable
        ``p -> (2, 2)`` symmetric component matrix with negative determinant.
    domain : ((u0, u1), (v0, v1))
        Closed coordinate rectangle.
    metric_deriv : callable, optional
        ``p -> (2, 2, 2)`` array ``dg[k, i, j]``; central differences
        (step ``1e-5``) are used when absent.
    orientation : {+1, -1}
        Flipping it replaces ``j`` by ``-j``.
    """

    name: str
    metric: Callable
    domain: tuple = ((-np.inf, np.inf), (-np.inf, np.inf))
    metric_deriv: Optional[Callable] = None
    orientation: int = 1
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ValueError("orientation must be +1 or -1")

    @property
    def field(self) -> MetricField:
        return MetricField(self.metric, self.metric_deriv)

    def contains(self, p, margin=0.0) -> bool:
        (u0, u1), (v0, v1) = self.domain
        return u0 + margin <= p[0] <= u1 - margin and v0 + margin <= p[1] <= v1 - margin

    def _check(self, p, margin=0.0):
        if not self.contains(p, margin):
            raise LeftDomain(f"{tuple(np.round(p, 6))} outside {self.name} domain {self.domain}")

    def g(self, p):
        g = np.asarray(self.metric(np.asarray(p, dtype=float)), dtype=float)
        if abs(np.linalg.det(g)) < DET_FLOOR:
            raise DegenerateMetric(f"degenerate metric on {self.name} at {p}")
        return g

    def inner(self, p, X, Y) -> float:
        return float(np.asarray(X) @ self.g(p) @ np.asarray(Y))

    def with_orientation(self, orientation: int) -> "SurfaceChart":
        return SurfaceChart(self.name, self.metric, self.domain, self.metric_deriv,
                            orientation, dict(self.params))


def christoffel(chart: SurfaceChart, p):
    """``Gamma[a, b, c] = Gamma^a_{bc}`` at ``p``."""
    p = np.asarray(p, dtype=float)
    chart._check(p)
    chart.g(p)
    return chart.field.christoffel(p)


def gauss_curvature(chart: SurfaceChart, p, h=CURVATURE_STEP) -> float:
    """Gauss curvature ``R_{1212} / det g`` from the coordinate Riemann tensor."""
    p = np.asarray(p, dtype=float)
    chart._check(p)
    g = chart.g(p)
    r = chart.field.riemann_lowered(p, h)
    return float(r[0, 1, 0, 1] / np.linalg.det(g))


def brioschi_curvature(chart: SurfaceChart, p, h=CURVATURE_STEP) -> float:
    """Gauss curvature from the Brioschi determinant formula.

    Independent of :func:`gauss_curvature`: it never forms Christoffel symbols
    and takes all metric derivatives by direct finite differences.
    """
    p = np.asarray(p, dtype=float)
    chart._check(p)
    f = chart.metric

    def comp(q):
        g = np.asarray(f(q), dtype=float)
        return np.array([g[0, 0], g[0, 1], g[1, 1]])

    eu, ev = np.array([h, 0.0]), np.array([0.0, h])
    c0 = comp(p)
    du = (comp(p + eu) - comp(p - eu)) / (2 * h)
    dv = (comp(p + ev) - comp(p - ev)) / (2 * h)
    duu = (comp(p + eu) - 2 * c0 + comp(p - eu)) / h**2
    dvv = (comp(p + ev) - 2 * c0 + comp(p - ev)) / h**2
    duv = (comp(p + eu + ev) - comp(p + eu - ev) - comp(p - eu + ev) + comp(p - eu - ev)) / (4 * h * h)
    E, F, G = c0
    Eu, Fu, Gu = du
    Ev, Fv, Gv = dv
    Evv, Guu, Fuv = dvv[0], duu[2], duv[1]
    m1 = np.array([
        [-0.5 * Evv + Fuv - 0.5 * Guu, 0.5 * Eu, Fu - 0.5 * Ev],
        [Fv - 0.5 * Gu, E, F],
        [0.5 * Gv, F, G],
    ])
    m2 = np.array([
        [0.0, 0.5 * Ev, 0.5 * Gu],
        [0.5 * Ev, E, F],
        [0.5 * Gu, F, G],
    ])
    det = E * G - F * F
    if abs(det) < DET_FLOOR:
        raise DegenerateMetric(f"degenerate metric on {chart.name} at {p}")
    return float((np.linalg.det(m1) - np.linalg.det(m2)) / det**2)


def j_matrix(chart: SurfaceChart, p):
    g = chart.g(p)
    return chart.orientation * math.sqrt(abs(np.linalg.det(g))) * checked_inverse(g) @ _EPS_ROT


def paracomplex_j(chart: SurfaceChart, p, X):
    """Apply the para-complex structure at ``p`` to the chart vector ``X``."""
    p = np.asarray(p, dtype=float)
    chart._check(p)
    return j_matrix(chart, p) @ np.asarray(X, dtype=float)


def symplectic(chart: SurfaceChart, p, X, Y) -> float:
    return chart.inner(p, paracomplex_j(chart, p, X), Y)


def orthonormal_frame(chart: SurfaceChart, p):
    """Oriented frame ``(e1, e2)`` with ``g(e1,e1)=1``, ``g(e2,e2)=-1``, ``e2 = j e1``."""
    g = chart.g(p)
    best, best_norm = None, 0.0
    for cand in ([1.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, -1.0]):
        c = np.array(cand)
        n = float(c @ g @ c) / float(c @ c)
        if n > best_norm:
            best, best_norm = c, n
    e1 = best / math.sqrt(float(best @ g @ best))
    return e1, j_matrix(chart, p) @ e1


@dataclass(frozen=True)
class CurveState:
    point: np.ndarray
    tangent: np.ndarray
    causal_sign: int
    arclength: float = 0.0


@dataclass(frozen=True)
class CurvatureProfile:
    """Prescribed Frenet curvature ``k(s)``: constant, linear (Cornu) or tabulated."""

    kind: str = "constant"
    lam: float = 0.0
    mu: float = 0.0
    table: Optional[tuple] = None

    @classmethod
    def constant(cls, k: float) -> "CurvatureProfile":
        return cls("constant", 0.0, float(k))

    @classmethod
    def linear(cls, lam: float, mu: float) -> "CurvatureProfile":
        return cls("linear", float(lam), float(mu))

    @classmethod
    def geodesic(cls) -> "CurvatureProfile":
        return cls("constant", 0.0, 0.0)

    def __call__(self, s):
        if self.kind == "constant":
            return self.mu + 0.0 * np.asarray(s, dtype=float)
        if self.kind == "linear":
            return self.lam * np.asarray(s, dtype=float) + self.mu
        if self.kind == "tabulated":
            ss, kk = self.table
            return np.interp(s, ss, kk)
        raise ValueError(f"unknown curvature profile kind {self.kind!r}")

    def derivative(self, s):
        if self.kind == "linear":
            return self.lam + 0.0 * np.asarray(s, dtype=float)
        if self.kind == "constant":
            return 0.0 * np.asarray(s, dtype=float)
        ss, kk = self.table
        return np.interp(s, ss, np.gradient(kk, ss))


@dataclass
class CurveTrace:
    """Sampled unit-speed curve; behaves as a sequence of :class:`CurveState`."""

    chart: SurfaceChart
    profile: CurvatureProfile
    causal_sign: int
    s: np.ndarray
    points: np.ndarray
    tangents: np.ndarray
    accels: np.ndarray  # chart second derivatives d^2x/ds^2

    def __len__(self):
        return len(self.s)

    def __getitem__(self, i):
        return CurveState(self.points[i], self.tangents[i], self.causal_sign, float(self.s[i]))

    def __iter__(self):
        return (self[i] for i in range(len(self)))

    def speed_residual(self) -> float:
        g = np.array([self.chart.g(p) for p in self.points])
        norms = np.einsum("ni,nij,nj->n", self.tangents, g, self.tangents)
        return float(np.max(np.abs(norms - self.causal_sign)))

    def curvature(self):
        """Frenet curvature measured from finite differences of the tangent samples."""
        ds = self.s[1] - self.s[0]
        dT = np.gradient(self.tangents, ds, axis=0, edge_order=2)
        out = np.empty(len(self))
        for n, (p, T, a) in enumerate(zip(self.points, self.tangents, dT)):
            gam = self.chart.field.christoffel(p)
            acc = a + np.einsum("abc,b,c->a", gam, T, T)
            jT = j_matrix(self.chart, p) @ T
            out[n] = -self.causal_sign * self.chart.inner(p, acc, jT)
        return out

    def subsample(self, every: int) -> "CurveTrace":
        sl = slice(None, None, every)
        return CurveTrace(self.chart, self.profile, self.causal_sign, self.s[sl],
                          self.points[sl], self.tangents[sl], self.accels[sl])

    def csv_rows(self):
        yield ("s", "u", "v", "du", "dv")
        for s, p, T in zip(self.s, self.points, self.tangents):
            yield (repr(float(s)), repr(float(p[0])), repr(float(p[1])), repr(float(T[0])), repr(float(T[1])))


def frenet_rhs(chart: SurfaceChart, profile: CurvatureProfile, s, y):
    p, T = y[:2], y[2:]
    gam = chart.field.christoffel(p)
    acc = -np.einsum("abc,b,c->a", gam, T, T) + float(profile(s)) * (j_matrix(chart, p) @ T)
    return np.concatenate([T, acc])


def unit_state(chart: SurfaceChart, p, direction, s0=0.0) -> CurveState:
    """Normalise ``direction`` to unit speed at ``p``."""
    p = np.asarray(p, dtype=float)
    d = np.asarray(direction, dtype=float)
    n = chart.inner(p, d, d)
    if abs(n) < 1e-12:
        raise NullCurve(f"null direction {d} at {p}")
    return CurveState(p, d / math.sqrt(abs(n)), int(np.sign(n)), s0)


def integrate_curve(chart: SurfaceChart, init: CurveState, profile: CurvatureProfile,
                    length: float, step: float = 1e-3) -> CurveTrace:
    """Classical fixed-step RK4 integration of the Frenet system.

    Returns ``round(length / step) + 1`` samples starting at ``init``.
    """
    if step <= 0:
        raise ValueError("step must be positive")
    p0 = np.asarray(init.point, dtype=float)
    T0 = np.asarray(init.tangent, dtype=float)
    eps = int(init.causal_sign)
    chart._check(p0)
    if abs(chart.inner(p0, T0, T0) - eps) > 1e-6:
        raise NullTangent("initial state is not unit speed with the stated causal sign")
    nsteps = int(round(length / step))
    h = length / nsteps if nsteps else 0.0
    ys = np.empty((nsteps + 1, 4))
    ys[0] = np.concatenate([p0, T0])
    s0 = float(init.arclength)
    f = lambda s, y: frenet_rhs(chart, profile, s, y)  # noqa: E731
    for n in range(nsteps):
        s, y = s0 + n * h, ys[n]
        k1 = f(s, y)
        k2 = f(s + 0.5 * h, y + 0.5 * h * k1)
        k3 = f(s + 0.5 * h, y + 0.5 * h * k2)
        k4 = f(s + h, y + h * k3)
        ynew = y + (h / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        if not chart.contains(ynew[:2]):
            raise LeftDomain(f"curve left {chart.name} near s={s + h:.4f}")
        norm = chart.inner(ynew[:2], ynew[2:], ynew[2:])
        if norm * eps <= 0:
            raise NullTangent(f"tangent became null near s={s + h:.4f}")
        ys[n + 1] = ynew
    ss = s0 + h * np.arange(nsteps + 1)
    accels = np.array([frenet_rhs(chart, profile, s, y)[2:] for s, y in zip(ss, ys)])
    return CurveTrace(chart, profile, eps, ss, ys[:, :2].copy(), ys[:, 2:].copy(), accels)


def central_metric_derivative(chart: SurfaceChart, p, h):
    return central_diff(chart.metric, np.asarray(p, dtype=float), h)
