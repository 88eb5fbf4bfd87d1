"""Concrete Lorentzian surfaces: the para-complex plane, de Sitter and anti de Sitter.

de Sitter space of radius ``a`` is the quadric ``<x, x>_1 = a^2`` in
``R^{1,2}`` with ``<x, y>_1 = -x0 y0 + x1 y1 + x2 y2``.  Its default chart is

    x(u, v) = a * (sinh u, cosh u cos v, cosh u sin v),
    g = a^2 * (-du^2 + cosh(u)^2 dv^2).

The chart orientation is chosen so that ``j`` agrees with ``v -> x (x) v``
(the Lorentzian cross product) on the unit surface.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, NotOnSurface, NotTangent, SignatureMismatch
from .surface import SurfaceChart

I12 = np.diag([-1.0, 1.0, 1.0])
SURFACE_TOL = 1e-9


@dataclass(frozen=True)
class AmbientVector3:
    components: tuple
    p: int = 1

    def __post_init__(self):
        if self.p not in (1, 2):
            raise ValueError("signature tag must be 1 or 2")
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))

    @property
    def array(self):
        return np.array(self.components)

    def inner(self, other: "AmbientVector3") -> float:
        if other.p != self.p:
            raise SignatureMismatch(f"<.,.>_{self.p} against <.,.>_{other.p}")
        return ambient_inner(self.array, other.array, self.p)

    def __add__(self, other):
        return AmbientVector3(self.array + other.array, self.p)

    def __sub__(self, other):
        return AmbientVector3(self.array - other.array, self.p)

    def scale(self, c: float) -> "AmbientVector3":
        return AmbientVector3(c * self.array, self.p)


def ambient_inner(x, y, p=1) -> float:
    sig = np.array([-1.0 if i < p else 1.0 for i in range(3)])
    return float(np.sum(sig * np.asarray(x) * np.asarray(y)))


def _vec(x) -> AmbientVector3:
    return x if isinstance(x, AmbientVector3) else AmbientVector3(tuple(x), 1)


def lorentz_cross(u, v) -> AmbientVector3:
    """``u (x) v = I_{1,2} (u x v)`` in ``R^{1,2}``."""
    u, v = _vec(u), _vec(v)
    if u.p != 1 or v.p != 1:
        raise SignatureMismatch("the Lorentzian cross product lives in R^{1,2}")
    return AmbientVector3(I12 @ np.cross(u.array, v.array), 1)


# ---------------------------------------------------------------------------
# charts

def minkowski_chart(half_width: float = 1e3) -> SurfaceChart:
    """The para-complex plane ``D``: ``dx^2 - dy^2`` with ``j(d/dx) = d/dy``."""
    g = np.diag([1.0, -1.0])
    zero = np.zeros((2, 2, 2))
    return SurfaceChart(
        "minkowski",
        lambda p: g,
        ((-half_width, half_width), (-half_width, half_width)),
        lambda p: zero,
        1,
        {"model": "minkowski"},
    )


def _desitter_metric(a):
    a2 = a * a

    def metric(p):
        c = math.cosh(p[0])
        return np.array([[-a2, 0.0], [0.0, a2 * c * c]])

    def deriv(p):
        d = np.zeros((2, 2, 2))
        d[0, 1, 1] = a2 * 2.0 * math.cosh(p[0]) * math.sinh(p[0])
        return d

    return metric, deriv


@dataclass(frozen=True)
class DeSitterModel:
    radius: float
    chart: SurfaceChart

    def embed(self, p) -> AmbientVector3:
        u, v = p
        a = self.radius
        return AmbientVector3((a * math.sinh(u), a * math.cosh(u) * math.cos(v), a * math.cosh(u) * math.sin(v)))

    def jacobian(self, p):
        """Columns ``dx/du``, ``dx/dv``."""
        u, v = p
        a = self.radius
        return a * np.array([
            [math.cosh(u), 0.0],
            [math.sinh(u) * math.cos(v), -math.cosh(u) * math.sin(v)],
            [math.sinh(u) * math.sin(v), math.cosh(u) * math.cos(v)],
        ])

    def hessian(self, p):
        """``H[:, i, j] = d^2 x / du_i du_j``."""
        u, v = p
        a = self.radius
        H = np.zeros((3, 2, 2))
        H[:, 0, 0] = a * np.array([math.sinh(u), math.cosh(u) * math.cos(v), math.cosh(u) * math.sin(v)])
        H[:, 0, 1] = H[:, 1, 0] = a * np.array([0.0, -math.sinh(u) * math.sin(v), math.sinh(u) * math.cos(v)])
        H[:, 1, 1] = a * np.array([0.0, -math.cosh(u) * math.cos(v), -math.cosh(u) * math.sin(v)])
        return H

    def push(self, p, X) -> AmbientVector3:
        return AmbientVector3(self.jacobian(p) @ np.asarray(X, dtype=float))

    def pull(self, p, w) -> np.ndarray:
        """Chart components of an ambient tangent vector at ``embed(p)``."""
        sol, *_ = np.linalg.lstsq(self.jacobian(p), _vec(w).array, rcond=None)
        return sol

    def chart_point(self, x) -> np.ndarray:
        x = _vec(x).array / self.radius
        return np.array([math.asinh(x[0]), math.atan2(x[2], x[1])])

    def embed_curve(self, trace):
        """Ambient position, velocity and acceleration along a chart curve trace."""
        pos = np.array([self.embed(p).array for p in trace.points])
        vel = np.array([self.jacobian(p) @ T for p, T in zip(trace.points, trace.tangents)])
        acc = np.array([
            np.einsum("kij,i,j->k", self.hessian(p), T, T) + self.jacobian(p) @ a
            for p, T, a in zip(trace.points, trace.tangents, trace.accels)
        ])
        return pos, vel, acc


def desitter(a: float = 1.0, u_max: float = 4.0, v_max: float = 100.0) -> DeSitterModel:
    if a <= 0:
        raise ValueError("radius must be positive")
    metric, deriv = _desitter_metric(a)
    chart = SurfaceChart(f"desitter({a:g})", metric, ((-u_max, u_max), (-v_max, v_max)), deriv, 1,
                         {"model": "desitter", "a": a})
    return DeSitterModel(float(a), chart)


def negate_chart(chart: SurfaceChart, name: str) -> SurfaceChart:
    metric, deriv = chart.metric, chart.metric_deriv
    neg_deriv = None if deriv is None else (lambda p: -np.asarray(deriv(p)))
    return SurfaceChart(name, lambda p: -np.asarray(metric(p)), chart.domain, neg_deriv,
                        chart.orientation, dict(chart.params, negated=not chart.params.get("negated", False)))


def anti_desitter(model: DeSitterModel) -> SurfaceChart:
    """Anti de Sitter surface as the anti-isometric copy ``(dS^2_a, -g)``."""
    return negate_chart(model.chart, f"anti-desitter({model.radius:g})")


def _require_unit(model: DeSitterModel):
    if model.radius != 1.0:
        raise ValueError("para-complex structure operations require the unit de Sitter surface")


def _check_point(x):
    if abs(x.inner(x) - 1.0) > SURFACE_TOL:
        raise NotOnSurface(f"<x,x>_1 = {x.inner(x)!r}")


def _check_tangent(x, v):
    if abs(x.inner(v)) > SURFACE_TOL * max(1.0, math.sqrt(abs(v.inner(v)) + 1e-300)):
        raise NotTangent(f"<x,v>_1 = {x.inner(v)!r}")


def desitter_j(model: DeSitterModel, x, v) -> AmbientVector3:
    """Para-complex structure ``j_x(v) = x (x) v`` of the unit de Sitter surface."""
    _require_unit(model)
    x, v = _vec(x), _vec(v)
    _check_point(x)
    _check_tangent(x, v)
    return lorentz_cross(x, v)


def inclusion_second_fundamental_form(model: DeSitterModel, x, u, v) -> AmbientVector3:
    _require_unit(model)
    x, u, v = _vec(x), _vec(u), _vec(v)
    _check_point(x)
    _check_tangent(x, u)
    _check_tangent(x, v)
    return x.scale(-u.inner(v))


# ---------------------------------------------------------------------------
# catalogue

_NAME = re.compile(r"^\s*([a-z\-]+)\s*(?:\(\s*([^)]*)\s*\))?\s*$")


def chart_from_name(descriptor: str) -> SurfaceChart:
    """``minkowski`` | ``desitter(a)`` | ``anti-desitter(a)``."""
    m = _NAME.match(descriptor.strip().lower())
    if not m:
        raise ConfigError(f"cannot parse model descriptor {descriptor!r}")
    name, arg = m.group(1), m.group(2)
    try:
        a = float(arg) if arg else 1.0
    except ValueError as exc:
        raise ConfigError(f"bad radius in {descriptor!r}") from exc
    if name in ("minkowski", "d", "paracomplex"):
        return minkowski_chart()
    if name in ("desitter", "ds"):
        return desitter(a).chart
    if name in ("anti-desitter", "antidesitter", "ads"):
        return anti_desitter(desitter(a))
    raise ConfigError(f"unknown model {name!r}")


def model_names():
    return ("minkowski", "desitter(a)", "anti-desitter(a)")
