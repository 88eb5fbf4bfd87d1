"""The para-Kaehler product ``(S1 x S2, G^eps, J, Omega^eps)``.

Points of the product are 4-vectors ``(u1, v1, u2, v2)``; tangent vectors are
4-vectors in the coordinate basis.  ``G^eps = g1 (+) eps*g2``,
``J = j1 (+) j2`` and ``Omega^eps(X, Y) = G^eps(JX, Y)``.

Curvature is computed by the generic coordinate pipeline in
:mod:`parakahler.tensors` applied to the 4x4 block metric, so the Levi-Civita
connection splits by construction and nothing about the factors is assumed.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field

import numpy as np

from . import surface
from .errors import BasePointMismatch, LeftDomain
from .surface import SurfaceChart
from .tensors import CURVATURE_STEP, MetricField, checked_inverse, weyl_tensor

NIJENHUIS_STEP = 1e-5
REPORT_SCHEMA = "parakahler.curvature-report/1"


def _split(x):
    x = np.asarray(x, dtype=float)
    return x[:2], x[2:]


def _block(a, b):
    out = np.zeros((4, 4))
    out[:2, :2] = a
    out[2:, 2:] = b
    return out


@dataclass(frozen=True)
class ProductSpace:
    first: SurfaceChart
    second: SurfaceChart
    epsilon: int = 1

    def __post_init__(self):
        if self.epsilon not in (1, -1):
            raise ValueError("epsilon must be +1 or -1")

    @property
    def descriptor(self) -> str:
        return f"{self.first.name}x{self.second.name},eps={self.epsilon:+d}"

    def contains(self, x, margin=0.0) -> bool:
        p1, p2 = _split(x)
        return self.first.contains(p1, margin) and self.second.contains(p2, margin)

    def check(self, x, margin=0.0):
        if not self.contains(x, margin):
            raise LeftDomain(f"{tuple(np.round(x, 6))} outside {self.descriptor}")

    def metric(self, x):
        p1, p2 = _split(x)
        return _block(self.first.g(p1), self.epsilon * self.second.g(p2))

    def metric_deriv(self, x):
        p1, p2 = _split(x)
        d1 = self.first.field.dg(p1)
        d2 = self.second.field.dg(p2)
        out = np.zeros((4, 4, 4))
        out[0:2, :2, :2] = d1
        out[2:4, 2:, 2:] = self.epsilon * d2
        return out

    @property
    def field(self) -> MetricField:
        return MetricField(self.metric, self.metric_deriv)

    def J(self, x):
        p1, p2 = _split(x)
        return _block(surface.j_matrix(self.first, p1), surface.j_matrix(self.second, p2))

    def christoffel(self, x):
        return self.field.christoffel(x)

    def frame(self, x):
        """Columns ``(e1, e2, f1, f2)``: orthonormal for ``G^eps`` with ``e2 = j1 e1``, ``f2 = j2 f1``."""
        p1, p2 = _split(x)
        e1, e2 = surface.orthonormal_frame(self.first, p1)
        f1, f2 = surface.orthonormal_frame(self.second, p2)
        F = np.zeros((4, 4))
        F[:2, 0], F[:2, 1], F[2:, 2], F[2:, 3] = e1, e2, f1, f2
        return F


@dataclass(frozen=True)
class ProductTangent:
    base: tuple
    v1: np.ndarray
    v2: np.ndarray

    @classmethod
    def from_vector(cls, x, V) -> "ProductTangent":
        x = np.asarray(x, dtype=float)
        V = np.asarray(V, dtype=float)
        return cls((tuple(x[:2]), tuple(x[2:])), V[:2].copy(), V[2:].copy())

    @property
    def point(self):
        return np.concatenate([self.base[0], self.base[1]])

    @property
    def vector(self):
        return np.concatenate([self.v1, self.v2])


def _same_base(X: ProductTangent, Y: ProductTangent):
    if not np.allclose(X.point, Y.point, rtol=0.0, atol=1e-14):
        raise BasePointMismatch(f"{X.base} vs {Y.base}")
    return X.point


def apply_J(space: ProductSpace, X: ProductTangent) -> ProductTangent:
    return ProductTangent.from_vector(X.point, space.J(X.point) @ X.vector)


def product_metric(space: ProductSpace, X: ProductTangent, Y: ProductTangent) -> float:
    x = _same_base(X, Y)
    return float(X.vector @ space.metric(x) @ Y.vector)


def symplectic_form(space: ProductSpace, X: ProductTangent, Y: ProductTangent) -> float:
    """``Omega^eps(X, Y) = G^eps(JX, Y) = omega1(X1, Y1) + eps*omega2(X2, Y2)``."""
    x = _same_base(X, Y)
    return float((space.J(x) @ X.vector) @ space.metric(x) @ Y.vector)


def nijenhuis(space: ProductSpace, x, X, Y, j_field=None, h=NIJENHUIS_STEP) -> ProductTangent:
    """Nijenhuis tensor of ``J`` on constant coordinate fields ``X``, ``Y``.

    With ``X``, ``Y`` constant the brackets reduce to directional derivatives of
    ``J``: ``[JX, JY] = (d_{JX} J) Y - (d_{JY} J) X``, ``[JX, Y] = -(d_Y J) X`` and
    ``[X, JY] = (d_X J) Y``.  Derivatives are central differences of step ``h``.
    ``j_field`` overrides ``space.J`` (used to probe non-integrable structures).
    """
    x = np.asarray(x, dtype=float)
    X = np.asarray(X, dtype=float)
    Y = np.asarray(Y, dtype=float)
    Jf = space.J if j_field is None else j_field
    if j_field is None:
        space.check(x, margin=h * 4)

    def dJ(direction):
        n = np.linalg.norm(direction)
        if n == 0:
            return np.zeros((4, 4))
        d = direction / n
        return n * (Jf(x + h * d) - Jf(x - h * d)) / (2 * h)

    J0 = Jf(x)
    JX, JY = J0 @ X, J0 @ Y
    br_jx_jy = dJ(JX) @ Y - dJ(JY) @ X
    br_jx_y = -dJ(Y) @ X
    br_x_jy = dJ(X) @ Y
    N = br_jx_jy - J0 @ br_jx_y - J0 @ br_x_jy
    return ProductTangent.from_vector(x, N)


# ---------------------------------------------------------------------------
# curvature

def _hodge_star_matrix(eta_diag, orientation):
    """Hodge star on 2-forms in an orthonormal frame, basis ``e_a ^ e_b`` (a < b)."""
    pairs = list(itertools.combinations(range(4), 2))
    star = np.zeros((6, 6))
    for A, (a, b) in enumerate(pairs):
        c, d = [i for i in range(4) if i not in (a, b)]
        perm_sign = np.linalg.det(np.eye(4)[[a, b, c, d]])
        B = pairs.index((c, d))
        star[B, A] = eta_diag[a] * eta_diag[b] * perm_sign * orientation
    return star, pairs


@dataclass
class CurvatureReport:
    ricci: np.ndarray
    scalar: float
    einstein_residual: float
    weyl_norm: float
    weyl_self_dual_norm: float
    weyl_anti_self_dual_norm: float
    base_point: tuple = ()
    descriptor: str = ""
    riemann: np.ndarray = field(default=None, repr=False)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "descriptor": self.descriptor,
            "base_point": [float(c) for c in self.base_point],
            "ricci": [[float(c) for c in row] for row in self.ricci],
            "scalar": float(self.scalar),
            "einstein_residual": float(self.einstein_residual),
            "weyl_norm": float(self.weyl_norm),
            "weyl_self_dual_norm": float(self.weyl_self_dual_norm),
            "weyl_anti_self_dual_norm": float(self.weyl_anti_self_dual_norm),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def curvature_report(space: ProductSpace, x, h=CURVATURE_STEP) -> CurvatureReport:
    x = np.asarray(x, dtype=float)
    space.check(x, margin=4 * h)
    G = space.metric(x)
    fld = space.field
    riem = fld.riemann(x, h)
    riem_low = np.einsum("ae,ebcd->abcd", G, riem)
    ric = np.einsum("abad->bd", riem)
    scal = float(np.einsum("bd,bd->", checked_inverse(G), ric))
    einstein = float(np.max(np.abs(ric - 0.25 * scal * G)))

    W = weyl_tensor(G, riem_low, ric, scal)
    F = space.frame(x)
    Wf = np.einsum("abcd,ai,bj,ck,dl->ijkl", W, F, F, F, F)
    eta = np.einsum("ai,ab,bj->ij", F, G, F).diagonal()
    orientation = np.sign(np.linalg.det(F)) * space.first.orientation * space.second.orientation
    star, pairs = _hodge_star_matrix(eta, orientation)
    w = np.array([[Wf[a, b, c, d] for (c, d) in pairs] for (a, b) in pairs])
    lam = np.array([eta[a] * eta[b] for (a, b) in pairs])
    op = w / lam[:, None]
    plus = 0.5 * (np.eye(6) + star)
    minus = 0.5 * (np.eye(6) - star)
    return CurvatureReport(
        ricci=ric,
        scalar=scal,
        einstein_residual=einstein,
        weyl_norm=float(np.sqrt(np.sum(Wf**2))),
        weyl_self_dual_norm=float(np.linalg.norm(plus @ op @ plus)),
        weyl_anti_self_dual_norm=float(np.linalg.norm(minus @ op @ minus)),
        base_point=tuple(float(c) for c in x),
        descriptor=space.descriptor,
        riemann=riem,
    )


def closed_form_scalar(space: ProductSpace, x) -> float:
    """``2 (kappa1 + eps*kappa2)`` with Gauss curvatures from the Brioschi formula."""
    p1, p2 = _split(x)
    k1 = surface.brioschi_curvature(space.first, p1)
    k2 = surface.brioschi_curvature(space.second, p2)
    return 2.0 * (k1 + space.epsilon * k2)


def ricci_tensor(space: ProductSpace, x, h=CURVATURE_STEP):
    x = np.asarray(x, dtype=float)
    space.check(x, margin=4 * h)
    return space.field.ricci(x, h)


def ricci_form(space: ProductSpace, x, X, Y, h=CURVATURE_STEP, ricci=None) -> float:
    """``rho^eps(X, Y) = Ric^eps(JX, Y)``."""
    x = np.asarray(x, dtype=float)
    ric = ricci_tensor(space, x, h) if ricci is None else ricci
    return float((space.J(x) @ np.asarray(X)) @ ric @ np.asarray(Y))
