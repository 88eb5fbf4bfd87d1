"""Gauss map of an equidistant tube in AdS^3 and the splitting of Gr^-(2,4).

``R^{2,2}`` carries ``<x, y>_2 = -x1 y1 - x2 y2 + x3 y3 + x4 y4``.  Bivectors are
stored by Pluecker components in the order ``12, 13, 14, 23, 24, 34``; the
induced form is ``<u^v, w^x> = <u,w><v,x> - <u,x><v,w>``.

The tube of distance ``d`` around ``gamma(s) = (0, 0, cos s, sin s)`` is

    f(s, t) = (sinh d cos t, sinh d sin t, cosh d cos s, cosh d sin s),
    N(s, t) = (cosh d cos t, cosh d sin t, sinh d cos s, sinh d sin s),

and its Gauss map ``f ^ N`` splits into a pair of curves ``phi(t - s)``,
``psi(t + s)`` on the quadrics ``<x, x>_2 = -1`` of the two three-dimensional
eigenspaces of the Hodge star.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import variation
from .errors import NotAFrame

ETA = np.array([-1.0, -1.0, 1.0, 1.0])
PAIRS = tuple(itertools.combinations(range(4), 2))
FRAME_TOL = 1e-9
SPLIT_TOL = 1e-10
DIFF_STEP = 1e-3
REPORT_SCHEMA = "parakahler.ads-gauss-report/1"


@dataclass(frozen=True)
class AmbientVector4:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))
        if len(self.components) != 4:
            raise ValueError("need four components")

    @property
    def array(self):
        return np.array(self.components)

    def inner(self, other: "AmbientVector4") -> float:
        return inner2(self.array, other.array)


def inner2(x, y) -> float:
    return float(np.sum(ETA * np.asarray(x) * np.asarray(y)))


def _arr(u):
    return u.array if isinstance(u, (AmbientVector4, Bivector)) else np.asarray(u, dtype=float)


# Gram matrix of the basis e_i ^ e_j (diagonal since e is orthonormal)
BIVECTOR_GRAM = np.diag([ETA[i] * ETA[j] for i, j in PAIRS])


@dataclass(frozen=True)
class Bivector:
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "components", tuple(float(c) for c in self.components))
        if len(self.components) != 6:
            raise ValueError("need six Pluecker components")

    @property
    def array(self):
        return np.array(self.components)

    def inner(self, other: "Bivector") -> float:
        return float(self.array @ BIVECTOR_GRAM @ other.array)

    def __add__(self, other):
        return Bivector(self.array + other.array)

    def __sub__(self, other):
        return Bivector(self.array - other.array)

    def scale(self, c):
        return Bivector(c * self.array)


def wedge(u, v) -> Bivector:
    u, v = _arr(u), _arr(v)
    return Bivector([u[i] * v[j] - u[j] * v[i] for i, j in PAIRS])


def basis_vector(i: int) -> np.ndarray:
    e = np.zeros(4)
    e[i] = 1.0
    return e


def _E(a, b, c, d, sign):
    return (wedge(basis_vector(a), basis_vector(b)).array
            + sign * wedge(basis_vector(c), basis_vector(d)).array) / math.sqrt(2)


def split_basis(sign: int) -> np.ndarray:
    """Rows ``E^1, E^2, E^3`` for ``sign = +1`` or ``-1``."""
    return np.array([_E(0, 1, 2, 3, sign), _E(0, 2, 3, 1, sign), _E(0, 3, 1, 2, sign)])


E_PLUS = split_basis(1)
E_MINUS = split_basis(-1)
_ALL = np.vstack([E_PLUS, E_MINUS])  # rows span Lambda^2


def split_gram(sign: int) -> np.ndarray:
    B = split_basis(sign)
    return B @ BIVECTOR_GRAM @ B.T


def coordinates(b) -> tuple:
    """Coordinates of ``b`` in ``(E_+, E_-)``: two arrays of length 3."""
    c = np.linalg.solve(_ALL.T, _arr(b))
    return c[:3], c[3:]


def quadric_form(x, sign: int) -> float:
    """``<x, x>_2`` for ``x`` given by coordinates in ``E^i_sign``."""
    x = np.asarray(x)
    return float(x @ split_gram(sign) @ x)


@dataclass
class SplitResult:
    point_minus: np.ndarray
    point_plus: np.ndarray
    sum_lands_in: str          # which eigenspace (u1^u2 + u3^u4)/sqrt2 lies in
    off_span_residual: float
    orientation: int           # sign of det[u1, u2, u3, u4]

    def constraint_residual(self) -> float:
        return max(abs(quadric_form(self.point_minus, -1) + 1.0), abs(quadric_form(self.point_plus, 1) + 1.0))


def check_frame(frame, tol=FRAME_TOL):
    """Gram of a pseudo-orthonormal 4-frame; raises :class:`NotAFrame`."""
    U = np.array([_arr(u) for u in frame]).T
    gram = U.T @ np.diag(ETA) @ U
    diag = np.diag(gram)
    if (np.max(np.abs(gram - np.diag(diag))) > tol or np.max(np.abs(np.abs(diag) - 1.0)) > tol
            or int(np.sum(diag < 0)) != 2):
        raise NotAFrame(f"Gram matrix {np.round(gram, 12).tolist()} is not pseudo-orthonormal of signature (2,2)")
    return gram


def grassmann_split(b, completion) -> SplitResult:
    """``u1^u2 -> ((u1^u2 + u3^u4)/sqrt2, (u1^u2 - u3^u4)/sqrt2)`` sorted by eigenspace.

    ``b`` is the decomposed pair ``(u1, u2)`` (a bare :class:`Bivector` is
    rejected since the completion could not be checked against it) and
    ``completion`` is ``(u3, u4)``.
    """
    if isinstance(b, Bivector):
        raise NotAFrame("pass the decomposed pair (u1, u2) so the completion can be checked")
    u1, u2 = (_arr(u) for u in b)
    u3, u4 = (_arr(u) for u in completion)
    check_frame((u1, u2, u3, u4))
    w12, w34 = wedge(u1, u2).array, wedge(u3, u4).array
    a = (w12 + w34) / math.sqrt(2)
    c = (w12 - w34) / math.sqrt(2)
    ap, am = coordinates(a)
    cp, cm = coordinates(c)
    if np.linalg.norm(ap) < np.linalg.norm(am):
        minus, plus, off, lands = am, cp, max(np.linalg.norm(ap), np.linalg.norm(cm)), "minus"
    else:
        minus, plus, off, lands = cm, ap, max(np.linalg.norm(am), np.linalg.norm(cp)), "plus"
    if off > SPLIT_TOL * max(1.0, np.linalg.norm(w12)):
        raise NotAFrame(f"completion does not split u1^u2 into eigenspaces (residual {off:.3e})")
    orient = int(np.sign(np.linalg.det(np.column_stack([u1, u2, u3, u4]))))
    return SplitResult(minus, plus, lands, float(off), orient)


# ---------------------------------------------------------------------------
# tube

@dataclass(frozen=True)
class TubeFrame:
    d: float

    def __post_init__(self):
        if not self.d > 0:
            raise ValueError("tube distance must be positive")

    def f(self, s, t):
        sh, ch = math.sinh(self.d), math.cosh(self.d)
        return np.array([sh * math.cos(t), sh * math.sin(t), ch * math.cos(s), ch * math.sin(s)])

    def f_s(self, s, t):
        ch = math.cosh(self.d)
        return np.array([0.0, 0.0, -ch * math.sin(s), ch * math.cos(s)])

    def f_t(self, s, t):
        sh = math.sinh(self.d)
        return np.array([-sh * math.sin(t), sh * math.cos(t), 0.0, 0.0])

    def N(self, s, t):
        sh, ch = math.sinh(self.d), math.cosh(self.d)
        return np.array([ch * math.cos(t), ch * math.sin(t), sh * math.cos(s), sh * math.sin(s)])

    def frame(self, s, t):
        """``(f, v1, v2, N)`` with ``v_i`` the normalised coordinate tangents."""
        fs, ft = self.f_s(s, t), self.f_t(s, t)
        v1 = fs / math.sqrt(abs(inner2(fs, fs)))
        v2 = ft / math.sqrt(abs(inner2(ft, ft)))
        return self.f(s, t), v1, v2, self.N(s, t)

    def invariant_residual(self, s, t) -> float:
        f, v1, v2, N = self.frame(s, t)
        U = np.column_stack([f, v1, v2, N])
        gram = U.T @ np.diag(ETA) @ U
        return float(np.max(np.abs(gram - np.diag([1.0, 1.0, -1.0, -1.0]))))

    def gauss_pair(self, s, t):
        """``(phi, psi)`` as coordinate triples in ``E_-`` and ``E_+``."""
        f, v1, v2, N = self.frame(s, t)
        a = (wedge(f, N).array + wedge(v1, v2).array) / math.sqrt(2)
        b = (wedge(f, N).array - wedge(v1, v2).array) / math.sqrt(2)
        return coordinates(a)[1], coordinates(b)[0], coordinates(a)[0], coordinates(b)[1]


def closed_form_phi(u):
    """``-cos u E^2_- + sin u E^3_-``."""
    return np.array([0.0, -math.cos(u), math.sin(u)])


def closed_form_psi(v):
    """``-cos v E^2_+ - sin v E^3_+``."""
    return np.array([0.0, -math.cos(v), -math.sin(v)])


def _d1(fn, x, h=DIFF_STEP):
    return (-fn(x + 2 * h) + 8 * fn(x + h) - 8 * fn(x - h) + fn(x - 2 * h)) / (12 * h)


def _d2(fn, x, h=DIFF_STEP):
    return (-fn(x + 2 * h) + 16 * fn(x + h) - 30 * fn(x) + 16 * fn(x - h) - fn(x - 2 * h)) / (12 * h * h)


@dataclass
class TubeReport:
    d: float
    frame_residual: float
    closed_form_residual: float
    off_span_residual: float
    dependence_residual: float
    constraint_residual: float
    speed_residual: float
    geodesic_residual: float
    causal_sign_phi: int
    causal_sign_psi: int
    phi: np.ndarray = field(repr=False, default=None)   # (n, 3) along u
    psi: np.ndarray = field(repr=False, default=None)   # (n, 3) along v
    params: np.ndarray = field(repr=False, default=None)

    def passed(self, frame_tol=FRAME_TOL, match_tol=1e-8, geo_tol=1e-6) -> bool:
        return (self.frame_residual < frame_tol and self.closed_form_residual < match_tol
                and self.dependence_residual < match_tol and self.off_span_residual < match_tol
                and self.constraint_residual < match_tol and self.speed_residual < geo_tol
                and self.geodesic_residual < geo_tol)

    def to_dict(self) -> dict:
        return {
            "d": self.d,
            "frame_residual": self.frame_residual,
            "closed_form_residual": self.closed_form_residual,
            "off_span_residual": self.off_span_residual,
            "dependence_residual": self.dependence_residual,
            "constraint_residual": self.constraint_residual,
            "speed_residual": self.speed_residual,
            "geodesic_residual": self.geodesic_residual,
            "causal_sign_phi": self.causal_sign_phi,
            "causal_sign_psi": self.causal_sign_psi,
        }

    def csv_rows(self):
        yield ("param", "phi1", "phi2", "phi3", "psi1", "psi2", "psi3")
        for w, p, q in zip(self.params, self.phi, self.psi):
            yield tuple(repr(float(c)) for c in (w, *p, *q))


def tube_gauss_map(d: float, n: int = 32) -> TubeReport:
    """Evaluate the Gauss-map pair on an ``n x n`` grid of the torus and check it."""
    tube = TubeFrame(d)
    grid = np.linspace(0.0, 2 * math.pi, n, endpoint=False)
    frame_res = match = off = dep = constraint = 0.0
    for s in grid:
        for t in grid:
            frame_res = max(frame_res, tube.invariant_residual(s, t))
            phi, psi, phi_off, psi_off = tube.gauss_pair(s, t)
            off = max(off, float(np.max(np.abs(phi_off))), float(np.max(np.abs(psi_off))))
            match = max(match, float(np.max(np.abs(phi - closed_form_phi(t - s)))),
                        float(np.max(np.abs(psi - closed_form_psi(t + s)))))
            constraint = max(constraint, abs(quadric_form(phi, -1) + 1), abs(quadric_form(psi, 1) + 1))
            # phi depends on t - s only: (d_s + d_t) phi = 0; psi on t + s: (d_t - d_s) psi = 0
            dphi = (_d1(lambda x: tube.gauss_pair(x, t)[0], s) + _d1(lambda x: tube.gauss_pair(s, x)[0], t))
            dpsi = (_d1(lambda x: tube.gauss_pair(s, x)[1], t) - _d1(lambda x: tube.gauss_pair(x, t)[1], s))
            dep = max(dep, float(np.max(np.abs(dphi))), float(np.max(np.abs(dpsi))))

    # curves along u = t - s (s = 0) and v = t + s (s = 0)
    phi_of = lambda u: tube.gauss_pair(0.0, u)[0]  # noqa: E731
    psi_of = lambda v: tube.gauss_pair(0.0, v)[1]  # noqa: E731
    speed = geo = 0.0
    signs = []
    for curve, sign in ((phi_of, -1), (psi_of, 1)):
        norms = []
        for w in grid:
            x, x1, x2 = curve(w), _d1(curve, w), _d2(curve, w)
            q = quadric_form(x1, sign)
            norms.append(q)
            speed = max(speed, abs(abs(q) - 1.0))
            # quadric geodesics: x'' + (<x',x'> / <x,x>) x = 0
            geo = max(geo, float(np.max(np.abs(x2 + (q / quadric_form(x, sign)) * x))))
        signs.append(int(np.sign(np.mean(norms))))
    return TubeReport(float(d), frame_res, match, off, dep, constraint, speed, geo, signs[0], signs[1],
                      np.array([phi_of(w) for w in grid]), np.array([psi_of(w) for w in grid]), grid)


# ---------------------------------------------------------------------------
# stability

@dataclass
class GaussStabilityReport:
    tube: TubeReport
    hamiltonian: variation.FamilyReport
    normal: variation.FamilyReport
    witness_seed: int
    witness_value: float
    zero_field_value: float
    raw_form_hypothesis: dict

    def passed(self) -> bool:
        return (self.tube.passed() and self.hamiltonian.max_value <= variation.STABILITY_TOL
                and self.witness_value > 0 and self.zero_field_value == 0.0)

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "tube": self.tube.to_dict(),
            "hamiltonian": self.hamiltonian.to_dict(),
            "normal": self.normal.to_dict(),
            "witness_seed": self.witness_seed,
            "witness_value": float(self.witness_value),
            "zero_field_value": float(self.zero_field_value),
            "raw_form_hypothesis": self.raw_form_hypothesis,
            "passed": self.passed(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def stability_grid(resolution: int = 64):
    """The Gauss-map torus as a product of unit-speed timelike geodesics in ``dS^2 x dS^2``, ``G^-``.

    One period of each closed geodesic is sampled.
    """
    return variation.geodesic_configuration("desitter(1)", "desitter(1)", -1, "timelike", "timelike",
                                            length=2 * math.pi, resolution=resolution)


def gauss_map_stability(d: float, seeds=range(50), resolution: int = 64) -> GaussStabilityReport:
    """Hamiltonian family (expected all <= 0) plus a search for a positive normal-field value."""
    tube = tube_gauss_map(d)
    grid = stability_grid(resolution)
    ham = variation.sweep(grid, "hamiltonian", seeds)
    normal = variation.sweep(grid, "normal", seeds, general=True)
    k = int(np.argmax(normal.values))
    zero = variation.second_variation_hamiltonian(grid, variation.HamiltonianField.zero(grid)).value
    # sign data of the curves as they sit on the quadrics under the raw bivector form
    raw = {
        "quadric_gauss_curvature": -1.0,
        "eps_phi": tube.causal_sign_phi,
        "eps_psi": tube.causal_sign_psi,
        "eps_phi_kappa": -1.0 * tube.causal_sign_phi,
        "eps_psi_kappa": -1.0 * tube.causal_sign_psi,
    }
    return GaussStabilityReport(tube, ham, normal, int(normal.seeds[k]), float(normal.values[k]), zero, raw)
