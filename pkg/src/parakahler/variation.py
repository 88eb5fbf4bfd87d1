"""Second variation of area for minimal and Hamiltonian-minimal Lagrangians.

Convention: a configuration is reported *stable* when the second variation is
non-positive on every sampled field (the volume-maximiser convention natural
in neutral signature).  Values are trapezoid quadratures over the grid with
the induced area element.

Variation fields are tensor-product bumps ``sum_r A_r(s) B_r(t)`` where each
factor is a ``sin**p`` window times a low Fourier modulation.  Their
derivatives are exact, so the only discretisation error is the quadrature.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from scipy.integrate import trapezoid

from . import lagrangian as lag
from . import product, surface
from .errors import LorentzianInduced, NotHMinimal, NotMinimal
from .lagrangian import ImmersionGrid

MINIMAL_TOL = 1e-6
H_MINIMAL_TOL = 1e-5
STABILITY_TOL = 1e-8
REPORT_SCHEMA = "parakahler.variation-report/1"
CONVENTION = "stable means second variation <= 0 on all sampled fields (volume maximiser)"


# ---------------------------------------------------------------------------
# bump fields

@dataclass(frozen=True)
class Bump1D:
    """``sin(pi*xi)**power * (1 + sum a_k cos(2 pi k xi + theta_k))`` on ``[lo, hi]``."""

    lo: float
    hi: float
    power: int = 2
    amplitudes: tuple = ()
    phases: tuple = ()

    def evaluate(self, x):
        """Value, first and second derivative at ``x`` (zero outside the support)."""
        x = np.asarray(x, dtype=float)
        L = self.hi - self.lo
        xi = (x - self.lo) / L
        inside = (xi > 0) & (xi < 1)
        c = math.pi / L
        sn, cs = np.sin(math.pi * xi), np.cos(math.pi * xi)
        p = self.power
        w = sn**p
        w1 = p * sn ** (p - 1) * cs * c
        w2 = c * c * p * ((p - 1) * sn ** (p - 2) * cs * cs - sn**p) if p >= 2 else -c * c * sn
        q, q1, q2 = np.ones_like(x), np.zeros_like(x), np.zeros_like(x)
        for k, (a, th) in enumerate(zip(self.amplitudes, self.phases), start=1):
            om = 2 * math.pi * k / L
            arg = om * (x - self.lo) + th
            q = q + a * np.cos(arg)
            q1 = q1 - a * om * np.sin(arg)
            q2 = q2 - a * om * om * np.cos(arg)
        f = w * q
        f1 = w1 * q + w * q1
        f2 = w2 * q + 2 * w1 * q1 + w * q2
        return tuple(np.where(inside, arr, 0.0) for arr in (f, f1, f2))


@dataclass
class ScalarBump:
    """Sum of tensor products of :class:`Bump1D` factors with exact derivatives."""

    terms: list  # [(coef, Bump1D in s, Bump1D in t)]

    def sample(self, s, t):
        """Arrays ``f, f_s, f_t, f_ss, f_st, f_tt`` on the grid ``s x t``."""
        shape = (len(s), len(t))
        out = [np.zeros(shape) for _ in range(6)]
        for coef, bs, bt in self.terms:
            a, a1, a2 = bs.evaluate(s)
            b, b1, b2 = bt.evaluate(t)
            for k, (x, y) in enumerate([(a, b), (a1, b), (a, b1), (a2, b), (a1, b1), (a, b2)]):
                out[k] += coef * np.outer(x, y)
        return out


def _random_bump(rng, s, t, power, n_terms=2, min_frac=0.3):
    def window(x):
        lo_all, hi_all = float(x[0]), float(x[-1])
        span = hi_all - lo_all
        width = span * rng.uniform(min_frac, 1.0)
        lo = lo_all + rng.uniform(0.0, span - width)
        amps = tuple(rng.uniform(-0.4, 0.4, size=2) / np.arange(1, 3))
        phases = tuple(rng.uniform(0, 2 * math.pi, size=2))
        return Bump1D(lo, lo + width, power, amps, phases)

    return ScalarBump([(float(rng.uniform(0.5, 1.5)) * (1 if k == 0 else rng.choice([-1, 1])),
                        window(s), window(t)) for k in range(n_terms)])


@dataclass
class NormalField:
    """``X = X1 J Phi_s + X2 J Phi_t`` sampled on the grid with first derivatives."""

    X1: np.ndarray
    X2: np.ndarray
    X1_s: np.ndarray
    X1_t: np.ndarray
    X2_s: np.ndarray
    X2_t: np.ndarray
    compact: bool = True

    def __post_init__(self):
        if self.compact:
            for arr in (self.X1, self.X2):
                edge = np.concatenate([arr[0], arr[-1], arr[:, 0], arr[:, -1]])
                if np.max(np.abs(edge)) > 1e-12:
                    raise ValueError("compactly supported field must vanish on the grid boundary")

    @classmethod
    def from_bumps(cls, grid: ImmersionGrid, b1: Optional[ScalarBump], b2: Optional[ScalarBump]):
        z = np.zeros(grid.shape)
        f1 = b1.sample(grid.s, grid.t) if b1 else [z] * 6
        f2 = b2.sample(grid.s, grid.t) if b2 else [z] * 6
        return cls(f1[0], f2[0], f1[1], f1[2], f2[1], f2[2])

    @classmethod
    def from_arrays(cls, grid: ImmersionGrid, X1, X2, compact=True):
        """Derivatives by second-order finite differences of the samples."""
        X1s, X1t = np.gradient(X1, grid.ds, grid.dt, edge_order=2)
        X2s, X2t = np.gradient(X2, grid.ds, grid.dt, edge_order=2)
        return cls(X1, X2, X1s, X1t, X2s, X2t, compact)


@dataclass
class HamiltonianField:
    """Compactly supported potential ``u`` of the Hamiltonian field ``J grad u``."""

    u: np.ndarray
    u_s: np.ndarray
    u_t: np.ndarray
    u_ss: np.ndarray
    u_st: np.ndarray
    u_tt: np.ndarray

    def __post_init__(self):
        edge = np.concatenate([self.u[0], self.u[-1], self.u[:, 0], self.u[:, -1]])
        if np.max(np.abs(edge)) > 1e-12:
            raise ValueError("Hamiltonian potential must vanish on the grid boundary")

    @classmethod
    def from_bump(cls, grid: ImmersionGrid, bump: ScalarBump):
        return cls(*bump.sample(grid.s, grid.t))

    @classmethod
    def zero(cls, grid: ImmersionGrid):
        z = np.zeros(grid.shape)
        return cls(z, z, z, z, z, z)


def normal_field_family(grid: ImmersionGrid, seed: int, power: int = 2) -> NormalField:
    rng = np.random.default_rng(seed)
    which = rng.integers(0, 3)  # 0: X1 only, 1: X2 only, 2: both
    b1 = _random_bump(rng, grid.s, grid.t, power) if which in (0, 2) else None
    b2 = _random_bump(rng, grid.s, grid.t, power) if which in (1, 2) else None
    return NormalField.from_bumps(grid, b1, b2)


def hamiltonian_field_family(grid: ImmersionGrid, seed: int, power: int = 4) -> HamiltonianField:
    rng = np.random.default_rng(seed)
    return HamiltonianField.from_bump(grid, _random_bump(rng, grid.s, grid.t, power))


# ---------------------------------------------------------------------------
# reports

@dataclass
class VariationReport:
    value: float
    integrand_min: float
    integrand_max: float
    verdict: str
    formula: str
    pointwise_nonpositive: bool = False
    terms: dict = field(default_factory=dict)
    convention: str = CONVENTION

    def to_dict(self) -> dict:
        return {
            "schema": REPORT_SCHEMA,
            "formula": self.formula,
            "value": float(self.value),
            "integrand_min": float(self.integrand_min),
            "integrand_max": float(self.integrand_max),
            "verdict": self.verdict,
            "pointwise_nonpositive": bool(self.pointwise_nonpositive),
            "terms": {k: float(v) for k, v in sorted(self.terms.items())},
            "convention": self.convention,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


def _verdict(values, tol=STABILITY_TOL) -> str:
    values = np.atleast_1d(values)
    if np.all(values <= tol):
        return "stable-negative-semidefinite"
    if np.any(values < -tol):
        return "indefinite"
    return "positive"


def _integrate(grid: ImmersionGrid, integrand, area=None):
    if area is None:
        area = np.sqrt(np.abs(np.linalg.det(grid.induced_metric)))
    return float(trapezoid(trapezoid(integrand * area, grid.t, axis=1), grid.s))


def _report(grid, integrand, formula, terms, area=None):
    value = _integrate(grid, integrand, area)
    term_values = {k: _integrate(grid, v, area) for k, v in terms.items()}
    nonpos = all(np.max(v) <= 0.0 for v in terms.values())
    return VariationReport(value, float(np.min(integrand)), float(np.max(integrand)),
                           _verdict(value), formula, nonpos, term_values)


def curve_curvatures(grid: ImmersionGrid):
    """Gauss curvatures of the two factors sampled along ``phi`` and ``psi``."""
    if "kappa" not in grid.meta:
        sp = grid.space
        k1 = np.array([surface.gauss_curvature(sp.first, grid.phi[m, 0, :2]) for m in range(grid.shape[0])])
        k2 = np.array([surface.gauss_curvature(sp.second, grid.phi[0, n, 2:]) for n in range(grid.shape[1])])
        grid.meta["kappa"] = (k1, k2)
    return grid.meta["kappa"]


def _cached(grid: ImmersionGrid, key: str, fn):
    if key not in grid.meta:
        grid.meta[key] = fn(grid)
    return grid.meta[key]


def _require_product(grid: ImmersionGrid):
    if grid.kind != "productOfCurves":
        raise ValueError("this formula applies to products of curves")


def second_variation_minimal(grid: ImmersionGrid, X: NormalField, general: bool = False) -> VariationReport:
    """Second variation of a minimal product of geodesics along ``X``.

    The default path requires a definite induced metric and uses the reduced
    integrand ``-|dX|^2 + eps_phi kappa1 X1^2 + eps_psi kappa2 X2^2``.  With
    ``general=True`` the pre-reduction gradient term
    ``-(X1_s^2 + X2_t^2) - eps eps_phi eps_psi (X2_s^2 + X1_t^2)`` is used and
    Lorentzian induced metrics are accepted (diagnostics / instability witnesses).
    """
    _require_product(grid)
    if _cached(grid, "mean_curvature_sup", lag.mean_curvature_sup) > MINIMAL_TOL:
        raise NotMinimal("grid is not minimal")
    eps, ep, eq = grid.space.epsilon, grid.meta["eps_phi"], grid.meta["eps_psi"]
    lorentzian = ep != eps * eq
    if lorentzian and not general:
        raise LorentzianInduced("induced metric is Lorentzian; stability verdict needs a definite one")
    k1, k2 = curve_curvatures(grid)
    mixed = eps * ep * eq if general else 1
    terms = {
        "grad_diag": -(X.X1_s**2 + X.X2_t**2),
        "grad_mixed": -mixed * (X.X2_s**2 + X.X1_t**2),
        "curv_first": ep * k1[:, None] * X.X1**2,
        "curv_second": eq * k2[None, :] * X.X2**2,
    }
    integrand = sum(terms.values())
    return _report(grid, integrand, "minimal-general" if general else "minimal", terms)


def second_variation_hamiltonian(grid: ImmersionGrid, fld: HamiltonianField) -> VariationReport:
    """Reduced Hamiltonian second variation for projected-rank-one H-minimal grids."""
    _require_product(grid)
    if _cached(grid, "h_minimality", lag.h_minimality_residual) > H_MINIMAL_TOL:
        raise NotHMinimal("grid is not Hamiltonian minimal")
    eps, ep, eq = grid.space.epsilon, grid.meta["eps_phi"], grid.meta["eps_psi"]
    k1, k2 = curve_curvatures(grid)
    kp = grid.meta["k_phi"][:, None]
    kq = grid.meta["k_psi"][None, :]
    terms = {
        "laplacian": -(ep * fld.u_ss + eps * eq * fld.u_tt) ** 2,
        "curv_first": ep * fld.u_s**2 * k1[:, None],
        "curv_second": eq * fld.u_t**2 * k2[None, :],
        "coupling": -(ep * fld.u_s * kp - eps * eq * fld.u_t * kq) ** 2,
    }
    return _report(grid, sum(terms.values()), "hamiltonian-reduced", terms)


def _ricci_field(grid: ImmersionGrid):
    if "ricci" not in grid.meta:
        ns, nt = grid.shape
        cache = {}
        R = np.zeros((ns, nt, 4, 4))
        for node in grid.nodes():
            x = grid.phi[node]
            key = tuple(np.round(x, 13))
            if key not in cache:
                cache[key] = product.ricci_tensor(grid.space, x)
            R[node] = cache[key]
        grid.meta["ricci"] = R
    return grid.meta["ricci"]


def general_hamiltonian_second_variation(grid: ImmersionGrid, fld: HamiltonianField) -> VariationReport:
    """Hamiltonian second variation evaluated term by term (dimension factor n = 2).

    ``-(Lap u)^2 + Ric(grad u, grad u) + 2 G(h(grad u, grad u), 2H) + G(2H, J grad u)^2``
    with ``h``, ``H`` and ``Ric`` taken from the grid and the ambient curvature
    pipeline rather than from curve data.
    """
    if _cached(grid, "h_minimality", lag.h_minimality_residual) > H_MINIMAL_TOL:
        raise NotHMinimal("grid is not Hamiltonian minimal")
    ns, nt = grid.shape
    g = np.array([[grid.induced_at((m, n)) for n in range(nt)] for m in range(ns)])
    ginv = np.linalg.inv(g)
    vol = np.sqrt(np.abs(np.linalg.det(g)))
    du = np.stack([fld.u_s, fld.u_t], axis=-1)
    ddu = np.stack([np.stack([fld.u_ss, fld.u_st], -1), np.stack([fld.u_st, fld.u_tt], -1)], -2)
    A = vol[..., None, None] * ginv
    dA_s = np.gradient(A, grid.ds, axis=0, edge_order=2)
    dA_t = np.gradient(A, grid.dt, axis=1, edge_order=2)
    lap = np.einsum("mnij,mnij->mn", ginv, ddu) + (
        np.einsum("mnj,mnj->mn", dA_s[..., 0, :], du) + np.einsum("mnj,mnj->mn", dA_t[..., 1, :], du)) / vol
    grad = np.einsum("mnij,mnj->mni", ginv, du)  # parameter components of grad u
    ric = _ricci_field(grid)
    ric_term = np.zeros((ns, nt))
    h_term = np.zeros((ns, nt))
    j_term = np.zeros((ns, nt))
    for node in grid.nodes():
        gi = grad[node]
        if not np.any(gi):
            continue
        d = grid.dphi[node]
        X = d @ gi
        ric_term[node] = X @ ric[node] @ X
        h = lag.second_fundamental_tensor(grid, node)
        cH = lag.mean_curvature_coefficients(grid, node)  # 2H = cH^k J Phi_k
        ch = -np.einsum("i,j,ijl,lk->k", gi, gi, h, ginv[node])
        h_term[node] = 2 * (-(ch @ g[node] @ cH))
        j_term[node] = (-(cH @ g[node] @ gi)) ** 2
    terms = {"laplacian": -lap**2, "ricci": ric_term, "second_fundamental": h_term, "mean_curvature": j_term}
    return _report(grid, sum(terms.values()), "hamiltonian-general", terms, vol)


# ---------------------------------------------------------------------------
# sweeps

@dataclass
class FamilyReport:
    formula: str
    seeds: list
    values: list
    verdict: str
    max_value: float
    min_value: float
    convention: str = CONVENTION

    def to_dict(self):
        return {
            "schema": REPORT_SCHEMA,
            "formula": self.formula,
            "verdict": self.verdict,
            "max_value": float(self.max_value),
            "min_value": float(self.min_value),
            "seeds": [int(s) for s in self.seeds],
            "values": [float(v) for v in self.values],
            "convention": self.convention,
        }

    def csv_rows(self):
        yield ("seed", "value")
        for s, v in zip(self.seeds, self.values):
            yield (str(int(s)), repr(float(v)))


def sweep(grid: ImmersionGrid, kind: str, seeds, general: bool = False) -> FamilyReport:
    """Evaluate a seeded field family: ``kind`` is ``"normal"`` or ``"hamiltonian"``."""
    values = []
    for seed in seeds:
        if kind == "normal":
            rep = second_variation_minimal(grid, normal_field_family(grid, seed), general=general)
        elif kind == "hamiltonian":
            rep = second_variation_hamiltonian(grid, hamiltonian_field_family(grid, seed))
        else:
            raise ValueError(f"unknown field family {kind!r}")
        values.append(rep.value)
    values = np.array(values)
    return FamilyReport(f"{kind}{'-general' if general else ''}", list(seeds), values.tolist(),
                        _verdict(values), float(values.max()), float(values.min()))


# ---------------------------------------------------------------------------
# catalogued configurations

def geodesic_trace(chart, start, direction, length, step=1e-2, profile=None, s0=0.0):
    """Unit-speed curve of the given profile (default geodesic) from ``start`` at arclength ``s0``."""
    init = surface.unit_state(chart, start, direction, s0)
    return surface.integrate_curve(chart, init, profile or surface.CurvatureProfile.geodesic(), length, step)


def _chart(name):
    from .models import chart_from_name
    return chart_from_name(name)


# (first, second, eps, causal character of gamma1, of gamma2); radii a=1, b=2
STABLE_TABLE = (
    ("desitter(1)", "desitter(2)", 1, "timelike", "timelike"),
    ("desitter(1)", "anti-desitter(2)", -1, "timelike", "spacelike"),
    ("desitter(1)", "anti-desitter(1)", -1, "timelike", "spacelike"),
    ("minkowski", "desitter(2)", 1, "timelike", "timelike"),
    ("minkowski", "desitter(2)", -1, "spacelike", "timelike"),
)
UNSTABLE_EXAMPLE = ("desitter(1)", "desitter(1)", 1, "spacelike", "spacelike")


def curve_start(chart, causal: str, length: float):
    """Start point and unit direction of a curve centred on the chart origin.

    de Sitter-type charts: timelike (dS) geodesics are the ``u``-lines through
    ``v = 0`` and spacelike ones run along the waist ``u = 0``; the anti de
    Sitter copy swaps them.  In ``D`` spacelike curves start along ``d/dx``.
    The start is offset by ``length / 2`` so a geodesic is centred on the origin.
    """
    if chart.params.get("model") == "minkowski":
        d = np.array([1.0, 0.0]) if causal == "spacelike" else np.array([0.0, 1.0])
    else:
        along_u = (causal == "timelike") != chart.params.get("negated", False)
        d = np.array([1.0, 0.0]) if along_u else np.array([0.0, 1.0])
    state = surface.unit_state(chart, np.zeros(2), d)
    expected = 1 if causal == "spacelike" else -1
    if state.causal_sign != expected:
        raise ValueError(f"{chart.name}: cannot start a {causal} curve along {d}")
    return -0.5 * length * state.tangent, state.tangent


def curve_configuration(first: str, second: str, eps: int, profiles, causals,
                        length: float = 6.0, resolution: int = 64, step: float = 1e-2) -> ImmersionGrid:
    """``Phi(s, t) = (phi(s), psi(t))`` for two prescribed-curvature curves, ``s, t`` in ``[-L/2, L/2]``."""
    sp = product.ProductSpace(_chart(first), _chart(second), eps)
    traces = []
    for chart, prof, causal in zip((sp.first, sp.second), profiles, causals):
        p0, d0 = curve_start(chart, causal, length)
        traces.append(geodesic_trace(chart, p0, d0, length, step, prof, s0=-length / 2))
    return lag.product_immersion(traces[0], traces[1], sp, resolution)


def geodesic_configuration(first: str, second: str, eps: int, causal1: str, causal2: str,
                           length: float = 6.0, resolution: int = 64) -> ImmersionGrid:
    """Product of two geodesics with the requested causal characters."""
    geo = surface.CurvatureProfile.geodesic()
    return curve_configuration(first, second, eps, (geo, geo), (causal1, causal2), length, resolution)


def cornu_configuration(lam1: float, lam2: float, mu1: float = 0.0, mu2: float = 0.0, eps: int = 1,
                        length: float = 4.0, resolution: int = 64) -> ImmersionGrid:
    """Product of two spacelike Cornu spirals in ``D x D``, arclength centred on 0."""
    profiles = (surface.CurvatureProfile.linear(lam1, mu1), surface.CurvatureProfile.linear(lam2, mu2))
    return curve_configuration("minkowski", "minkowski", eps, profiles, ("spacelike", "spacelike"),
                               length, resolution, step=1e-3)
