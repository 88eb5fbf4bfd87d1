"""Lagrangian immersions ``Phi = (phi, psi)`` into a para-Kaehler product.

An :class:`ImmersionGrid` samples ``Phi`` and its first and second parameter
derivatives on a uniform ``(s, t)`` grid.  All surface quantities are computed
node by node from those samples and the ambient product geometry:

* ``h[i, j, k] = Omega(Phi_i, nabla_j Phi_k)`` with
  ``nabla_j Phi_k = Phi_jk + Gamma(Phi_j, Phi_k)``;
* ``2H = c^k J Phi_k`` with ``c^k = -g^{ij} h_{ijl} g^{lk}``  (``H`` is half
  the trace of the second fundamental form);
* ``2JH = c^k Phi_k``, so ``div(2JH)`` is the divergence of ``c`` on the
  induced metric.

Quantities that need a derivative across nodes (divergence, Maslov form,
normal derivative of ``H``) use fourth-order central differences and are only
reported on interior nodes, two rows in from each edge.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional

import numpy as np
import sympy

from . import paracomplex, product, surface
from .errors import DegenerateInducedMetric, NotImmersion, NullCurve
from .product import ProductSpace, ProductTangent
from .surface import CurveTrace

RANK_TOL = 1e-8
INDUCED_DET_FLOOR = 1e-12
EDGE = 2


def d4(arr, step, axis):
    """Fourth-order central difference along ``axis``; two edge rows are zero-filled."""
    arr = np.moveaxis(np.asarray(arr, dtype=float), axis, 0)
    out = np.zeros_like(arr)
    out[2:-2] = (-arr[4:] + 8 * arr[3:-1] - 8 * arr[1:-3] + arr[:-4]) / (12 * step)
    return np.moveaxis(out, 0, axis)


def _interior(arr):
    return arr[EDGE:-EDGE, EDGE:-EDGE]


@dataclass
class ImmersionGrid:
    """Samples of ``Phi`` on the grid ``s x t``.

    ``dphi[m, n, :, i]`` is ``d Phi / d x_i`` and ``ddphi[m, n, :, i, j]`` the
    second derivatives, both in product chart coordinates.
    """

    space: ProductSpace
    s: np.ndarray
    t: np.ndarray
    phi: np.ndarray
    dphi: np.ndarray
    ddphi: np.ndarray
    kind: str = "custom"
    meta: dict = field(default_factory=dict)

    @property
    def shape(self):
        return self.phi.shape[:2]

    @property
    def ds(self):
        return float(self.s[1] - self.s[0])

    @property
    def dt(self):
        return float(self.t[1] - self.t[0])

    def nodes(self):
        ns, nt = self.shape
        return ((m, n) for m in range(ns) for n in range(nt))

    def interior_nodes(self):
        ns, nt = self.shape
        return ((m, n) for m in range(EDGE, ns - EDGE) for n in range(EDGE, nt - EDGE))

    def check_immersion(self):
        sv = np.linalg.svd(self.dphi, compute_uv=False)[..., -1]
        if np.min(sv) <= RANK_TOL:
            m, n = np.unravel_index(np.argmin(sv), sv.shape)
            raise NotImmersion(f"rank drop at node {(m, n)}: sigma_min = {sv[m, n]:.3e}")
        return self

    @cached_property
    def induced_metric(self):
        G = np.array([[self.space.metric(self.phi[m, n]) for n in range(self.shape[1])]
                      for m in range(self.shape[0])])
        return np.einsum("mnai,mnab,mnbj->mnij", self.dphi, G, self.dphi)

    def induced_at(self, node):
        g = self.induced_metric[node]
        if abs(np.linalg.det(g)) < INDUCED_DET_FLOOR:
            raise DegenerateInducedMetric(f"det of induced metric ~ 0 at node {node}")
        return g

    def induced_signature(self, node) -> int:
        """``eps1``: +1 when the induced metric is definite, -1 when Lorentzian."""
        return 1 if np.linalg.det(self.induced_at(node)) > 0 else -1


# ---------------------------------------------------------------------------
# constructors

def product_immersion(phi: CurveTrace, psi: CurveTrace, space: ProductSpace,
                      resolution: Optional[int] = 64) -> ImmersionGrid:
    """``Phi(s, t) = (phi(s), psi(t))`` from two unit-speed curve traces."""
    for name, tr in (("phi", phi), ("psi", psi)):
        if tr.causal_sign not in (1, -1) or tr.speed_residual() > 1e-6:
            raise NullCurve(f"{name} is not a unit-speed non-null curve")
    if resolution:
        phi = phi.subsample(max(1, (len(phi) - 1) // (resolution - 1)))
        psi = psi.subsample(max(1, (len(psi) - 1) // (resolution - 1)))
    ns, nt = len(phi), len(psi)
    P = np.zeros((ns, nt, 4))
    P[:, :, :2] = phi.points[:, None, :]
    P[:, :, 2:] = psi.points[None, :, :]
    dP = np.zeros((ns, nt, 4, 2))
    dP[:, :, :2, 0] = phi.tangents[:, None, :]
    dP[:, :, 2:, 1] = psi.tangents[None, :, :]
    ddP = np.zeros((ns, nt, 4, 2, 2))
    ddP[:, :, :2, 0, 0] = phi.accels[:, None, :]
    ddP[:, :, 2:, 1, 1] = psi.accels[None, :, :]
    meta = {
        "eps_phi": phi.causal_sign,
        "eps_psi": psi.causal_sign,
        "k_phi": np.asarray(phi.profile(phi.s), dtype=float),
        "k_psi": np.asarray(psi.profile(psi.s), dtype=float),
        "profile_phi": phi.profile,
        "profile_psi": psi.profile,
    }
    return ImmersionGrid(space, phi.s.copy(), psi.s.copy(), P, dP, ddP, "productOfCurves", meta).check_immersion()


def custom_immersion(space: ProductSpace, s, t, phi_fn: Callable, dphi_fn: Callable = None,
                     ddphi_fn: Callable = None, h: float = 1e-4, check: bool = True,
                     meta: dict = None) -> ImmersionGrid:
    """Grid from a closed-form map ``(s, t) -> R^4``; missing derivatives by central differences."""
    s = np.asarray(s, dtype=float)
    t = np.asarray(t, dtype=float)

    def fd1(q):
        out = np.zeros((4, 2))
        for i in range(2):
            e = np.zeros(2)
            e[i] = h
            out[:, i] = (np.asarray(phi_fn(*(q + e))) - np.asarray(phi_fn(*(q - e)))) / (2 * h)
        return out

    def fd2(q):
        out = np.zeros((4, 2, 2))
        f0 = np.asarray(phi_fn(*q))
        for i in range(2):
            for j in range(2):
                ei, ej = np.zeros(2), np.zeros(2)
                ei[i], ej[j] = h, h
                if i == j:
                    out[:, i, i] = (np.asarray(phi_fn(*(q + ei))) - 2 * f0 + np.asarray(phi_fn(*(q - ei)))) / h**2
                else:
                    out[:, i, j] = (np.asarray(phi_fn(*(q + ei + ej))) - np.asarray(phi_fn(*(q + ei - ej)))
                                    - np.asarray(phi_fn(*(q - ei + ej))) + np.asarray(phi_fn(*(q - ei - ej)))) / (4 * h * h)
        return out

    P = np.zeros((s.size, t.size, 4))
    dP = np.zeros((s.size, t.size, 4, 2))
    ddP = np.zeros((s.size, t.size, 4, 2, 2))
    for m, sv in enumerate(s):
        for n, tv in enumerate(t):
            q = np.array([sv, tv])
            P[m, n] = phi_fn(sv, tv)
            dP[m, n] = dphi_fn(sv, tv) if dphi_fn else fd1(q)
            ddP[m, n] = ddphi_fn(sv, tv) if ddphi_fn else fd2(q)
    grid = ImmersionGrid(space, s, t, P, dP, ddP, "custom", dict(meta or {}))
    return grid.check_immersion() if check else grid


class GraphPotential:
    """Closed-form potential ``u(x1, x2)`` with exact derivatives up to third order."""

    def __init__(self, expression: str):
        self.expression = expression
        x1, x2 = sympy.symbols("x1 x2", real=True)
        expr = sympy.sympify(expression, locals={"x1": x1, "x2": x2})
        self._expr = expr
        self._fns = {}
        for order in range(4):
            for k in range(order + 1):
                idx = (1,) * (order - k) + (2,) * k
                d = expr
                for i in idx:
                    d = sympy.diff(d, x1 if i == 1 else x2)
                self._fns[idx] = sympy.lambdify((x1, x2), d, "numpy")

    def __repr__(self):
        return f"GraphPotential({self.expression!r})"

    def d(self, *idx):
        """Partial derivative, e.g. ``d(1, 2)`` is ``u_{x1 x2}``."""
        f = self._fns[tuple(sorted(idx))]

        def call(x1, x2):
            return np.broadcast_to(np.asarray(f(x1, x2), dtype=float), np.broadcast(x1, x2).shape) * 1.0
        return call

    def __call__(self, x1, x2):
        return self.d()(x1, x2)

    def hessian(self, p):
        x1, x2 = p
        return np.array([[float(self.d(1, 1)(x1, x2)), float(self.d(1, 2)(x1, x2))],
                         [float(self.d(1, 2)(x1, x2)), float(self.d(2, 2)(x1, x2))]])


POTENTIALS = {
    "zero": "0",
    "x1x2": "x1*x2",
    "x1^2": "x1**2",
    "x1^3": "x1**3",
    "quadratic": "(x1**2 + x2**2)/2",
    "wave-cubic": "x1**2*x2 + x2**3/3",
    "coshcosh": "cosh(x1)*cosh(x2)",
}


def potential_from_name(name: str) -> GraphPotential:
    return GraphPotential(POTENTIALS.get(name, name))


def graph_immersion(pot: GraphPotential, space: ProductSpace, x1, x2) -> ImmersionGrid:
    """``Phi(x1, x2) = (x1 + tau u_1, x2 - tau u_2)`` in ``D x D`` with ``eps = -1``."""
    if space.epsilon != -1 or space.first.params.get("model") != "minkowski" \
            or space.second.params.get("model") != "minkowski":
        raise ValueError("graph immersions live in D x D with eps = -1")
    X1, X2 = np.meshgrid(np.asarray(x1, float), np.asarray(x2, float), indexing="ij")
    u = lambda *i: pot.d(*i)(X1, X2)  # noqa: E731
    zero = np.zeros_like(X1)
    P = np.stack([X1, u(1), X2, -u(2)], axis=-1)
    dP = np.zeros(X1.shape + (4, 2))
    dP[..., :, 0] = np.stack([zero + 1, u(1, 1), zero, -u(1, 2)], axis=-1)
    dP[..., :, 1] = np.stack([zero, u(1, 2), zero + 1, -u(2, 2)], axis=-1)
    ddP = np.zeros(X1.shape + (4, 2, 2))
    for i in (1, 2):
        for j in (1, 2):
            ddP[..., :, i - 1, j - 1] = np.stack([zero, u(1, i, j), zero, -u(2, i, j)], axis=-1)
    grid = ImmersionGrid(space, np.asarray(x1, float), np.asarray(x2, float), P, dP, ddP, "graph",
                         {"potential": pot})
    return grid.check_immersion()


# ---------------------------------------------------------------------------
# node quantities

def lagrangian_residual(grid: ImmersionGrid) -> float:
    worst = 0.0
    for node in grid.nodes():
        x = grid.phi[node]
        Ps, Pt = grid.dphi[node][:, 0], grid.dphi[node][:, 1]
        val = (grid.space.J(x) @ Ps) @ grid.space.metric(x) @ Pt
        worst = max(worst, abs(val))
    return float(worst)


def projected_rank(grid: ImmersionGrid, node, tol=RANK_TOL):
    d = grid.dphi[node]
    r1 = int(np.sum(np.linalg.svd(d[:2], compute_uv=False) > tol))
    r2 = int(np.sum(np.linalg.svd(d[2:], compute_uv=False) > tol))
    return r1, r2


def covariant_second(grid: ImmersionGrid, node):
    """``nabla_i Phi_j`` as a (4, 2, 2) array."""
    x = grid.phi[node]
    gam = grid.space.christoffel(x)
    d = grid.dphi[node]
    return grid.ddphi[node] + np.einsum("abc,bi,cj->aij", gam, d, d)


def second_fundamental_tensor(grid: ImmersionGrid, node):
    """Tri-symmetric ``h[i, j, k] = Omega(Phi_i, nabla_j Phi_k)``."""
    x = grid.phi[node]
    G = grid.space.metric(x)
    J = grid.space.J(x)
    d = grid.dphi[node]
    nab = covariant_second(grid, node)
    return np.einsum("ai,ab,bjk->ijk", J @ d, G, nab)


def symmetry_residual(h) -> float:
    return float(max(np.max(np.abs(h - np.transpose(h, p))) for p in [(1, 0, 2), (2, 1, 0), (0, 2, 1)]))


def mean_curvature_coefficients(grid: ImmersionGrid, node):
    """``c`` with ``2H = c^k J Phi_k`` (equivalently ``2JH = c^k Phi_k``)."""
    ginv = np.linalg.inv(grid.induced_at(node))
    h = second_fundamental_tensor(grid, node)
    return -np.einsum("ij,ijl,lk->k", ginv, h, ginv)


def mean_curvature(grid: ImmersionGrid, node) -> ProductTangent:
    x = grid.phi[node]
    c = mean_curvature_coefficients(grid, node)
    H = 0.5 * grid.space.J(x) @ grid.dphi[node] @ c
    return ProductTangent.from_vector(x, H)


def mean_curvature_field(grid: ImmersionGrid):
    ns, nt = grid.shape
    c = np.zeros((ns, nt, 2))
    H = np.zeros((ns, nt, 4))
    for node in grid.nodes():
        c[node] = mean_curvature_coefficients(grid, node)
        H[node] = 0.5 * grid.space.J(grid.phi[node]) @ grid.dphi[node] @ c[node]
    return c, H


def mean_curvature_sup(grid: ImmersionGrid) -> float:
    _, H = mean_curvature_field(grid)
    return float(np.max(np.linalg.norm(H, axis=-1)))


def mean_curvature_closed_form(grid: ImmersionGrid):
    """Coefficients of ``2H = eps_phi k_phi J Phi_s + eps eps_psi k_psi J Phi_t`` on product grids."""
    if grid.kind != "productOfCurves":
        raise ValueError("closed form applies to products of curves only")
    eps = grid.space.epsilon
    ks = grid.meta["eps_phi"] * grid.meta["k_phi"]
    kt = eps * grid.meta["eps_psi"] * grid.meta["k_psi"]
    return np.stack(np.broadcast_arrays(ks[:, None], kt[None, :]), axis=-1)


def divergence(grid: ImmersionGrid, V):
    """Divergence on the induced metric of the tangent field ``V^i Phi_i``."""
    g = grid.induced_metric
    vol = np.sqrt(np.abs(np.linalg.det(g)))
    return (d4(vol * V[..., 0], grid.ds, 0) + d4(vol * V[..., 1], grid.dt, 1)) / vol


def h_minimality_residual(grid: ImmersionGrid, return_field=False):
    """Sup over interior nodes of ``|div(2JH)|``."""
    c, _ = mean_curvature_field(grid)
    div = divergence(grid, c)
    res = float(np.max(np.abs(_interior(div))))
    return (res, div) if return_field else res


@dataclass
class JacobianReport:
    C: float
    C_second: float
    eps1: int
    normalized: bool
    first_normalization: float
    second_normalization: float
    identity_lhs: float
    identity_rhs: float

    @property
    def mismatch(self) -> float:
        return abs(self.C - self.C_second)

    @property
    def identity_residual(self) -> float:
        return abs(self.identity_lhs - self.identity_rhs)


def induced_frame(grid: ImmersionGrid, node):
    """Gram-Schmidt frame of the induced metric, spacelike vector first.

    Returns parameter-space vectors ``e1``, ``e2`` and their squared lengths.
    """
    g = grid.induced_at(node)
    basis = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    if g[0, 0] <= 0 < g[1, 1] or abs(g[0, 0]) < 1e-12:
        basis.reverse()
    a, b = basis
    na = float(a @ g @ a)
    if abs(na) < 1e-12:
        raise DegenerateInducedMetric(f"both coordinate directions null at node {node}")
    e1 = a / math.sqrt(abs(na))
    s1 = float(np.sign(na))
    w = b - (float(b @ g @ e1) / s1) * e1
    nw = float(w @ g @ w)
    if abs(nw) < 1e-12:
        raise DegenerateInducedMetric(f"degenerate Gram-Schmidt at node {node}")
    e2 = w / math.sqrt(abs(nw))
    return e1, e2, int(s1), int(np.sign(nw))


def associated_jacobian(grid: ImmersionGrid, node) -> JacobianReport:
    """Associated Jacobian ``C = lambda2 mu1 - lambda1 mu2`` and its checks.

    ``C_second`` is the same quantity from the second factor,
    ``eps * (lb1 mb2 - lb2 mb1)``; the two agree exactly when ``Phi`` is
    Lagrangian.
    """
    sp = grid.space
    e1, e2, s1, s2 = induced_frame(grid, node)
    eps1 = s1 * s2
    x = grid.phi[node]
    d = grid.dphi[node]
    p1, p2 = x[:2], x[2:]
    f1 = np.column_stack(surface.orthonormal_frame(sp.first, p1))
    f2 = np.column_stack(surface.orthonormal_frame(sp.second, p2))
    dphi_e1, dphi_e2 = d[:2] @ e1, d[:2] @ e2
    dpsi_e1, dpsi_e2 = d[2:] @ e1, d[2:] @ e2
    l1, l2 = np.linalg.solve(f1, dphi_e1)
    m1, m2 = np.linalg.solve(f1, dphi_e2)
    lb1, lb2 = np.linalg.solve(f2, dpsi_e1)
    mb1, mb2 = np.linalg.solve(f2, dpsi_e2)
    C = l2 * m1 - l1 * m2
    C2 = sp.epsilon * (lb1 * mb2 - lb2 * mb1)
    g1 = sp.first.g(p1)
    a = float(dphi_e1 @ g1 @ dphi_e1)
    b = float(dphi_e2 @ g1 @ dphi_e2)
    c = float(dphi_e1 @ g1 @ dphi_e2)
    lhs = (a - eps1 * b) ** 2 + 4 * eps1 * c * c
    return JacobianReport(
        C=float(C),
        C_second=float(C2),
        eps1=eps1,
        normalized=(s1 == 1 and s2 == eps1),
        first_normalization=float(l1**2 - l2**2 + eps1 * (m1**2 - m2**2)),
        second_normalization=float(lb1**2 - lb2**2 + eps1 * (mb1**2 - mb2**2)),
        identity_lhs=float(lhs),
        identity_rhs=float(1 + 4 * eps1 * C * C),
    )


@dataclass
class MaslovReport:
    a: np.ndarray          # (ns, nt, 2) components a(Phi_s), a(Phi_t)
    da: np.ndarray         # d a (Phi_s, Phi_t)
    pulled_ricci: np.ndarray  # rho(Phi_s, Phi_t)
    residual: float        # sup |da - rho/2| on interior nodes
    stated_residual: float = float("nan")  # sup |da + rho|, the unnormalised form


def maslov_form(grid: ImmersionGrid, ricci_cache: dict = None) -> MaslovReport:
    """Maslov form ``a_H = G(JH, .)`` and its exterior derivative.

    With ``H = trace(h)/2`` and ``rho = Ric(J., .)`` the identity that holds is
    ``da_H = Phi^* rho / 2`` (equivalently ``d a_{2H} = Phi^* rho``).  The
    residual of the sign-flipped form ``da_H + Phi^* rho`` is kept alongside.
    """
    sp = grid.space
    _, H = mean_curvature_field(grid)
    ns, nt = grid.shape
    a = np.zeros((ns, nt, 2))
    rho = np.zeros((ns, nt))
    cache = {} if ricci_cache is None else ricci_cache
    for node in grid.nodes():
        x = grid.phi[node]
        G, J = sp.metric(x), sp.J(x)
        a[node] = (J @ H[node]) @ G @ grid.dphi[node]
        m, n = node
        if EDGE <= m < ns - EDGE and EDGE <= n < nt - EDGE:
            key = tuple(np.round(x, 13))
            if key not in cache:
                cache[key] = product.ricci_tensor(sp, x)
            Ps, Pt = grid.dphi[node][:, 0], grid.dphi[node][:, 1]
            rho[node] = product.ricci_form(sp, x, Ps, Pt, ricci=cache[key])
    da = d4(a[..., 1], grid.ds, 0) - d4(a[..., 0], grid.dt, 1)
    res = float(np.max(np.abs(_interior(da - 0.5 * rho))))
    stated = float(np.max(np.abs(_interior(da + rho))))
    return MaslovReport(a, da, rho, res, stated)


def normal_derivative_of_mean_curvature(grid: ImmersionGrid) -> float:
    """Sup over interior nodes of the Euclidean size of ``nabla^perp H``."""
    sp = grid.space
    _, H = mean_curvature_field(grid)
    dH = [d4(H, grid.ds, 0), d4(H, grid.dt, 1)]
    worst = 0.0
    for node in grid.interior_nodes():
        x = grid.phi[node]
        G, J = sp.metric(x), sp.J(x)
        gam = sp.christoffel(x)
        d = grid.dphi[node]
        N = J @ d  # normal frame J Phi_k
        gram = N.T @ G @ N
        for i in range(2):
            cov = dH[i][node] + np.einsum("abc,b,c->a", gam, d[:, i], H[node])
            coeff = np.linalg.solve(gram, N.T @ G @ cov)
            worst = max(worst, float(np.linalg.norm(N @ coeff)))
    return worst


def lagrangian_angle(pot: GraphPotential, p) -> float:
    """``arg(1 - u11 u22 + u12^2 + tau (u11 - u22))``."""
    (u11, u12), (_, u22) = pot.hessian(p)
    z = paracomplex.ParaComplex(1 - u11 * u22 + u12 * u12, u11 - u22)
    return paracomplex.arg(z)


def grid_csv_rows(grid: ImmersionGrid, include_jacobian=True):
    """Rows ``s, t, Phi, |H|, C, beta`` (blank where undefined)."""
    _, H = mean_curvature_field(grid)
    pot = grid.meta.get("potential")
    yield ("s", "t", "Phi1", "Phi2", "Phi3", "Phi4", "absH", "C", "beta")
    for (m, n) in grid.nodes():
        C = ""
        if include_jacobian:
            try:
                C = repr(associated_jacobian(grid, (m, n)).C)
            except (DegenerateInducedMetric, np.linalg.LinAlgError):
                C = ""
        beta = ""
        if pot is not None:
            try:
                beta = repr(lagrangian_angle(pot, (grid.s[m], grid.t[n])))
            except paracomplex.ArgumentBranchError:
                beta = ""
        yield (repr(float(grid.s[m])), repr(float(grid.t[n])),
               *(repr(float(c)) for c in grid.phi[m, n]),
               repr(float(np.linalg.norm(H[m, n]))), C, beta)
