import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from parakahler import lagrangian as lag
from parakahler import models, surface, variation
from parakahler.errors import NotImmersion, TimelikeArgument
from parakahler.product import ProductSpace
from parakahler.surface import CurvatureProfile


@pytest.fixture(scope="module")
def dd_minus():
    m = models.minkowski_chart()
    return ProductSpace(m, m, -1)


@pytest.fixture(scope="module")
def geo_dsds():
    return variation.geodesic_configuration("desitter(1)", "desitter(1)", 1, "timelike", "spacelike",
                                            length=3.0, resolution=24)


def graph(dd_minus, name, n=24, extent=0.1):
    xs = np.linspace(-extent, extent, n)
    return lag.graph_immersion(lag.potential_from_name(name), dd_minus, xs, xs)


def shear_grid(n=24, a=0.5):
    """Rank-two Lagrangian ``((u, v), (u, v + a sin u))`` in ``dS^2 x dS^2`` with ``G^-``."""
    ds = models.desitter(1.0).chart
    sp = ProductSpace(ds, ds, -1)
    s = t = np.linspace(-0.6, 0.6, n)

    def phi(u, v):
        return np.array([u, v, u, v + a * math.sin(u)])

    def dphi(u, v):
        return np.array([[1.0, 0.0], [0.0, 1.0], [1.0, 0.0], [a * math.cos(u), 1.0]])

    def ddphi(u, v):
        out = np.zeros((4, 2, 2))
        out[3, 0, 0] = -a * math.sin(u)
        return out

    return lag.custom_immersion(sp, s, t, phi, dphi, ddphi)


def test_geodesic_product_basics(geo_dsds):
    g = geo_dsds
    assert lag.lagrangian_residual(g) < 1e-9
    np.testing.assert_allclose(g.induced_metric, np.broadcast_to(np.diag([-1.0, 1.0]), g.induced_metric.shape),
                               atol=1e-6)
    assert lag.projected_rank(g, (5, 7)) == (1, 1)
    assert np.max(np.abs(lag.second_fundamental_tensor(g, (5, 7)))) < 1e-8
    assert lag.mean_curvature_sup(g) < 1e-6
    assert lag.h_minimality_residual(g) < 1e-10


def test_spacelike_pair_with_minus_eps_is_lorentzian():
    g = variation.geodesic_configuration("minkowski", "minkowski", -1, "spacelike", "spacelike",
                                         length=2.0, resolution=12)
    assert g.induced_signature((3, 3)) == -1


def test_cornu_products():
    g = variation.cornu_configuration(1.0, -1.0, resolution=32)
    dG = np.gradient(g.induced_metric, g.ds, axis=0)
    assert np.max(np.abs(dG)) < 1e-6  # flat, in fact constant
    assert lag.h_minimality_residual(g) < 1e-5
    assert lag.h_minimality_residual(variation.cornu_configuration(1.0, 1.0, resolution=32)) == pytest.approx(2.0, abs=1e-6)


def test_mean_curvature_matches_closed_form():
    g = variation.cornu_configuration(0.7, 0.3, mu1=0.2, resolution=24)
    c, _ = lag.mean_curvature_field(g)
    np.testing.assert_allclose(c, lag.mean_curvature_closed_form(g), atol=1e-5)


def test_constant_curvature_times_geodesic():
    prof = (CurvatureProfile.constant(0.8), CurvatureProfile.geodesic())
    g = variation.curve_configuration("desitter(1)", "desitter(1)", 1, prof, ("spacelike", "timelike"),
                                      length=2.0, resolution=16)
    c, _ = lag.mean_curvature_field(g)
    np.testing.assert_allclose(c[..., 0], 0.8, atol=1e-5)  # eps_phi k_phi
    np.testing.assert_allclose(c[..., 1], 0.0, atol=1e-8)


def test_cornu_sss_component():
    m = models.minkowski_chart()
    sp = ProductSpace(m, m, 1)
    init = surface.unit_state(m, (0, 0), (1, 0))
    phi = surface.integrate_curve(m, init, CurvatureProfile.linear(1.0, 0.0), 3.0, 1e-3)
    psi = surface.integrate_curve(m, init, CurvatureProfile.geodesic(), 1.0, 1e-3)
    g = lag.product_immersion(phi, psi, sp, resolution=None)
    m_idx = int(np.argmin(np.abs(g.s - 2.0)))
    h = lag.second_fundamental_tensor(g, (m_idx, 10))
    assert h[0, 0, 0] == pytest.approx(-2.0, abs=1e-4)
    h[0, 0, 0] = 0.0
    assert np.max(np.abs(h)) < 1e-8


def test_graphs(dd_minus):
    g = graph(dd_minus, "x1x2")
    assert lag.lagrangian_residual(g) < 1e-8
    assert lag.projected_rank(g, (4, 4)) == (2, 2)
    assert lag.mean_curvature_sup(g) < 1e-6
    z = graph(dd_minus, "zero", n=10)
    assert lag.mean_curvature_sup(z) == 0.0
    cubic = graph(dd_minus, "x1^3")
    assert lag.lagrangian_residual(cubic) < 1e-8
    assert lag.mean_curvature_sup(cubic) > 1e-2
    for name in ("x1^3", "wave-cubic", "coshcosh"):
        gr = graph(dd_minus, name, n=12)
        assert max(lag.symmetry_residual(lag.second_fundamental_tensor(gr, n)) for n in gr.nodes()) < 1e-6


def test_graph_rank_drop_raises(dd_minus):
    # the graph map itself is always an immersion; a collapsed custom map is not
    with pytest.raises(NotImmersion):
        lag.custom_immersion(dd_minus, np.linspace(0, 1, 5), np.linspace(0, 1, 5),
                             lambda s, t: np.array([s + t, 0.0, s + t, 0.0]))


def test_non_lagrangian_probe(dd_minus):
    g = lag.custom_immersion(dd_minus, np.linspace(0, 1, 8), np.linspace(0, 1, 8),
                             lambda s, t: np.array([s, 0.3 * t, s + t, t]))
    assert lag.lagrangian_residual(g) > 1e-3


def test_rank_zero_probe_is_not_lagrangian(dd_minus):
    # constant first factor: psi must be rank two and then Omega pulls back to eps*omega2 != 0
    g = lag.custom_immersion(dd_minus, np.linspace(0, 1, 6), np.linspace(0, 1, 6),
                             lambda s, t: np.array([0.2, 0.1, s, t]))
    assert lag.projected_rank(g, (2, 2))[0] == 0
    assert lag.lagrangian_residual(g) > 1e-3


def test_associated_jacobian(geo_dsds, dd_minus):
    assert max(abs(lag.associated_jacobian(geo_dsds, n).C) for n in geo_dsds.nodes()) < 1e-8
    g = graph(dd_minus, "wave-cubic")
    for node in g.interior_nodes():
        rep = lag.associated_jacobian(g, node)
        assert rep.mismatch < 1e-6
        if abs(rep.first_normalization - 1) < 1e-9:
            assert rep.identity_residual < 1e-5
    assert abs(lag.associated_jacobian(g, (12, 12)).C) > 1e-3


def test_frame_identity_on_normalised_nodes(geo_dsds):
    checked = 0
    for node in geo_dsds.interior_nodes():
        rep = lag.associated_jacobian(geo_dsds, node)
        if abs(rep.first_normalization - 1) < 1e-9:
            checked += 1
            assert rep.identity_residual < 1e-5
    assert checked > 0


def test_maslov_trivial_instances(geo_dsds, dd_minus):
    rep = lag.maslov_form(geo_dsds)
    assert np.max(np.abs(rep.a)) < 1e-10 and rep.residual < 1e-5
    cornu = variation.cornu_configuration(1.0, -1.0, resolution=16)
    rep = lag.maslov_form(cornu)
    assert np.max(np.abs(rep.pulled_ricci)) == 0.0 and rep.residual < 1e-5
    rep = lag.maslov_form(graph(dd_minus, "x1x2", n=12))
    assert rep.residual < 1e-5 and rep.stated_residual < 1e-5


def test_maslov_identity_on_rank_two_shear():
    g = shear_grid()
    assert lag.lagrangian_residual(g) < 1e-12
    rep = lag.maslov_form(g)
    rho = lag._interior(rep.pulled_ricci)
    assert np.min(np.abs(rho)) > 1e-2
    assert rep.residual < 1e-5
    # the unnormalised, sign-flipped form does not hold here
    assert rep.stated_residual > 1e-2


def test_normal_derivative_of_mean_curvature(geo_dsds, dd_minus):
    assert lag.normal_derivative_of_mean_curvature(geo_dsds) < 1e-8
    assert lag.normal_derivative_of_mean_curvature(graph(dd_minus, "x1^3", n=12)) > 1e-3


def test_lagrangian_angle():
    assert lag.lagrangian_angle(lag.potential_from_name("x1x2"), (0.05, -0.02)) == 0.0
    cubic = lag.potential_from_name("x1^3")
    betas = [lag.lagrangian_angle(cubic, (x, 0.0)) for x in (-0.1, 0.0, 0.1)]
    assert max(betas) - min(betas) > 1e-2
    with pytest.raises(TimelikeArgument):
        lag.lagrangian_angle(lag.potential_from_name("x1^2"), (0.0, 0.0))


@settings(max_examples=25, deadline=None)
@given(st.floats(-1, 1), st.floats(-1, 1))
def test_potential_mixed_partials(x1, x2):
    pot = lag.potential_from_name("coshcosh")
    assert abs(pot.d(1, 2)(x1, x2) - pot.d(2, 1)(x1, x2)) < 1e-8
    assert abs(pot.d(1, 1, 2)(x1, x2) - pot.d(2, 1, 1)(x1, x2)) < 1e-8


def test_grid_csv(dd_minus):
    rows = list(lag.grid_csv_rows(graph(dd_minus, "x1x2", n=8)))
    assert rows[0][0] == "s" and len(rows) == 65
