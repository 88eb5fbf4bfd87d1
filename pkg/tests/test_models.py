import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from parakahler import models, surface
from parakahler.errors import ConfigError, NotOnSurface, NotTangent, SignatureMismatch
from parakahler.models import AmbientVector3, ambient_inner, lorentz_cross

vec3 = st.lists(st.floats(-5, 5), min_size=3, max_size=3).map(np.array)


def test_cross_basis_example():
    w = lorentz_cross((1, 0, 0), (0, 1, 0))
    np.testing.assert_allclose(w.array, (0, 0, 1))
    w = lorentz_cross((0, 1, 0), (0, 0, 1))
    np.testing.assert_allclose(w.array, (-1, 0, 0))


@given(vec3)
def test_cross_self_is_zero(u):
    np.testing.assert_allclose(lorentz_cross(u, u).array, 0.0, atol=0)


def test_cross_identity_random(rng):
    worst = 0.0
    for u, v, w in rng.normal(size=(1000, 3, 3)):
        lhs = ambient_inner(lorentz_cross(u, v).array, lorentz_cross(u, w).array)
        rhs = -ambient_inner(u, u) * ambient_inner(v, w) + ambient_inner(u, v) * ambient_inner(u, w)
        worst = max(worst, abs(lhs - rhs))
    assert worst < 1e-10


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        AmbientVector3((1, 0, 0), 1).inner(AmbientVector3((1, 0, 0), 2))


def _random_tangent(ds1, rng):
    p = rng.uniform(-1.5, 1.5, 2)
    return p, ds1.embed(p), ds1.push(p, rng.normal(size=2))


def test_desitter_j_is_involution(ds1, rng):
    for _ in range(200):
        p, x, v = _random_tangent(ds1, rng)
        jv = models.desitter_j(ds1, x, v)
        np.testing.assert_allclose(models.desitter_j(ds1, x, jv).array, v.array, atol=1e-10)
        assert jv.inner(jv) == pytest.approx(-v.inner(v), abs=1e-10)


def test_desitter_j_matches_chart_j(ds1, rng):
    for _ in range(20):
        p, x, v = _random_tangent(ds1, rng)
        X = ds1.pull(p, v)
        chart_jv = ds1.push(p, surface.j_matrix(ds1.chart, p) @ X)
        np.testing.assert_allclose(models.desitter_j(ds1, x, v).array, chart_jv.array, atol=1e-10)


def test_desitter_j_errors(ds1):
    with pytest.raises(NotOnSurface):
        models.desitter_j(ds1, (0, 2, 0), (0, 0, 1))
    with pytest.raises(NotTangent):
        models.desitter_j(ds1, (0, 1, 0), (0, 1, 0))


def test_inclusion_second_fundamental_form(ds1, rng):
    x = ds1.embed((0.0, 0.0))
    u, v = AmbientVector3((0, 0, 1)), AmbientVector3((1, 0, 0))
    np.testing.assert_allclose(models.inclusion_second_fundamental_form(ds1, x, u, v).array, 0.0)
    np.testing.assert_allclose(models.inclusion_second_fundamental_form(ds1, x, u, u).array, -x.array)


def test_inclusion_sff_finite_difference(ds1, rng):
    # normal part of the ambient derivative of X along Y, for coordinate fields
    p = rng.uniform(-1, 1, 2)
    x = ds1.embed(p)
    H = ds1.hessian(p)
    for i in range(2):
        for j in range(2):
            u, v = AmbientVector3(ds1.jacobian(p)[:, i]), AmbientVector3(ds1.jacobian(p)[:, j])
            normal = ambient_inner(H[:, i, j], x.array) * x.array  # <x,x> = 1
            got = models.inclusion_second_fundamental_form(ds1, x, u, v).array
            np.testing.assert_allclose(got, normal, atol=1e-5)


def test_anti_desitter(ds1):
    ads = models.anti_desitter(ds1)
    p = (0.4, 0.2)
    assert surface.gauss_curvature(ads, p) == pytest.approx(-1.0, abs=1e-6)
    np.testing.assert_allclose(models.negate_chart(ads, "back").g(p), ds1.chart.g(p))
    # causal characters swap under the identity map
    T = np.array([1.0, 0.0])
    assert ds1.chart.inner(p, T, T) < 0 < ads.inner(p, T, T)


def test_catalogue():
    assert models.chart_from_name("minkowski").name == "minkowski"
    assert models.chart_from_name("desitter(2)").params["a"] == 2.0
    assert models.chart_from_name("anti-desitter(1)").params["negated"]
    with pytest.raises(ConfigError):
        models.chart_from_name("sphere(1)")
    with pytest.raises(ConfigError):
        models.chart_from_name("desitter(abc)")
