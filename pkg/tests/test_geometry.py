from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from killinglab.geometry import (
    ChartPoint,
    DegenerateMetricError,
    DegeneratePlaneError,
    DomainError,
    EuclideanAtlas,
    MetricField,
    SphereAtlas,
    conformal_sectional_curvature,
    christoffel,
    covariant_killing_form,
    euclidean_metric,
    lie_derivative_metric,
    linear_field,
    round_sphere,
    scalar_jet,
    sectional_curvature,
    sphere_linear_field,
    two_class_conformal_sphere,
    two_class_log_ratio,
)
from killinglab.sphere_flows import ConformalSphereMetric, rotation_generator

ROT2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def _points(seed, count, dim):
    X = np.random.default_rng(seed).normal(size=(count, dim))
    return X / np.linalg.norm(X, axis=1, keepdims=True)


def catalog_metrics():
    return [
        round_sphere(2),
        round_sphere(3),
        round_sphere(2, 0.5),
        ConformalSphereMetric.for_q(2, 5).metric,
        ConformalSphereMetric.for_q(3, 3).metric,
    ]


# charts


def test_sphere_atlas_round_trip(rng):
    atlas = SphereAtlas(3)
    for x in _points(1, 50, 4):
        for chart in (0, 1):
            if atlas.best_chart(x) != chart and abs(x[-1]) > 0.9:
                continue
            p = atlas.from_ambient(x, chart)
            assert_allclose(atlas.to_ambient(p), x, atol=1e-13)


def test_transition_is_inversion():
    atlas = SphereAtlas(2)
    p = ChartPoint(0, [1.5, -0.5])
    q = atlas.transition(p, 1)
    assert_allclose(q.coords, p.coords / (p.coords @ p.coords))
    assert_allclose(atlas.to_ambient(p), atlas.to_ambient(q), atol=1e-14)


def test_transition_jacobian_matches_differences():
    atlas = SphereAtlas(3)
    p = ChartPoint(0, [0.7, -0.2, 1.1])
    J, _ = atlas.transition_jacobian(p, 1)
    h = 1e-6
    num = np.column_stack([
        (atlas.transition(ChartPoint(0, p.coords + h * e), 1).coords - atlas.transition(ChartPoint(0, p.coords - h * e), 1).coords) / (2 * h)
        for e in np.eye(3)
    ])
    assert_allclose(J, num, atol=1e-8)


def test_domain_predicates():
    atlas = SphereAtlas(2)
    assert atlas.in_domain(ChartPoint(0, [2.9, 0.0]))
    assert not atlas.in_domain(ChartPoint(0, [3.1, 0.0]))
    m = round_sphere(2)
    with pytest.raises(DomainError):
        m(ChartPoint(0, [5.0, 0.0]))
    assert EuclideanAtlas(2, bound=1.0).in_domain(ChartPoint(0, [0.5, 0.5]))


# metrics


@pytest.mark.parametrize("idx", range(5))
def test_catalog_metrics_symmetric_positive(idx):
    m = catalog_metrics()[idx]
    ambient = m.dim + 1
    for x in _points(idx, 100, ambient):
        g = m(m.atlas.from_ambient(x))
        assert np.abs(g - g.T).max() <= 1e-14
        assert np.linalg.eigvalsh(g)[0] > 0


def test_degenerate_metric_raises():
    m = MetricField(2, lambda p: np.diag([1.0, 0.0]))
    with pytest.raises(DegenerateMetricError):
        m.inverse(ChartPoint(0, [0.0, 0.0]))


def test_christoffel_flat_and_round_origin():
    assert np.abs(christoffel(euclidean_metric(3), [0.3, 1.0, -2.0])).max() == 0.0
    assert np.abs(christoffel(round_sphere(2), [0.0, 0.0])).max() < 1e-15


@pytest.mark.parametrize("idx", range(5))
def test_christoffel_analytic_matches_differences(idx):
    m = catalog_metrics()[idx]
    fd = m.fd_copy()
    for x in _points(10 + idx, 20, m.dim + 1):
        p = m.atlas.from_ambient(x)
        G = christoffel(m, p)
        assert_allclose(G, np.swapaxes(G, 1, 2), atol=1e-15)
        assert_allclose(G, christoffel(fd, p), atol=1e-6)


def test_sectional_curvature_known_values(rng):
    flat = euclidean_metric(3)
    assert sectional_curvature(flat, [1.0, 2.0, 3.0], [1, 0, 0], [0, 1, 1]) == 0.0
    for m, K in ((round_sphere(3), 1.0), (round_sphere(2, 0.5), 4.0)):
        for x in _points(3, 20, m.dim + 1):
            p = m.atlas.from_ambient(x)
            v, w = rng.normal(size=(2, m.dim))
            assert sectional_curvature(m, p, v, w) == pytest.approx(K, abs=1e-6)


def test_sectional_curvature_degenerate_plane():
    with pytest.raises(DegeneratePlaneError):
        sectional_curvature(round_sphere(2), [0.1, 0.2], [1.0, 1.0], [2.0, 2.0 + 1e-13])


def test_sectional_curvature_basis_invariance(rng):
    m = ConformalSphereMetric.for_q(2, 5).metric
    p = m.atlas.from_ambient(rng.normal(size=4))
    v, w = rng.normal(size=(2, 3))
    K = sectional_curvature(m, p, v, w)
    assert sectional_curvature(m, p, w, v) == pytest.approx(K, abs=1e-12)
    for _ in range(20):
        a, b, c, d = rng.normal(size=4)
        if abs(a * d - b * c) < 0.1:
            continue
        assert sectional_curvature(m, p, a * v + b * w, c * v + d * w) == pytest.approx(K, abs=1e-9)


def test_conformal_curvature_trivial_cases(rng):
    base = round_sphere(3)
    p = base.atlas.from_ambient(rng.normal(size=4))
    g = base(p)
    v = np.array([1.0, 0.0, 0.0]) / math.sqrt(g[0, 0])
    w = np.array([0.0, 1.0, 0.0]) / math.sqrt(g[1, 1])
    zero = np.zeros(3)
    assert conformal_sectional_curvature(1.0, 1.0, zero, np.zeros((3, 3)), v, w, g) == pytest.approx(1.0)
    assert conformal_sectional_curvature(1.0, 4.0, zero, np.zeros((3, 3)), v, w, g) == pytest.approx(0.25)
    with pytest.raises(ValueError):
        conformal_sectional_curvature(1.0, -1.0, zero, np.zeros((3, 3)), v, w, g)


def test_conformal_curvature_at_singular_circle():
    # x = (1, 0, 0, 0) sits on phi = 0, where f^q has a critical point
    m = ConformalSphereMetric.for_q(2, 5)
    base = m.base
    p = base.atlas.from_ambient(np.array([1.0, 0.0, 0.0, 0.0]))
    g = base(p)
    E = np.eye(3) / np.sqrt(np.diag(g))[:, None]
    psi, d, H = scalar_jet(base, m.log_factor, p)
    for i, j in ((0, 1), (0, 2), (1, 2)):
        via = conformal_sectional_curvature(1.0, math.exp(psi), d, H, E[i], E[j], g)
        assert via == pytest.approx(sectional_curvature(m.metric, p, E[i], E[j]), abs=1e-5)


def test_log_ratio_is_conformal_factor(rng):
    m = ConformalSphereMetric.for_q(2, 4)
    psi = two_class_log_ratio(2, 4.0, 5.0, 4.0)
    for x in _points(5, 10, 4):
        p = m.atlas.from_ambient(x)
        assert_allclose(m.metric(p), math.exp(psi(p)) * m.base(p), rtol=1e-13)


# Killing equation


def test_rotation_is_killing_on_plane():
    X = linear_field(ROT2)
    assert np.abs(lie_derivative_metric(euclidean_metric(2), X, [0.3, -1.2])).max() == 0.0


def test_radial_field_is_not_killing():
    X = linear_field(np.eye(2))
    L = lie_derivative_metric(euclidean_metric(2), X, [0.3, -1.2])
    assert_allclose(L, 2 * np.eye(2))


def test_round_sphere_generators_are_killing():
    m = round_sphere(3)
    rng = np.random.default_rng(2)
    for _ in range(100):
        W = rng.normal(size=(4, 4))
        X = sphere_linear_field(m.atlas, W - W.T)
        p = m.atlas.from_ambient(rng.normal(size=4))
        assert np.abs(lie_derivative_metric(m, X, p)).max() < 1e-10


def test_lie_derivative_equals_covariant_form(rng):
    m = ConformalSphereMetric.for_q(2, 3).metric
    X = sphere_linear_field(m.atlas, rotation_generator((1, 2)))
    for x in _points(8, 10, 4):
        p = m.atlas.from_ambient(x)
        assert_allclose(lie_derivative_metric(m, X, p), covariant_killing_form(m, X, p), atol=1e-12)


def test_field_jacobian_analytic_matches_differences(rng):
    m = round_sphere(3)
    X = sphere_linear_field(m.atlas, rotation_generator((2, 3)))
    for x in _points(4, 10, 4):
        p = m.atlas.from_ambient(x)
        assert_allclose(X.jacobian(p), X.jacobian(p, analytic=False), atol=1e-8)


@given(st.floats(-2.5, 2.5), st.floats(-2.5, 2.5), st.floats(-2.5, 2.5))
def test_unit_field_killing_property(a, b, c):
    m = ConformalSphereMetric.for_q(2, 5)
    p = ChartPoint(0, [a, b, c])
    if not m.atlas.in_domain(p):
        return
    assert np.abs(lie_derivative_metric(m.metric, m.unit_field, p)).max() < 1e-8
    V = m.unit_field(p)
    assert m.metric.inner(p, V, V) == pytest.approx(1.0, abs=1e-10)


def test_two_class_metric_rejects_small_n():
    with pytest.raises(ValueError):
        two_class_conformal_sphere(1, 1.0, 1.0, 1.0)
