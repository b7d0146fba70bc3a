from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from killinglab.exact import Irrational, PiMonomial
from killinglab.geometry import integrate_curve
from killinglab.sphere_flows import (
    BlockRotationFlow,
    ConformalSphereMetric,
    ProjectionError,
    TwoWeightFlow,
    UndecidableError,
    WeightedCircleAction,
    curvature_pinch_report,
    f_q_eval,
    finite_period_components,
    fixed_point_set,
    has_nonclosed_orbit,
    killing_field_V,
    orbit_length_exact,
    orbit_length_gq,
    period_spectrum,
    point_period,
    point_period_exact,
    support,
)


def _unit(rng, d):
    x = rng.normal(size=d)
    return x / np.linalg.norm(x)


def test_hopf_field():
    a = WeightedCircleAction((1, 1))
    assert_allclose(killing_field_V(a, [1, 0, 0, 0]), [0, 1, 0, 0])


def test_weighted_field_length():
    a = WeightedCircleAction((5, 6))
    V = killing_field_V(a, [0, 0, 1, 0])
    assert V @ V == pytest.approx(36.0)
    assert_allclose(killing_field_V(a, [1, 0, 0, 0]) @ killing_field_V(a, [1, 0, 0, 0]), 25.0)


def test_complex_input_is_interleaved():
    a = WeightedCircleAction((1, 2))
    assert_allclose(killing_field_V(a, np.array([0, 1j])), [0, 0, -2, 0])


def test_action_validation():
    for bad in ((2, 4), (0, 1), (3,), (-1, 2)):
        with pytest.raises(ValueError):
            WeightedCircleAction(bad)


def test_off_sphere_point_refused():
    a = WeightedCircleAction((1, 2))
    with pytest.raises(ProjectionError):
        killing_field_V(a, [1.0, 0, 0, 1e-5])
    with pytest.raises(ProjectionError):
        f_q_eval(ConformalSphereMetric.for_q(2, 5), [2.0, 0, 0, 0])


def test_unit_field_bounds_and_length_function(rng):
    q = 5
    m = ConformalSphereMetric.for_q(2, q)
    a = m.action
    for _ in range(100):
        x = _unit(rng, 4)
        V = killing_field_V(a, x)
        assert 1 - 1e-12 <= np.linalg.norm(V) / q <= 1 + 1 / q + 1e-12
        assert f_q_eval(m, x) * q**2 == pytest.approx(V @ V, rel=1e-12)
        p = m.chart_point(x)
        assert m.metric.norm(p, m.unit_field(p)) == pytest.approx(1.0, abs=1e-12)


def test_metric_is_scaled_round_metric(rng):
    m = ConformalSphereMetric.for_q(3, 4)
    for _ in range(10):
        x = _unit(rng, 6)
        p = m.chart_point(x)
        assert_allclose(m.metric(p), m.base(p) / f_q_eval(m, x), rtol=1e-13)


def test_support():
    assert support([1, 0, 0, 0]) == (0,)
    assert support([0, 0, 0.6, 0.8]) == (1,)
    assert support([0.6, 0, 0, 0.8]) == (0, 1)
    assert support([1, 0, 1e-13, 0]) == (0,)


def test_point_periods():
    a = WeightedCircleAction((5, 6))
    assert point_period_exact(a, [1, 0, 0, 0]) == Fraction(1, 5)
    assert point_period_exact(a, [0, 0, 0, 1]) == Fraction(1, 6)
    assert point_period_exact(a, [0.6, 0, 0.8, 0]) == Fraction(1)
    assert point_period(a, [1, 0, 0, 0]) == pytest.approx(2 * math.pi / 5)
    b = WeightedCircleAction((2, 4, 3))
    assert point_period_exact(b, [0.6, 0, 0.8, 0, 0, 0]) == Fraction(1, 2)


def test_period_is_a_period(rng):
    a = WeightedCircleAction((2, 3))
    for x in (np.array([1.0, 0, 0, 0]), np.array([0, 0, 0, 1.0]), _unit(rng, 4)):
        T = point_period(a, x)
        assert_allclose(a.act(T, x), x, atol=1e-12)
        for k in range(1, 6):
            if k * T / 6 < T - 1e-9:
                assert np.linalg.norm(a.act(k * T / 6, x) - x) > 1e-3


def test_period_lower_semicontinuity():
    # periods jump up off the singular strata, never down
    a = WeightedCircleAction((5, 6))
    x = np.array([1.0, 0, 0, 0])
    T = point_period_exact(a, x)
    for eps in (1e-1, 1e-3, 1e-6, 1e-9):
        y = np.array([1.0, 0, eps, 0])
        assert point_period_exact(a, y) >= T


def test_period_spectrum():
    spec = period_spectrum(WeightedCircleAction((5, 6)))
    assert spec.turns == (Fraction(1, 6), Fraction(1, 5), Fraction(1))
    assert spec.maximal.role == "regular"
    assert sum(e.role == "regular" for e in spec.entries) == 1
    assert period_spectrum(WeightedCircleAction((5, 1, 1))).turns == (Fraction(1, 5), Fraction(1))
    ex = period_spectrum(WeightedCircleAction((6, 10, 15)), samples=5, exhaustive=True)
    assert set(ex.turns) == {Fraction(1, k) for k in (1, 2, 3, 5, 6, 10, 15)}


def test_orbit_lengths():
    m = ConformalSphereMetric.for_q(2, 5)
    assert orbit_length_exact(m, [1, 0, 0, 0]) == 1
    assert orbit_length_exact(m, [0, 0, 1, 0]) == Fraction(5, 6)
    assert orbit_length_exact(m, [0.6, 0, 0, 0.8]) == 5
    assert orbit_length_gq(m, [1, 0, 0, 0]) == pytest.approx(2 * math.pi)


def test_orbit_length_by_integration():
    m = ConformalSphereMetric.for_q(2, 3)
    x = np.array([0.0, 0.0, 1.0, 0.0])
    L = orbit_length_gq(m, x)
    c = integrate_curve(m.unit_field, m.chart_point(x), L, L / 2000)
    assert_allclose(m.atlas.to_ambient(c.end), x, atol=1e-9)


# fixed points


def test_fixed_point_sets_exact():
    flow = BlockRotationFlow((PiMonomial(1), PiMonomial(1, 1)))
    assert fixed_point_set(flow, 0).dim == 4
    F = fixed_point_set(flow, PiMonomial(2, 1))
    assert F.exact and F.blocks == (0,)
    assert_allclose(F.basis, np.eye(4)[:, :2])
    G = fixed_point_set(flow, 2)
    assert G.blocks == (1,)
    assert_allclose(G.basis, np.eye(4)[:, 2:])


def test_hopf_flow_has_no_fixed_points_at_pi():
    flow = BlockRotationFlow((1, 1))
    assert fixed_point_set(flow, PiMonomial(1, 1)).dim == 0
    assert fixed_point_set(flow, PiMonomial(2, 1)).dim == 4


def test_fixed_axes_always_fixed():
    flow = BlockRotationFlow((1,), fixed_axes=2)
    F = fixed_point_set(flow, PiMonomial(1, 1))
    assert F.dim == 2
    assert_allclose(F.basis, np.eye(4)[:, 2:])


def test_numeric_time_is_flagged():
    F = fixed_point_set(BlockRotationFlow((1, 2)), 2 * math.pi)
    assert not F.exact and F.dim == 4


@given(st.integers(0, 12), st.integers(1, 6))
def test_fixed_set_is_invariant(k, d):
    flow = BlockRotationFlow((1, 2, 3))
    t = PiMonomial(Fraction(k, d), 1)
    F = fixed_point_set(flow, t)
    M = flow.matrix(t)
    assert_allclose(M @ F.basis, F.basis, atol=1e-12)


def test_finite_period_components():
    flow = BlockRotationFlow((PiMonomial(2), PiMonomial(3), PiMonomial(1, 1)))
    comps = finite_period_components(flow)
    assert comps[0] == ((0, 1), PiMonomial(2, 1))
    assert comps[1] == ((2,), PiMonomial(2, 0))


# two-weight flows


def test_nonclosed_orbit_decisions():
    irr = TwoWeightFlow(2, Irrational("sqrt2", math.sqrt(2)))
    assert not has_nonclosed_orbit(irr, [0.6, 0, 0.8, 0]).closed
    assert has_nonclosed_orbit(irr, [1, 0, 0, 0]).period == pytest.approx(2 * math.pi)
    assert has_nonclosed_orbit(irr, np.array([0, 1j])).period == pytest.approx(2 * math.pi / math.sqrt(2))
    rat = TwoWeightFlow(3, Fraction(3, 2))
    res = has_nonclosed_orbit(rat, [0.6, 0, 0, 0, 0.8, 0])
    assert res.closed and res.period_turns == 2
    with pytest.raises(UndecidableError):
        has_nonclosed_orbit(TwoWeightFlow(2, 1.5), [1, 0, 0, 0])


# curvature


def test_round_pinch():
    rep = curvature_pinch_report(ConformalSphereMetric.round(2), samples=50)
    assert rep.max_deviation < 1e-6


@pytest.mark.parametrize("q", [5, 10])
def test_pinch_bound(q):
    rep = curvature_pinch_report(ConformalSphereMetric.for_q(2, q), samples=150, seed=q)
    assert rep.max_deviation <= 3 * (2 * q + 1) / q**2
    assert rep.min > 0


def test_pinch_shrinks_with_q():
    devs = [curvature_pinch_report(ConformalSphereMetric.for_q(2, q), samples=150).max_deviation for q in (5, 20)]
    assert devs[1] < devs[0]


def test_pinch_report_deterministic():
    m = ConformalSphereMetric.for_q(2, 4)
    a = curvature_pinch_report(m, samples=20, seed=3)
    b = curvature_pinch_report(m, samples=20, seed=3)
    assert np.array_equal(a.values, b.values)
