from __future__ import annotations

import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose

from killinglab.space_forms import (
    GroupCapExceeded,
    UnitQuaternion,
    block_embed,
    cw_test,
    cyclic_cw_group,
    displacement_spread,
    f1_f2_intersection_check,
    generate_finite_group,
    left_matrix,
    min_left_right_distance,
    quotient_period,
    random_block_rotation,
    right_matrix,
    rotation_block,
    stratum_codimension,
)

I4 = np.eye(4)
QI, QJ, QK = (0, 1, 0, 0), (0, 0, 1, 0), (0, 0, 0, 1)


def test_cw_trivial_cases():
    assert cw_test(np.eye(3)).kind == "+I"
    assert cw_test(-np.eye(5)).kind == "-I"
    assert cw_test(rotation_block(0.7)).kind == "half-split"


def test_cw_odd_dimension_violation():
    A = np.eye(3)
    A[:2, :2] = rotation_block(1.0)
    v = cw_test(A)
    assert not v.ok and v.kind == "violation"
    assert len(v.witness) == 2 and abs(v.witness[0] - v.witness[1]) > 0.1
    assert v.recheck(A)


def test_cw_two_angles_violation():
    A = block_embed(rotation_block(0.5), 1)
    B = np.block([[A, np.zeros((2, 2))], [np.zeros((2, 2)), rotation_block(0.9)]])
    assert not cw_test(B).ok


def test_cw_opposite_orientations_still_cw():
    B = np.block([[rotation_block(0.5), np.zeros((2, 2))], [np.zeros((2, 2)), rotation_block(-0.5)]])
    v = cw_test(B)
    assert v.ok and v.recheck(B)


def test_cw_rejects_non_orthogonal():
    with pytest.raises(ValueError):
        cw_test(2 * np.eye(2))


def test_displacement_examples():
    lo, hi = displacement_spread(-np.eye(4))
    assert lo == pytest.approx(math.pi) and hi == pytest.approx(math.pi)
    lo, hi = displacement_spread(block_embed(rotation_block(0.3), 3))
    assert hi - lo < 1e-12 and lo == pytest.approx(0.3)
    lo, hi = displacement_spread(np.diag([1.0, -1.0, 1.0, 1.0]))
    assert lo == 0.0 and hi == pytest.approx(math.pi)


def test_displacement_agrees_with_cw(rng):
    for _ in range(50):
        A = random_block_rotation(rng, 3)
        lo, hi = displacement_spread(A, samples=300, seed=1)
        if cw_test(A).ok:
            assert hi - lo < 1e-9
        else:
            assert hi - lo > 1e-3


def test_quaternion_matrices():
    assert_allclose(left_matrix(QI), [[0, -1, 0, 0], [1, 0, 0, 0], [0, 0, 0, -1], [0, 0, 1, 0]])
    assert_allclose(left_matrix(QI) @ left_matrix(QJ), left_matrix(QK))
    assert_allclose(right_matrix(QI) @ right_matrix(QJ), right_matrix(QJ) @ right_matrix(QI) * -1)
    assert_allclose(left_matrix(1), I4)
    assert_allclose(right_matrix(1), I4)


def test_quaternion_product_matches_matrices(rng):
    for _ in range(20):
        x, y = UnitQuaternion.random(rng), UnitQuaternion.random(rng)
        assert_allclose(left_matrix(x) @ y.vec, (x * y).vec, atol=1e-14)
        assert_allclose(right_matrix(y) @ x.vec, (x * y).vec, atol=1e-14)
        assert_allclose(left_matrix(x) @ right_matrix(y), right_matrix(y) @ left_matrix(x), atol=1e-14)
        assert_allclose(left_matrix(x.conj()), left_matrix(x).T, atol=1e-15)


def test_unit_quaternion_validation():
    with pytest.raises(ValueError):
        UnitQuaternion(1.0, 1.0, 0.0, 0.0)


@given(st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1), st.floats(-1, 1))
def test_left_multiplications_are_cw(a, b, c, d):
    v = np.array([a, b, c, d])
    if np.linalg.norm(v) < 1e-3:
        return
    L = left_matrix(UnitQuaternion.from_vector(v, normalize=True))
    assert cw_test(L).ok
    assert cw_test(block_embed(L, 2)).ok


def test_block_embed_spectrum():
    D = rotation_block(0.4)
    A = block_embed(D, 4)
    assert A.shape == (8, 8)
    ev = np.sort_complex(np.linalg.eigvals(A))
    assert_allclose(np.abs(ev.imag), math.sin(0.4), atol=1e-14)
    with pytest.raises(ValueError):
        block_embed(D, 0)


def test_finite_groups():
    Q8 = generate_finite_group([left_matrix(QI), left_matrix(QJ)])
    assert Q8.order == 8 and Q8.is_closed()
    assert -I4 in Q8 and left_matrix(QK) in Q8
    assert generate_finite_group([-I4]).order == 2
    with pytest.raises(GroupCapExceeded):
        generate_finite_group([rotation_block(1.0)], cap=50)


def test_cyclic_construction():
    c = cyclic_cw_group(2, 5)
    assert c.group.order == 5
    assert all(cw_test(E).ok for E in c.group.elements)
    for E in c.group.elements[1:]:
        lam = cw_test(E).lam
        assert abs(lam**5 - 1) < 1e-9
    rng = np.random.default_rng(3)
    for t in rng.uniform(0, 1, size=50):
        M = c.flow(t)
        assert np.abs(M @ c.f - c.f @ M).max() < 1e-12
    with pytest.raises(ValueError):
        cyclic_cw_group(2, 2)


def test_flow_moves_axis_points_onto_f():
    c = cyclic_cw_group(3, 4)
    y = np.zeros(6)
    y[0] = 1.0
    assert_allclose(c.flow(Fraction(1, 4)) @ y, c.f @ y, atol=1e-12)
    # mu(1/q) agrees with a group element on y but is not that element
    assert not any(np.abs(c.flow(Fraction(1, 4)) - E).max() < 1e-9 for E in c.group.elements)


def test_quotient_periods():
    c = cyclic_cw_group(2, 3)
    axis = quotient_period(c, [1.0, 0, 0, 0])
    assert axis.t == Fraction(1, 3) and not axis.gamma_is_identity
    generic = quotient_period(c, [0.6, 0, 0, 0.8])
    assert generic.t == 1 and generic.gamma_is_identity
    assert stratum_codimension(axis.gamma, c.flow(axis.t)) == 2
    assert stratum_codimension(np.eye(4), c.flow(Fraction(1, 1))) == 0


def test_quotient_period_divides_base(rng):
    c = cyclic_cw_group(2, 4)
    base = c.base_period
    for _ in range(10):
        y = rng.normal(size=4)
        p = quotient_period(c, y, grid=8)
        assert (base / p.t).denominator == 1
        yy = y / np.linalg.norm(y)
        assert_allclose(c.flow(p.t) @ yy, p.gamma @ yy, atol=1e-9)


def test_quotient_period_independent_of_grid():
    c = cyclic_cw_group(2, 5)
    y = [1.0, 0.0, 0.0, 0.0]
    assert quotient_period(c, y, grid=1).t == quotient_period(c, y, grid=64).t


def test_left_right_distance_closed_form(rng):
    for _ in range(5):
        x = UnitQuaternion.random(rng)
        assert min_left_right_distance(x, 8) == pytest.approx(math.sqrt(8 * (1 - abs(x.x1))), abs=1e-12)
    assert min_left_right_distance(UnitQuaternion(1.0, 0, 0, 0)) == pytest.approx(0.0, abs=1e-12)


def test_intersection_check():
    v = f1_f2_intersection_check(samples=20, resolution=6)
    assert v.ok and v.order_left == v.order_right == 8
    assert len(v.intersection) == 2
    assert v.worst_oracle_gap < 1e-12
