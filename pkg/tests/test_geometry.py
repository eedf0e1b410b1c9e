from fractions import Fraction
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dotlab.errors import DegenerateAbsent, DimensionMismatch, SingularInput
from dotlab.geometry import (
    TranslationVector,
    degenerate_region_points,
    h_offset,
    identity_residual,
    jacobian_closed,
    jacobian_numeric,
    lift,
    region_report,
    rotation_to_canonical,
    transform_map,
)

from _oracles import direct_dot, point_plane_distance, rational_sphere_point

ZERO2 = TranslationVector((0, 0), 0)


def tv(*flat):
    return TranslationVector.from_flat(flat)


@pytest.mark.parametrize(
    "x, a, expected",
    [
        ((1, 0), tv(0, 0, 0), (1, 0, 1)),
        ((0, 0), tv(2, 3, 5), (2, 3, 5)),
        ((1, 2), tv(1, 1, -1), (2, 3, 4)),
    ],
)
def test_lift(x, a, expected):
    assert lift(x, a) == expected


def test_lift_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        lift((1, 2, 3), ZERO2)


def test_transform_map_examples():
    assert transform_map((1, 0), ZERO2) == (-0.5, 0.0)
    assert transform_map((1, 0), tv(0, 0, 1)) == (-0.25, 0.0)
    with pytest.raises(SingularInput):
        transform_map((0, 0), ZERO2)
    with pytest.raises(SingularInput):
        transform_map((0, 0), ZERO2, exact=True)


def test_singular_epsilon_is_configurable():
    a = tv(0, 0, -1)
    x = (1 + 1e-13, 0)
    with pytest.raises(SingularInput):
        transform_map(x, a)
    assert transform_map(x, a, eps=1e-15)[0] < -1e10


@pytest.mark.parametrize("x", [(1, 0), (0.3, -2.0), (5, 7)])
def test_h_offset_standard_paraboloid(x):
    assert h_offset(x, ZERO2) == pytest.approx(-0.25, abs=1e-15)
    assert h_offset(x, ZERO2, exact=True) == Fraction(-1, 4)


def test_h_offset_examples():
    # (1 + 1) - 1/8: the a_d^2 term contributes
    assert h_offset((1, 0), tv(0, 0, 1), exact=True) == Fraction(15, 8)
    assert identity_residual((1, 0), (0, 0), tv(0, 0, 1), exact=True) == 0
    assert h_offset((0, 0), tv(1, 0, 1), exact=True) == Fraction(7, 4)


@pytest.mark.parametrize("x, y, expected_dot", [((1, 0), (0, 1), 1), ((1, 0), (1, 0), 2)])
def test_identity_examples(x, y, expected_dot):
    assert direct_dot(lift(x, ZERO2), lift(y, ZERO2)) == expected_dot
    q = sum(v * v for v in x)
    centre = transform_map(x, ZERO2, exact=True)
    rhs = q * sum((c - v) ** 2 for c, v in zip(centre, y)) + h_offset(x, ZERO2, exact=True)
    assert rhs == expected_dot
    assert identity_residual(x, y, ZERO2, exact=True) == 0


def test_identity_random_float(rng):
    worst = 0.0
    count = 0
    while count < 1000:
        x, y, a_bar = rng.uniform(-3, 3, size=(3, 2))
        a = TranslationVector(tuple(a_bar), rng.uniform(-3, 3))
        if abs(x @ x + a.a_d) <= 0.1:
            continue
        scale = 1 + abs(direct_dot(lift(x, a), lift(y, a)))
        worst = max(worst, abs(identity_residual(x, y, a)) / scale)
        count += 1
    assert worst < 1e-9


fractions_ = st.fractions(min_value=-10, max_value=10, max_denominator=50)


@settings(max_examples=200, deadline=None)
@given(st.integers(2, 4).flatmap(lambda n: st.tuples(*[st.lists(fractions_, min_size=n, max_size=n)] * 3, fractions_)))
def test_identity_exact_is_zero(data):
    x, y, a_bar, a_d = data
    a = TranslationVector(a_bar, a_d)
    if sum(v * v for v in x) + a_d == 0:
        return
    assert identity_residual(x, y, a, exact=True) == 0


@pytest.mark.parametrize(
    "x, a, expected",
    [((1, 0), tv(0, 0, 0), -0.25), ((0, 1), tv(1, 0, 0), -0.25)],
)
def test_jacobian_examples(x, a, expected):
    assert jacobian_closed(x, a, exact=True) == Fraction(expected)
    assert jacobian_numeric(x, a, step=1e-5) == pytest.approx(expected, abs=1e-6)


def test_jacobian_numeric_d4():
    a = tv(0, 0, 0, 1)
    x = (1, 1, 1)
    closed = jacobian_closed(x, a)
    assert jacobian_numeric(x, a, 1e-5) == pytest.approx(closed, rel=1e-5)


def test_jacobian_matches_finite_differences(rng):
    for _ in range(200):
        n = int(rng.integers(2, 5))
        a = TranslationVector(tuple(rng.uniform(-2, 2, n)), rng.uniform(-2, 2))
        x = rng.uniform(-2, 2, n)
        if abs(x @ x + a.a_d) < 0.2:
            continue
        closed = jacobian_closed(tuple(x), a)
        numeric = jacobian_numeric(x, a, 1e-5)
        assert abs(closed - numeric) <= max(1e-5 * abs(closed), 1e-9)


def test_jacobian_near_a11_zero():
    # points with x_1 (x_1 + a_1) = 0, where naive row reduction would divide by zero
    for x1, a1 in [(0.0, 0.7), (0.5, -0.5), (1e-9, 0.3)]:
        a = tv(a1, 0.4, 1.3)
        x = (x1, 1.1)
        assert jacobian_numeric(x, a) == pytest.approx(jacobian_closed(x, a), rel=1e-5, abs=1e-9)


def test_jacobian_vanishes_on_degenerate_sphere():
    a_bar = (Fraction(1, 3), Fraction(-2, 5))
    r = Fraction(5, 6)
    a = TranslationVector(a_bar, r * r - sum(v * v for v in a_bar))
    centre = tuple(-v for v in a_bar)
    for params in [(Fraction(1, 2),), (Fraction(-3, 4),), (Fraction(7, 1),)]:
        x = rational_sphere_point(centre, r, params)
        assert jacobian_closed(x, a, exact=True) == 0
        assert abs(jacobian_numeric([float(v) for v in x], a)) < 1e-6


@settings(max_examples=200, deadline=None)
@given(st.lists(fractions_, min_size=2, max_size=2), st.lists(fractions_, min_size=2, max_size=2), fractions_)
def test_zero_locus_equivalence(x, a_bar, a_d):
    a = TranslationVector(a_bar, a_d)
    if sum(v * v for v in x) + a_d == 0:
        return
    on_sphere = sum((xi + ai) ** 2 for xi, ai in zip(x, a_bar)) == sum(v * v for v in a_bar) + a_d
    assert (jacobian_closed(x, a, exact=True) == 0) == on_sphere


def test_local_injectivity_away_from_degenerate_sphere(rng):
    a = tv(0.5, -0.3, 0.8)
    degenerate_r = math.sqrt(0.25 + 0.09 + 0.8)
    centre = -np.array(a.a_bar)
    checked = 0
    while checked < 500:
        x1 = rng.uniform(-3, 3, 2)
        rho = abs(np.linalg.norm(x1 - centre) - degenerate_r)
        if rho < 0.05 or abs(x1 @ x1 + a.a_d) < 0.05:
            continue
        step = rng.standard_normal(2)
        x2 = x1 + step / np.linalg.norm(step) * rng.uniform(1e-6, rho / 10)
        assert transform_map(x1, a) != transform_map(x2, a)
        checked += 1


def test_region_report_origin_outside():
    rep = region_report(tv(3, 0, -4), 3)
    assert rep.singularity.center == (3, 0)
    assert rep.singularity.radius == 2.0
    assert rep.origin_position == "outside"
    assert rep.degenerate.cylinder_radius_sq == 5
    assert rep.singularity.tangent_radius == pytest.approx(math.sqrt(5))


def test_region_report_point_singularity_and_canonical_distance():
    rep = region_report(tv(1, 0, 0), 3)
    assert rep.singularity is None
    assert rep.origin_position == "no-singularity"
    assert rep.note
    deg = rep.degenerate
    assert deg.hyperplane_normal == (2, 0, 1)
    assert deg.hyperplane_offset == 2
    assert deg.canonical_distance == pytest.approx(2 / math.sqrt(5), abs=1e-12)
    oracle = point_plane_distance((0, 0, 0), deg.hyperplane_normal, deg.hyperplane_offset)
    assert deg.canonical_distance == pytest.approx(oracle, abs=1e-12)


def test_region_report_origin_inside_and_on():
    rep = region_report(tv(0, 0, -1), 3)
    assert rep.singularity.center == (0, 0) and rep.singularity.radius == 1.0
    assert rep.origin_position == "inside"
    assert rep.degenerate is None
    assert region_report(tv(Fraction(3, 5), Fraction(4, 5), -1)).origin_position == "on"
    assert region_report(tv(0.6, 0.8, -1.0)).origin_position == "on"


def test_region_report_requires_d3():
    with pytest.raises(DimensionMismatch):
        region_report(tv(1, 0), 2)


def test_degenerate_points_on_hyperplane(rng):
    for _ in range(20):
        n = int(rng.integers(2, 5))
        a_bar = rng.uniform(-2, 2, n)
        a = TranslationVector(tuple(a_bar), rng.uniform(-(a_bar @ a_bar) + 0.1, 3))
        deg = region_report(a).degenerate
        pts = degenerate_region_points(a, 50, rng)
        res = pts @ np.asarray(deg.hyperplane_normal, float) - float(deg.hyperplane_offset)
        assert np.max(np.abs(res)) < 1e-12 * (1 + np.max(np.abs(pts)))
        # the lifted points also sit on the paraboloid and the cylinder
        jac = [jacobian_closed(p[:-1] - a_bar, a) for p in pts]
        assert np.max(np.abs(jac)) < 1e-9


def test_rotation_identity_case():
    a = tv(0, 0, 0, 1)
    g = rotation_to_canonical(a, 4)
    assert np.array_equal(g, np.eye(4))
    assert region_report(a).degenerate.canonical_distance == 2.0


def test_rotation_maps_hyperplane_to_level_set(rng):
    a = tv(1, 0, 0)
    g = rotation_to_canonical(a, 3)
    # points of H: y_3 = 2 - 2 y_1
    y12 = rng.uniform(-5, 5, size=(100, 2))
    pts = np.column_stack([y12, 2 - 2 * y12[:, 0]])
    z = pts @ g.T
    assert np.max(np.abs(z[:, -1] - 2 / math.sqrt(5))) < 1e-10


def test_rotation_is_orthogonal(rng):
    for _ in range(50):
        n = int(rng.integers(2, 6))
        a_bar = rng.uniform(-3, 3, n)
        a = TranslationVector(tuple(a_bar), rng.uniform(-(a_bar @ a_bar) + 0.01, 4))
        g = rotation_to_canonical(a)
        assert np.max(np.abs(g.T @ g - np.eye(n + 1))) < 1e-12
        assert abs(abs(np.linalg.det(g)) - 1) < 1e-12
        u, v = rng.standard_normal((2, n + 1))
        assert abs((g @ u) @ (g @ v) - u @ v) < 1e-12


def test_rotation_requires_degenerate_region():
    with pytest.raises(DegenerateAbsent):
        rotation_to_canonical(tv(0, 0, -1))
    with pytest.raises(DegenerateAbsent):
        rotation_to_canonical(tv(1, 0, -1))
