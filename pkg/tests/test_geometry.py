import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from relopush.geometry import (Body, Footprint, Pose2D, Scene, Workspace, angle_diff, collides, footprint_at,
                               normalize_angle, polygon_area, pose_error, sweep_status, within_bounds)

finite = st.floats(-1e6, 1e6, allow_nan=False)
coord = st.floats(-10, 10, allow_nan=False)
angle = st.floats(-10, 10, allow_nan=False)
UNIT = Footprint.square(1.0)


@pytest.mark.parametrize("theta,expected", [(0.0, 0.0), (3 * math.pi, -math.pi), (-math.pi, -math.pi)])
def test_normalize_angle_examples(theta, expected):
    assert normalize_angle(theta) == pytest.approx(expected, abs=1e-12)


@given(finite)
def test_normalize_angle_idempotent_and_in_range(x):
    y = normalize_angle(x)
    assert -math.pi <= y < math.pi
    assert normalize_angle(y) == y


def test_angle_diff_wraps():
    assert angle_diff(math.pi - 0.1, -math.pi + 0.1) == pytest.approx(0.2)


@given(coord, coord, angle, coord, coord, angle)
def test_pose_compose_inverse(x, y, t, u, v, s):
    a, b = Pose2D(x, y, t), Pose2D(u, v, s)
    back = a.compose(b).relative_to(a)
    assert back.close_to(b, 1e-7, 1e-9)
    assert a.compose(a.inverse()).close_to(Pose2D(0, 0, 0), 1e-7, 1e-9)


def test_footprint_at_examples():
    base = UNIT.vertices
    np.testing.assert_allclose(footprint_at(UNIT, Pose2D(0, 0, 0)), base)
    np.testing.assert_allclose(footprint_at(UNIT, Pose2D(1, 0, 0)), base + [1, 0])
    rotated = footprint_at(UNIT, Pose2D(0, 0, math.pi / 2))
    # same point set, listed from a different corner
    assert sorted(map(tuple, np.round(rotated, 12))) == sorted(map(tuple, np.round(base, 12)))


@given(coord, coord, angle)
def test_footprint_at_preserves_area(x, y, t):
    fp = Footprint(np.array([[0, 0], [2, 0], [2.5, 1], [0.3, 1.4]], dtype=float))
    assert polygon_area(footprint_at(fp, Pose2D(x, y, t))) == pytest.approx(fp.area, rel=1e-9)


def test_footprint_rejects_clockwise_and_concave():
    with pytest.raises(ValueError):
        Footprint(np.array([[0, 0], [0, 1], [1, 1], [1, 0]], dtype=float))
    with pytest.raises(ValueError):
        Footprint(np.array([[0, 0], [2, 0], [1, 0.2], [1, 2]], dtype=float))


def test_collides_examples():
    a = footprint_at(UNIT, Pose2D(0, 0, 0))
    assert not collides(a, footprint_at(UNIT, Pose2D(5, 0, 0)))
    assert collides(a, a)
    assert not collides(a, footprint_at(UNIT, Pose2D(1, 0, 0)))  # shared edge is contact only
    assert collides(a, footprint_at(UNIT, Pose2D(1 - 1e-6, 0, 0)))


@given(coord, coord, angle, coord, coord, angle)
def test_collides_symmetric(x, y, t, u, v, s):
    a = footprint_at(Footprint.rectangle(-1, 2, -0.5, 0.5), Pose2D(x, y, t))
    b = footprint_at(UNIT, Pose2D(u, v, s))
    assert collides(a, b) == collides(b, a)


@given(coord, coord, angle, coord, coord, angle)
def test_collides_agrees_with_point_sampling(x, y, t, u, v, s):
    """A polygon vertex strictly inside the other implies overlap."""
    a = footprint_at(UNIT, Pose2D(x / 5, y / 5, t))
    b = footprint_at(UNIT, Pose2D(u / 5, v / 5, s))

    def inside(p, poly):
        def cross(u, v):
            return u[0] * v[1] - u[1] * v[0]
        return all(cross(poly[(i + 1) % 4] - poly[i], p - poly[i]) > 1e-6 for i in range(4))

    if any(inside(p, b) for p in a) or any(inside(p, a) for p in b):
        assert collides(a, b)


def test_within_bounds_examples():
    w = Workspace(4.0, 5.2)
    cube = Footprint.square(0.15)
    assert within_bounds(footprint_at(cube, Pose2D(2.0, 2.6, 0)), w)
    assert not within_bounds(footprint_at(cube, Pose2D(0, 0, 0)), w)
    assert within_bounds(footprint_at(cube, Pose2D(0.075, 0.075, 0)), w)  # touching the boundary


@given(st.floats(0, 4), st.floats(0, 5.2), angle, st.floats(0, 2), st.floats(0, 2))
def test_within_bounds_monotone(x, y, t, gx, gy):
    small = Workspace(4.0, 5.2)
    big = Workspace(4.0 + 2 * gx, 5.2 + 2 * gy, (-gx, -gy))
    poly = footprint_at(Footprint.square(0.15), Pose2D(x, y, t))
    if within_bounds(poly, small):
        assert within_bounds(poly, big)


def test_inflated_grows_by_margin():
    fp = Footprint.square(0.15).inflated(0.02)
    assert fp.area == pytest.approx(0.19 ** 2)


def test_symmetry_angles():
    assert len(Footprint.square(0.15).symmetry_angles()) == 4
    assert len(Footprint.rectangle(-1, 1, -0.5, 0.5).symmetry_angles()) == 2
    assert len(Footprint.rectangle(0, 2, 0, 1).symmetry_angles()) == 1  # symmetry is about the origin


def test_pose_error_respects_square_symmetry():
    dpos, dang = pose_error(Footprint.square(0.15), Pose2D(1, 1, math.pi / 2 + 0.01), Pose2D(1, 1, 0))
    assert dpos == 0 and dang == pytest.approx(0.01)
    dpos, dang = pose_error(Footprint.rectangle(-1, 1, -0.5, 0.5), Pose2D(1, 1, math.pi / 2), Pose2D(1, 1, 0))
    assert dang == pytest.approx(math.pi / 2)


def test_sweep_status_codes():
    w = Workspace(4.0, 5.2)
    body = Body.of(Footprint.square(0.2))
    scene = Scene([footprint_at(UNIT, Pose2D(2, 2, 0))])
    assert sweep_status(np.array([[1.0, 1.0, 0.0]]), body, scene, w) == 0
    assert sweep_status(np.array([[1.0, 1.0, 0.0], [2.0, 2.0, 0.0]]), body, scene, w) == 1
    assert sweep_status(np.array([[0.0, 1.0, 0.0]]), body, scene, w) == 2
