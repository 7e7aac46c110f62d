import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from hypothesis.extra.numpy import arrays

from conftest import deg
from edgeocc.core import DirectionSpec, DisparityError, random_rects_scene, step_scene
from edgeocc.edges import candidate_mask, circular_distance, compute_edge_fields, select_candidates

small_ints = arrays(np.float64, st.tuples(st.integers(2, 9), st.integers(2, 9)),
                    elements=st.integers(0, 12).map(float))


def test_constant_field():
    e = compute_edge_fields(np.full((5, 6), 5.0))
    assert not e.ex.any() and not e.ey.any() and not e.magnitude.any()


def test_ramp():
    x = np.tile(np.arange(7, dtype=float), (4, 1))
    e = compute_edge_fields(x)
    assert (e.ex[:, :-1] == 1).all() and (e.ex[:, -1] == 0).all()
    assert not e.ey.any()
    assert (e.angle[:, :-1] == 0).all() and (e.magnitude[:, :-1] == 1).all()


def test_row_step_arithmetic():
    e = compute_edge_fields(np.array([[2, 2, 10, 10], [2, 2, 10, 10]], dtype=float))
    assert e.ex[0, 1] == 8 and e.magnitude[0, 1] == 8


def test_too_small():
    with pytest.raises(DisparityError):
        compute_edge_fields(np.zeros((1, 5)))


@given(small_ints)
def test_field_invariants(v):
    e = compute_edge_fields(v)
    assert np.allclose(e.magnitude, np.sqrt(e.ex ** 2 + e.ey ** 2))
    nz = e.magnitude > 0
    # (cos, sin) of the angle is parallel to the gradient
    assert np.allclose(np.cos(e.angle[nz]) * e.magnitude[nz], e.ex[nz])
    assert np.allclose(np.sin(e.angle[nz]) * e.magnitude[nz], e.ey[nz])
    assert (e.angle > -math.pi).all() and (e.angle <= math.pi).all()


def test_below_threshold_is_empty():
    e = compute_edge_fields(np.tile([0.0, 0.5, 1.0], (3, 1)))
    assert len(select_candidates(e, deg(0), 1.0)) == 0


def test_step_candidates():
    e = compute_edge_fields(step_scene(bg=0, fg=8, col=64))
    assert e.ex[0, 63] == -8 and e.angle[0, 63] == pytest.approx(math.pi)
    assert len(select_candidates(e, deg(0), 1.0)) == 0
    c = select_candidates(e, deg(180), 1.0)
    assert (c[:, 0] == 63).all()
    assert c[:, 1].tolist() == list(range(128))


def test_diagonal_edge_included():
    # gradient along +x+y gives angle pi/4
    v = np.add.outer(np.arange(4.0), np.arange(4.0)) * 3
    e = compute_edge_fields(v)
    assert e.angle[0, 0] == pytest.approx(math.pi / 4)
    assert candidate_mask(e, deg(0), 1.0)[0, 0]


def test_perpendicular_gradient_excluded():
    e = compute_edge_fields(step_scene())
    for a in (90, 270):
        assert len(select_candidates(e, deg(a), 1.0)) == 0


def test_t_edge_must_be_positive():
    with pytest.raises(ValueError):
        select_candidates(compute_edge_fields(step_scene()), deg(0), 0.0)


@given(small_ints, st.floats(0, 2 * math.pi, exclude_max=True))
def test_candidates_match_angle_predicate(v, phi):
    e = compute_edge_fields(v)
    c = select_candidates(e, DirectionSpec(phi), 1.0)
    xs, ys = c[:, 0], c[:, 1]
    assert (e.magnitude[ys, xs] > 1.0).all()
    assert len({tuple(p) for p in c.tolist()}) == len(c)
    # away from the exact pi/2 seam the vector test equals the angular one
    dist = circular_distance(e.angle, phi)
    clear = np.abs(dist - math.pi / 2) > 1e-9
    expect = (e.magnitude > 1.0) & (dist < math.pi / 2)
    got = candidate_mask(e, DirectionSpec(phi), 1.0)
    assert (got[clear] == expect[clear]).all()


@given(small_ints, st.sampled_from(range(0, 360, 45)))
def test_half_plane_partition(v, a):
    e = compute_edge_fields(v)
    c, s = DirectionSpec.from_degrees(a).baseline_unit
    both = candidate_mask(e, deg(a), 1.0) | candidate_mask(e, deg(a + 180), 1.0)
    perpendicular = e.ex * c + e.ey * s == 0
    assert (both == ((e.magnitude > 1.0) & ~perpendicular)).all()
    assert not (candidate_mask(e, deg(a), 1.0) & candidate_mask(e, deg(a + 180), 1.0)).any()


@given(st.integers(0, 10_000), st.sampled_from(range(0, 360, 45)))
@settings(max_examples=30, deadline=None)
def test_rotation_moves_candidates(seed, a):
    # np.rot90(k=-1) maps (x, y) -> (H-1-y, x) and angles by +90 degrees; the
    # forward difference then lands one pixel off on some edges
    v = random_rects_scene(seed, width=64, height=64, max_disparity=10, max_size=20).values
    h = v.shape[0]
    c0 = select_candidates(compute_edge_fields(v), deg(a), 1.0)
    c1 = select_candidates(compute_edge_fields(np.rot90(v, k=-1)), deg(a + 90), 1.0)
    moved = np.array([(h - 1 - y, x) for x, y in c0.tolist()])
    got = c1
    assert len(moved) and len(got)

    def covered(p, q):
        return (np.abs(p[:, None, :] - q[None, :, :]).max(axis=2) <= 1).any(axis=1).all()

    assert covered(got, moved) and covered(moved, got)
