from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from oracles import brute_lattice_points, qhull_volume
from sparseres.polytope import (DegenerateDeltaError, convex_hull, lattice_points, minkowski_sum,
                                normalized_volume, random_delta, volume)


def point_sets(n, max_pts=9, box=4):
    return st.lists(st.tuples(*[st.integers(-box, box)] * n), min_size=n + 1, max_size=max_pts, unique=True)


def full_dim(pts) -> bool:
    P = np.array(pts, dtype=float)
    return np.linalg.matrix_rank(P[1:] - P[0]) == P.shape[1]


def test_square_and_interior_point():
    P = convex_hull([(0, 0), (2, 0), (0, 2), (2, 2), (1, 1)])
    assert P.vertices == ((0, 0), (0, 2), (2, 0), (2, 2))
    assert P.dim == 2
    assert volume(P) == 4 and normalized_volume(P) == 8


def test_lower_dimensional_hull():
    P = convex_hull([(0, 0, 0), (1, 1, 1), (2, 2, 2)])
    assert P.dim == 1 and P.vertices == ((0, 0, 0), (2, 2, 2))
    assert P.contains((1, 1, 1)) and not P.contains((1, 1, 0))


def test_rational_vertices():
    P = convex_hull([(Fraction(1, 2), 0), (0, Fraction(1, 3)), (0, 0)])
    assert volume(P) == Fraction(1, 12)


@given(point_sets(2))
@settings(max_examples=60, deadline=None)
def test_hull_matches_qhull_2d(pts):
    P = convex_hull(pts)
    if full_dim(pts):
        H = ConvexHull(np.array(pts, dtype=float))
        assert set(P.vertices) == {tuple(pts[i]) for i in H.vertices}
        assert float(volume(P)) == pytest.approx(H.volume, rel=1e-12)
    for p in pts:
        assert P.contains(p)


@given(point_sets(3, max_pts=8, box=3))
@settings(max_examples=40, deadline=None)
def test_hull_matches_qhull_3d(pts):
    P = convex_hull(pts)
    if full_dim(pts):
        H = ConvexHull(np.array(pts, dtype=float))
        assert set(P.vertices) == {tuple(pts[i]) for i in H.vertices}
        assert float(volume(P)) == pytest.approx(H.volume, rel=1e-12)


@given(point_sets(4, max_pts=7, box=2))
@settings(max_examples=15, deadline=None)
def test_volume_4d(pts):
    if full_dim(pts):
        assert float(volume(convex_hull(pts))) == pytest.approx(qhull_volume(pts), rel=1e-10)


@given(point_sets(2, 5, 3), point_sets(2, 5, 3))
@settings(max_examples=40, deadline=None)
def test_minkowski_sum_vertices(a, b):
    S = minkowski_sum(convex_hull(a), convex_hull(b))
    sums = {(p[0] + q[0], p[1] + q[1]) for p in a for q in b}
    ref = convex_hull(sorted(sums))
    assert S.vertices == ref.vertices


@given(st.integers(0, 2 ** 31), point_sets(2, 7, 4))
@settings(max_examples=40, deadline=None)
def test_lattice_points_2d(seed, pts):
    if not full_dim(pts):
        return
    delta = random_delta(2, np.random.default_rng(seed))
    E = lattice_points(convex_hull(pts), delta)
    assert set(E.points) == brute_lattice_points(pts, delta)
    assert list(E.points) == sorted(E.points)


@given(st.integers(0, 2 ** 31), point_sets(3, 6, 3))
@settings(max_examples=25, deadline=None)
def test_lattice_points_3d(seed, pts):
    if not full_dim(pts):
        return
    delta = random_delta(3, np.random.default_rng(seed))
    assert set(lattice_points(convex_hull(pts), delta).points) == brute_lattice_points(pts, delta)


def test_boundary_point_is_rejected():
    P = convex_hull([(0, 0), (2, 0), (0, 2)])
    with pytest.raises(DegenerateDeltaError):
        lattice_points(P, (Fraction(0), Fraction(1, 7)))


def test_lower_dimensional_sum_has_no_points():
    P = convex_hull([(0, 0), (3, 3)])
    assert len(lattice_points(P, (Fraction(1, 1000), Fraction(-1, 999)))) == 0
