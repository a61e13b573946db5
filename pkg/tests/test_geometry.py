import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from meshfree.cli import default_polygon
from meshfree.geometry import (
    DegenerateInputError,
    DuplicatePointError,
    PolygonBoundary,
    SamplingStalledError,
    euclidean_distance,
    generate_boundary_points,
    generate_interior_points,
    load_polygon,
    point_in_polygon,
    points_in_polygon,
    triangulate,
)


def ray_cast_oracle(p, verts):
    """Plain even-odd rule written straight from the definition, exact in Fractions."""
    x, y = (Fraction(c) for c in p)
    inside = False
    n = len(verts)
    for i in range(n):
        x1, y1 = (Fraction(c) for c in verts[i])
        x2, y2 = (Fraction(c) for c in verts[(i + 1) % n])
        if (y1 > y) != (y2 > y):
            xc = x1 + (y - y1) * (x2 - x1) / (y2 - y1)
            if x < xc:
                inside = not inside
    return inside


def test_distance_345():
    assert euclidean_distance((0, 0), (3, 4)) == 5.0


def test_unit_square_containment(unit_square):
    assert point_in_polygon((0.5, 0.5), unit_square)
    assert not point_in_polygon((1.5, 0.5), unit_square)
    assert point_in_polygon((1.0, 0.5), unit_square)  # on an edge counts as inside
    assert point_in_polygon((0.0, 0.0), unit_square)
    strict = points_in_polygon([(1.0, 0.5), (0.5, 0.5)], unit_square, strict=True)
    assert strict.tolist() == [False, True]


def test_triangle_edge_tolerance():
    tri = PolygonBoundary([(0, 0), (1, 0), (0, 1)])
    assert point_in_polygon((0.5, 0.5), tri)
    assert point_in_polygon((0.5, 0.5 + 5e-13), tri)
    assert not point_in_polygon((0.5, 0.5 + 1e-9), tri)


@pytest.mark.parametrize("spacing,count", [(0.5, 8), (1.0, 4)])
def test_boundary_point_counts(unit_square, spacing, count):
    pts = generate_boundary_points(unit_square, spacing)
    assert len(pts) == count
    assert len({(p.x, p.y) for p in pts}) == count
    assert all(point_in_polygon(p, unit_square) for p in pts)


def test_boundary_spacing_never_exceeds_target(unit_square):
    pts = np.array(generate_boundary_points(unit_square, 0.3))
    gaps = np.hypot(*np.diff(np.vstack([pts, pts[:1]]), axis=0).T)
    assert gaps.max() <= 0.3 + 1e-15


def test_interior_points_deterministic_and_inside(unit_square):
    a = generate_interior_points(unit_square, 50, seed=7)
    b = generate_interior_points(unit_square, 50, seed=7)
    c = generate_interior_points(unit_square, 50, seed=8)
    assert a == b
    assert a != c
    assert all(0 < p.x < 1 and 0 < p.y < 1 for p in a)


def test_fixture_points_agree_with_oracle():
    poly = load_polygon(default_polygon())
    pts = generate_interior_points(poly, 3881, seed=42)
    assert len(pts) == 3881
    verts = poly.xy.tolist()
    assert all(ray_cast_oracle(p, verts) for p in pts)


def test_containment_matches_oracle_on_random_queries(rng):
    poly = load_polygon(default_polygon())
    xmin, ymin, xmax, ymax = poly.bbox
    q = rng.uniform([xmin, ymin], [xmax, ymax], size=(2000, 2))
    got = points_in_polygon(q, poly)
    verts = poly.xy.tolist()
    want = [ray_cast_oracle(p, verts) for p in q.tolist()]
    assert got.tolist() == want


def test_stalled_sampling_raises():
    sliver = PolygonBoundary([(0, 0), (1, 1), (1, 1 + 1e-12)])
    with pytest.raises(SamplingStalledError):
        generate_interior_points(sliver, 10, seed=1)


def test_polygon_validation(tmp_path):
    with pytest.raises(DegenerateInputError):
        PolygonBoundary([(0, 0), (1, 1)])
    with pytest.raises(DegenerateInputError):
        PolygonBoundary([(0, 0), (1, 1), (2, 2)])
    closed = PolygonBoundary([(0, 0), (1, 0), (0, 1), (0, 0)])
    assert len(closed.xy) == 3
    path = tmp_path / "poly.csv"
    path.write_text("# comment\nlon,lat\n0,0\n2,0\n2,1\n")
    assert load_polygon(path).area == pytest.approx(1.0)


def _circumcircle_oracle(a, b, c, d):
    """In-circle determinant; positive when d is strictly inside CCW triangle abc."""
    rows = []
    for p in (a, b, c):
        dx, dy = p[0] - d[0], p[1] - d[1]
        rows.append((dx, dy, dx * dx + dy * dy))
    (a1, a2, a3), (b1, b2, b3), (c1, c2, c3) = rows
    return a1 * (b2 * c3 - b3 * c2) - a2 * (b1 * c3 - b3 * c1) + a3 * (b1 * c2 - b2 * c1)


def test_delaunay_empty_circle(rng):
    pts = rng.random((60, 2))
    mesh = triangulate(pts)
    assert np.all(mesh.areas() > 0)
    for t in mesh.triangles:
        a, b, c = pts[t]
        for k in range(len(pts)):
            if k in t:
                continue
            assert _circumcircle_oracle(a, b, c, pts[k]) <= 1e-10


def test_delaunay_covers_hull(rng):
    from scipy.spatial import ConvexHull

    pts = rng.random((200, 2))
    mesh = triangulate(pts)
    assert mesh.areas().sum() == pytest.approx(ConvexHull(pts).volume, abs=1e-9)


def test_triangulate_errors():
    with pytest.raises(DegenerateInputError):
        triangulate([(0, 0), (1, 1)])
    with pytest.raises(DegenerateInputError):
        triangulate([(0, 0), (1, 1), (2, 2), (3, 3)])
    with pytest.raises(DuplicatePointError):
        triangulate([(0, 0), (1, 0), (0, 1), (0, 0)])


def test_square_gives_two_triangles(unit_square):
    mesh = triangulate(unit_square.xy)
    assert len(mesh.triangles) == 2
    assert mesh.areas().sum() == pytest.approx(1.0)


coord = st.floats(-100, 100, allow_nan=False, allow_infinity=False)


@settings(max_examples=200, deadline=None)
@given(coord, coord, coord, coord)
def test_distance_symmetric_nonnegative(x1, y1, x2, y2):
    d = euclidean_distance((x1, y1), (x2, y2))
    assert d >= 0
    assert d == euclidean_distance((x2, y2), (x1, y1))
    assert math.isclose(d, math.hypot(x1 - x2, y1 - y2))


@settings(max_examples=50, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 40))
def test_triangles_counterclockwise(seed, n):
    pts = np.random.default_rng(seed).random((n, 2))
    mesh = triangulate(pts)
    p = mesh.points[mesh.triangles]
    cross = (p[:, 1, 0] - p[:, 0, 0]) * (p[:, 2, 1] - p[:, 0, 1]) - \
            (p[:, 1, 1] - p[:, 0, 1]) * (p[:, 2, 0] - p[:, 0, 0])
    assert np.all(cross > 0)
    used = np.unique(mesh.triangles)
    assert len(used) == n  # every input point is a vertex


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_interior_points_strictly_inside(seed):
    poly = PolygonBoundary([(0, 0), (4, 0), (4, 3), (2, 1), (0, 3)])
    pts = generate_interior_points(poly, 40, seed)
    assert points_in_polygon(pts, poly, strict=True).all()


def test_convex_triangulation_area_sums(unit_square):
    pts = np.vstack([unit_square.xy, [[0.5, 0.5], [0.25, 0.75]]])
    mesh = triangulate(pts)
    assert sum(mesh.areas()) == pytest.approx(1.0, abs=1e-12)
