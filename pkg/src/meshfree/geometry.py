"""Planar primitives: distances, polygon containment, point generation and
Delaunay triangulation.

Coordinates are plain floats. In benchmark space they are unitless, in the
geographic case study they are degrees of longitude/latitude treated as a
flat plane.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np
from scipy.spatial import Delaunay, cKDTree

__all__ = [
    "Point2D",
    "PolygonBoundary",
    "TriangleMesh",
    "BoxNormalization",
    "DegenerateInputError",
    "DuplicatePointError",
    "SamplingStalledError",
    "as_xy",
    "check_distinct",
    "euclidean_distance",
    "point_in_polygon",
    "points_in_polygon",
    "generate_boundary_points",
    "generate_interior_points",
    "triangulate",
    "load_polygon",
]

#: Points closer than this are considered the same point.
DUPLICATE_TOL = 1e-12
#: Distance under which a point counts as lying on a polygon edge.
EDGE_TOL = 1e-12
#: In-circle determinant tolerance used by the Delaunay check.
INCIRCLE_TOL = 1e-10
STALL_WINDOW = 100_000


class DegenerateInputError(ValueError):
    """Too few points, collinear points, or an invalid polygon."""


class DuplicatePointError(ValueError):
    """Two input points coincide (closer than 1e-12)."""


class SamplingStalledError(RuntimeError):
    """Rejection sampling accepted nothing over a full window of draws."""


class Point2D(NamedTuple):
    x: float
    y: float


def as_xy(points, *, name: str = "points") -> np.ndarray:
    """Return ``points`` as a finite float array of shape (n, 2)."""
    arr = np.asarray(points, dtype=float)
    if arr.ndim == 1 and arr.size == 0:
        arr = arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"{name} must have shape (n, 2), got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contain non-finite coordinates")
    return arr


def check_distinct(xy: np.ndarray, *, what: str = "points") -> None:
    """Raise DuplicatePointError if any two rows of ``xy`` coincide."""
    if len(xy) < 2:
        return
    pairs = cKDTree(xy).query_pairs(DUPLICATE_TOL, output_type="ndarray")
    if len(pairs):
        i, j = sorted(pairs[0])
        raise DuplicatePointError(
            f"duplicate {what}: index {i} and {j} at ({xy[i, 0]!r}, {xy[i, 1]!r})"
        )


def euclidean_distance(a: Sequence[float], b: Sequence[float]) -> float:
    return math.hypot(a[0] - b[0], a[1] - b[1])


@dataclass(frozen=True)
class BoxNormalization:
    """Uniform affine map taking a point set's bounding box into [0, 1]^2.

    Both axes are shifted by the box minimum and divided by the longer box
    side, so distances are scaled but never distorted.
    """

    x0: float
    y0: float
    scale: float

    @classmethod
    def identity(cls) -> "BoxNormalization":
        return cls(0.0, 0.0, 1.0)

    @classmethod
    def fit(cls, xy: np.ndarray) -> "BoxNormalization":
        lo = xy.min(axis=0)
        span = float(np.max(xy.max(axis=0) - lo))
        if not span > 0.0:
            span = 1.0
        return cls(float(lo[0]), float(lo[1]), span)

    def apply(self, xy: np.ndarray) -> np.ndarray:
        out = np.empty_like(xy, dtype=float)
        out[:, 0] = (xy[:, 0] - self.x0) / self.scale
        out[:, 1] = (xy[:, 1] - self.y0) / self.scale
        return out


@dataclass(frozen=True)
class PolygonBoundary:
    """Closed polygon ring; the last vertex implicitly joins the first."""

    vertices: tuple[Point2D, ...]

    def __init__(self, vertices: Iterable[Sequence[float]]):
        verts = tuple(Point2D(float(x), float(y)) for x, y in vertices)
        if len(verts) >= 2 and verts[0] == verts[-1]:
            verts = verts[:-1]
        if len(verts) < 3:
            raise DegenerateInputError(f"polygon needs at least 3 vertices, got {len(verts)}")
        xy = np.array(verts)
        if not np.all(np.isfinite(xy)):
            raise DegenerateInputError("polygon has non-finite vertices")
        steps = np.hypot(*(np.roll(xy, -1, axis=0) - xy).T)
        if np.any(steps <= DUPLICATE_TOL):
            raise DegenerateInputError("polygon has repeated consecutive vertices")
        object.__setattr__(self, "vertices", verts)
        if self.area == 0.0:
            raise DegenerateInputError("polygon encloses zero area")

    @property
    def xy(self) -> np.ndarray:
        return np.array(self.vertices, dtype=float)

    @property
    def signed_area(self) -> float:
        x, y = self.xy.T
        return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))

    @property
    def area(self) -> float:
        return abs(self.signed_area)

    @property
    def bbox(self) -> tuple[float, float, float, float]:
        xy = self.xy
        return (float(xy[:, 0].min()), float(xy[:, 1].min()),
                float(xy[:, 0].max()), float(xy[:, 1].max()))

    def edges(self) -> Iterable[tuple[Point2D, Point2D]]:
        n = len(self.vertices)
        for i in range(n):
            yield self.vertices[i], self.vertices[(i + 1) % n]


def load_polygon(path) -> PolygonBoundary:
    """Read a ``lon,lat`` per line CSV ring. ``#`` lines and blanks are skipped."""
    verts = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split(",")
        try:
            if len(parts) != 2:
                raise ValueError
            verts.append((float(parts[0]), float(parts[1])))
        except ValueError:
            if not verts and not _is_number(parts[0]):
                continue  # header row
            raise DegenerateInputError(f"{path}:{lineno}: expected 'lon,lat', got {raw!r}") from None
    return PolygonBoundary(verts)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _on_boundary(xy: np.ndarray, poly: np.ndarray) -> np.ndarray:
    px, py = xy[:, 0:1], xy[:, 1:2]
    ax, ay = poly[:, 0], poly[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    ex, ey = bx - ax, by - ay
    t = ((px - ax) * ex + (py - ay) * ey) / (ex * ex + ey * ey)
    t = np.clip(t, 0.0, 1.0)
    d = np.hypot(px - (ax + t * ex), py - (ay + t * ey))
    return np.any(d <= EDGE_TOL, axis=1)


def _ray_cast(xy: np.ndarray, poly: np.ndarray) -> np.ndarray:
    px, py = xy[:, 0:1], xy[:, 1:2]
    ax, ay = poly[:, 0], poly[:, 1]
    bx, by = np.roll(ax, -1), np.roll(ay, -1)
    straddles = (ay > py) != (by > py)
    with np.errstate(divide="ignore", invalid="ignore"):
        x_cross = ax + (py - ay) * (bx - ax) / (by - ay)
    crossings = straddles & (px < x_cross)
    return (np.count_nonzero(crossings, axis=1) % 2) == 1


def points_in_polygon(points, poly: PolygonBoundary, *, strict: bool = False) -> np.ndarray:
    """Vectorised containment. Boundary points count as inside unless ``strict``."""
    xy = as_xy(points)
    verts = poly.xy
    on_edge = _on_boundary(xy, verts)
    inside = _ray_cast(xy, verts)
    if strict:
        return inside & ~on_edge
    return inside | on_edge


def point_in_polygon(p: Sequence[float], poly: PolygonBoundary) -> bool:
    return bool(points_in_polygon([p], poly)[0])


def generate_boundary_points(poly: PolygonBoundary, target_spacing: float) -> list[Point2D]:
    """Vertices plus evenly spaced edge points, no gap wider than ``target_spacing``."""
    if not target_spacing > 0:
        raise ValueError("target_spacing must be positive")
    out = []
    for a, b in poly.edges():
        n = max(1, math.ceil(euclidean_distance(a, b) / target_spacing))
        for i in range(n):
            t = i / n
            out.append(Point2D(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y)))
    return out


def generate_interior_points(poly: PolygonBoundary, count: int, seed: int,
                             *, batch: int = 4096) -> list[Point2D]:
    """Seeded rejection sampling of ``count`` points strictly inside ``poly``."""
    if count < 1:
        raise ValueError("count must be >= 1")
    rng = np.random.default_rng(seed)
    xmin, ymin, xmax, ymax = poly.bbox
    accepted: list[np.ndarray] = []
    have = 0
    drawn_since_accept = 0
    while have < count:
        cand = np.column_stack([rng.uniform(xmin, xmax, batch), rng.uniform(ymin, ymax, batch)])
        keep = cand[points_in_polygon(cand, poly, strict=True)]
        if len(keep):
            accepted.append(keep)
            have += len(keep)
            drawn_since_accept = 0
        else:
            drawn_since_accept += batch
            if drawn_since_accept >= STALL_WINDOW:
                raise SamplingStalledError(
                    f"no point accepted in {drawn_since_accept} draws; polygon is degenerate"
                )
    xy = np.concatenate(accepted)[:count]
    return [Point2D(float(x), float(y)) for x, y in xy]


@dataclass(frozen=True)
class TriangleMesh:
    points: np.ndarray     # (n, 2)
    triangles: np.ndarray  # (m, 3) int, counter-clockwise

    def areas(self) -> np.ndarray:
        a, b, c = (self.points[self.triangles[:, k]] for k in range(3))
        return 0.5 * ((b[:, 0] - a[:, 0]) * (c[:, 1] - a[:, 1])
                      - (b[:, 1] - a[:, 1]) * (c[:, 0] - a[:, 0]))


def triangulate(points) -> TriangleMesh:
    """Delaunay triangulation of distinct, not-all-collinear points."""
    xy = as_xy(points)
    if len(xy) < 3:
        raise DegenerateInputError(f"triangulation needs at least 3 points, got {len(xy)}")
    check_distinct(xy)
    centered = xy - xy.mean(axis=0)
    if np.linalg.matrix_rank(centered, tol=1e-12 * max(1.0, float(np.abs(centered).max()))) < 2:
        raise DegenerateInputError("all points are collinear")
    tri = Delaunay(xy)
    if len(tri.coplanar):
        raise DegenerateInputError(f"{len(tri.coplanar)} points were dropped as near-coincident")
    simplices = tri.simplices.astype(np.int64)
    mesh = TriangleMesh(xy, simplices)
    area = mesh.areas()
    flip = area < 0
    simplices[flip] = simplices[flip][:, [0, 2, 1]]
    simplices = simplices[np.abs(area) > 0]
    return TriangleMesh(xy, simplices)
