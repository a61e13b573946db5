"""Station-to-mesh temperature interpolation for a state-sized region.

Station files use a two-file CSV scheme, both UTF-8 with a header row::

    stations.csv   station_id,lon,lat
    readings.csv   station_id,hour_index,temperature_f[,extra columns...]

``hour_index`` is 1-based and each station must list hours 1..n without
gaps. Extra reading columns (wind, humidity, ...) are ignored.
"""
from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from . import gravity, rbf
from ._io import atomic_write_text
from .geometry import (
    DUPLICATE_TOL,
    Point2D,
    PolygonBoundary,
    TriangleMesh,
    as_xy,
    generate_boundary_points,
    generate_interior_points,
    triangulate,
)
from .kernels import DEFAULT_EPSILON, DEFAULT_KERNEL, KernelKind, check_epsilon, parse_kernel

__all__ = [
    "StationRecord",
    "ScalarField",
    "RbfMethod",
    "GravityMethod",
    "SyntheticClimate",
    "StationFileError",
    "DuplicateStationError",
    "HourOutOfRangeError",
    "OutOfRangeReadingWarning",
    "PLAUSIBLE_RANGE_F",
    "load_stations",
    "write_stations",
    "range_violations",
    "synthesize_stations",
    "build_mesh",
    "interpolate_hour",
    "export_field_csv",
    "read_field_csv",
]

PLAUSIBLE_RANGE_F = (-80.0, 150.0)
MERRA_STEP = (0.625, 0.5)


class StationFileError(ValueError):
    pass


class DuplicateStationError(StationFileError):
    pass


class HourOutOfRangeError(IndexError):
    pass


class OutOfRangeReadingWarning(UserWarning):
    pass


@dataclass(frozen=True)
class StationRecord:
    station_id: str
    location: Point2D
    series: tuple[float, ...]

    def __post_init__(self):
        if not self.station_id:
            raise ValueError("station id must be non-empty")
        object.__setattr__(self, "location", Point2D(*map(float, self.location)))
        object.__setattr__(self, "series", tuple(float(v) for v in self.series))
        if not self.series:
            raise ValueError(f"station {self.station_id}: empty series")
        if not all(math.isfinite(v) for v in self.series):
            raise ValueError(f"station {self.station_id}: non-finite reading")
        if not all(math.isfinite(c) for c in self.location):
            raise ValueError(f"station {self.station_id}: non-finite location")


@dataclass(frozen=True)
class ScalarField:
    points: np.ndarray
    values: np.ndarray
    mesh: Optional[TriangleMesh] = None
    units: str = ""

    def __post_init__(self):
        pts = as_xy(self.points)
        vals = np.asarray(self.values, dtype=float).reshape(-1)
        if len(pts) != len(vals):
            raise ValueError(f"{len(pts)} points but {len(vals)} values")
        if self.mesh is not None and not np.array_equal(self.mesh.points, pts):
            raise ValueError("mesh points differ from field points")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "values", vals)


@dataclass(frozen=True)
class RbfMethod:
    kernel: KernelKind = DEFAULT_KERNEL
    epsilon: float = DEFAULT_EPSILON
    name = "rbf"

    def __post_init__(self):
        object.__setattr__(self, "kernel", parse_kernel(self.kernel))
        object.__setattr__(self, "epsilon", check_epsilon(self.epsilon))


@dataclass(frozen=True)
class GravityMethod:
    config: gravity.IdwConfig = field(default_factory=gravity.IdwConfig)
    name = "gravity"


Method = Union[RbfMethod, GravityMethod]


# -- station files ----------------------------------------------------------

def _rows(path, required: Sequence[str]):
    text = Path(path).read_text(encoding="utf-8-sig")
    reader = csv.reader(io.StringIO(text))
    try:
        header = [h.strip() for h in next(reader)]
    except StopIteration:
        raise StationFileError(f"{path}: empty file, header row required") from None
    missing = [c for c in required if c not in header]
    if missing:
        raise StationFileError(f"{path}:1: header lacks column(s) {', '.join(missing)}")
    idx = [header.index(c) for c in required]
    for row in reader:
        lineno = reader.line_num
        if not row or all(not c.strip() for c in row):
            continue
        if len(row) < len(header):
            raise StationFileError(f"{path}:{lineno}: expected {len(header)} fields, got {len(row)}")
        yield lineno, [row[i].strip() for i in idx]


def _float(path, lineno, text, what):
    try:
        v = float(text)
    except ValueError:
        raise StationFileError(f"{path}:{lineno}: bad {what} {text!r}") from None
    if not math.isfinite(v):
        raise StationFileError(f"{path}:{lineno}: non-finite {what}")
    return v


def range_violations(records: Sequence[StationRecord],
                     bounds: tuple[float, float] = PLAUSIBLE_RANGE_F):
    """(station_id, hour_index, value) for every reading outside ``bounds``."""
    lo, hi = bounds
    return [(r.station_id, h, v) for r in records
            for h, v in enumerate(r.series, 1) if not lo <= v <= hi]


def load_stations(stations_path, readings_path) -> list[StationRecord]:
    """Read station locations and hourly readings.

    Out-of-range readings are kept and reported with one
    :class:`OutOfRangeReadingWarning` listing them.
    """
    locs: dict[str, Point2D] = {}
    for lineno, (sid, lon, lat) in _rows(stations_path, ("station_id", "lon", "lat")):
        if not sid:
            raise StationFileError(f"{stations_path}:{lineno}: empty station_id")
        if sid in locs:
            raise DuplicateStationError(f"{stations_path}:{lineno}: duplicate station {sid!r}")
        locs[sid] = Point2D(_float(stations_path, lineno, lon, "lon"),
                            _float(stations_path, lineno, lat, "lat"))
    if not locs:
        raise StationFileError(f"{stations_path}: no stations")

    readings: dict[str, dict[int, float]] = {sid: {} for sid in locs}
    for lineno, (sid, hour, temp) in _rows(readings_path,
                                           ("station_id", "hour_index", "temperature_f")):
        if sid not in readings:
            raise StationFileError(f"{readings_path}:{lineno}: unknown station {sid!r}")
        try:
            h = int(hour)
        except ValueError:
            raise StationFileError(f"{readings_path}:{lineno}: bad hour_index {hour!r}") from None
        if h < 1:
            raise StationFileError(f"{readings_path}:{lineno}: hour_index must be >= 1")
        if h in readings[sid]:
            raise StationFileError(f"{readings_path}:{lineno}: repeated hour {h} for {sid!r}")
        readings[sid][h] = _float(readings_path, lineno, temp, "temperature_f")

    records = []
    for sid, loc in locs.items():
        hours = readings[sid]
        if not hours:
            raise StationFileError(f"{readings_path}: no readings for station {sid!r}")
        n = max(hours)
        if len(hours) != n:
            gap = min(set(range(1, n + 1)) - set(hours))
            raise StationFileError(f"{readings_path}: station {sid!r} is missing hour {gap}")
        records.append(StationRecord(sid, loc, tuple(hours[h] for h in range(1, n + 1))))

    xy = np.array([r.location for r in records])
    for i in range(len(xy)):
        d = np.hypot(*(xy[i + 1:] - xy[i]).T)
        if np.any(d < DUPLICATE_TOL):
            j = i + 1 + int(np.argmax(d < DUPLICATE_TOL))
            raise DuplicateStationError(
                f"stations {records[i].station_id!r} and {records[j].station_id!r} share a location")

    bad = range_violations(records)
    if bad:
        shown = ", ".join(f"{s}@{h}={v:g}" for s, h, v in bad[:10])
        more = f" (+{len(bad) - 10} more)" if len(bad) > 10 else ""
        warnings.warn(f"{len(bad)} reading(s) outside {PLAUSIBLE_RANGE_F} F: {shown}{more}",
                      OutOfRangeReadingWarning, stacklevel=2)
    return records


def write_stations(records: Sequence[StationRecord], stations_path, readings_path) -> None:
    s = io.StringIO()
    w = csv.writer(s, lineterminator="\n")
    w.writerow(["station_id", "lon", "lat"])
    for r in records:
        w.writerow([r.station_id, repr(r.location.x), repr(r.location.y)])
    atomic_write_text(stations_path, s.getvalue())
    s = io.StringIO()
    w = csv.writer(s, lineterminator="\n")
    w.writerow(["station_id", "hour_index", "temperature_f"])
    for r in records:
        for h, v in enumerate(r.series, 1):
            w.writerow([r.station_id, h, repr(v)])
    atomic_write_text(readings_path, s.getvalue())


# -- synthetic stations -----------------------------------------------------

@dataclass(frozen=True)
class SyntheticClimate:
    """Smooth hourly temperature model, degrees Fahrenheit.

    T = base + lon_gradient*(lon - lon_c) + lat_gradient*(lat - lat_c)
        + diurnal_amplitude*cos(2*pi*(clock_hour - peak_hour)/24) + noise

    with (lon_c, lat_c) the polygon's bounding-box center, clock hour
    ``(hour_index - 1) % 24`` and noise uniform on [-noise, noise].
    """

    base_f: float = 58.0
    lon_gradient: float = 1.2     # F per degree east
    lat_gradient: float = -2.5    # F per degree north
    diurnal_amplitude: float = 9.0
    peak_hour: float = 15.0
    noise: float = 0.5

    def __post_init__(self):
        if not 0.0 <= self.noise <= 0.5:
            raise ValueError("noise amplitude must lie in [0, 0.5] F")

    def mean(self, lon, lat, hour_index, center):
        clock = (np.asarray(hour_index) - 1) % 24
        return (self.base_f
                + self.lon_gradient * (np.asarray(lon) - center[0])
                + self.lat_gradient * (np.asarray(lat) - center[1])
                + self.diurnal_amplitude * np.cos(2 * np.pi * (clock - self.peak_hour) / 24.0))


def _segments_cross(p1, p2, q1, q2) -> bool:
    def orient(a, b, c):
        return (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])

    d1, d2 = orient(q1, q2, p1), orient(q1, q2, p2)
    d3, d4 = orient(p1, p2, q1), orient(p1, p2, q2)
    return (d1 * d2 <= 0) and (d3 * d4 <= 0) and not (d1 == d2 == 0)


def _cell_touches(poly: PolygonBoundary, x0, y0, x1, y1) -> bool:
    from .geometry import points_in_polygon

    verts = poly.xy
    if np.any((verts[:, 0] >= x0) & (verts[:, 0] <= x1) & (verts[:, 1] >= y0) & (verts[:, 1] <= y1)):
        return True
    corners = np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]])
    if np.any(points_in_polygon(corners, poly)):
        return True
    for a, b in poly.edges():
        for k in range(4):
            if _segments_cross(a, b, corners[k], corners[(k + 1) % 4]):
                return True
    return False


def synthesize_stations(poly: PolygonBoundary, lon_step: float = MERRA_STEP[0],
                        lat_step: float = MERRA_STEP[1], hours: int = 24, seed: int = 1,
                        climate: SyntheticClimate = SyntheticClimate()) -> list[StationRecord]:
    """Reanalysis-style station grid over ``poly`` with synthetic readings.

    Nodes sit on the global lattice ``(-180 + i*lon_step, -90 + j*lat_step)``
    and a node is kept when its grid cell (node +- half a step) touches the
    polygon. Stations are ordered south to north, then west to east.
    """
    if not (lon_step > 0 and lat_step > 0):
        raise ValueError("grid steps must be positive")
    if hours < 1:
        raise ValueError("hours must be >= 1")
    xmin, ymin, xmax, ymax = poly.bbox
    hx, hy = lon_step / 2, lat_step / 2
    i0 = math.floor((xmin - hx + 180.0) / lon_step)
    i1 = math.ceil((xmax + hx + 180.0) / lon_step)
    j0 = math.floor((ymin - hy + 90.0) / lat_step)
    j1 = math.ceil((ymax + hy + 90.0) / lat_step)
    nodes = []
    for j in range(j0, j1 + 1):
        lat = -90.0 + j * lat_step
        for i in range(i0, i1 + 1):
            lon = -180.0 + i * lon_step
            if _cell_touches(poly, lon - hx, lat - hy, lon + hx, lat + hy):
                nodes.append((lon, lat))
    center = ((xmin + xmax) / 2, (ymin + ymax) / 2)
    rng = np.random.default_rng(seed)
    hour_idx = np.arange(1, hours + 1)
    records = []
    for k, (lon, lat) in enumerate(nodes, 1):
        series = climate.mean(lon, lat, hour_idx, center)
        if climate.noise:
            series = series + rng.uniform(-climate.noise, climate.noise, hours)
        records.append(StationRecord(f"STN{k:03d}", Point2D(lon, lat), tuple(series.tolist())))
    return records


# -- interpolation ----------------------------------------------------------

def build_mesh(poly: PolygonBoundary, count: int, seed: int,
               boundary_spacing: float) -> TriangleMesh:
    """Delaunay mesh over ``count`` random interior points plus boundary samples.

    Interior points come first in the point order.
    """
    interior = generate_interior_points(poly, count, seed)
    border = generate_boundary_points(poly, boundary_spacing)
    return triangulate(np.array(interior + border))


def interpolate_hour(stations: Sequence[StationRecord], hour_index: int, method: Method,
                     targets, mesh: Optional[TriangleMesh] = None) -> ScalarField:
    """Interpolate one hour's readings onto ``targets`` (order preserved)."""
    if not stations:
        raise rbf.EmptyDataError("no stations")
    shortest = min(stations, key=lambda r: len(r.series))
    if not 1 <= hour_index <= len(shortest.series):
        raise HourOutOfRangeError(
            f"hour {hour_index} outside 1..{len(shortest.series)} "
            f"(shortest series: station {shortest.station_id!r})")
    data = rbf.ScatterSet(np.array([r.location for r in stations]),
                          np.array([r.series[hour_index - 1] for r in stations]), units="F")
    q = as_xy(targets, name="targets")
    if isinstance(method, RbfMethod):
        values = rbf.predict_many(rbf.fit(data, method.kernel, method.epsilon), q)
    elif isinstance(method, GravityMethod):
        values = gravity.idw_interpolate_many(data, q, method.config)
    else:
        raise TypeError(f"unknown method {method!r}")
    return ScalarField(q, values, mesh, units="F")


def export_field_csv(field: ScalarField, path) -> Path:
    s = io.StringIO()
    w = csv.writer(s, lineterminator="\n")
    w.writerow(["lon", "lat", "value"])
    for (x, y), v in zip(field.points.tolist(), field.values.tolist()):
        w.writerow([repr(x), repr(y), repr(v)])
    return atomic_write_text(path, s.getvalue())


def read_field_csv(path) -> ScalarField:
    xs, vs = [], []
    for lineno, (lon, lat, val) in _rows(path, ("lon", "lat", "value")):
        xs.append((_float(path, lineno, lon, "lon"), _float(path, lineno, lat, "lat")))
        vs.append(_float(path, lineno, val, "value"))
    return ScalarField(np.array(xs).reshape(-1, 2), np.array(vs))
