"""Gravity model (inverse distance weighting, the "1/R method").

    D(q) = sum_i D_i / d_i**p  /  sum_i 1 / d_i**p

with ``p = 2`` by default. The sum runs over every datum, or over the ``k``
nearest when a neighbor count is configured.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .geometry import BoxNormalization, as_xy
from .rbf import EmptyDataError, ScatterSet

__all__ = [
    "IdwConfig",
    "EmptyDataError",
    "COINCIDENCE_TOL",
    "idw_weights",
    "idw_interpolate",
    "idw_interpolate_many",
]

#: Normalized distance at or below which a query takes the datum's value.
COINCIDENCE_TOL = 1e-12


@dataclass(frozen=True)
class IdwConfig:
    power: float = 2.0
    #: ``None`` uses all points; an integer uses the k nearest.
    neighbors: Optional[int] = None

    def __post_init__(self):
        if not (math.isfinite(self.power) and self.power > 0):
            raise ValueError(f"power must be positive, got {self.power!r}")
        if self.neighbors is not None and self.neighbors < 1:
            raise ValueError(f"neighbor count must be >= 1, got {self.neighbors!r}")


class _Prepared:
    __slots__ = ("xy", "values", "norm")

    def __init__(self, data: ScatterSet | None):
        if data is None:
            raise EmptyDataError("gravity interpolation needs at least one datum")
        self.norm = BoxNormalization.fit(data.points)
        self.xy = self.norm.apply(data.points)
        self.values = np.asarray(data.values, dtype=float)


def _neighbors(prep: _Prepared, q: np.ndarray, config: IdwConfig):
    d = np.hypot(prep.xy[:, 0] - q[0], prep.xy[:, 1] - q[1])
    if config.neighbors is None or config.neighbors >= len(d):
        return np.arange(len(d)), d
    # stable sort: equal distances keep the lower index
    idx = np.sort(np.argsort(d, kind="stable")[: config.neighbors])
    return idx, d[idx]


def _weights(d: np.ndarray, power: float) -> np.ndarray:
    hit = np.flatnonzero(d <= COINCIDENCE_TOL)
    if len(hit):
        w = np.zeros_like(d)
        w[hit[0]] = 1.0
        return w
    inv = d ** -power
    return inv / inv.sum()


def _one(prep: _Prepared, q: np.ndarray, config: IdwConfig) -> float:
    idx, d = _neighbors(prep, q, config)
    vals = prep.values[idx]
    hit = np.flatnonzero(d <= COINCIDENCE_TOL)
    if len(hit):
        return float(vals[hit[0]])
    w = _weights(d, config.power)
    # rounding must not push a convex combination outside the value range
    return float(np.clip(np.dot(w, vals), vals.min(), vals.max()))


def idw_weights(data: ScatterSet, query, config: IdwConfig = IdwConfig()):
    """Indices of the neighbor set and their normalized weights (summing to 1)."""
    prep = _Prepared(data)
    q = prep.norm.apply(as_xy([query], name="query"))[0]
    idx, d = _neighbors(prep, q, config)
    return idx, _weights(d, config.power)


def idw_interpolate(data: ScatterSet, query, config: IdwConfig = IdwConfig()) -> float:
    prep = _Prepared(data)
    return _one(prep, prep.norm.apply(as_xy([query], name="query"))[0], config)


def idw_interpolate_many(data: ScatterSet, queries, config: IdwConfig = IdwConfig()) -> np.ndarray:
    prep = _Prepared(data)
    q = as_xy(queries, name="queries")
    if len(q) == 0:
        return np.empty(0)
    qn = prep.norm.apply(q)
    return np.array([_one(prep, row, config) for row in qn])
