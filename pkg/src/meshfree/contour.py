"""Marching-triangles contour extraction on a triangulated scalar field."""
from __future__ import annotations

from typing import Sequence

import numpy as np

__all__ = ["MissingMeshError", "NUDGE", "extract_contours", "default_levels"]

#: Vertices lying exactly on a level move up by this fraction of the value range.
NUDGE = 1e-9

_EDGES = ((0, 1), (1, 2), (2, 0))


class MissingMeshError(ValueError):
    pass


def default_levels(values, count: int = 10) -> np.ndarray:
    """``count`` evenly spaced levels strictly inside the value range."""
    lo, hi = float(np.min(values)), float(np.max(values))
    if hi == lo:
        return np.array([lo])
    return lo + (hi - lo) * np.arange(1, count + 1) / (count + 1)


def _check_levels(levels) -> np.ndarray:
    lv = np.asarray(levels, dtype=float).reshape(-1)
    if not np.all(np.isfinite(lv)):
        raise ValueError("contour levels must be finite")
    if np.any(np.diff(lv) <= 0):
        raise ValueError("contour levels must be strictly increasing")
    return lv


def extract_contours(field, levels: Sequence[float]) -> list[np.ndarray]:
    """Line segments where the piecewise-linear field equals each level.

    Returns one ``(k, 2, 2)`` array per level: ``k`` segments, each a pair of
    (x, y) endpoints lying on triangle edges.
    """
    if field.mesh is None:
        raise MissingMeshError("contour extraction needs a triangulated field")
    lv = _check_levels(levels)
    pts = field.mesh.points
    tri = field.mesh.triangles
    vals = np.asarray(field.values, dtype=float)
    span = float(vals.max() - vals.min()) if len(vals) else 0.0
    out = []
    for level in lv:
        v = vals[tri]  # (m, 3)
        v = np.where(v == level, v + NUDGE * span, v)
        above = v > level
        crossing = ~(np.all(above, axis=1) | np.all(~above, axis=1))
        if span == 0.0 or not np.any(crossing):
            out.append(np.empty((0, 2, 2)))
            continue
        t_idx = np.flatnonzero(crossing)
        vc = v[t_idx]
        pc = pts[tri[t_idx]]  # (k, 3, 2)
        ends = []
        for a, b in _EDGES:
            cut = above[t_idx, a] != above[t_idx, b]
            t = (level - vc[:, a]) / np.where(cut, vc[:, b] - vc[:, a], 1.0)
            p = pc[:, a] + t[:, None] * (pc[:, b] - pc[:, a])
            ends.append((cut, p))
        seg = np.empty((len(t_idx), 2, 2))
        filled = np.zeros(len(t_idx), dtype=int)
        for cut, p in ends:
            slot = np.minimum(filled, 1)
            rows = np.flatnonzero(cut)
            seg[rows, slot[rows]] = p[rows]
            filled += cut
        out.append(seg)
    return out
