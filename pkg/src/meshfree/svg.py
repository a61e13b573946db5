"""Standalone SVG contour maps.

Triangles are filled by their mean vertex value through a piecewise-linear
RGB ramp over [field min, field max]:

    0.00 #2c7bb6   0.25 #abd9e9   0.50 #ffffbf   0.75 #fdae61   1.00 #d7191c

Contour lines, the boundary polygon and a min/max legend are drawn on top.
All numbers are written with fixed precision so identical inputs give
identical bytes.
"""
from __future__ import annotations

from xml.sax.saxutils import escape

import numpy as np

from ._io import atomic_write_text
from .contour import MissingMeshError, extract_contours

__all__ = ["RAMP", "ramp_color", "render_contour_svg", "svg_document"]

RAMP = (
    (0.00, (0x2C, 0x7B, 0xB6)),
    (0.25, (0xAB, 0xD9, 0xE9)),
    (0.50, (0xFF, 0xFF, 0xBF)),
    (0.75, (0xFD, 0xAE, 0x61)),
    (1.00, (0xD7, 0x19, 0x1C)),
)
WIDTH = 1000
MARGIN = 40
LEGEND_H = 70


def ramp_color(t: float) -> str:
    t = min(1.0, max(0.0, float(t)))
    for (t0, c0), (t1, c1) in zip(RAMP, RAMP[1:]):
        if t <= t1:
            f = (t - t0) / (t1 - t0)
            rgb = [round(a + f * (b - a)) for a, b in zip(c0, c1)]
            return "#{:02x}{:02x}{:02x}".format(*rgb)
    return "#{:02x}{:02x}{:02x}".format(*RAMP[-1][1])


def svg_document(field, levels, poly, title: str = "") -> str:
    if field.mesh is None:
        raise MissingMeshError("rendering needs a triangulated field")
    segments = extract_contours(field, levels)
    verts = poly.xy
    allxy = np.vstack([field.points, verts])
    xmin, ymin = allxy.min(axis=0)
    xmax, ymax = allxy.max(axis=0)
    xspan = max(xmax - xmin, 1e-12)
    yspan = max(ymax - ymin, 1e-12)
    s = (WIDTH - 2 * MARGIN) / xspan
    map_h = yspan * s
    height = int(round(2 * MARGIN + map_h + LEGEND_H))

    def px(xy):
        xy = np.atleast_2d(xy)
        return np.column_stack([MARGIN + (xy[:, 0] - xmin) * s, MARGIN + (ymax - xy[:, 1]) * s])

    vals = field.values
    vmin, vmax = float(vals.min()), float(vals.max())
    vspan = vmax - vmin
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{WIDTH}" '
        f'height="{height}" viewBox="0 0 {WIDTH} {height}">',
        "<defs>",
        '<clipPath id="region"><path d="{}"/></clipPath>'.format(_ring(px(verts))),
        '<linearGradient id="ramp" x1="0" y1="0" x2="1" y2="0">',
    ]
    out += [f'<stop offset="{t:.2f}" stop-color="{ramp_color(t)}"/>' for t, _ in RAMP]
    out += ["</linearGradient>", "</defs>", '<rect width="100%" height="100%" fill="#ffffff"/>']
    if title:
        out.append(f'<text x="{MARGIN}" y="{MARGIN - 14}" font-family="sans-serif" '
                   f'font-size="16">{escape(title)}</text>')

    out.append('<g id="fill" clip-path="url(#region)">')
    tri = field.mesh.triangles
    mean = vals[tri].mean(axis=1)
    for k in range(len(tri)):
        color = ramp_color((mean[k] - vmin) / vspan if vspan > 0 else 0.5)
        p = px(field.mesh.points[tri[k]])
        out.append(f'<path d="{_ring(p)}" fill="{color}" stroke="{color}" stroke-width="0.5"/>')
    out.append("</g>")

    out.append('<g id="contours" clip-path="url(#region)" fill="none" stroke="#333333" stroke-width="0.8">')
    for level, seg in zip(np.atleast_1d(levels), segments):
        if not len(seg):
            continue
        a, b = px(seg[:, 0]), px(seg[:, 1])
        d = " ".join(f"M{x0:.2f} {y0:.2f}L{x1:.2f} {y1:.2f}" for (x0, y0), (x1, y1) in zip(a, b))
        out.append(f'<path data-level="{float(level):.4f}" d="{d}"/>')
    out.append("</g>")
    out.append(f'<path id="outline" d="{_ring(px(verts))}" fill="none" stroke="#111111" stroke-width="1.5"/>')

    ly = MARGIN + map_h + 20
    lw = WIDTH - 2 * MARGIN
    out += [
        '<g id="legend" font-family="sans-serif" font-size="13">',
        f'<rect x="{MARGIN}" y="{ly:.2f}" width="{lw}" height="16" fill="url(#ramp)" stroke="#111111" stroke-width="0.5"/>',
        f'<text id="legend-min" x="{MARGIN}" y="{ly + 34:.2f}" text-anchor="start">{vmin:.2f}</text>',
        f'<text id="legend-max" x="{WIDTH - MARGIN}" y="{ly + 34:.2f}" text-anchor="end">{vmax:.2f}</text>',
    ]
    if field.units:
        out.append(f'<text x="{WIDTH / 2:.0f}" y="{ly + 34:.2f}" text-anchor="middle">{escape(field.units)}</text>')
    out += ["</g>", "</svg>", ""]
    return "\n".join(out)


def _ring(p: np.ndarray) -> str:
    return "M" + "L".join(f"{x:.2f} {y:.2f}" for x, y in p) + "Z"


def render_contour_svg(field, levels, poly, path, title: str = ""):
    return atomic_write_text(path, svg_document(field, levels, poly, title))
