"""Deterministic SVG 1.1 rendering of planar charts (3x3 matrices, 2D affine chart)."""
from __future__ import annotations

import numpy as np

from .domain import ConvexDomain, Ellipsoid
from .errors import UnsupportedPlotDimension

SIZE = 480.0
MARGIN = 16.0
PALETTE = ("#1b9e77", "#d95f02", "#7570b3", "#e7298a", "#66a61e", "#e6ab02", "#a6761d", "#666666")


def _fmt(x: float) -> str:
    return f"{x:.3f}"


class _Frame:
    """Maps chart coordinates into the pixel box, y axis pointing up."""

    def __init__(self, outline: np.ndarray):
        lo, hi = outline.min(axis=0), outline.max(axis=0)
        self.center = 0.5 * (lo + hi)
        span = float(max(hi - lo)) or 1.0
        self.scale = (SIZE - 2 * MARGIN) / span

    def __call__(self, Y):
        Y = np.atleast_2d(Y)
        px = SIZE / 2 + (Y[:, 0] - self.center[0]) * self.scale
        py = SIZE / 2 - (Y[:, 1] - self.center[1]) * self.scale
        return np.stack([px, py], axis=1)


def _outline(dom: ConvexDomain) -> np.ndarray:
    if isinstance(dom, Ellipsoid):
        B = dom.boundary_sample(256)
    else:
        V = dom.chart.coords(dom.vertices)
        c = V.mean(axis=0)
        order = np.argsort(np.arctan2(V[:, 1] - c[1], V[:, 0] - c[0]))
        return V[order]
    return dom.chart.coords(B)


def _polyline(pts, closed, **attrs):
    body = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
    tag = "polygon" if closed else "polyline"
    extra = "".join(f' {k.replace("_", "-")}="{v}"' for k, v in attrs.items())
    return f'<{tag} points="{body}"{extra}/>'


def _dots(pts, r, fill):
    return [f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{r}" fill="{fill}"/>' for x, y in pts]


def emit_svg(scene, overlays: dict | None = None) -> str:
    """SVG text with the domain outline and optional overlays.

    ``scene`` is a parsed Scene or a bare domain.
    Recognized overlay keys (all values are chart lifts): ``points``,
    ``orbit``, ``limitset``, ``family`` (list of generator arrays) and
    ``quotient`` (a pair ``(points, class_ids)``).
    """
    dom: ConvexDomain = getattr(scene, "domain", scene)
    if dom.dim != 3:
        raise UnsupportedPlotDimension(f"plots need a 2-dimensional chart, got {dom.dim - 1}")
    overlays = overlays or {}
    outline = _outline(dom)
    fr = _Frame(outline)
    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{int(SIZE)}" height="{int(SIZE)}" viewBox="0 0 {int(SIZE)} {int(SIZE)}">',
        f'<rect width="{int(SIZE)}" height="{int(SIZE)}" fill="white"/>',
        '<g id="domain">',
        _polyline(fr(outline), True, fill="#f4f4f4", stroke="black", stroke_width="1"),
        "</g>",
    ]
    coords = dom.chart.coords
    if "family" in overlays:
        parts.append('<g id="family">')
        for L in overlays["family"]:
            P = fr(coords(L))
            if len(P) == 2:
                parts.append(_polyline(P, False, fill="none", stroke="#7570b3", stroke_width="0.8"))
            else:
                c = P.mean(axis=0)
                P = P[np.argsort(np.arctan2(P[:, 1] - c[1], P[:, 0] - c[0]))]
                parts.append(_polyline(P, True, fill="#7570b3", fill_opacity="0.2", stroke="#7570b3", stroke_width="0.8"))
        parts.append("</g>")
    for key, r, fill in (("orbit", 2, "#1f78b4"), ("limitset", 1.5, "#e31a1c"), ("points", 3, "black")):
        if key in overlays and len(overlays[key]):
            parts.append(f'<g id="{key}">')
            parts.extend(_dots(fr(coords(overlays[key])), r, fill))
            parts.append("</g>")
    if "quotient" in overlays:
        pts, ids = overlays["quotient"]
        parts.append('<g id="quotient">')
        for (x, y), c in zip(fr(coords(pts)), ids):
            parts.extend(_dots([(x, y)], 2.5, PALETTE[int(c) % len(PALETTE)]))
        parts.append("</g>")
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
