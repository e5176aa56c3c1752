"""Deterministic SVG rendering of 2D worlds, roadmaps and paths.

World coordinates are written verbatim into element attributes; a single
group transform flips the y axis. Obstacles are filled, roadmap edges are thin
``<line>`` elements and the solution path is the only ``<path>`` element.
"""

from __future__ import annotations

import os
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .cost_oracle import PolylinePath
from .errors import UnsupportedRenderError
from .geometry import AxisAlignedBox, HalfSpace, Hypersphere, World
from .planner import GeometricGraph

CANVAS_PX = 800
_MARGIN = 0.05


def _num(x: float) -> str:
    return repr(float(x))


def _view_box(world: World, graph, path) -> tuple[np.ndarray, np.ndarray]:
    if world.bounds is not None:
        return world.bounds.min_corner, world.bounds.max_corner
    pts = []
    for ob in world.obstacles:
        if isinstance(ob, Hypersphere):
            pts += [ob.center - ob.radius, ob.center + ob.radius]
        elif isinstance(ob, AxisAlignedBox):
            pts += [ob.min_corner, ob.max_corner]
    if graph is not None:
        pts += list(graph.vertices)
    if path is not None:
        pts += list(path.waypoints)
    if not pts:
        return np.zeros(2), np.ones(2)
    pts = np.array(pts)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    pad = _MARGIN * max(float((hi - lo).max()), 1.0)
    return lo - pad, hi + pad


def _clip_halfplane(poly: list[np.ndarray], normal: np.ndarray, offset: float) -> list[np.ndarray]:
    # Sutherland-Hodgman against {x : normal . x <= offset}.
    out = []
    for i, p in enumerate(poly):
        q = poly[(i + 1) % len(poly)]
        sp, sq = p @ normal - offset, q @ normal - offset
        if sp <= 0:
            out.append(p)
        if (sp < 0 < sq) or (sq < 0 < sp):
            out.append(p + (sp / (sp - sq)) * (q - p))
    return out


def render_svg(world: World, graph: GeometricGraph | None = None,
               path: PolylinePath | None = None,
               clearance_samples: Iterable[tuple[Sequence[float], float]] = (),
               out: str | os.PathLike | None = None) -> str:
    """Render a 2D scene to an SVG document.

    Args:
        clearance_samples: optional ``(state, clearance)`` pairs drawn as
            translucent discs, e.g. the clearance cones along a path.
        out: if given, the document is also written there.

    Raises:
        UnsupportedRenderError: the world is not two-dimensional.
    """
    if world.dimension != 2:
        raise UnsupportedRenderError(f"only 2D scenes can be rendered, got dimension {world.dimension}")
    lo, hi = _view_box(world, graph, path)
    span = hi - lo
    stroke = _num(0.002 * float(span.max()))
    width = CANVAS_PX
    height = max(1, int(round(CANVAS_PX * span[1] / span[0])))

    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" '
        f'viewBox="{_num(lo[0])} {_num(lo[1])} {_num(span[0])} {_num(span[1])}">',
        f'<g transform="matrix(1 0 0 -1 0 {_num(lo[1] + hi[1])})">',
        f'<rect class="bounds" x="{_num(lo[0])}" y="{_num(lo[1])}" width="{_num(span[0])}" '
        f'height="{_num(span[1])}" fill="#ffffff" stroke="#444444" stroke-width="{stroke}"/>',
    ]
    corners = [np.array([lo[0], lo[1]]), np.array([hi[0], lo[1]]),
               np.array([hi[0], hi[1]]), np.array([lo[0], hi[1]])]
    for ob in world.obstacles:
        if isinstance(ob, Hypersphere):
            lines.append(f'<circle class="obstacle" cx="{_num(ob.center[0])}" cy="{_num(ob.center[1])}" '
                         f'r="{_num(ob.radius)}" fill="#9e9e9e"/>')
        elif isinstance(ob, AxisAlignedBox):
            size = ob.max_corner - ob.min_corner
            lines.append(f'<rect class="obstacle" x="{_num(ob.min_corner[0])}" y="{_num(ob.min_corner[1])}" '
                         f'width="{_num(size[0])}" height="{_num(size[1])}" fill="#9e9e9e"/>')
        elif isinstance(ob, HalfSpace):
            poly = _clip_halfplane(corners, ob.normal, ob.offset)
            if len(poly) >= 3:
                pts = " ".join(f"{_num(p[0])},{_num(p[1])}" for p in poly)
                lines.append(f'<polygon class="obstacle" points="{pts}" fill="#9e9e9e"/>')
    for x, d in clearance_samples:
        if np.isfinite(d):
            lines.append(f'<circle class="clearance" cx="{_num(x[0])}" cy="{_num(x[1])}" r="{_num(d)}" '
                         f'fill="#cccccc" fill-opacity="0.4" stroke="none"/>')
    if graph is not None:
        v = graph.vertices
        for i, j, _ in graph.edges():
            lines.append(f'<line class="edge" x1="{_num(v[i][0])}" y1="{_num(v[i][1])}" '
                         f'x2="{_num(v[j][0])}" y2="{_num(v[j][1])}" stroke="#b0c4de" '
                         f'stroke-width="{_num(0.25 * 0.002 * float(span.max()))}"/>')
        for k, p in enumerate(v):
            cls = "start" if k == 0 else "goal" if k == 1 else "vertex"
            lines.append(f'<circle class="{cls}" cx="{_num(p[0])}" cy="{_num(p[1])}" '
                         f'r="{_num(0.003 * float(span.max()))}" fill="#1f3b73"/>')
    if path is not None:
        w = path.waypoints
        d = "M " + " L ".join(f"{_num(p[0])} {_num(p[1])}" for p in w)
        lines.append(f'<path class="solution" d="{d}" fill="none" stroke="#d62728" '
                     f'stroke-width="{_num(2.5 * 0.002 * float(span.max()))}"/>')
    lines += ["</g>", "</svg>", ""]
    doc = "\n".join(lines)
    if out is not None:
        Path(out).write_text(doc, encoding="utf-8")
    return doc
