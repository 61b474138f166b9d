"""Deterministic SVG drawings of BEV frames.

The drawing puts the ego forward axis up the page and its left to the
left, so image x = -y and image y = -x (times the scale). Numbers are
written with two decimals; the same frame always yields the same bytes.
"""

from __future__ import annotations

import math
from typing import Sequence
from xml.sax.saxutils import escape

from .camera import GroundPoint
from .model import BevBox
from .synth import EgoFootprint

SCALE = 40.0  # px per meter
MARGIN = 1.0  # m around the content
MIN_HALF_EXTENT = 8.0  # m, so that sparse frames keep a readable zoom


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


class _View:
    def __init__(self, points: Sequence[tuple[float, float]]):
        xs = [p[0] for p in points]
        ys = [p[1] for p in points]
        self.x_max = max(max(xs) + MARGIN, MIN_HALF_EXTENT)
        self.x_min = min(min(xs) - MARGIN, -MIN_HALF_EXTENT)
        self.y_max = max(max(ys) + MARGIN, MIN_HALF_EXTENT)
        self.y_min = min(min(ys) - MARGIN, -MIN_HALF_EXTENT)
        self.width = (self.y_max - self.y_min) * SCALE
        self.height = (self.x_max - self.x_min) * SCALE

    def __call__(self, x: float, y: float) -> tuple[str, str]:
        return _f((self.y_max - y) * SCALE), _f((self.x_max - x) * SCALE)


def _polygon(view: _View, pts, cls: str) -> str:
    coords = " ".join(",".join(view(x, y)) for x, y in pts)
    return f'<polygon class="{cls}" points="{coords}"/>'


def render_svg(boxes: Sequence[BevBox], frame_id: int | None = None, ego: EgoFootprint = EgoFootprint()) -> str:
    """One frame as an SVG document: ego marker, target rectangles, heading arrows, id labels."""
    ego_ring = [(ego.x_max, ego.y_max), (ego.x_min, ego.y_max), (ego.x_min, ego.y_min), (ego.x_max, ego.y_min)]
    points = list(ego_ring)
    for b in boxes:
        points.extend((c.x, c.y) for c in b.corners)
    view = _View(points)

    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(view.width)}" height="{_f(view.height)}" '
        f'viewBox="0 0 {_f(view.width)} {_f(view.height)}">',
        "<defs>",
        '<marker id="arrow" viewBox="0 0 10 10" refX="9" refY="5" markerWidth="6" markerHeight="6" orient="auto">'
        '<path d="M0,0 L10,5 L0,10 z" fill="#c0392b"/></marker>',
        "</defs>",
        "<style>"
        ".ego{fill:#95a5a6;stroke:#2c3e50;stroke-width:2}"
        ".target{fill:#5dade2;fill-opacity:0.35;stroke:#1b4f72;stroke-width:2}"
        ".heading{stroke:#c0392b;stroke-width:2.5;marker-end:url(#arrow)}"
        ".label{font-family:monospace;font-size:14px;text-anchor:middle;fill:#17202a}"
        "</style>",
        f'<rect x="0" y="0" width="{_f(view.width)}" height="{_f(view.height)}" fill="#ffffff"/>',
    ]
    if frame_id is not None:
        out.append(f'<text class="label" x="{_f(view.width / 2)}" y="18">frame {frame_id}</text>')
    out.append(_polygon(view, ego_ring, "ego"))
    ex, ey = view((ego.x_min + ego.x_max) / 2, 0.0)
    out.append(f'<text class="label" x="{ex}" y="{ey}">ego</text>')

    for b in sorted(boxes, key=lambda b: (b.obj_id is None, b.obj_id or 0)):
        ring = [(b.A.x, b.A.y), (b.B.x, b.B.y), (b.D.x, b.D.y), (b.C.x, b.C.y)]
        out.append(f'<g class="box" id="obj-{b.obj_id}">')
        out.append(_polygon(view, ring, "target"))
        front = GroundPoint((b.A.x + b.C.x) / 2, (b.A.y + b.C.y) / 2)
        reach = 0.8 * math.hypot(front.x - b.center.x, front.y - b.center.y)
        tip = (b.center.x + reach * math.cos(b.heading), b.center.y + reach * math.sin(b.heading))
        x1, y1 = view(b.center.x, b.center.y)
        x2, y2 = view(*tip)
        out.append(f'<line class="heading" x1="{x1}" y1="{y1}" x2="{x2}" y2="{y2}"/>')
        lx, ly = view(b.center.x, b.center.y)
        out.append(f'<text class="label" x="{lx}" y="{ly}" dy="-6">{escape(str(b.obj_id))}</text>')
        out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"
