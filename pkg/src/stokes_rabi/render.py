"""Deterministic SVG pictures of a Stokes graph and its faces.

Trajectories are drawn as ``<path class="trajectory">``, zeros as dots,
poles as crosses. Faces are tinted by domain type through nested clip
paths, one per boundary walk, so multiply connected faces need no
polygon clipping of our own.
"""

from __future__ import annotations

import numpy as np

from .qdiff_core import POLES
from .stokes_graph import DomainConfig, StokesGraph, _Geometry, _signed_area

__all__ = ["render_svg", "FACE_COLOURS"]

FACE_COLOURS = {
    "end": "#f4e3a1",
    "strip": "#a9cbe8",
    "ring": "#f2b8c6",
    "circle": "#b9e0b0",
}

SIZE = 600
MAX_POINTS = 400


def _fmt(v: float) -> str:
    s = f"{v:.3f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


class _Frame:
    def __init__(self, half_width: float):
        self.r = half_width
        self.s = SIZE / (2.0 * half_width)

    def xy(self, z: complex) -> tuple[str, str]:
        return _fmt((z.real + self.r) * self.s), _fmt((self.r - z.imag) * self.s)

    def path(self, pts, close: bool = False) -> str:
        pts = np.asarray(pts, dtype=complex)
        if len(pts) > MAX_POINTS:
            idx = np.unique(np.linspace(0, len(pts) - 1, MAX_POINTS).round().astype(int))
            pts = pts[idx]
        cmds = []
        for i, z in enumerate(pts):
            x, y = self.xy(complex(z))
            cmds.append(f"{'M' if i == 0 else 'L'}{x} {y}")
        if close:
            cmds.append("Z")
        return " ".join(cmds)


def _half_width(graph: StokesGraph | None) -> float:
    r = 1.5
    if graph is not None:
        for v in graph.vertices.values():
            if v.position is not None:
                r = max(r, abs(v.position))
    return round(1.4 * r, 1)


def render_svg(
    graph: StokesGraph | None,
    config: DomainConfig | None = None,
    labels: bool = False,
    title: str = "",
) -> str:
    """SVG 1.1 document for ``graph``.

    ``graph`` may be None (or edgeless) to draw just the axes and poles.
    Faces are tinted only when ``config`` is given and classified.
    """
    frame = _Frame(_half_width(graph))
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{SIZE}" height="{SIZE}" '
        f'viewBox="0 0 {SIZE} {SIZE}">',
    ]
    if title:
        out.append(f"<title>{_escape(title)}</title>")
    out.append(f'<rect class="background" x="0" y="0" width="{SIZE}" height="{SIZE}" fill="white"/>')
    if graph is not None and graph.edges and config is not None:
        out.extend(_faces(graph, config, frame))
    out.extend(_axes(frame))
    if graph is not None:
        for e in graph.edges:
            out.append(
                f'<path class="trajectory" id="edge{e.id}" d="{frame.path(e.points)}" '
                'fill="none" stroke="black" stroke-width="1.5"/>'
            )
            if labels:
                mid = complex(e.points[len(e.points) // 2])
                x, y = frame.xy(mid)
                out.append(f'<text class="label" x="{x}" y="{y}" font-size="10">{_escape(e.label)}</text>')
        for v in sorted(graph.vertices.values(), key=lambda v: v.id):
            if v.kind == "zero":
                x, y = frame.xy(v.position)
                out.append(f'<circle class="zero" id="{v.id}" cx="{x}" cy="{y}" r="4" fill="black"/>')
    for k in POLES:
        x, y = frame.xy(complex(k))
        fx, fy = float(x), float(y)
        d = f"M{_fmt(fx - 5)} {_fmt(fy - 5)} L{_fmt(fx + 5)} {_fmt(fy + 5)} M{_fmt(fx - 5)} {_fmt(fy + 5)} L{_fmt(fx + 5)} {_fmt(fy - 5)}"
        out.append(f'<path class="pole" d="{d}" stroke="crimson" stroke-width="2" fill="none"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def _axes(frame: _Frame) -> list[str]:
    r = frame.r
    x0, y0 = frame.xy(complex(-r, 0))
    x1, y1 = frame.xy(complex(r, 0))
    x2, y2 = frame.xy(complex(0, r))
    x3, y3 = frame.xy(complex(0, -r))
    style = 'stroke="#999999" stroke-width="0.5"'
    return [
        f'<line class="axis" x1="{x0}" y1="{y0}" x2="{x1}" y2="{y1}" {style}/>',
        f'<line class="axis" x1="{x2}" y1="{y2}" x2="{x3}" y2="{y3}" {style}/>',
    ]


def _faces(graph: StokesGraph, config: DomainConfig, frame: _Frame) -> list[str]:
    geo = _Geometry(graph)
    big = 10.0 * max(frame.r, geo.radius)
    box = [complex(-big, -big), complex(big, -big), complex(big, big), complex(-big, big)]
    defs, body = [], []
    for i, face in enumerate(config.faces):
        colour = FACE_COLOURS.get(face.domain.lower())
        if colour is None:
            continue
        clips = []
        for j, walk in enumerate(face.walks):
            poly = geo.polygon(walk)
            cid = f"f{i}w{j}"
            d = frame.path(poly, close=True)
            if _signed_area(poly) < 0:
                # a clockwise walk bounds the region outside it
                d = frame.path(box, close=True) + " " + d
            defs.append(f'<clipPath id="{cid}"><path d="{d}" clip-rule="evenodd"/></clipPath>')
            clips.append(cid)
        rect = f'<rect class="face face-{face.domain.lower()}" x="0" y="0" width="{SIZE}" height="{SIZE}" fill="{colour}"/>'
        for cid in reversed(clips):
            rect = f'<g clip-path="url(#{cid})">{rect}</g>'
        body.append(rect)
    return (["<defs>"] + defs + ["</defs>"] if defs else []) + body


def _escape(s: str) -> str:
    return s.replace("&", "&amp;").replace("<", "&lt;").replace(">", "&gt;").replace('"', "&quot;")
