"""Embedded graph of critical trajectories and its complementary domains.

Vertices are the zeros, the poles that trajectories run into, and a single
vertex at infinity. The cyclic order of edges around each vertex comes from
tangent angles (finite vertices) or from the horizontal offset of the
vertical asymptotes (infinity). Faces are traced from that rotation system
per connected component. Components nested inside one another are merged
by testing which face of every other component contains a sample point.
"""

from __future__ import annotations

import cmath
import math
from collections import Counter
from dataclasses import dataclass, field

import numpy as np

from .errors import DanglingEdge, EmbeddingError
from .qdiff_core import POLES, QuadDiff
from .tracer import Terminal, Trajectory, critical_directions

__all__ = [
    "Vertex",
    "Edge",
    "StokesGraph",
    "Face",
    "DomainConfig",
    "StructureReport",
    "build_graph",
    "enumerate_faces",
    "classify_face",
    "domain_config",
    "structure_checks",
    "graph_to_json",
    "SCHEMA_VERSION",
    "STRIP_ORDER",
]

SCHEMA_VERSION = "1.0"
INF = "inf"

# ordering of strip vertices used to canonicalize labels
STRIP_ORDER = {"-i inf": 0, "-1": 1, "1": 2, "i inf": 3}


@dataclass
class Vertex:
    id: str
    kind: str  # "zero", "pole" or "infinity"
    position: complex | None
    order: int = 0


@dataclass
class Edge:
    id: int
    tail: str
    head: str
    points: np.ndarray
    label: str
    trajectory: Trajectory | None = None
    # asymptote offset for edges ending at infinity, and whether it goes up
    kappa: float | None = None
    upward: bool | None = None


@dataclass
class StokesGraph:
    vertices: dict[str, Vertex]
    edges: list[Edge]
    rotation: dict[str, list[tuple[int, int]]]
    components: int
    qd: QuadDiff | None = None

    @property
    def V(self) -> int:
        return len(self.vertices)

    @property
    def E(self) -> int:
        return len(self.edges)

    def half_edge_points(self, h: tuple[int, int]) -> np.ndarray:
        e = self.edges[h[0]]
        return e.points if h[1] == 0 else e.points[::-1]

    def origin(self, h: tuple[int, int]) -> str:
        e = self.edges[h[0]]
        return e.tail if h[1] == 0 else e.head

    def target(self, h: tuple[int, int]) -> str:
        e = self.edges[h[0]]
        return e.head if h[1] == 0 else e.tail


@dataclass
class Face:
    walks: list[list[tuple[int, int]]]
    sample: complex | None
    poles_inside: list[float]
    corners: list[str]
    zeros: frozenset = frozenset()
    domain: str = "Unclassified"
    side: str | None = None
    strip_vertices: tuple[str, str] | None = None
    note: str = ""

    @property
    def connectivity(self) -> int:
        return max(1, len(self.walks))

    def to_json(self) -> dict:
        return {
            "type": self.domain,
            "boundary": [[[int(e), int(s)] for e, s in w] for w in self.walks],
            "poles": list(self.poles_inside),
            "strip_vertices": list(self.strip_vertices) if self.strip_vertices else None,
            "zeros": sorted(self.zeros),
            "side": self.side,
            "sample": None if self.sample is None else [self.sample.real, self.sample.imag],
        }


@dataclass
class DomainConfig:
    faces: list[Face]
    inventory: dict[str, int]
    strips: tuple[tuple[str, str], ...]

    def summary(self) -> dict:
        return {
            "inventory": dict(self.inventory),
            "strips": [list(s) for s in self.strips],
        }


def _zero_id(i: int) -> str:
    return f"e{i + 1}"


def _pole_id(k: float) -> str:
    return "-1" if k < 0 else "1"


def _approach_angle(points: np.ndarray, k: float) -> float:
    """Angle at which a polyline ending at ``k`` approaches it."""
    d = np.abs(points - k)
    idx = len(points) - 2
    for i in range(len(points) - 2, -1, -1):
        if d[i] > 1e-3:
            idx = i
            break
    return cmath.phase(points[idx] - k)


def _kappa(z: complex, c3: float) -> float:
    return z.real + 0.5 * c3 * math.log(abs(z))


def _vertex_name(qd: QuadDiff, traj: Trajectory, at_end: bool) -> str:
    if not at_end:
        return _zero_id(traj.start)
    t = traj.terminal
    if t is Terminal.ZERO:
        return _zero_id(traj.end)
    if t is Terminal.POLE:
        return _pole_id(traj.end)
    if t in (Terminal.INFINITY_UP, Terminal.INFINITY_DOWN):
        return INF
    raise DanglingEdge(
        f"ray from {_zero_id(traj.start)} along direction {traj.start_dir} did not terminate"
    )


def _gamma_label(a: str, b: str, upward: bool | None) -> str:
    def name(v):
        if v == INF:
            return "i inf" if upward else "-i inf"
        return v

    return f"gamma_{{{name(a)},{name(b)}}}"


def build_graph(trajectories: list[Trajectory], qd: QuadDiff | None) -> StokesGraph:
    """Assemble trajectories into a graph with a rotation system."""
    if not trajectories:
        return StokesGraph({}, [], {}, 0, qd)
    if qd is None:
        raise ValueError("a non-empty graph needs its quadratic differential")
    vertices: dict[str, Vertex] = {}
    for i, (z, m) in enumerate(zip(qd.zeros, qd.orders)):
        vertices[_zero_id(i)] = Vertex(_zero_id(i), "zero", complex(z), m)
    edges: list[Edge] = []
    halves: dict[str, list[tuple[float, tuple[int, int]]]] = {}
    inf_halves: list[tuple[tuple, tuple[int, int]]] = []
    c3 = qd.coeffs.c3

    dirs = {
        i: critical_directions(qd.zeros[i], qd.orders[i], qd.leading_coefficient(i))
        for i in range(len(qd.zeros))
    }
    for eid, tr in enumerate(trajectories):
        tail = _vertex_name(qd, tr, False)
        head = _vertex_name(qd, tr, True)
        if head not in vertices:
            if head == INF:
                vertices[INF] = Vertex(INF, "infinity", None)
            else:
                vertices[head] = Vertex(head, "pole", complex(float(head)))
        upward = None
        kappa = None
        if head == INF:
            upward = tr.terminal is Terminal.INFINITY_UP
            kappa = _kappa(tr.end_point, c3)
        edge = Edge(eid, tail, head, tr.points, _gamma_label(tail, head, upward), tr, kappa, upward)
        edges.append(edge)
        halves.setdefault(tail, []).append((cmath.phase(dirs[tr.start][tr.start_dir]), (eid, 0)))
        if tr.terminal is Terminal.ZERO:
            ang = cmath.phase(dirs[tr.end][tr.end_dir])
            halves.setdefault(head, []).append((ang, (eid, 1)))
        elif tr.terminal is Terminal.POLE:
            halves.setdefault(head, []).append((_approach_angle(tr.points, tr.end), (eid, 1)))
        else:
            # counterclockwise order along a large circle: up rays right to left, then down rays
            key = (0, -kappa) if upward else (1, kappa)
            inf_halves.append((key, (eid, 1)))

    rotation: dict[str, list[tuple[int, int]]] = {}
    for v, lst in halves.items():
        lst.sort(key=lambda t: t[0])
        for (a1, h1), (a2, h2) in zip(lst, lst[1:]):
            if abs(a1 - a2) < 1e-9:
                raise EmbeddingError(f"two edges leave {v} along the same direction")
        rotation[v] = [h for _, h in lst]
    if inf_halves:
        inf_halves.sort(key=lambda t: t[0])
        # seen from infinity the orientation is reversed
        rotation[INF] = [h for _, h in inf_halves][::-1]

    # connected components
    parent = {v: v for v in vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for e in edges:
        parent[find(e.tail)] = find(e.head)
    comps = len({find(v) for v in vertices})
    return StokesGraph(vertices, edges, rotation, comps, qd)


def _next_half(g: StokesGraph, h: tuple[int, int]) -> tuple[int, int]:
    twin = (h[0], 1 - h[1])
    v = g.origin(twin)
    rot = g.rotation[v]
    i = rot.index(twin)
    return rot[i - 1]


def _raw_walks(g: StokesGraph) -> list[list[tuple[int, int]]]:
    seen = set()
    walks = []
    for e in g.edges:
        for s in (0, 1):
            h = (e.id, s)
            if h in seen:
                continue
            walk = []
            cur = h
            while cur not in seen:
                seen.add(cur)
                walk.append(cur)
                cur = _next_half(g, cur)
            if cur != h:
                raise EmbeddingError("face walk did not close; rotation system is inconsistent")
            walks.append(walk)
    return walks


class _Geometry:
    """Closed polygons for face walks, with arcs standing in for infinity."""

    def __init__(self, g: StokesGraph):
        self.g = g
        ends = [abs(e.points[-1]) for e in g.edges if e.head == INF]
        self.radius = 2.0 * max(ends) if ends else 0.0

    def polygon(self, walk) -> np.ndarray:
        g = self.g
        parts = []
        for k, h in enumerate(walk):
            pts = g.half_edge_points(h)
            parts.append(pts)
            if g.target(h) == INF:
                nxt = walk[(k + 1) % len(walk)]
                parts.append(self._arc(pts[-1], g.half_edge_points(nxt)[0]))
        return np.concatenate(parts)

    def _arc(self, p1: complex, p2: complex) -> np.ndarray:
        # Consecutive rays running to the same end of the imaginary axis are
        # ordered by their log drift, not by angle at a finite radius, so a
        # counter-clockwise arc between them could wrap all the way round.
        if p1.imag * p2.imag > 0:
            return np.array([p1, p2])
        r = self.radius
        a1, a2 = cmath.phase(p1), cmath.phase(p2)
        span = (a2 - a1) % (2 * math.pi)
        if span < 1e-12:
            span = 2 * math.pi
        n = max(8, int(256 * span / (2 * math.pi)))
        angs = a1 + span * np.linspace(0.0, 1.0, n)
        return np.concatenate([[r * cmath.exp(1j * a1)], r * np.exp(1j * angs), [r * cmath.exp(1j * a2)]])


def _winding(poly: np.ndarray, p: complex) -> int:
    d = poly - p
    if np.any(np.abs(d) == 0):
        return 0
    ang = np.angle(np.concatenate([d[1:], d[:1]]) / d)
    return int(round(float(np.sum(ang)) / (2 * math.pi)))


def _signed_area(poly: np.ndarray) -> float:
    x, y = poly.real, poly.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def _inside(poly: np.ndarray, area: float, p: complex) -> bool:
    w = _winding(poly, p)
    return w == (1 if area > 0 else 0)


def _segment_distance(pts: np.ndarray, p: complex) -> float:
    a, b = pts[:-1], pts[1:]
    d = b - a
    L = np.abs(d) ** 2
    t = np.where(L > 0, ((p - a) * np.conj(d)).real / np.where(L > 0, L, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    return float(np.min(np.abs(a + t * d - p)))


def _sample_point(g: StokesGraph, walk, poly, area) -> complex | None:
    """A point just to the left of some edge of the walk, inside the face."""
    all_pts = [e.points for e in g.edges]
    candidates = sorted(walk, key=lambda h: -len(g.edges[h[0]].points))
    for h in candidates:
        others = [q for j, q in enumerate(all_pts) if j != h[0]]
        pts = g.half_edge_points(h)
        seg = np.abs(np.diff(pts))
        cum = np.concatenate([[0.0], np.cumsum(seg)])
        for frac in (0.5, 0.3, 0.7, 0.1, 0.03):
            i = int(np.searchsorted(cum, frac * cum[-1]))
            i = min(max(i, 1), len(pts) - 2)
            tangent = pts[i + 1] - pts[i - 1]
            if abs(tangent) == 0:
                continue
            normal = 1j * tangent / abs(tangent)
            # never step further than half the gap to a neighbouring edge
            gap = min((_segment_distance(q, pts[i]) for q in others), default=np.inf)
            reach = min(0.1 * (1.0 + abs(pts[i])), 0.5 * gap)
            for step in reach * np.array([1.0, 0.3, 0.1, 0.03, 0.01]):
                p = pts[i] + step * normal
                if not _inside(poly, area, p):
                    continue
                if min(_segment_distance(q, p) for q in all_pts) < 0.3 * step:
                    continue
                return complex(p)
    return None


def _component_of(g: StokesGraph) -> dict[str, int]:
    label: dict[str, int] = {}
    adj: dict[str, set] = {v: set() for v in g.vertices}
    for e in g.edges:
        adj[e.tail].add(e.head)
        adj[e.head].add(e.tail)
    for v in sorted(g.vertices):
        if v in label:
            continue
        stack = [v]
        label[v] = len(set(label.values()))
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in label:
                    label[w] = label[v]
                    stack.append(w)
    return label


def enumerate_faces(g: StokesGraph) -> list[Face]:
    """Faces of the sphere cut along the graph."""
    if not g.edges:
        return [Face([], None, list(POLES), [], domain="Empty")]
    geo = _Geometry(g)
    comp = _component_of(g)
    walks = _raw_walks(g)
    polys = [geo.polygon(w) for w in walks]
    areas = [_signed_area(p) for p in polys]
    wcomp = [comp[g.origin(w[0])] for w in walks]
    samples = [_sample_point(g, w, p, a) for w, p, a in zip(walks, polys, areas)]
    ncomp = g.components

    def signature(p: complex) -> tuple:
        sig = []
        for k in range(ncomp):
            owners = [i for i in range(len(walks)) if wcomp[i] == k and _inside(polys[i], areas[i], p)]
            if len(owners) != 1:
                raise EmbeddingError(f"point {p} lies in {len(owners)} faces of component {k}")
            sig.append(owners[0])
        return tuple(sig)

    groups: dict[tuple, list[int]] = {}
    for i, s in enumerate(samples):
        if s is None:
            raise EmbeddingError(f"no interior sample point found for face walk {i}")
        groups.setdefault(signature(s), []).append(i)

    pole_vertices = {k for k in POLES if _pole_id(k) in g.vertices}
    pole_sig = {k: signature(complex(k)) for k in POLES if k not in pole_vertices}

    faces = []
    for sig, members in groups.items():
        f_walks = [walks[i] for i in members]
        inside = [k for k, s in pole_sig.items() if s == sig]
        corners = []
        for w in f_walks:
            corners.extend(_corners(g, w))
        zs = frozenset(
            g.origin(h) for w in f_walks for h in w if g.vertices[g.origin(h)].kind == "zero"
        )
        faces.append(Face(f_walks, samples[members[0]], inside, corners, zs))
    if len(faces) != 1 + g.components - g.V + g.E:
        raise EmbeddingError(
            f"Euler relation fails: V={g.V} E={g.E} F={len(faces)} C={g.components}"
        )
    return faces


def _corners(g: StokesGraph, walk) -> list[str]:
    """Infinite-type points met along a walk.

    A visit to infinity between two rays on the same side (both up or both
    down) is a strip vertex at +i inf or -i inf; a visit that turns from one
    side to the other is the corner of an end domain, on the left or right. Visits to a pole are
    strip vertices at that pole.
    """
    out = []
    for k, h in enumerate(walk):
        v = g.target(h)
        if v == INF:
            a = g.edges[h[0]]
            b = g.edges[walk[(k + 1) % len(walk)][0]]
            if a.upward == b.upward and h[0] != b.id:
                out.append("i inf" if a.upward else "-i inf")
            else:
                # counterclockwise from an up ray to a down ray sweeps the left side
                out.append("end-l" if a.upward else "end-r")
        elif g.vertices[v].kind == "pole":
            out.append(v)
    return out


def classify_face(f: Face, qd: QuadDiff | None = None) -> str:
    """Domain type of a face, also stored on the face."""
    n_walks = len(f.walks)
    strip_corners = [c for c in f.corners if not c.startswith("end")]
    ends = len(f.corners) - len(strip_corners)
    f.strip_vertices = None
    if n_walks == 0:
        f.domain = "Empty"
    elif n_walks == 1 and len(f.poles_inside) == 1 and not f.corners:
        f.domain = "Circle"
    elif n_walks == 2 and not f.poles_inside and not f.corners:
        f.domain = "Ring"
    elif n_walks == 1 and not f.poles_inside and ends == 1 and not strip_corners:
        f.domain = "End"
        f.side = "l" if "end-l" in f.corners else "r"
    elif n_walks == 1 and not f.poles_inside and ends == 0 and len(strip_corners) == 2:
        f.domain = "Strip"
        f.strip_vertices = tuple(sorted(strip_corners, key=STRIP_ORDER.__getitem__))
    else:
        f.domain = "Unclassified"
        f.note = (
            f"walks={n_walks} poles={f.poles_inside} corners={f.corners}"
        )
    return f.domain


def domain_config(faces: list[Face], qd: QuadDiff | None = None) -> DomainConfig:
    for f in faces:
        classify_face(f, qd)
    counts = Counter(f.domain for f in faces)
    inventory = {
        "end": counts.get("End", 0),
        "strip": counts.get("Strip", 0),
        "ring": counts.get("Ring", 0),
        "circle": counts.get("Circle", 0),
    }
    if counts.get("Unclassified"):
        inventory["unclassified"] = counts["Unclassified"]
    strips = tuple(sorted(f.strip_vertices for f in faces if f.strip_vertices))
    return DomainConfig(faces, inventory, strips)


@dataclass
class StructureReport:
    passed: dict[str, bool] = field(default_factory=dict)
    messages: list[str] = field(default_factory=list)
    info: dict[str, object] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.passed.values())

    def failures(self) -> list[str]:
        return [k for k, v in self.passed.items() if not v]


def _conj_label(s: str) -> str:
    return {"i inf": "-i inf", "-i inf": "i inf"}.get(s, s)


def structure_checks(g: StokesGraph, config: DomainConfig, qd: QuadDiff | None) -> StructureReport:
    """Consistency checks on a graph and its domains; failures are listed, never raised."""
    rep = StructureReport()
    F = len(config.faces)
    rep.passed["euler"] = g.V - g.E + F == 1 + g.components
    if not rep.passed["euler"]:
        rep.messages.append(f"V - E + F = {g.V - g.E + F}, expected {1 + g.components}")

    degree = Counter()
    for e in g.edges:
        degree[e.tail] += 1
        degree[e.head] += 1
    bad = [
        v.id for v in g.vertices.values() if v.kind == "zero" and degree[v.id] != v.order + 2
    ]
    rep.passed["zero_degree"] = not bad
    if bad:
        rep.messages.append(f"zeros with wrong degree: {bad}")

    # a closed walk avoiding infinity must surround or touch a pole
    ok = True
    if g.edges:
        geo = _Geometry(g)
        for w in _raw_walks(g):
            vs = {g.origin(h) for h in w}
            if INF in vs or vs & {"-1", "1"}:
                continue
            poly = geo.polygon(w)
            if abs(_signed_area(poly)) < 1e-12:
                continue
            if not any(_winding(poly, complex(k)) != 0 for k in POLES):
                ok = False
                rep.messages.append(f"cycle through {sorted(vs)} encloses no pole")
    rep.passed["cycles_enclose_poles"] = ok

    inv = config.inventory
    rep.passed["inventory_bounds"] = (
        inv["end"] == 2 and inv["circle"] <= 2 and inv["ring"] <= 1 and not inv.get("unclassified")
    ) or not g.edges
    if not rep.passed["inventory_bounds"]:
        rep.messages.append(f"inventory out of bounds: {inv}")

    mirrored = tuple(sorted(tuple(sorted(map(_conj_label, s), key=STRIP_ORDER.__getitem__)) for s in config.strips))
    sym = mirrored == config.strips
    if g.edges:
        sym = sym and _edges_symmetric(g)
    rep.passed["conjugation_symmetry"] = sym
    if not sym:
        rep.messages.append("graph is not symmetric under conjugation")

    # Boundary zero count on circle domains, reported only
    rep.info["circle_boundary_zeros"] = [len(f.zeros) for f in config.faces if f.domain == "Circle"]
    return rep


def _edges_symmetric(g: StokesGraph, tol: float = 1e-6) -> bool:
    def key(pts):
        n = len(pts)
        return np.array([pts[0], pts[n // 2], pts[-1]])

    keys = [key(e.points) for e in g.edges]
    for k in keys:
        target = np.conj(k)
        found = False
        for other in keys:
            for cand in (other, other[::-1]):
                if np.all(np.abs(cand[[0, 2]] - target[[0, 2]]) < tol * (1 + np.abs(target[[0, 2]]))):
                    found = True
                    break
            if found:
                break
        if not found:
            return False
    return True


def graph_to_json(g: StokesGraph, config: DomainConfig | None = None, max_points: int = 200) -> dict:
    """JSON-ready description of a graph, its edges and its faces."""

    def pos(v: Vertex):
        return None if v.position is None else [v.position.real, v.position.imag]

    def thin(pts: np.ndarray):
        if len(pts) > max_points:
            idx = np.unique(np.linspace(0, len(pts) - 1, max_points).round().astype(int))
            pts = pts[idx]
        return [[float(p.real), float(p.imag)] for p in pts]

    doc = {
        "schema_version": SCHEMA_VERSION,
        "vertices": [
            {"id": v.id, "kind": v.kind, "position": pos(v), "order": v.order}
            for v in sorted(g.vertices.values(), key=lambda v: v.id)
        ],
        "edges": [
            {"id": e.id, "endpoints": [e.tail, e.head], "label": e.label, "polyline": thin(e.points)}
            for e in g.edges
        ],
        "components": g.components,
    }
    if config is not None:
        doc["faces"] = [f.to_json() for f in config.faces]
        doc.update(config.summary())
    return doc
