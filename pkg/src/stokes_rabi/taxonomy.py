"""Case labels for domain configurations.

Two independent routes produce a label. The geometric route reads the
traced domain configuration: how many real zeros sit left of -1, between
the poles and right of +1, which domains exist, where strips attach, and
which zeros lie on which boundaries. The analytic route evaluates
Q-length and period predicates directly from the zeros and poles without
tracing anything. ``cross_validate`` compares the two.

Labels read like "II-3-a-alpha-m": family, position class, subcase path,
and an "-m" suffix for mirror twins (the configuration reflected in the
imaginary axis).
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .errors import SingularPath, StepUnderflow
from .polynomials import RootSet
from .qdiff_core import QuadDiff, q_length, q_length_path
from .tracer import Terminal, critical_directions, trace_trajectory
from .stokes_graph import DomainConfig, StokesGraph

__all__ = [
    "CaseLabel",
    "Predicate",
    "PredicateReport",
    "Agreement",
    "position_class",
    "label_case_geometric",
    "label_case_analytic",
    "cross_validate",
    "richardson_limit",
    "NOT_IMPLEMENTED",
    "UNDETERMINED",
]

GREEK = {"α": "alpha", "β": "beta", "γ": "gamma"}

# (left of -1, between the poles, right of +1) -> (family, case number)
_POSITIONS = {
    (0, 0, 0): ("I", None),
    (2, 0, 0): ("II", 1),
    (0, 2, 0): ("II", 2),
    (1, 1, 0): ("II", 3),
    (1, 0, 1): ("II", 4),
    (4, 0, 0): ("III", 1),
    (0, 4, 0): ("III", 2),
    (3, 1, 0): ("III", 3),
    (3, 0, 1): ("III", 4),
    (1, 3, 0): ("III", 5),
    (2, 2, 0): ("III", 6),
    (2, 0, 2): ("III", 7),
    (2, 1, 1): ("III", 8),
    (1, 2, 1): ("III", 9),
}


@dataclass(frozen=True)
class CaseLabel:
    family: str
    case: int | None = None
    subcase: str = ""
    mirror: bool = False
    degenerate: bool = False
    note: str = ""

    def __str__(self) -> str:
        parts = [self.family]
        if self.case is not None:
            parts.append(str(self.case))
        if self.subcase:
            parts.extend(self.subcase.split("-"))
        if self.degenerate:
            parts.append("deg")
        if self.mirror:
            parts.append("m")
        return "-".join(parts)

    @property
    def base(self) -> str:
        """The label without the mirror suffix."""
        return str(replace(self, mirror=False))

    def mirrored(self) -> "CaseLabel":
        return replace(self, mirror=not self.mirror)


UNDETERMINED = "undetermined"
NOT_IMPLEMENTED = "not implemented"


def position_class(roots: RootSet, tol: float = 0.0) -> tuple[int, int, int]:
    """Real zeros counted with multiplicity: (left of -1, in (-1, 1), right of 1)."""
    left = mid = right = 0
    for (z, m), real in zip(roots.roots, roots.is_real):
        if not real:
            continue
        x = z.real
        if x < -1 - tol:
            left += m
        elif x > 1 + tol:
            right += m
        else:
            mid += m
    return left, mid, right


def _mirror_pos(pos):
    return pos[2], pos[1], pos[0]


def _family_case(pos):
    if pos in _POSITIONS:
        return _POSITIONS[pos], False
    if _mirror_pos(pos) in _POSITIONS:
        return _POSITIONS[_mirror_pos(pos)], True
    raise ValueError(f"impossible zero positions {pos}")


# ---------------------------------------------------------------- geometric


@dataclass(frozen=True)
class _Features:
    pos: tuple[int, int, int]
    circles: frozenset
    ring: int
    strips: tuple
    circle_zeros: tuple  # (zeros on the circle around -1, around +1)
    end_zeros: tuple  # (zero ids on the left end boundary, on the right)
    end_real: tuple  # number of real zeros on (left, right) end boundaries

    def mirrored(self) -> "_Features":
        flip = {"-1": "1", "1": "-1"}
        order = {"-i inf": 0, "-1": 1, "1": 2, "i inf": 3}
        strips = tuple(
            sorted(tuple(sorted((flip.get(a, a), flip.get(b, b)), key=order.__getitem__)) for a, b in self.strips)
        )
        return _Features(
            _mirror_pos(self.pos),
            frozenset(-k for k in self.circles),
            self.ring,
            strips,
            self.circle_zeros[::-1],
            self.end_zeros[::-1],
            self.end_real[::-1],
        )


def _S(*pairs):
    order = {"-i inf": 0, "-1": 1, "1": 2, "i inf": 3}
    return tuple(sorted(tuple(sorted(p, key=order.__getitem__)) for p in pairs))


NI, II_, M1, P1 = "i inf", "-i inf", "-1", "1"
BOTH = frozenset({-1.0, 1.0})
LEFT = frozenset({-1.0})
RIGHT = frozenset({1.0})
NONE = frozenset()

# One row per generic canonical configuration:
# (position, label tail, circles, ring count, strips, extra test or None)
_TABLE = [
    ((0, 0, 0), "1", BOTH, 1, _S(), None),
    ((0, 0, 0), "2", BOTH, 0, _S((II_, NI)), None),
    ((0, 0, 0), "3", BOTH, 0, _S(), lambda f: f.circle_zeros[0] == 4),
    ((2, 0, 0), "1-a", BOTH, 0, _S((II_, NI)), None),
    ((2, 0, 0), "1-b", BOTH, 1, _S(), lambda f: f.circle_zeros[0] == 2),
    ((2, 0, 0), "1-c", BOTH, 0, _S(), lambda f: f.circle_zeros[0] == 3),
    ((2, 0, 0), "1-d", BOTH, 1, _S(), lambda f: f.circle_zeros[0] == 1),
    ((2, 0, 0), "1-e", BOTH, 0, _S(), lambda f: f.circle_zeros[0] == 1),
    ((0, 2, 0), "2-a", BOTH, 1, _S(), None),
    ((0, 2, 0), "2-b", BOTH, 0, _S((II_, NI)), lambda f: f.end_real[1] == 2),
    ((0, 2, 0), "2-c", BOTH, 0, _S(), lambda f: len(f.end_zeros[1]) == 4),
    ((1, 1, 0), "3-a-α", RIGHT, 0, _S((M1, NI), (II_, M1), (M1, M1)), None),
    ((1, 1, 0), "3-a-β", RIGHT, 0, _S((M1, NI), (II_, M1), (II_, NI)), None),
    ((1, 1, 0), "3-a-γ", RIGHT, 0, _S((M1, NI), (II_, M1)), None),
    ((1, 1, 0), "3-b", RIGHT, 1, _S((M1, M1)), None),
    ((1, 1, 0), "3-c", RIGHT, 0, _S((M1, M1)), None),
    ((1, 0, 1), "4-a-α", NONE, 0, _S((M1, NI), (II_, M1), (P1, NI), (II_, P1), (M1, P1)), None),
    ((1, 0, 1), "4-a-β", NONE, 0, _S((M1, NI), (II_, M1), (M1, P1), (M1, M1)), None),
    ((1, 0, 1), "4-a-γ", NONE, 0, _S((M1, NI), (II_, M1), (M1, P1)), None),
    ((1, 0, 1), "4-b-α", NONE, 1, _S((M1, P1), (M1, M1)), None),
    ((1, 0, 1), "4-b-β", NONE, 1, _S((M1, P1)), None),
    ((1, 0, 1), "4-c-α", NONE, 0, _S((M1, P1), (M1, M1)), None),
    ((1, 0, 1), "4-c-β", NONE, 0, _S((M1, P1)), None),
    ((4, 0, 0), "1", BOTH, 1, _S(), None),
    ((0, 4, 0), "2", BOTH, 0, _S((II_, NI)), None),
    ((3, 1, 0), "3", RIGHT, 1, _S((M1, M1)), None),
    ((3, 0, 1), "4-a-α", NONE, 0, _S((M1, P1), (P1, P1), (P1, NI), (II_, P1)), None),
    ((3, 0, 1), "4-a-β", NONE, 1, _S((M1, P1), (P1, P1)), None),
    ((3, 0, 1), "4-a-γ", NONE, 0, _S((M1, P1), (P1, P1)), None),
    ((3, 0, 1), "4-b", NONE, 1, _S((M1, P1), (M1, M1)), None),
    ((3, 0, 1), "4-c", NONE, 1, _S((M1, P1)), None),
    ((1, 3, 0), "5", RIGHT, 0, _S((M1, NI), (II_, M1), (II_, NI)), None),
    ((2, 2, 0), "6-a", BOTH, 0, _S((II_, NI)), None),
    ((2, 2, 0), "6-b", BOTH, 1, _S(), None),
    ((2, 2, 0), "6-c", BOTH, 0, _S(), None),
    ((2, 0, 2), "7-a", BOTH, 0, _S((II_, NI)), None),
    ((2, 0, 2), "7-b", BOTH, 1, _S(), lambda f: f.circle_zeros[0] == 2),
    ((2, 0, 2), "7-c", BOTH, 0, _S(), lambda f: f.circle_zeros[0] == 3),
    ((2, 1, 1), "8-a", LEFT, 0, _S((II_, NI), (P1, NI), (II_, P1)), None),
    ((2, 1, 1), "8-b-α", LEFT, 0, _S((P1, P1), (P1, NI), (II_, P1)), None),
    ((2, 1, 1), "8-b-β", LEFT, 1, _S((P1, P1)), None),
    ((2, 1, 1), "8-b-γ", LEFT, 0, _S((P1, P1)), None),
    ((2, 1, 1), "8-c", LEFT, 0, _S((P1, NI), (II_, P1)), None),
    ((1, 2, 1), "9", NONE, 0, _S((M1, NI), (II_, M1), (P1, NI), (II_, P1), (II_, NI)), None),
]


def _match(feat: _Features) -> list[str]:
    out = []
    for pos, tail, circles, ring, strips, extra in _TABLE:
        if pos != feat.pos or circles != feat.circles or ring != feat.ring or strips != feat.strips:
            continue
        if extra is not None and not extra(feat):
            continue
        out.append(tail)
    return out


def _label_from_tail(family: str, tail: str, mirror: bool, note: str = "") -> CaseLabel:
    head, _, rest = tail.partition("-")
    case = int(head) if head.isdigit() else None
    for g, name in GREEK.items():
        rest = rest.replace(g, name)
    return CaseLabel(family, case, rest, mirror, False, note)


def _features(config: DomainConfig, roots: RootSet, graph: StokesGraph | None) -> _Features:
    circle_zeros = {-1.0: 0, 1.0: 0}
    circles = set()
    end_zeros = {"l": frozenset(), "r": frozenset()}
    for f in config.faces:
        if f.domain == "Circle":
            k = f.poles_inside[0]
            circles.add(k)
            circle_zeros[k] = len(f.zeros)
        elif f.domain == "End" and f.side:
            end_zeros[f.side] = f.zeros
    real_ids = {f"e{i + 1}" for i, r in enumerate(roots.is_real) if r}
    end_real = tuple(len(end_zeros[s] & real_ids) for s in ("l", "r"))
    return _Features(
        position_class(roots),
        frozenset(circles),
        config.inventory.get("ring", 0),
        tuple(sorted(config.strips)),
        (circle_zeros[-1.0], circle_zeros[1.0]),
        (end_zeros["l"], end_zeros["r"]),
        end_real,
    )


def label_case_geometric(
    config: DomainConfig, roots: RootSet, graph: StokesGraph | None = None
) -> CaseLabel | str:
    """Label a traced configuration, or return a string explaining why not.

    The features are first matched against the canonical rows; if none
    fits, the reflected features are tried and a match gives the "-m" twin.
    """
    pos = position_class(roots)
    (family, case), mirror_pos = _family_case(pos)
    if roots.has_multiple:
        return CaseLabel(family, case, "", mirror_pos, True, "merged zeros")
    feat = _features(config, roots, graph)
    direct = _match(feat)
    flipped = _match(feat.mirrored())
    if len(direct) == 1 and not (mirror_pos and direct[0] != (flipped[0] if flipped else None)):
        return _label_from_tail(family, direct[0], False)
    if len(flipped) == 1:
        return _label_from_tail(family, flipped[0], True)
    return (
        f"unclassified: position={pos} circles={sorted(feat.circles)} ring={feat.ring} "
        f"strips={list(feat.strips)} circle_zeros={feat.circle_zeros} "
        f"end_zeros={[sorted(s) for s in feat.end_zeros]} inventory={config.inventory} "
        f"candidates={direct or flipped}"
    )


# ----------------------------------------------------------------- analytic


@dataclass
class Predicate:
    name: str
    value: float
    error: float
    band: float

    @property
    def sign(self) -> int:
        if abs(self.value) <= self.band:
            return 0
        return 1 if self.value > 0 else -1

    @property
    def margin(self) -> float:
        return abs(self.value) / self.band if self.band > 0 else float("inf")

    def to_json(self) -> dict:
        return {"name": self.name, "value": self.value, "error": self.error, "band": self.band}


@dataclass
class PredicateReport:
    entries: list[Predicate] = field(default_factory=list)
    matched: list[str] = field(default_factory=list)
    note: str = ""

    def add(self, p: Predicate) -> Predicate:
        self.entries.append(p)
        return p

    def __getitem__(self, name: str) -> Predicate:
        for p in self.entries:
            if p.name == name:
                return p
        raise KeyError(name)

    def to_json(self) -> dict:
        return {"entries": [p.to_json() for p in self.entries], "matched": self.matched, "note": self.note}


def richardson_limit(f, eps=(1e-3, 1e-4, 1e-5)) -> tuple[float, float]:
    """Limit of f(eps) as eps -> 0 assuming f = L + a eps + b eps^2.

    Returns the extrapolated value and the gap to the two-point (linear)
    extrapolation as an error estimate.
    """
    vals = [f(e) for e in eps]
    e = np.asarray(eps, dtype=float)
    v = np.asarray(vals, dtype=float)
    A = np.vander(e, 3, increasing=True)
    L = float(np.linalg.solve(A, v)[0])
    lin = float(v[2] - (v[1] - v[2]) * e[2] / (e[1] - e[2]))
    return L, abs(L - lin)


class _Analytic:
    """Q-length predicates for one differential, with cached integrals."""

    def __init__(self, qd: QuadDiff, rel_band: float = 1e-6):
        self.qd = qd
        self.c = qd.coeffs
        self.zeros = list(qd.zeros)
        self.d = {k: qd.poles[k].delta for k in (-1.0, 1.0)}
        self.scale = 1.0 + max(self.d.values())
        self.rel_band = rel_band
        self.report = PredicateReport()
        self._cache: dict = {}

    def im(self, a: complex, b: complex) -> float:
        key = (complex(a), complex(b))
        if key not in self._cache:
            self._cache[key] = q_length(a, b, self.c, "imag", zeros=self.zeros).value.imag
        return self._cache[key]

    def geodesic_paths(self, k: float, e: complex) -> list[list[complex]]:
        """Interior vertices of polylines from near the pole ``k`` to the zero ``e``.

        Each follows an orthogonal critical trajectory (along which
        -Q0 dz^2 > 0) leaving ``e`` and captured by ``k``. Such a curve is a
        Q-geodesic, so Im of the integral along it is the Q-distance, and
        since Im only depends on the homotopy class a coarse polyline hugging
        the curve gives the same value.
        """
        key = ("geo", k, complex(e))
        if key in self._cache:
            return self._cache[key]
        qd = self.qd
        idx = min(range(len(self.zeros)), key=lambda i: abs(self.zeros[i] - e))
        lead = -qd.leading_coefficient(idx)
        others = [z for i, z in enumerate(self.zeros) if i != idx] + [complex(-k)]
        r0 = 0.5 * min(min(abs(z - k) for z in others), 1.0)
        paths = []
        for d in critical_directions(e, qd.orders[idx], lead):
            try:
                tr = trace_trajectory(e, d, qd, start_index=idx, orthogonal=True)
            except StepUnderflow:
                continue
            if tr.terminal is not Terminal.POLE or tr.end != k:
                continue
            pts = tr.points[1:-1]
            far = np.abs(pts - k) >= r0
            pts = pts[far]
            keep = pts[:: max(1, len(pts) // 40)]
            keep = [p for p in keep if abs(p - e) > 1e-3 * (1.0 + abs(e))]
            paths.append(list(reversed(keep)))
        self._cache[key] = paths
        return paths

    def height(self, k: float, eps: float, e: complex) -> float:
        """Im of the Q-length from the pole ``k`` (at distance ``eps``) to the zero ``e``.

        Integrals run along Q-geodesics, since a straight segment may pass a
        zero on the wrong side and then measures a different homotopy class.
        A zero without an orthogonal ray into ``k`` is not on the boundary of
        the circle domain of ``k``; its height is then taken through a peer
        zero that has one, adding |Im| of the segment between the two.
        """
        key = ("height", k, eps, complex(e))
        if key in self._cache:
            return self._cache[key]
        vals = [self._along(k, eps, mid, e) for mid in self.geodesic_paths(k, e)]
        if not vals:
            for p in self.zeros:
                if p != e and p.imag > -1e-12 and self.geodesic_paths(k, p):
                    best = min(self._along(k, eps, mid, p) for mid in self.geodesic_paths(k, p))
                    vals.append(best + self._im_between(p, e))
        if not vals:
            vals.append(self.im(complex(k) + eps, e))
        self._cache[key] = min(vals)
        return self._cache[key]

    def _im_between(self, p: complex, e: complex) -> float:
        """|Im| between two zeros; a segment through a critical point is bent into the upper half-plane."""
        try:
            return self.im(p, e)
        except SingularPath:
            bend = 0.5 * (p + e) + 0.5j * abs(p - e)
            return q_length_path([p, bend, e], self.c, "imag", zeros=self.zeros).value.imag

    def _along(self, k: float, eps: float, mid: list[complex], e: complex) -> float:
        toward = (mid[0] if mid else complex(e)) - k
        pts = [k + eps * toward / abs(toward), *mid, complex(e)]
        return q_length_path(pts, self.c, "imag", zeros=self.zeros).value.imag

    def pred(self, name: str, value: float, error: float = 0.0) -> Predicate:
        band = self.rel_band * self.scale + 10.0 * error
        return self.report.add(Predicate(name, value, error, band))

    def limit(self, name: str, f) -> Predicate:
        L, err = richardson_limit(f)
        return self.pred(name, L, err)


def _upper(zs):
    return [z for z in zs if z.imag > 1e-12]


def _reals(qd: QuadDiff):
    return sorted(z.real for z, r in zip(qd.zeros, qd.roots.is_real) if r)


def _decide(rules: list[tuple[str, bool]], report: PredicateReport, boundary: bool) -> str | None:
    hits = [name for name, ok in rules if ok]
    report.matched = hits
    if len(hits) == 1 and not boundary:
        return hits[0]
    return None


def _analytic_family_I(A: _Analytic):
    ups = _upper(A.zeros)
    if len(ups) != 2:
        return None, "family I needs two zeros in the upper half-plane"
    u0, u1 = ups

    def h(k, e, eps):
        return A.height(k, eps, e)

    # the zero closer to -1 in the Q-metric is named e1
    D, _ = richardson_limit(lambda s: h(-1.0, u0, s) - h(-1.0, u1, s))
    first, other = (u0, u1) if D <= 0 else (u1, u0)
    L1 = A.limit("left pole: Im[-1+eps,e1] - Im[-1+eps,e2]", lambda s: h(-1.0, first, s) - h(-1.0, other, s))
    L2 = A.limit("right pole: Im[1+eps,e1] - Im[1+eps,e2]", lambda s: h(1.0, first, s) - h(1.0, other, s))
    boundary = L1.sign == 0 or L2.sign == 0
    rules = [("1", L1.sign < 0 and L2.sign < 0), ("2", L1.sign < 0 and L2.sign > 0)]
    return _decide(rules, A.report, boundary), ""


def _analytic_II_1(A: _Analytic):
    e1, e2 = _reals(A.qd)
    e3 = _upper(A.zeros)[0]
    L1 = A.limit("Im[-1-eps,e2] - Im[-1-eps,e3]", lambda s: A.height(-1.0, s, e2) - A.height(-1.0, s, e3))
    L2 = A.limit("Im[1+i eps,e2] - Im[1+i eps,e3]", lambda s: A.height(1.0, s, e2) - A.height(1.0, s, e3))
    boundary = L1.sign == 0 or L2.sign == 0
    rules = [
        ("1-a", L1.sign < 0 and L2.sign > 0),
        ("1-b", L1.sign > 0 and L2.sign > 0),
        ("1-d", L1.sign < 0 and L2.sign < 0),
    ]
    return _decide(rules, A.report, boundary), ""


def _analytic_II_2(A: _Analytic):
    e1, e2 = _reals(A.qd)
    e3 = _upper(A.zeros)[0]
    L1 = A.limit("Im[-1+eps,e1] - Im[-1+eps,e3]", lambda s: A.height(-1.0, s, e1) - A.height(-1.0, s, e3))
    L2 = A.limit("Im[1-eps,e2] - Im[1-eps,e3]", lambda s: A.height(1.0, s, e2) - A.height(1.0, s, e3))
    boundary = L1.sign == 0 or L2.sign == 0
    rules = [
        ("2-a", L1.sign < 0 and L2.sign < 0),
        ("2-b", L1.sign > 0 and L2.sign < 0),
        ("2-b-m", L1.sign < 0 and L2.sign > 0),
    ]
    return _decide(rules, A.report, boundary), ""


def _analytic_II_3(A: _Analytic):
    e1, e2 = _reals(A.qd)
    e3 = _upper(A.zeros)[0]
    dm = A.d[-1.0]
    i13, i23 = A.im(e1, e3), A.im(e2, e3)
    A.pred("delta_-1", dm)
    ra = A.pred("2Im[e1,e3] + 2Im[e2,e3] - delta_-1", 2 * i13 + 2 * i23 - dm)
    rb = A.pred("2Im[e1,e3] - 2Im[e2,e3] - delta_-1", 2 * i13 - 2 * i23 - dm)
    rB = A.pred("2Im[e2,e3] - 2Im[e1,e3] - delta_-1", 2 * i23 - 2 * i13 - dm)
    rules = [
        ("3-a-α", ra.sign == 0),
        ("3-a-β", rb.sign == 0),
        ("3-b", rB.sign == 0),
    ]
    return _decide(rules, A.report, False), ""


def _analytic_II_4(A: _Analytic):
    e1, e2 = _reals(A.qd)
    e3 = _upper(A.zeros)[0]
    dm, dp = A.d[-1.0], A.d[1.0]
    i13, i23 = A.im(e1, e3), A.im(e2, e3)
    p1 = A.pred("delta_-1 - 2Im[e1,e3]", dm - 2 * i13)
    p2 = A.pred("delta_1 - 2Im[e2,e3]", dp - 2 * i23)
    q = A.pred("Im[e2,e3] - Im[e1,e3]", i23 - i13)
    dd = A.pred("delta_-1 - delta_1", dm - dp)
    # Each generic subcase comes with a width balance around the poles that
    # holds identically there; the published inequalities alone overlap
    # between (a) and (b), so the balance picks the branch first.
    a_bal = A.pred("(delta_-1 - 2Im[e1,e3]) - (delta_1 - 2Im[e2,e3])", p1.value - p2.value)
    ab = A.pred("2Im[e1,e3] + 2Im[e2,e3] + delta_1 - delta_-1", 2 * i13 + 2 * i23 + dp - dm)
    abm = A.pred("2Im[e1,e3] + 2Im[e2,e3] + delta_-1 - delta_1", 2 * i13 + 2 * i23 + dm - dp)
    b_bal = A.pred("delta_-1 - delta_1 - 2(Im[e2,e3] - Im[e1,e3])", dd.value - 2 * q.value)
    rules = [
        ("4-a-α", a_bal.sign == 0 and p1.sign > 0 and p2.sign > 0),
        ("4-a-β", ab.sign == 0),
        ("4-a-β-m", abm.sign == 0),
        ("4-b-α", b_bal.sign == 0 and q.sign > 0 and dd.sign > 0),
        ("4-b-α-m", b_bal.sign == 0 and q.sign < 0 and dd.sign < 0),
    ]
    return _decide(rules, A.report, dd.sign == 0), ""


def _analytic_III_4(A: _Analytic):
    e1, e2, e3, e4 = _reals(A.qd)
    dm, dp = A.d[-1.0], A.d[1.0]
    w = abs(q_length(e2, e3, A.c, "imag", zeros=A.zeros).value)
    dd = A.pred("delta_1 - delta_-1", dp - dm)
    s = A.pred("delta_-1 + 2|[e2,e3]| - delta_1", dm + 2 * w - dp)
    if dd.sign == 0:
        return None, ""
    if dd.sign < 0:
        return _decide([("4-b", True)], A.report, False), ""
    rules = [("4-a-α", s.sign < 0), ("4-a-β", s.sign > 0)]
    return _decide(rules, A.report, s.sign == 0), ""


def _analytic_III_6(A: _Analytic):
    e1, e2, e3, e4 = _reals(A.qd)
    L = A.limit(
        "Im[e2,-1-eps] - Im[-1+eps,e3]", lambda s: A.im(e2, -1 - s) - A.im(-1 + s, e3)
    )
    rules = [("6-a", L.sign < 0), ("6-b", L.sign > 0)]
    return _decide(rules, A.report, L.sign == 0), ""


def _analytic_III_7(A: _Analytic):
    e1, e2, e3, e4 = _reals(A.qd)
    L1 = A.limit("Im[e2,-1+i eps] - Im[e3,-1+i eps]", lambda s: A.height(-1.0, s, e2) - A.height(-1.0, s, e3))
    L2 = A.limit("Im[e3,1+i eps] - Im[e2,1+i eps]", lambda s: A.height(1.0, s, e3) - A.height(1.0, s, e2))
    rules = [
        ("7-a", L1.sign < 0 and L2.sign < 0),
        ("7-b", L1.sign > 0 and L2.sign < 0),
        ("7-b-m", L1.sign < 0 and L2.sign > 0),
    ]
    return _decide(rules, A.report, L1.sign == 0 or L2.sign == 0), ""


def _analytic_III_8(A: _Analytic):
    e1, e2, e3, e4 = _reals(A.qd)
    L1 = A.limit("Im[e2,-1+i eps] - Im[e3,-1+i eps]", lambda s: A.height(-1.0, s, e2) - A.height(-1.0, s, e3))
    if L1.sign == 0:
        return None, ""
    if L1.sign < 0:
        return _decide([("8-a", True)], A.report, False), ""
    S = abs(q_length_path([e2, 1j, e3], A.qd.coeffs, zeros=A.qd.zeros).value.imag)
    p = A.pred("2Im([e2,i] + [i,e3]) - delta_1", 2 * S - A.d[1.0])
    rules = [("8-b-α", p.sign < 0), ("8-b-β", p.sign > 0)]
    return _decide(rules, A.report, p.sign == 0), ""


_ANALYTIC = {
    ("I", None): _analytic_family_I,
    ("II", 1): _analytic_II_1,
    ("II", 2): _analytic_II_2,
    ("II", 3): _analytic_II_3,
    ("II", 4): _analytic_II_4,
    ("III", 4): _analytic_III_4,
    ("III", 6): _analytic_III_6,
    ("III", 7): _analytic_III_7,
    ("III", 8): _analytic_III_8,
}

# position classes with a single configuration
_POSITION_ONLY = {("III", 1), ("III", 2), ("III", 3), ("III", 5), ("III", 9)}


def label_case_analytic(qd: QuadDiff, rel_band: float = 1e-6) -> tuple[CaseLabel | str, PredicateReport]:
    """Predict the label from zeros and pole periods alone.

    Returns ``UNDETERMINED`` when a deciding quantity sits inside its
    tolerance band (a boundary stratum) or no rule applies, and
    ``NOT_IMPLEMENTED`` for position classes without a predicate set.
    Mirror position classes are evaluated on the reflected differential.
    """
    roots = qd.roots
    pos = position_class(roots)
    (family, case), mirror = _family_case(pos)
    if roots.has_multiple:
        rep = PredicateReport(note="merged zeros")
        return CaseLabel(family, case, "", mirror, True, "merged zeros"), rep
    if (family, case) in _POSITION_ONLY:
        rep = PredicateReport(note="fixed by zero positions")
        return CaseLabel(family, case, "", mirror, False, "position"), rep
    fn = _ANALYTIC.get((family, case))
    if fn is None:
        return NOT_IMPLEMENTED, PredicateReport(note=f"no predicates for {family}-{case}")
    target = qd.mirrored() if mirror else qd
    A = _Analytic(target, rel_band)
    tail, note = fn(A)
    A.report.note = note
    if tail is None:
        return UNDETERMINED, A.report
    own_mirror = tail.endswith("-m")
    if own_mirror:
        tail = tail[:-2]
    label = _label_from_tail(family, tail, mirror ^ own_mirror)
    return label, A.report


@dataclass
class Agreement:
    agree: bool | None
    geometric: str
    analytic: str
    message: str

    def to_json(self) -> dict:
        return {
            "agree": self.agree,
            "geometric": self.geometric,
            "analytic": self.analytic,
            "message": self.message,
        }


def cross_validate(geom, analytic) -> Agreement:
    """Compare the two routes. ``agree`` is None when one side has no label."""
    g, a = str(geom), str(analytic)
    if not isinstance(geom, CaseLabel):
        return Agreement(None, g, a, "geometric route gave no label")
    if not isinstance(analytic, CaseLabel):
        return Agreement(None, g, a, f"analytic route is {a}; geometric label stands alone")
    if g == a:
        return Agreement(True, g, a, "labels agree")
    return Agreement(False, g, a, f"the predicates say {a}, the traced geometry says {g}")
