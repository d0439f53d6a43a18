"""The quadratic differential Q0(z) dz^2 = -P0(z) / (z^2 - 1)^2 dz^2.

Besides pointwise evaluation this module provides the pole residues
(alpha_k, delta_k) and Q-lengths: integrals of sqrt(Q0) along straight
segments with the square-root branch continued along the path.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import DepressedDifferential, PoleEvaluation, SingularPath
from .polynomials import QuarticCoeffs, RootSet, solve_quartic

__all__ = [
    "QuadDiff",
    "PoleData",
    "QLength",
    "eval_Q0",
    "pole_data",
    "contour_delta",
    "q_length",
    "q_length_path",
    "continue_branch",
    "POLES",
]

POLES = (-1.0, 1.0)


def eval_Q0(z, c: QuarticCoeffs):
    """-P0(z) / ((z - 1)^2 (z + 1)^2); scalars or numpy arrays."""
    if np.isscalar(z) and (z == 1 or z == -1):
        raise PoleEvaluation(f"Q0 has a double pole at z = {z}")
    w = z * z - 1.0
    return -c(z) / (w * w)


@dataclass(frozen=True)
class PoleData:
    k: float
    alpha: float
    delta: float

    @property
    def radial(self) -> bool:
        """True when trajectories end at the pole (alpha > 0); otherwise they circle it."""
        return self.alpha > 0


def pole_data(c: QuarticCoeffs, k: float, tol: float = 1e-12) -> PoleData:
    """Leading Laurent coefficient of Q0 at the double pole ``k`` and its period.

    Near z = k, Q0 ~ alpha / (z - k)^2 with alpha = -P0(k) / 4, and a small
    loop around k has Q-length delta = 2 pi sqrt|alpha|.
    """
    k = float(k)
    if k not in POLES:
        raise ValueError("poles sit at -1 and +1")
    p = c(k)
    if abs(p) < tol * c.scale() ** 4:
        raise DepressedDifferential(f"P0({k:+g}) = {p:.3e}: a zero sits on the pole", k, p)
    alpha = -p / 4.0
    return PoleData(k, alpha, 2.0 * math.pi * math.sqrt(abs(alpha)))


def contour_delta(c: QuarticCoeffs, k: float, radius: float = 1e-2, n: int = 4096) -> float:
    """|loop integral of sqrt(Q0)| around ``k`` by the periodic trapezoid rule."""
    theta = 2.0 * np.pi * np.arange(n) / n
    z = k + radius * np.exp(1j * theta)
    dz = 1j * radius * np.exp(1j * theta)
    roots = np.sqrt(eval_Q0(z, c).astype(complex))
    roots = continue_branch(roots)
    return float(abs(np.sum(roots * dz) * (2.0 * np.pi / n)))


def continue_branch(values: np.ndarray, reference: complex | None = None) -> np.ndarray:
    """Flip signs so consecutive square-root values vary continuously."""
    out = np.array(values, dtype=complex)
    prev = reference if reference is not None else out[0]
    for i in range(len(out)):
        if abs(out[i] + prev) < abs(out[i] - prev):
            out[i] = -out[i]
        prev = out[i]
    return out


class QuadDiff:
    """Q0(z) dz^2 for a fixed quartic, with its zeros and pole data cached.

    Construction is refused when a zero collides with a double pole.
    """

    def __init__(self, coeffs: QuarticCoeffs, roots: RootSet | None = None, tol: float = 1e-7):
        self.coeffs = coeffs
        self.roots = roots if roots is not None else solve_quartic(coeffs, tol)
        self.poles = {k: pole_data(coeffs, k) for k in POLES}

    @property
    def zeros(self) -> list[complex]:
        return self.roots.distinct

    @property
    def orders(self) -> list[int]:
        return self.roots.multiplicities

    def __call__(self, z):
        return eval_Q0(z, self.coeffs)

    def root_radius(self) -> float:
        return max(abs(z) for z in self.zeros)

    def critical_points(self) -> list[complex]:
        return list(self.zeros) + [complex(k) for k in POLES]

    def leading_coefficient(self, index: int) -> complex:
        """A in Q0(z) ~ A (z - e)^n near the zero ``zeros[index]`` of order n."""
        e = self.zeros[index]
        rest = 1.0 + 0j
        for j, (other, mult) in enumerate(self.roots.roots):
            if j != index:
                rest *= (e - other) ** mult
        return -rest / (e * e - 1.0) ** 2

    def sqrt_q(self, z: complex) -> complex:
        return cmath.sqrt(self(z))

    def mirrored(self) -> "QuadDiff":
        return QuadDiff(self.coeffs.mirrored(), tol=self.roots.tol)


@dataclass(frozen=True)
class QLength:
    a: complex
    b: complex
    value: complex
    part: str
    note: str = ""

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


# 7-point Gauss / 15-point Kronrod nodes and weights on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
_KWEIGHTS = np.concatenate([_WK[:-1], _WK[::-1]])
_GAUSS_IDX = np.array([1, 3, 5, 7, 9, 11, 13])
_GWEIGHTS = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f_branch, t0, t1, ref):
    """Kronrod estimate, Gauss estimate and end value on [t0, t1]."""
    half = 0.5 * (t1 - t0)
    mid = 0.5 * (t1 + t0)
    ts = mid + half * _NODES
    vals = f_branch(ts, ref)
    k = half * np.dot(_KWEIGHTS, vals)
    g = half * np.dot(_GWEIGHTS, vals[_GAUSS_IDX])
    return k, g, vals[-1]


def q_length(
    a: complex,
    b: complex,
    c: QuarticCoeffs,
    part: str = "imag",
    rtol: float = 1e-11,
    guard: float = 1e-10,
    zeros: list[complex] | None = None,
) -> QLength:
    """Integral of sqrt(Q0) along the straight segment from ``a`` to ``b``.

    The branch is continued node by node from ``a``. The overall sign is
    fixed at the end so that the ``part`` ("real" or "imag") is non-negative.
    Endpoints may be zeros; the open segment must avoid critical points.
    Pass ``zeros`` to skip re-solving the quartic.
    """
    return q_length_path([a, b], c, part, rtol, guard, zeros)


def q_length_path(
    points: list[complex],
    c: QuarticCoeffs,
    part: str = "imag",
    rtol: float = 1e-11,
    guard: float = 1e-10,
    zeros: list[complex] | None = None,
) -> QLength:
    """Like :func:`q_length` but along a polyline.

    The branch stays continuous through the interior vertices, which must
    therefore be regular points. A single global sign is applied at the end.
    """
    pts = [complex(p) for p in points]
    roots = list(zeros) if zeros is not None else solve_quartic(c).distinct
    crit = roots + [complex(k) for k in POLES]
    for p in pts[1:-1]:
        if min(abs(p - q) for q in crit) < 1e-8 * (1.0 + abs(p)):
            raise SingularPath(f"interior vertex {p} sits on a critical point")
    total = 0j
    ref = None
    for a, b in zip(pts, pts[1:]):
        if a == b:
            continue
        value, ref = _segment_integral(a, b, c, crit, rtol, guard, ref)
        total += value
    key = total.imag if part == "imag" else total.real
    if key < 0:
        total = -total
    return QLength(pts[0], pts[-1], complex(total), part, "branch continued from the start")


def _segment_integral(a, b, c, crit, rtol, guard, ref):
    """Integral along [a, b] and the branch value of sqrt(Q0) reached at ``b``."""
    d = b - a
    for p in crit:
        s = ((p - a) * d.conjugate()).real / abs(d) ** 2
        if 0.0 < s < 1.0:
            dist = abs(a + s * d - p)
            near_end = min(abs(p - a), abs(p - b))
            if dist < guard * (1.0 + abs(p)) and near_end > guard * (1.0 + abs(p)):
                raise SingularPath(f"segment passes within {dist:.1e} of critical point {p}")
    for k in POLES:
        if min(abs(a - k), abs(b - k)) < 1e-6:
            raise SingularPath(f"endpoint within 1e-6 of the pole {k:+g}")

    def f_branch(ts, ref):
        z = a + ts * d
        raw = np.sqrt(eval_Q0(z, c).astype(complex)) * d
        # continue from the value at the left end of the interval
        order = np.argsort(ts)
        out = raw.copy()
        prev = ref
        for i in order:
            if prev is not None and abs(out[i] + prev) < abs(out[i] - prev):
                out[i] = -out[i]
            prev = out[i]
        return out

    # Coarse pass to fix the branch along the whole segment, then adaptive
    # Gauss-Kronrod on each piece seeded with that branch. Near a critical
    # point sqrt(Q0) turns quickly, so the grid is graded geometrically there.
    # short segments far from every critical point need few uniform panels
    clearance = min(_distance_to_segment(p, a, d) for p in crit)
    n0 = 64 if clearance == 0.0 else int(min(64, max(4, 8 * abs(d) / clearance)))
    grid = _panel_grid(a, d, crit, n0)
    branch = continue_branch(np.sqrt(eval_Q0(a + grid * d, c).astype(complex)), ref)
    seeds = branch * d
    if seeds[0] == 0:
        nz = np.flatnonzero(seeds)
        if len(nz):
            seeds[: nz[0]] = seeds[nz[0]]
    total = 0j
    for i in range(len(grid) - 1):
        total += _adaptive(f_branch, grid[i], grid[i + 1], seeds[i] if seeds[i] != 0 else seeds[i + 1], rtol, 0)
    return total, branch[-1]


def _distance_to_segment(p: complex, a: complex, d: complex) -> float:
    s = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / abs(d) ** 2))
    return abs(a + s * d - p)


def _panel_grid(a: complex, d: complex, points: list[complex], n0: int = 64) -> np.ndarray:
    """Uniform panels in [0, 1] plus breakpoints doubling away from close critical points."""
    L = abs(d)
    ts = list(np.linspace(0.0, 1.0, n0 + 1))
    for p in points:
        s = min(1.0, max(0.0, ((p - a) * d.conjugate()).real / L**2))
        r = abs(a + s * d - p) / L
        if r == 0.0 or r > 0.1:
            continue
        step = r / 2
        while step < 1.0:
            for t in (s - step, s + step):
                if 0.0 < t < 1.0:
                    ts.append(t)
            step *= 2
    return np.unique(np.asarray(ts))


def _adaptive(f_branch, t0, t1, ref, rtol, depth):
    k, g, _ = _gk15(f_branch, t0, t1, ref)
    if abs(k - g) <= max(rtol * abs(k), 1e-15) or depth > 40:
        return k
    tm = 0.5 * (t0 + t1)
    left = _adaptive(f_branch, t0, tm, ref, rtol, depth + 1)
    # branch reference at the midpoint, continued from the left half
    mid_val = f_branch(np.array([t0 + 0.5 * (tm - t0), tm]), ref)[-1]
    right = _adaptive(f_branch, tm, t1, mid_val, rtol, depth + 1)
    return left + right
