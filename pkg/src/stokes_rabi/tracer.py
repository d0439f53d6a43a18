"""Critical trajectories of Q0(z) dz^2.

A trajectory is a curve along which Q0(z) dz^2 > 0, so its unit tangent is
exp(-i arg(Q0)/2) up to sign. Every zero of order n emits n + 2 of them.
Rays are integrated in arc length with an embedded Dormand-Prince pair and
nudged back onto the level set Im(integral of sqrt(Q0) dz) = const after
each step.

Real coefficients make the picture symmetric under conjugation, so by
default only rays starting in the closed upper half-plane are integrated. A
ray that reaches the real axis at a regular point crosses it at a right
angle and, by symmetry, continues as the mirror image of itself; it ends at
the conjugate of its starting zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .errors import StepUnderflow
from .qdiff_core import POLES, QuadDiff

__all__ = [
    "TraceOptions",
    "Terminal",
    "Trajectory",
    "critical_directions",
    "trace_trajectory",
    "trace_all",
    "TraceSet",
]


@dataclass(frozen=True)
class TraceOptions:
    initial_step: float = 1e-3
    max_steps: int = 20000
    angle_tol: float = 1e-6
    snap_radius: float = 1e-6
    pole_capture: float = 1e-4
    rtol: float = 1e-10
    launch_offset: float = 1e-6
    escape_factor: float = 50.0
    use_symmetry: bool = True


class Terminal(str, Enum):
    ZERO = "Zero"
    POLE = "Pole"
    INFINITY_UP = "InfinityUp"
    INFINITY_DOWN = "InfinityDown"
    STEP_LIMIT = "StepLimit"


@dataclass
class Trajectory:
    """One traced critical trajectory.

    ``start`` is the index of the starting zero and ``start_dir`` the index
    of its critical direction. For a ``Terminal.ZERO`` end, ``end`` is the
    zero index and ``end_dir`` the critical direction it arrives along;
    for ``Terminal.POLE`` it is the pole (-1.0 or 1.0).
    """

    start: int
    start_dir: int
    direction: complex
    points: np.ndarray
    qlength: np.ndarray
    terminal: Terminal
    end: int | float | None = None
    end_dir: int | None = None
    crossing: complex | None = None
    mirrored_from: int | None = None
    along_axis: bool = False

    @property
    def start_point(self) -> complex:
        return complex(self.points[0])

    @property
    def end_point(self) -> complex:
        return complex(self.points[-1])

    def conjugate(self, zero_conj: list[int], dir_conj) -> "Trajectory":
        """Mirror image under z -> conj(z)."""
        term = {
            Terminal.INFINITY_UP: Terminal.INFINITY_DOWN,
            Terminal.INFINITY_DOWN: Terminal.INFINITY_UP,
        }.get(self.terminal, self.terminal)
        end, end_dir = self.end, self.end_dir
        if self.terminal is Terminal.ZERO:
            end_dir = dir_conj(end, end_dir)
            end = zero_conj[end]
        return Trajectory(
            zero_conj[self.start],
            dir_conj(self.start, self.start_dir),
            self.direction.conjugate(),
            np.conj(self.points),
            self.qlength.copy(),
            term,
            end,
            end_dir,
            None if self.crossing is None else self.crossing.conjugate(),
            along_axis=self.along_axis,
        )


def critical_directions(point, order: int, leading: complex = 1.0) -> list[complex]:
    """Unit tangents of the critical trajectories at a critical point.

    For a zero of order n with Q ~ leading * (z - point)^n there are n + 2
    directions solving arg(leading) + (n + 2) arg(d) = 0 (mod 2 pi). Pass
    ``point=math.inf`` for the pole at infinity, whose critical directions
    are +i and -i.
    """
    if point == math.inf or (isinstance(point, str) and point == "inf"):
        return [1j, -1j]
    if order < 1:
        raise ValueError("order must be at least 1 for a zero")
    base = -cmath.phase(leading)
    return [cmath.exp(1j * (base + 2.0 * math.pi * k) / (order + 2)) for k in range(order + 2)]


# Dormand-Prince 5(4) tableau
_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)

# three-point Gauss rule on [0, 1]
_G3 = ((0.5 - math.sqrt(15) / 10, 5 / 18), (0.5, 8 / 18), (0.5 + math.sqrt(15) / 10, 5 / 18))


class _Field:
    def __init__(self, qd: QuadDiff, orthogonal: bool = False):
        c = qd.coeffs
        self.c3, self.c2, self.c1, self.c0 = c.c3, c.c2, c.c1, c.c0
        self.sign = 1.0 if orthogonal else -1.0

    def q(self, z: complex) -> complex:
        w = z * z - 1.0
        return self.sign * ((((z + self.c3) * z + self.c2) * z + self.c1) * z + self.c0) / (w * w)

    def direction(self, z: complex, ref: complex) -> complex:
        s = cmath.sqrt(self.q(z))
        m = abs(s)
        if m == 0.0:
            return ref
        v = s.conjugate() / m
        if v.real * ref.real + v.imag * ref.imag < 0.0:
            v = -v
        return v

    def root(self, z: complex, u: complex) -> complex:
        """sqrt(Q0(z)) on the branch making sqrt(Q0) * u positive."""
        s = cmath.sqrt(self.q(z))
        p = s * u
        return -s if p.real < 0 else s

    def chord(self, z0: complex, z1: complex, u: complex) -> complex:
        d = z1 - z0
        return sum(w * self.root(z0 + t * d, u) for t, w in _G3) * d


@dataclass
class _Targets:
    zeros: list[complex]
    zero_snap: list[float]
    radial_poles: list[float]


def _nearest_critical(z: complex, pts: list[complex]) -> float:
    return min(abs(z - p) for p in pts)


def trace_trajectory(
    start: complex,
    direction: complex,
    qd: QuadDiff,
    opts: TraceOptions = TraceOptions(),
    start_index: int | None = None,
    start_dir: int = 0,
    stop_at_axis: bool | None = None,
    orthogonal: bool = False,
) -> Trajectory:
    """Integrate one critical trajectory from the zero ``start``.

    ``stop_at_axis`` (default: ``opts.use_symmetry``) ends the ray where it
    meets the real axis at a regular point and completes it by reflection.
    With ``orthogonal`` the curve follows -Q0 dz^2 > 0 instead; then poles of
    circle type capture it, it leaves along the real direction at infinity,
    and it is never reflected.
    """
    f = _Field(qd, orthogonal)
    zeros = list(qd.zeros)
    if start_index is None:
        start_index = min(range(len(zeros)), key=lambda i: abs(zeros[i] - start))
    stop_at_axis = (opts.use_symmetry if stop_at_axis is None else stop_at_axis) and not orthogonal
    radial = [k for k in POLES if (qd.poles[k].alpha > 0) != orthogonal]
    crit = list(zeros) + [complex(k) for k in POLES]
    others = [p for i, p in enumerate(crit) if i != start_index]
    snaps = [opts.snap_radius * (1.0 + abs(e)) for e in zeros]
    escape = opts.escape_factor * (1.0 + qd.root_radius())
    start_real = abs(start.imag) <= 1e-12 * (1.0 + abs(start))

    u = direction / abs(direction)
    z = start + opts.launch_offset * (1.0 + abs(start)) * u
    u = f.direction(z, u)
    pts = [start, z]
    ql = [0.0, 0.0]
    h = opts.initial_step
    inside_pole = {k: 0 for k in radial}
    last_dist = {k: abs(z - k) for k in radial}
    terminal = Terminal.STEP_LIMIT
    end = None
    crossing = None

    for _ in range(opts.max_steps):
        dist = min(_nearest_critical(z, others), abs(z - start))
        h = min(h, 0.25 * dist)
        while True:
            if h < 1e-15 * (1.0 + abs(z)):
                raise StepUnderflow(f"step underflow at z={z}")
            ks = []
            for stage in range(7):
                zi = z + h * sum(a * k for a, k in zip(_A[stage], ks))
                ks.append(f.direction(zi, u))
            z5 = z + h * sum(b * k for b, k in zip(_B5, ks))
            z4 = z + h * sum(b * k for b, k in zip(_B4, ks))
            err = abs(z5 - z4)
            tol = opts.rtol * max(h, 1e-3) * (1.0 + abs(z)) * 10
            u_new = f.direction(z5, u)
            turn = abs(cmath.phase(u_new / u))
            if err <= tol and turn < 0.5 * math.pi:
                break
            shrink = 0.9 * (tol / err) ** 0.2 if err > 0 else 0.5
            h *= min(0.5, max(0.1, shrink))
        # reproject onto the level set of Im(integral sqrt(Q) dz)
        inc = f.chord(z, z5, u)
        m = abs(f.q(z5)) ** 0.5
        if m > 0:
            z5 = z5 - 1j * u_new * (inc.imag / m)
            inc = f.chord(z, z5, u)
            u_new = f.direction(z5, u_new)
        grow = 0.9 * (tol / err) ** 0.2 if err > 0 else 5.0
        h_next = h * min(5.0, max(1.0, grow))

        # real-axis crossing: complete by reflection
        if stop_at_axis and z5.imag * z.imag < 0 and not (start_real and len(pts) < 3):
            s = z.imag / (z.imag - z5.imag)
            x = z + s * (z5 - z)
            x = complex(x.real, 0.0)
            crossing = x
            pts.append(x)
            ql.append(ql[-1] + abs(f.chord(z, x, u)))
            terminal = Terminal.ZERO
            end = "conj"
            break

        z, u = z5, u_new
        pts.append(z)
        ql.append(ql[-1] + inc.real)
        h = h_next

        hit = None
        for j, e in enumerate(zeros):
            if j != start_index and abs(z - e) < snaps[j]:
                hit = j
                break
        if hit is not None:
            pts.append(zeros[hit])
            terminal, end = Terminal.ZERO, hit
            break
        captured = None
        for k in radial:
            d = abs(z - k)
            if d < opts.pole_capture:
                inside_pole[k] = inside_pole[k] + 1 if d < last_dist[k] else 0
                if inside_pole[k] >= 20:
                    captured = k
            else:
                inside_pole[k] = 0
            last_dist[k] = d
        if captured is not None:
            pts.append(complex(captured))
            terminal, end = Terminal.POLE, captured
            break
        if abs(z) > escape and abs(u.imag if orthogonal else u.real) < 0.05:
            terminal = Terminal.INFINITY_UP if z.imag > 0 else Terminal.INFINITY_DOWN
            break

    traj = Trajectory(
        start_index, start_dir, direction, np.array(pts, dtype=complex), np.array(ql), terminal, end
    )
    if end == "conj":
        traj = _reflect(traj, qd)
    elif terminal is Terminal.ZERO:
        traj.end_dir = _arrival_index(qd, end, traj.points)
    return traj


def _arrival_index(qd: QuadDiff, index: int, points: np.ndarray) -> int:
    e = qd.zeros[index]
    dirs = critical_directions(e, qd.orders[index], qd.leading_coefficient(index))
    # use the first sample well away from the snap disc, walking backwards
    scale = 1.0 + abs(e)
    probe = points[-2]
    for p in points[-2::-1]:
        if abs(p - e) > 1e-4 * scale:
            break
        probe = p
    v = (probe - e) / abs(probe - e)
    return min(range(len(dirs)), key=lambda k: abs(dirs[k] - v))


def _conj_index(qd: QuadDiff, index: int) -> int:
    e = qd.zeros[index].conjugate()
    return min(range(len(qd.zeros)), key=lambda j: abs(qd.zeros[j] - e))


def _conj_dir(qd: QuadDiff, index: int, k: int) -> int:
    e = qd.zeros[index]
    dirs = critical_directions(e, qd.orders[index], qd.leading_coefficient(index))
    j = _conj_index(qd, index)
    target = dirs[k].conjugate()
    dirs_j = critical_directions(qd.zeros[j], qd.orders[j], qd.leading_coefficient(j))
    return min(range(len(dirs_j)), key=lambda m: abs(dirs_j[m] - target))


def _reflect(traj: Trajectory, qd: QuadDiff) -> Trajectory:
    upper = traj.points
    lower = np.conj(upper[-2::-1])
    pts = np.concatenate([upper, lower])
    total = traj.qlength[-1]
    ql = np.concatenate([traj.qlength, 2 * total - traj.qlength[-2::-1]])
    j = _conj_index(qd, traj.start)
    end_dir = _conj_dir(qd, traj.start, traj.start_dir)
    pts[-1] = qd.zeros[j]
    return replace(traj, points=pts, qlength=ql, end=j, end_dir=end_dir)


def _axis_segment(qd: QuadDiff, index: int, k: int, sign: float) -> Trajectory:
    """A stretch of the real axis from a real zero to the next real critical point."""
    e = qd.zeros[index].real
    stops = []
    for j, (z, real) in enumerate(zip(qd.zeros, qd.roots.is_real)):
        if real and j != index and (z.real - e) * sign > 0:
            stops.append((abs(z.real - e), "zero", j))
    for p in POLES:
        if (p - e) * sign > 0:
            stops.append((abs(p - e), "pole", p))
    dist, kind, target = min(stops)
    xs = e + sign * np.linspace(0.0, dist, 65)
    pts = xs.astype(complex)
    roots = np.sqrt(np.abs(qd(xs[1:-1].astype(complex))))
    step = np.abs(np.diff(xs))
    mid = np.concatenate([[roots[0]], 0.5 * (roots[:-1] + roots[1:]), [roots[-1]]])
    ql = np.concatenate([[0.0], np.cumsum(mid * step)])
    if kind == "zero":
        end_dir = _axis_direction_index(qd, target, -sign)
        return Trajectory(index, k, complex(sign), pts, ql, Terminal.ZERO, target, end_dir, along_axis=True)
    return Trajectory(index, k, complex(sign), pts, ql, Terminal.POLE, target, along_axis=True)


def _axis_direction_index(qd: QuadDiff, index: int, sign: float) -> int:
    dirs = critical_directions(qd.zeros[index], qd.orders[index], qd.leading_coefficient(index))
    return min(range(len(dirs)), key=lambda m: abs(dirs[m] - sign))


@dataclass
class TraceSet:
    """Deduplicated critical trajectories plus bookkeeping."""

    trajectories: list[Trajectory]
    launched: int
    integrated: int
    duplicates: int
    conflicts: list[str] = field(default_factory=list)


def trace_all(qd: QuadDiff, opts: TraceOptions = TraceOptions()) -> TraceSet:
    """Every critical trajectory of ``qd``, each edge reported once.

    Rays are keyed by (zero index, direction index); a trajectory ending at
    a zero claims the arrival key there, so the same edge traced from its
    other end is dropped. With ``opts.use_symmetry`` only rays in the closed
    upper half-plane are integrated and the rest follow by conjugation.
    """
    zeros = qd.zeros
    launched = sum(n + 2 for n in qd.orders)
    claimed: dict[tuple[int, int], int] = {}
    out: list[Trajectory] = []
    conflicts: list[str] = []
    integrated = 0
    duplicates = 0

    def claim(key, idx):
        if key in claimed and claimed[key] != idx:
            conflicts.append(f"direction {key} reached twice")
            return False
        claimed[key] = idx
        return True

    def add(traj: Trajectory) -> int:
        idx = len(out)
        out.append(traj)
        claim((traj.start, traj.start_dir), idx)
        if traj.terminal is Terminal.ZERO:
            claim((traj.end, traj.end_dir), idx)
        return idx

    order = sorted(range(len(zeros)), key=lambda i: (zeros[i].real, zeros[i].imag))
    for i in order:
        e = zeros[i]
        real = qd.roots.is_real[i]
        if opts.use_symmetry and not real and e.imag < 0:
            continue
        dirs = critical_directions(e, qd.orders[i], qd.leading_coefficient(i))
        for k in sorted(range(len(dirs)), key=lambda k: cmath.phase(dirs[k])):
            d = dirs[k]
            if (i, k) in claimed:
                duplicates += 1
                continue
            axial = real and abs(d.imag) < 1e-9
            if axial:
                add(_axis_segment(qd, i, k, 1.0 if d.real > 0 else -1.0))
                continue
            if opts.use_symmetry and real and d.imag < 0:
                continue
            traj = trace_trajectory(e, d, qd, opts, start_index=i, start_dir=k)
            integrated += 1
            if traj.terminal is Terminal.ZERO and (traj.end, traj.end_dir) in claimed:
                duplicates += 1
                continue
            idx = add(traj)
            if not opts.use_symmetry:
                continue
            self_symmetric = traj.crossing is not None
            if not self_symmetric:
                mirror = traj.conjugate(
                    [_conj_index(qd, j) for j in range(len(zeros))],
                    lambda j, m: _conj_dir(qd, j, m),
                )
                mirror.mirrored_from = idx
                if (mirror.start, mirror.start_dir) in claimed:
                    continue
                add(mirror)
    return TraceSet(out, launched, integrated, duplicates, conflicts)
