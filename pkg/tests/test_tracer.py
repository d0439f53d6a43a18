import cmath
import math

import numpy as np
import pytest

from stokes_rabi.asymptotics import AsymptoticParams, params_at_coupling
from stokes_rabi.qdiff_core import QuadDiff, q_length_path
from stokes_rabi.rabi_map import coeffs_from_params
from stokes_rabi.tracer import Terminal, TraceOptions, critical_directions, trace_all, trace_trajectory


def quad_diff(E_a, Delta_a, g=100.0):
    return QuadDiff(coeffs_from_params(params_at_coupling(AsymptoticParams(E_a, Delta_a), g)))


@pytest.fixture(scope="module")
def ring_case():
    qd = quad_diff(2.0, 1.0)
    return qd, trace_all(qd)


def gaps(angles):
    a = sorted(x % (2 * math.pi) for x in angles)
    return [(b - x) % (2 * math.pi) for x, b in zip(a, a[1:] + a[:1])]


class TestCriticalDirections:
    def test_simple_zero(self):
        dirs = critical_directions(0.0, 1)
        assert len(dirs) == 3
        assert gaps(map(cmath.phase, dirs)) == pytest.approx([2 * math.pi / 3] * 3)

    def test_double_zero(self):
        dirs = critical_directions(0.3, 2, leading=-2.0)
        assert len(dirs) == 4
        assert gaps(map(cmath.phase, dirs)) == pytest.approx([math.pi / 2] * 4)

    def test_infinity(self):
        assert critical_directions(math.inf, 0) == [1j, -1j]

    @pytest.mark.parametrize("leading", [1.0, -1.0, 2 + 3j, -1j])
    def test_satisfy_the_trajectory_condition(self, leading):
        for n in (1, 2, 3):
            for d in critical_directions(0.0, n, leading):
                # Q ~ leading h^n, and along h = r d: Q dh^2 ~ leading r^n d^(n+2) > 0
                w = leading * d ** (n + 2)
                assert abs(w.imag) < 1e-12 and w.real > 0

    def test_bad_order(self):
        with pytest.raises(ValueError):
            critical_directions(0.0, 0)


class TestTraceAll:
    def test_counts(self, ring_case):
        qd, ts = ring_case
        assert ts.launched == 12
        assert len(ts.trajectories) == 7
        assert not ts.conflicts

    def test_terminals(self, ring_case):
        _, ts = ring_case
        kinds = sorted(t.terminal.value for t in ts.trajectories)
        assert kinds.count("Zero") == 5
        assert {"InfinityUp", "InfinityDown"} <= set(kinds)

    def test_every_direction_used_once(self, ring_case):
        qd, ts = ring_case
        used = []
        for t in ts.trajectories:
            used.append((t.start, t.start_dir))
            if t.terminal is Terminal.ZERO:
                used.append((t.end, t.end_dir))
        assert len(used) == len(set(used)) == sum(n + 2 for n in qd.orders)

    def test_trajectory_condition(self, ring_case):
        # adaptive quadrature along the traced polyline: the integral of sqrt(Q0) dz is real
        qd, ts = ring_case
        for t in ts.trajectories:
            pts = list(t.points)
            clear = {k for k, z in enumerate(pts) if min(abs(z - p) for p in qd.critical_points()) > 1e-2}
            stop = max(clear) if t.terminal is not Terminal.ZERO else len(pts) - 1
            path = [pts[k] for k in range(0, stop, 7) if k == 0 or k in clear] + [pts[stop]]
            q = q_length_path(path, qd.coeffs, part="real", zeros=qd.zeros).value
            assert abs(q.imag) < 1e-5 * (1 + abs(q.real)), (t.terminal, q)

    def test_level_set(self, ring_case):
        qd, ts = ring_case
        for t in ts.trajectories:
            assert np.ptp(np.asarray(t.qlength).imag) < 1e-6 * (1 + np.max(np.abs(t.qlength)))

    def test_conjugation_closure(self, ring_case):
        _, ts = ring_case
        ends = [frozenset({round(t.start_point.real, 5) + 1j * round(t.start_point.imag, 5),
                           round(t.end_point.real, 5) + 1j * round(t.end_point.imag, 5)})
                for t in ts.trajectories if t.terminal is Terminal.ZERO]
        for e in ends:
            assert frozenset(z.conjugate() for z in e) in ends

    def test_symmetry_shortcut_agrees(self, ring_case):
        qd, ts = ring_case
        full = trace_all(qd, TraceOptions(use_symmetry=False))
        assert len(full.trajectories) == len(ts.trajectories)
        assert sorted(t.terminal.value for t in full.trajectories) == sorted(t.terminal.value for t in ts.trajectories)
        assert full.integrated > ts.integrated

    def test_escape_direction(self, ring_case):
        _, ts = ring_case
        for t in ts.trajectories:
            if t.terminal is Terminal.INFINITY_UP:
                tail = t.points[-1] - t.points[-20]
                assert tail.imag > 0 and abs(tail.real) < 0.2 * abs(tail)


def test_single_ray_reaches_a_terminal(ring_case):
    qd, _ = ring_case
    i = 0
    d = critical_directions(qd.zeros[i], qd.orders[i], qd.leading_coefficient(i))[0]
    t = trace_trajectory(qd.zeros[i], d, qd, TraceOptions(use_symmetry=False), start_index=i)
    assert t.terminal is not Terminal.STEP_LIMIT
