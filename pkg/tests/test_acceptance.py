"""Acceptance gate: one test per criterion, each printing a PASS/FAIL line.

Run on its own with ``python -m pytest tests/test_acceptance.py -v -s`` or
``python tests/test_acceptance.py``.
"""

import math
import subprocess
import sys
import time

import numpy as np
import pytest

from cases import ASYMPTOTIC, BY_LABEL, asymptotic_coeffs
from stokes_rabi.asymptotics import (
    AsymptoticParams,
    Region,
    asymptotic_coeffs as limit_coeffs,
    asymptotic_region,
    limit_convergence,
)
from stokes_rabi.pipeline import analyze
from stokes_rabi.polynomials import QuarticCoeffs, RootPattern, classify_roots, lagrange_invariants, solve_quartic
from stokes_rabi.qdiff_core import contour_delta, pole_data
from stokes_rabi.rabi_map import (
    RabiParams,
    SpecialConfig,
    SpecialMode,
    coeffs_from_params,
    cylinder_residual,
    invariants_from_params,
    mirror_params,
    special_config_solve,
)


@pytest.fixture
def report(capsys):
    def emit(number: int, ok: bool, detail: str):
        with capsys.disabled():
            print(f"\n{'PASS' if ok else 'FAIL'} criterion {number}: {detail}")
        assert ok, detail

    return emit


def random_params(rng, n):
    out = []
    for _ in range(n):
        g_sq = rng.uniform(0.1, 10.0) * rng.choice([-1.0, 1.0])
        out.append(RabiParams(rng.uniform(0.0, 16.0), rng.uniform(-6.0, 6.0), g_sq))
    return out


def test_criterion_1_cylinder_identity(report):
    params = random_params(np.random.default_rng(101), 1000)
    start = time.perf_counter()
    worst = 0.0
    for p in params:
        c = coeffs_from_params(p)
        worst = max(worst, abs(cylinder_residual(c)) / (1.0 + c.c3**4))
    elapsed = time.perf_counter() - start
    report(1, worst < 1e-10 and elapsed < 1.0, f"max scaled residual {worst:.2e} (< 1e-10), {elapsed:.3f} s (< 1 s)")


def test_criterion_2_dual_invariants(report):
    worst = 0.0
    for p in random_params(np.random.default_rng(102), 1000):
        phys = invariants_from_params(p).as_dict()
        coef = lagrange_invariants(coeffs_from_params(p)).as_dict()
        for k in phys:
            scale = max(abs(phys[k]), abs(coef[k]))
            if scale > 0:
                worst = max(worst, abs(phys[k] - coef[k]) / scale)
    pinned = invariants_from_params(RabiParams(0.0, 0.0, 1.0))
    pinned_ok = math.isclose(pinned.Pc, 3.0, rel_tol=1e-12) and math.isclose(pinned.Qc, 24.0, rel_tol=1e-12)
    report(2, worst < 1e-9 and pinned_ok, f"max relative gap {worst:.2e} (< 1e-9); Pc, Qc at (0,0,1) = {pinned.Pc:g}, {pinned.Qc:g}")


def test_criterion_3_root_class_oracle(report):
    pinned = {
        (0, -5, 0, 4): RootPattern.FourReal,
        (0, 0, 0, 1): RootPattern.FourComplex,
        (0, 0, 0, -1): RootPattern.TwoRealTwoComplex,
    }
    pinned_ok = all(
        classify_roots(lagrange_invariants(QuarticCoeffs(*c)), QuarticCoeffs(*c)).pattern is want
        for c, want in pinned.items()
    )
    rng = np.random.default_rng(103)
    vectors = rng.uniform(-5.0, 5.0, size=(10_000, 4))
    start = time.perf_counter()
    checked = mismatched = 0
    for row in vectors:
        c = QuarticCoeffs(*row)
        inv = lagrange_invariants(c)
        if abs(inv.D0) < 1e-6 * c.scale() ** 12:
            continue
        checked += 1
        mismatched += classify_roots(inv, c).real_count != solve_quartic(c).real_count
    elapsed = time.perf_counter() - start
    ok = pinned_ok and mismatched == 0 and checked > 9900 and elapsed < 5.0
    report(3, ok, f"{checked} vectors outside the guard band, {mismatched} mismatches, pinned ok={pinned_ok}, {elapsed:.2f} s (< 5 s)")


def test_criterion_4_pole_periods(report):
    rng = np.random.default_rng(104)
    worst = 0.0
    sets = 0
    while sets < 100:
        c = QuarticCoeffs(*rng.uniform(-3.0, 3.0, 4))
        zeros = np.roots([1.0, *c.as_tuple()])
        if min(abs(zeros - 1)) < 1e-6 or min(abs(zeros + 1)) < 1e-6:
            continue
        sets += 1
        for k in (-1.0, 1.0):
            closed = pole_data(c, k).delta
            radius = min(0.5 * min(abs(zeros - k)), 1.0)
            worst = max(worst, abs(contour_delta(c, k, radius=radius) - closed) / closed)
    report(4, worst < 1e-6, f"max relative gap closed form vs contour {worst:.2e} (< 1e-6) on {sets} sets")


def _zeros_of(sol):
    return solve_quartic(coeffs_from_params(sol.params)).values()


def test_criterion_5_special_configurations(report):
    errors = {}
    # vertical line Re z = alpha through alpha + i beta1
    sol = special_config_solve(SpecialConfig(SpecialMode.VerticalLine, alpha=1.0, beta1=3.0))
    zs = _zeros_of(sol)
    imag = sorted(abs(z.imag) for z in zs)
    errors["vertical"] = max(
        max(abs(z.real - 1.0) for z in zs),
        abs(imag[-1] - 3.0),
        abs(imag[0] - sol.geometry["beta2"]),
    )
    # symmetric real pair +-alpha plus a complex pair delta +- i beta
    sol = special_config_solve(SpecialConfig(SpecialMode.SymRealPairComplexPair, alpha=1.2, delta=1.0))
    zs = _zeros_of(sol)
    real = sorted(z.real for z in zs if abs(z.imag) < 1e-9)
    cplx = [z for z in zs if abs(z.imag) >= 1e-9]
    beta = math.sqrt(sol.geometry["beta_sq"])
    errors["pair"] = max(
        abs(real[0] + 1.2),
        abs(real[1] - 1.2),
        max(abs(z.real - 1.0) for z in cplx),
        max(abs(abs(z.imag) - beta) for z in cplx),
    )
    # circle |z| = r with theta2 = pi - arccos(cos(theta1) / 3)
    r, th1 = 2.0, 0.5
    sol = special_config_solve(SpecialConfig(SpecialMode.CircleCentered, r=r, theta1=th1))
    th2 = math.pi - math.acos(math.cos(th1) / 3.0)
    zs = _zeros_of(sol)
    angles = sorted(abs(np.angle(z)) for z in zs)
    errors["circle"] = max(
        max(abs(abs(z) - r) for z in zs),
        abs(angles[0] - th1),
        abs(angles[-1] - th2),
        abs(sol.geometry["theta2"] - th2),
    )
    lines = special_config_solve(SpecialConfig(SpecialMode.HorizontalLines, alpha=0.5, beta=1.0))
    rays = special_config_solve(SpecialConfig(SpecialMode.TwoRays, theta=0.7))
    t = math.cos(0.7)
    infeasible_ok = (
        not lines
        and math.isclose(lines.witness["delta_sq"], -(2.0**2) / 4.0)
        and not rays
        and math.isclose(rays.witness["discriminant"], 16 * t * t * (t * t - 1))
        and rays.witness["discriminant"] < 0
    )
    worst = max(errors.values())
    detail = ", ".join(f"{k} {v:.1e}" for k, v in errors.items())
    report(5, worst < 1e-8 and infeasible_ok, f"round-trip errors {detail} (< 1e-8); infeasible modes ok={infeasible_ok}")


# labels with a distinct mirror twin, one frozen point each
TWIN_LABELS = [
    "II-1-a", "II-2-b", "II-3-a-alpha", "II-3-a-beta", "II-3-b",
    "II-4-a-beta", "II-4-b-alpha", "III-4-a-alpha", "III-5", "III-8-b-alpha",
]


def test_criterion_6_mirror_law(report):
    worst = 0.0
    for p in random_params(np.random.default_rng(106), 100):
        mine = solve_quartic(coeffs_from_params(p)).values()
        theirs = [-z for z in solve_quartic(coeffs_from_params(mirror_params(p))).values()]
        scale = 1.0 + max(abs(z) for z in mine)
        gap = max(min(abs(a - b) for b in theirs) for a in mine)
        worst = max(worst, gap / scale)
    twins = 0
    for label in TWIN_LABELS:
        case = BY_LABEL[label]
        a = analyze(case.coeffs)
        b = analyze(coeffs_from_params(mirror_params(case.rabi)))
        if str(a.geometric) == label and str(b.geometric) == f"{label}-m" and str(b.analytic) == f"{label}-m":
            twins += 1
    report(6, worst < 1e-9 and twins == 10, f"max zero gap {worst:.1e} (< 1e-9); mirror twins {twins}/10")


# Reference domain configurations: inventory (end, strip, ring, circle) and strip vertices
REFERENCE = {
    "I-1": ((2, 0, 1, 2), ()),
    "I-2": ((2, 1, 0, 2), (("-i inf", "i inf"),)),
    "II-2-a": ((2, 0, 1, 2), ()),
    "III-2": ((2, 1, 0, 2), (("-i inf", "i inf"),)),
    "II-1-a": ((2, 1, 0, 2), (("-i inf", "i inf"),)),
    "II-3-a-alpha": ((2, 3, 0, 1), (("-1", "-1"), ("-1", "i inf"), ("-i inf", "-1"))),
    "II-3-b": ((2, 1, 1, 1), (("-1", "-1"),)),
    "II-4-a-beta": ((2, 4, 0, 0), (("-1", "-1"), ("-1", "1"), ("-1", "i inf"), ("-i inf", "-1"))),
    "II-4-b-alpha": ((2, 2, 1, 0), (("-1", "-1"), ("-1", "1"))),
    "III-4-a-alpha": ((2, 4, 0, 0), (("-1", "1"), ("-i inf", "1"), ("1", "1"), ("1", "i inf"))),
    "III-9": ((2, 5, 0, 0), (("-1", "i inf"), ("-i inf", "-1"), ("-i inf", "1"), ("-i inf", "i inf"), ("1", "i inf"))),
}


@pytest.fixture(scope="module")
def traced():
    out = {}
    for region, ((e_a, d_a), ref) in sorted(ASYMPTOTIC.items()):
        start = time.perf_counter()
        an = analyze(asymptotic_coeffs(e_a, d_a))
        out[f"{ref.label} ({region}, g=100)"] = (ref.label, an, time.perf_counter() - start)
    for label in REFERENCE:
        if label in {ref.label for _, ref in ASYMPTOTIC.values()}:
            continue
        start = time.perf_counter()
        an = analyze(BY_LABEL[label].coeffs)
        out[label] = (label, an, time.perf_counter() - start)
    return out


def test_criterion_7_reference_inventories(report, traced):
    bad = []
    slowest = 0.0
    for name, (label, an, seconds) in traced.items():
        inv, strips = REFERENCE[label]
        got = tuple(an.config.inventory[k] for k in ("end", "strip", "ring", "circle"))
        slowest = max(slowest, seconds)
        if str(an.geometric) != label or got != inv or an.config.strips != strips or seconds >= 10.0:
            bad.append(f"{name}: {an.geometric} {got} {an.config.strips} {seconds:.1f}s")
    extra = len(traced) - 4
    ok = not bad and extra >= 4
    report(7, ok, f"{len(traced) - len(bad)}/{len(traced)} configurations match ({extra} beyond the large-coupling four), slowest {slowest:.2f} s (< 10 s)" + ("; " + "; ".join(bad) if bad else ""))


def test_criterion_8_structure(report, traced):
    failures = {name: an.structure.failures() for name, (_, an, _) in traced.items() if not an.structure.ok}
    report(8, not failures, f"structural checks pass on {len(traced) - len(failures)}/{len(traced)} graphs" + (f"; {failures}" if failures else ""))


def _shape(c):
    rs = solve_quartic(c)
    zs = rs.values()
    scale = 1.0 + max(abs(z) for z in zs)
    real = [abs(z.imag) < 1e-7 * scale for z in zs]
    imag = [abs(z.real) < 1e-7 * scale and not r for z, r in zip(zs, real)]
    distinct = len(rs.distinct) == 4
    if all(real) and distinct:
        return Region.R4
    if all(imag) and distinct:
        return Region.I4
    if sum(real) == 2 and sum(imag) == 2:
        return Region.IR
    if not any(real) and not any(imag):
        return Region.C4
    return None


def test_criterion_9_large_coupling(report):
    rng = np.random.default_rng(109)
    counts = {r: 0 for r in (Region.I4, Region.C4, Region.IR, Region.R4)}
    wrong = {r: 0 for r in counts}
    while min(counts.values()) < 1000:
        p = AsymptoticParams(rng.uniform(-12.0, 6.0), rng.uniform(1e-3, 6.0))
        region = asymptotic_region(p)
        if region not in counts or counts[region] >= 1000:
            continue
        counts[region] += 1
        wrong[region] += _shape(limit_coeffs(p)) is not region
    ratios = []
    monotone = True
    for (e_a, d_a), _ in ASYMPTOTIC.values():
        rep = limit_convergence(AsymptoticParams(e_a, d_a), [10, 100, 1000])
        monotone &= rep.monotone and not rep.skipped
        ratios.extend(rep.root_ratios)
    ok = not any(wrong.values()) and monotone and max(ratios) < 0.05
    report(9, ok, f"misclassified per region {dict((k.value, v) for k, v in wrong.items())} of 1000 each; decay monotone={monotone}, worst ratio per decade {max(ratios):.4f} (< 0.05)")


def _cli(*argv, env=None):
    return subprocess.run(
        [sys.executable, "-m", "stokes_rabi", *argv], capture_output=True, timeout=300, env=env
    ).stdout


def test_criterion_10_cli_determinism(report):
    point = ("--delta", "0.35", "--energy", "-2.49", "--gsq", "1.99")
    json_same = _cli("classify", *point) == _cli("classify", *point)
    svg_same = _cli("render", *point) == _cli("render", *point)
    grid = ("sweep", "--grid", "delta=0.25:2.5:3,energy=-2.5:2.5:3", "--gsq", "1.5")
    one, eight = _cli(*grid, "--threads", "1"), _cli(*grid, "--threads", "8")
    sweep_same = one == eight and one.count(b"\n") == 9
    report(10, json_same and svg_same and sweep_same, f"classify JSON identical={json_same}, SVG identical={svg_same}, sweep threads 1 vs 8 identical={sweep_same}")


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-v", "-s"]))
