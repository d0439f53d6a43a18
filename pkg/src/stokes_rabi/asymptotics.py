"""Large-coupling limit of Q0.

With Delta = Delta_a g^2 and E = E_a g^2, as |g| grows P0 tends to the
biquadratic z^4 + c2 z^2 + c0 with c2 = 2 E_a + Delta_a^2 and
c0 = E_a^2 - Delta_a^2. Its zeros are symmetric under z -> -z and
z -> conj(z), and the (Delta_a, E_a) half-plane splits into four open
regions by zero pattern, separated by measure-zero boundary strata.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import DepressedDifferential, InvalidInput
from .polynomials import QuarticCoeffs, solve_quartic
from .qdiff_core import pole_data
from .rabi_map import RabiParams, coeffs_from_params

__all__ = [
    "AsymptoticParams",
    "AsymptoticModel",
    "Region",
    "EXPECTED_LABEL",
    "asymptotic_model",
    "asymptotic_region",
    "asymptotic_coeffs",
    "params_at_coupling",
    "ConvergenceRow",
    "ConvergenceReport",
    "limit_convergence",
    "hausdorff",
]


@dataclass(frozen=True)
class AsymptoticParams:
    E_a: float
    Delta_a: float

    def __post_init__(self):
        for name in ("E_a", "Delta_a"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInput(f"{name} must be finite")
        if self.Delta_a < 0:
            raise InvalidInput("Delta_a must be non-negative")


class Region(str, Enum):
    I4 = "I4"  # four distinct pure imaginary zeros
    C4 = "C4"  # four zeros off both axes
    IR = "IR"  # two real, two pure imaginary
    R4 = "R4"  # four real
    L_minus1 = "L_minus1"  # zeros at +-1: the limit is depressed
    L1 = "L1"
    L2 = "L2"
    L3 = "L3"
    L4 = "L4"
    L5 = "L5"
    OriginPoint = "OriginPoint"
    TwoMinusTwoPoint = "TwoMinusTwoPoint"

    @property
    def interior(self) -> bool:
        return self in (Region.I4, Region.C4, Region.IR, Region.R4)


# Only these configurations survive the limit; they are the labels the
# geometric classifier should produce at large finite coupling.
EXPECTED_LABEL = {
    Region.I4: "I-1",
    Region.C4: "I-2",
    Region.IR: "II-2-a",
    Region.R4: "III-2",
}


@dataclass(frozen=True)
class AsymptoticModel:
    c2: float
    c0: float
    zeros: tuple[complex, complex, complex, complex]
    depressed: bool

    @property
    def coeffs(self) -> QuarticCoeffs:
        return QuarticCoeffs(0.0, self.c2, 0.0, self.c0)


def asymptotic_model(p: AsymptoticParams) -> AsymptoticModel:
    """Coefficients and the four closed-form zeros (principal square roots).

    The zeros come in the order e1, e2, -e2, -e1 where
    e1, e2 = sqrt(-Delta_a^2/2 - E_a -+ (Delta_a/2) sqrt(Delta_a^2 + 4 E_a + 4)).
    ``depressed`` is set when the limit quartic vanishes at +-1, which
    happens exactly on E_a = -1.
    """
    d, e = float(p.Delta_a), float(p.E_a)
    c2 = 2.0 * e + d * d
    c0 = e * e - d * d
    inner = cmath.sqrt(d * d + 4.0 * e + 4.0)
    base = -0.5 * d * d - e
    e1 = cmath.sqrt(base - 0.5 * d * inner)
    e2 = cmath.sqrt(base + 0.5 * d * inner)
    return AsymptoticModel(c2, c0, (e1, e2, -e2, -e1), abs(1.0 + c2 + c0) <= 1e-12)


def asymptotic_coeffs(p: AsymptoticParams) -> QuarticCoeffs:
    m = asymptotic_model(p)
    return m.coeffs


def asymptotic_region(p: AsymptoticParams, tol: float = 1e-12) -> Region:
    """Which stratum of the (Delta_a, E_a) half-plane holds ``p``.

    The boundary strata are closed and are tested before the open regions.
    Where two strata meet, the order below decides: the two isolated
    points, then E_a = -1, then the parabola, the diagonals and the axis.
    """
    x, y = p.Delta_a, p.E_a
    close = lambda u, v: abs(u - v) <= tol * (1.0 + abs(v))  # noqa: E731
    if close(x, 0.0) and close(y, 0.0):
        return Region.OriginPoint
    if close(x, 2.0) and close(y, -2.0):
        return Region.TwoMinusTwoPoint
    if close(y, -1.0):
        return Region.L_minus1
    if close(x, 0.0):
        return Region.L4 if y > -1.0 else Region.L5
    parabola = -0.25 * x * x - 1.0
    if close(y, parabola):
        return Region.L1
    if close(y, x):
        return Region.L2
    if close(y, -x):
        return Region.L3
    if y > x:
        return Region.I4
    if y < parabola:
        return Region.C4
    if abs(y) < x:
        return Region.IR
    # what is left lies strictly between the parabola and the line y = -x
    return Region.R4 if x < 2.0 else Region.I4


def params_at_coupling(p: AsymptoticParams, g: float) -> RabiParams:
    """Finite-coupling parameters on the scaling ray: Delta = Delta_a g^2, E = E_a g^2."""
    g_sq = float(g) ** 2
    return RabiParams((p.Delta_a * g_sq) ** 2, p.E_a * g_sq, g_sq)


def hausdorff(a, b) -> float:
    """Hausdorff distance between two finite point sets in the plane."""
    a = np.asarray(list(a), dtype=complex)
    b = np.asarray(list(b), dtype=complex)
    d = np.abs(a[:, None] - b[None, :])
    return float(max(d.min(axis=1).max(), d.min(axis=0).max()))


@dataclass(frozen=True)
class ConvergenceRow:
    g: float
    c3: float
    c1: float
    c2_error: float
    c0_error: float
    root_distance: float

    def to_json(self) -> dict:
        return {
            "g": self.g,
            "c3": self.c3,
            "c1": self.c1,
            "c2_error": self.c2_error,
            "c0_error": self.c0_error,
            "root_distance": self.root_distance,
        }


@dataclass
class ConvergenceReport:
    params: AsymptoticParams
    rows: list[ConvergenceRow]
    skipped: list[tuple[float, str]] = field(default_factory=list)
    limit_depressed: bool = False

    def _column(self, name: str) -> list[float]:
        return [getattr(r, name) for r in self.rows]

    @property
    def monotone(self) -> bool:
        """Every reported error shrinks along the ladder."""
        cols = ("c2_error", "c0_error", "root_distance")
        mags = [[abs(v) for v in self._column(n)] for n in cols]
        mags += [[abs(v) for v in self._column(n)] for n in ("c3", "c1")]
        return all(all(u > v for u, v in zip(col, col[1:])) for col in mags)

    @property
    def root_ratios(self) -> list[float]:
        """Successive ratios of the root distance along the ladder."""
        d = self._column("root_distance")
        return [v / u if u > 0 else math.nan for u, v in zip(d, d[1:])]

    @property
    def empty_limit_graph(self) -> bool:
        """The limit is Q_s = -dz^2, which has no critical trajectories at all."""
        return self.limit_depressed and self.params.Delta_a == 0.0

    def to_json(self) -> dict:
        return {
            "Delta_a": self.params.Delta_a,
            "E_a": self.params.E_a,
            "rows": [r.to_json() for r in self.rows],
            "skipped": [[g, why] for g, why in self.skipped],
            "monotone": self.monotone,
            "limit_depressed": self.limit_depressed,
            "empty_limit_graph": self.empty_limit_graph,
        }


def limit_convergence(p: AsymptoticParams, g_values) -> ConvergenceReport:
    """Distance from the finite-coupling quartic to its limit along a g ladder.

    Couplings at which a zero lands on +-1 are skipped and listed. On the
    ray E_a = -1 that is every coupling, since P0(-1) vanishes identically
    when E = -g^2; the report then only records that the limit is depressed.
    """
    g_values = [float(g) for g in g_values]
    if any(b <= a for a, b in zip(g_values, g_values[1:])):
        raise InvalidInput("g values must be increasing")
    model = asymptotic_model(p)
    report = ConvergenceReport(p, [], limit_depressed=model.depressed)
    for g in g_values:
        c = coeffs_from_params(params_at_coupling(p, g))
        try:
            for k in (-1.0, 1.0):
                pole_data(c, k)
        except DepressedDifferential as exc:
            report.skipped.append((g, str(exc)))
            continue
        roots = solve_quartic(c).values()
        report.rows.append(
            ConvergenceRow(
                g,
                c.c3,
                c.c1,
                abs(c.c2 - model.c2),
                abs(c.c0 - model.c0),
                hausdorff(roots, model.zeros),
            )
        )
    return report
