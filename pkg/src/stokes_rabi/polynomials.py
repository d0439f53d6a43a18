"""Monic quartics: root finding and the Lagrange sign system.

The numerator of the Rabi quadratic differential is the monic quartic

    P0(z) = z**4 + c3*z**3 + c2*z**2 + c1*z + c0

and almost every downstream decision depends on where its four zeros sit.
This module finds them (Aberth-Ehrlich iteration) and classifies their
real/complex pattern from the signs of five polynomial invariants.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations

from .errors import ClassificationAmbiguous, InvalidInput

__all__ = [
    "QuarticCoeffs",
    "RootSet",
    "LagrangeInvariants",
    "RootPattern",
    "RootClass",
    "solve_quartic",
    "lagrange_invariants",
    "classify_roots",
    "vieta_coeffs",
]


@dataclass(frozen=True)
class QuarticCoeffs:
    """Coefficients of the monic quartic z^4 + c3 z^3 + c2 z^2 + c1 z + c0."""

    c3: float
    c2: float
    c1: float
    c0: float

    def __post_init__(self):
        for name in ("c3", "c2", "c1", "c0"):
            value = getattr(self, name)
            if isinstance(value, complex) or not math.isfinite(value):
                raise InvalidInput(f"coefficient {name}={value!r} is not a finite real")
            object.__setattr__(self, name, float(value))

    @classmethod
    def from_sequence(cls, values) -> "QuarticCoeffs":
        c3, c2, c1, c0 = values
        return cls(c3, c2, c1, c0)

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.c3, self.c2, self.c1, self.c0)

    def __iter__(self):
        return iter(self.as_tuple())

    def __call__(self, z):
        """Evaluate P0 by Horner's rule (works for floats, complex and arrays)."""
        return (((z + self.c3) * z + self.c2) * z + self.c1) * z + self.c0

    def derivative(self, z):
        return ((4.0 * z + 3.0 * self.c3) * z + 2.0 * self.c2) * z + self.c1

    def mirrored(self) -> "QuarticCoeffs":
        """Coefficients of P0(-z): every zero is negated."""
        return QuarticCoeffs(-self.c3, self.c2, -self.c1, self.c0)

    def scale(self) -> float:
        """Homogeneous size of the coefficients, comparable to the root radius."""
        return max(
            1.0,
            abs(self.c3),
            abs(self.c2) ** 0.5,
            abs(self.c1) ** (1.0 / 3.0),
            abs(self.c0) ** 0.25,
        )


@dataclass(frozen=True)
class RootSet:
    """Distinct zeros of a quartic with multiplicities.

    ``roots`` holds ``(value, multiplicity)`` pairs sorted by real part and
    then imaginary part; ``is_real`` flags the entries treated as real.
    """

    roots: tuple[tuple[complex, int], ...]
    is_real: tuple[bool, ...]
    tol: float

    def __post_init__(self):
        if sum(m for _, m in self.roots) != 4:
            raise InvalidInput("multiplicities must sum to 4")

    def values(self) -> list[complex]:
        """All four zeros, repeated according to multiplicity."""
        out = []
        for value, mult in self.roots:
            out.extend([value] * mult)
        return out

    @property
    def distinct(self) -> list[complex]:
        return [value for value, _ in self.roots]

    @property
    def multiplicities(self) -> list[int]:
        return [mult for _, mult in self.roots]

    @property
    def real_count(self) -> int:
        """Number of real zeros counted with multiplicity."""
        return sum(m for (_, m), real in zip(self.roots, self.is_real) if real)

    def real_zeros(self) -> list[float]:
        """Real zeros with multiplicity, ascending."""
        out = []
        for (value, mult), real in zip(self.roots, self.is_real):
            if real:
                out.extend([value.real] * mult)
        return sorted(out)

    @property
    def has_multiple(self) -> bool:
        return any(m > 1 for _, m in self.roots)


def _cauchy_radius(coeffs: tuple[float, ...]) -> float:
    """Positive root of x^4 - |c3| x^3 - |c2| x^2 - |c1| x - |c0|.

    Every zero of the quartic lies in the disc of this radius.
    """
    a = [abs(c) for c in coeffs]
    if not any(a):
        return 0.0
    x = 1.0 + max(a)
    for _ in range(100):
        f = (((x - a[0]) * x - a[1]) * x - a[2]) * x - a[3]
        df = ((4.0 * x - 3.0 * a[0]) * x - 2.0 * a[1]) * x - a[2]
        step = f / df
        x -= step
        if abs(step) <= 1e-14 * x:
            break
    return x


def _aberth(c: QuarticCoeffs, max_iter: int = 500) -> list[complex]:
    coeffs = c.as_tuple()
    radius = _cauchy_radius(coeffs)
    if radius == 0.0:
        return [0j] * 4
    # Start on a circle inside the Cauchy disc, rotated off the real axis so
    # that conjugate-symmetric problems do not stall on symmetric starts.
    z = [radius * cmath.exp(1j * (2.0 * math.pi * k / 4 + 0.4)) for k in range(4)]
    for _ in range(max_iter):
        largest = 0.0
        for k in range(4):
            zk = z[k]
            p = c(zk)
            if p == 0:
                continue
            dp = c.derivative(zk)
            s = sum(1.0 / (zk - z[j]) for j in range(4) if j != k and z[j] != zk)
            ratio = p / dp if dp != 0 else complex(radius * 1e-3)
            w = ratio / (1.0 - ratio * s)
            z[k] = zk - w
            largest = max(largest, abs(w) / (1.0 + abs(z[k])))
        if largest < 1e-16:
            break
    return [_polish(c, zk) for zk in z]


def _polish(c: QuarticCoeffs, z: complex) -> complex:
    """A few guarded Newton steps; a step is kept only if |P0| does not grow."""
    best = abs(c(z))
    for _ in range(4):
        dp = c.derivative(z)
        if dp == 0 or best == 0:
            break
        trial = z - c(z) / dp
        value = abs(c(trial))
        if value >= best:
            break
        z, best = trial, value
    return z


def _pair_conjugates(values: list[complex], tol: float) -> list[complex]:
    """Force exact conjugate symmetry for zeros of a real polynomial."""
    real = [v for v in values if abs(v.imag) <= tol * (1.0 + abs(v))]
    upper = [v for v in values if v not in real and v.imag > 0]
    lower = [v for v in values if v not in real and v.imag < 0]
    if len(upper) != len(lower):
        return values
    out = [complex(v.real, 0.0) for v in real]
    for v in upper:
        j = min(range(len(lower)), key=lambda i: abs(lower[i] - v.conjugate()))
        mid = 0.5 * (v + lower.pop(j).conjugate())
        out.extend([mid, mid.conjugate()])
    return out


def _cluster(values: list[complex], tol: float) -> list[tuple[complex, int]]:
    """Merge nearby zeros into multiple zeros.

    An m-fold zero comes back from the iteration as m points spread over
    roughly eps**(1/m), so the merge radius for a group of m points is
    tol**(2/m) relative (tol itself for pairs).
    """
    remaining = sorted(values, key=lambda v: (v.real, v.imag))
    out = []
    loosest = tol**0.5
    if all(abs(a - b) > loosest * (1.0 + abs(a)) for a, b in combinations(remaining, 2)):
        return [(complex(v), 1) for v in remaining]
    for size in (4, 3, 2):
        radius = tol ** (2.0 / size)
        found = True
        while found and len(remaining) >= size:
            found = False
            for group in combinations(range(len(remaining)), size):
                pts = [remaining[i] for i in group]
                centre = sum(pts) / size
                if max(abs(a - b) for a, b in combinations(pts, 2)) <= radius * (1.0 + abs(centre)):
                    out.append((complex(centre), size))
                    remaining = [v for i, v in enumerate(remaining) if i not in group]
                    found = True
                    break
    out.extend((complex(v), 1) for v in remaining)
    out.sort(key=lambda item: (round(item[0].real, 12), item[0].imag))
    return out


def _refine_multiple(c: QuarticCoeffs, z: complex, mult: int) -> complex:
    """Newton on the (mult-1)-th derivative, where an m-fold zero is simple."""
    if mult == 1:
        return z
    poly = [1.0, c.c3, c.c2, c.c1, c.c0]
    for _ in range(mult - 1):
        n = len(poly) - 1
        poly = [a * (n - i) for i, a in enumerate(poly[:-1])]
    dpoly = [a * (len(poly) - 1 - i) for i, a in enumerate(poly[:-1])]

    def horner(coeffs, x):
        acc = 0j
        for a in coeffs:
            acc = acc * x + a
        return acc

    for _ in range(8):
        d = horner(dpoly, z)
        if d == 0:
            break
        step = horner(poly, z) / d
        z -= step
        if abs(step) <= 1e-16 * (1.0 + abs(z)):
            break
    return z


def solve_quartic(c: QuarticCoeffs, tol: float = 1e-7) -> RootSet:
    """All four zeros of the monic quartic ``c``.

    Parameters
    ----------
    c : QuarticCoeffs
        Real coefficients.
    tol : float
        Relative radius used both to merge zeros into a multiple zero and to
        flag a zero as real.

    Returns
    -------
    RootSet
        Distinct zeros with multiplicities. Non-real zeros come in exact
        conjugate pairs.
    """
    if not isinstance(c, QuarticCoeffs):
        c = QuarticCoeffs.from_sequence(c)
    raw = _aberth(c)
    # Aberth separates an m-fold zero into m points at distance ~eps**(1/m);
    # merge those before deciding realness.
    merged = [(_refine_multiple(c, v, m), m) for v, m in _cluster(raw, tol)]
    values = []
    for value, mult in merged:
        values.extend([value] * mult)
    values = _pair_conjugates(values, tol)
    clustered = _cluster(values, tol)
    roots = []
    flags = []
    for value, mult in clustered:
        real = abs(value.imag) <= tol * (1.0 + abs(value))
        if real:
            value = complex(value.real, 0.0)
        roots.append((value, mult))
        flags.append(real)
    return RootSet(tuple(roots), tuple(flags), tol)


def vieta_coeffs(values) -> tuple[complex, complex, complex, complex]:
    """Monic coefficients (c3, c2, c1, c0) of the polynomial with the given zeros."""
    poly = [1.0 + 0j]
    for r in values:
        nxt = poly + [0j]
        for i in range(1, len(nxt)):
            nxt[i] -= r * poly[i - 1]
        poly = nxt
    return tuple(poly[1:5])


@dataclass(frozen=True)
class LagrangeInvariants:
    """Discriminant D0 and the auxiliary quantities Pc, Qc, R0, S0."""

    D0: float
    Pc: float
    Qc: float
    R0: float
    S0: float

    def as_dict(self) -> dict[str, float]:
        return {"D0": self.D0, "Pc": self.Pc, "Qc": self.Qc, "R0": self.R0, "S0": self.S0}


def lagrange_invariants(c: QuarticCoeffs) -> LagrangeInvariants:
    c3, c2, c1, c0 = c.as_tuple()
    d0 = (
        -27 * c3**4 * c0**2
        + 18 * c3**3 * c2 * c1 * c0
        - 4 * c3**3 * c1**3
        - 4 * c3**2 * c2**3 * c0
        + c3**2 * c2**2 * c1**2
        + 144 * c3**2 * c2 * c0**2
        - 6 * c3**2 * c1**2 * c0
        - 80 * c3 * c2**2 * c1 * c0
        + 18 * c3 * c2 * c1**3
        + 16 * c2**4 * c0
        - 4 * c2**3 * c1**2
        - 192 * c3 * c1 * c0**2
        - 128 * c2**2 * c0**2
        + 144 * c2 * c1**2 * c0
        - 27 * c1**4
        + 256 * c0**3
    )
    pc = 8 * c2 - 3 * c3**2
    qc = 64 * c0 - 16 * c2**2 + 16 * c3**2 * c2 - 16 * c3 * c1 - 3 * c3**4
    r0 = c3**3 + 8 * c1 - 4 * c3 * c2
    s0 = c2**2 - 3 * c3 * c1 + 12 * c0
    return LagrangeInvariants(d0, pc, qc, r0, s0)


class RootPattern(str, Enum):
    FourComplex = "FourComplex"
    TwoRealTwoComplex = "TwoRealTwoComplex"
    FourReal = "FourReal"
    TwoDoubleComplex = "TwoDoubleComplex"
    TwoDoubleReal = "TwoDoubleReal"
    QuadrupleReal = "QuadrupleReal"
    DoubleRealPlusTwoSimpleReal = "DoubleRealPlusTwoSimpleReal"
    DoubleRealPlusComplexPair = "DoubleRealPlusComplexPair"
    TripleRealPlusSimpleReal = "TripleRealPlusSimpleReal"

    @property
    def real_count(self) -> int:
        return _REAL_COUNT[self]

    @property
    def generic(self) -> bool:
        return self in (RootPattern.FourComplex, RootPattern.TwoRealTwoComplex, RootPattern.FourReal)


_REAL_COUNT = {
    RootPattern.FourComplex: 0,
    RootPattern.TwoRealTwoComplex: 2,
    RootPattern.FourReal: 4,
    RootPattern.TwoDoubleComplex: 0,
    RootPattern.TwoDoubleReal: 4,
    RootPattern.QuadrupleReal: 4,
    RootPattern.DoubleRealPlusTwoSimpleReal: 4,
    RootPattern.DoubleRealPlusComplexPair: 2,
    RootPattern.TripleRealPlusSimpleReal: 4,
}

# weight of each invariant as a homogeneous polynomial in the zeros
_WEIGHTS = {"D0": 12, "Pc": 2, "Qc": 4, "R0": 3, "S0": 4}


@dataclass(frozen=True)
class RootClass:
    pattern: RootPattern
    near_degenerate: bool = False
    alternatives: tuple[RootPattern, ...] = ()
    pole_collision: dict = field(default_factory=lambda: {-1: False, 1: False})

    @property
    def real_count(self) -> int:
        return self.pattern.real_count

    @property
    def depressed(self) -> bool:
        return any(self.pole_collision.values())


def _sign(value: float, band: float) -> int:
    if abs(value) <= band:
        return 0
    return 1 if value > 0 else -1


def _generic_pattern(d, p, q):
    """Strict reading of the generic rules; None when the signs do not fit."""
    if d < 0:
        return RootPattern.TwoRealTwoComplex
    if d > 0:
        if p > 0 or q > 0:
            return RootPattern.FourComplex
        if p < 0 and q < 0:
            return RootPattern.FourReal
    return None


def _degenerate_pattern(p, q, r, s):
    if q == 0 and s == 0:
        return RootPattern.QuadrupleReal
    if q == 0 and p > 0 and r == 0:
        return RootPattern.TwoDoubleComplex
    if q == 0 and p < 0:
        return RootPattern.TwoDoubleReal
    if s == 0 and q != 0:
        return RootPattern.TripleRealPlusSimpleReal
    if p < 0 and q < 0 and s != 0:
        return RootPattern.DoubleRealPlusTwoSimpleReal
    if q > 0 or (p > 0 and (q != 0 or r != 0)):
        return RootPattern.DoubleRealPlusComplexPair
    return None


def classify_roots(inv: LagrangeInvariants, c: QuarticCoeffs, tol: float = 1e-9) -> RootClass:
    """Real/complex pattern of the zeros from the signs of the invariants.

    Equalities are tested inside a band ``tol * s**w`` where ``s`` is the
    coefficient scale and ``w`` the homogeneous weight of the invariant.
    Inside the band the result carries ``near_degenerate=True`` and the
    competing strict reading in ``alternatives``.
    """
    s = c.scale()
    bands = {name: tol * s**w for name, w in _WEIGHTS.items()}
    values = inv.as_dict()
    sg = {name: _sign(values[name], bands[name]) for name in values}
    collision = {k: abs(c(float(k))) <= tol * s**4 for k in (-1, 1)}

    strict = _generic_pattern(inv.D0, inv.Pc, inv.Qc)
    if sg["D0"] != 0:
        banded = _generic_pattern(sg["D0"], sg["Pc"], sg["Qc"])
        if banded is not None:
            return RootClass(banded, pole_collision=collision)
        # D0 > 0 with Pc or Qc inside its band: the two generic readings compete
        candidates = (RootPattern.FourComplex, RootPattern.FourReal)
        if strict is None:
            raise ClassificationAmbiguous(
                "D0 > 0 but Pc, Qc fit neither generic sign rule", candidates
            )
        other = tuple(p for p in candidates if p is not strict)
        return RootClass(strict, True, other, collision)

    degenerate = _degenerate_pattern(sg["Pc"], sg["Qc"], sg["R0"], sg["S0"])
    if degenerate is None:
        candidates = tuple(p for p in (strict,) if p is not None) or (
            RootPattern.FourComplex,
            RootPattern.FourReal,
        )
        raise ClassificationAmbiguous(
            "D0 vanishes but no multiple-zero rule matches the remaining signs", candidates
        )
    alternatives = () if strict is None else (strict,)
    return RootClass(degenerate, True, alternatives, collision)
