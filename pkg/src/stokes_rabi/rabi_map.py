"""Physical Rabi parameters and the coefficients of P0.

A parameter point is the triple (Delta^2, E, g^2). ``g^2`` may be negative
(purely imaginary coupling) but never zero; the sign of Delta never enters,
so only Delta^2 is stored.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .errors import InfiniteCoupling, InvalidInput
from .polynomials import LagrangeInvariants, QuarticCoeffs

__all__ = [
    "RabiParams",
    "GarnierModel",
    "CylinderPoint",
    "Infeasible",
    "SpecialMode",
    "SpecialConfig",
    "SpecialSolution",
    "coeffs_from_params",
    "invariants_from_params",
    "params_from_coeffs",
    "cylinder_residual",
    "cylinder_point",
    "special_config_solve",
    "mirror_params",
    "garnier_coeffs",
    "garnier_q",
]


@dataclass(frozen=True)
class RabiParams:
    delta_sq: float
    energy: float
    g_sq: float

    def __post_init__(self):
        for name in ("delta_sq", "energy", "g_sq"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidInput(f"{name} must be finite")
        if self.g_sq == 0:
            raise InfiniteCoupling("g^2 = 0 has no finite quartic; use the asymptotic model")

    @classmethod
    def from_delta(cls, delta: float, energy: float, g_sq: float) -> "RabiParams":
        return cls(float(delta) ** 2, float(energy), float(g_sq))

    @property
    def delta(self) -> float:
        """Non-negative square root of Delta^2 (the sign is immaterial)."""
        return math.sqrt(self.delta_sq) if self.delta_sq >= 0 else math.nan


def _require_coupling(p: RabiParams):
    if p.g_sq == 0:
        raise InfiniteCoupling("g^2 = 0")


def coeffs_from_params(p: RabiParams) -> QuarticCoeffs:
    _require_coupling(p)
    d2, e, g2 = p.delta_sq, p.energy, p.g_sq
    g4 = g2 * g2
    return QuarticCoeffs(
        1.0 / g2,
        (8 * e * g2 + 4 * d2 + 4 * g2 - 1) / (4 * g4),
        -(4 * g2 + 2 * e + 1) / (2 * g4),
        -(4 * d2 - 4 * e * e - 4 * e + 1) / (4 * g4),
    )


def invariants_from_params(p: RabiParams) -> LagrangeInvariants:
    """The five Lagrange invariants written directly in Delta, E, g.

    The expressions for R0 and S0 are the symbolic reductions of their
    coefficient forms (see the decisions ledger for why they are not the
    ones usually quoted).
    """
    _require_coupling(p)
    D, E, g = p.delta_sq, p.energy, p.g_sq  # D = Delta^2, g = g^2
    D2, D3, D4, D5 = D * D, D**3, D**4, D**5
    E2, E3, E4, E5 = E * E, E**3, E**4, E**5
    g2, g3, g4, g5, g6 = g * g, g**3, g**4, g**5, g**6
    poly = (
        1024 * D3 * g4 - 1024 * D2 * E2 * g4 + 2048 * D3 * E * g3 - 2048 * D2 * E3 * g3
        - 1024 * D2 * E * g4 + 4608 * D * E * g5 - 4096 * E3 * g5 + 512 * D4 * g2
        + 512 * D3 * E2 * g2 + 1024 * D3 * g3 - 1024 * D2 * E4 * g2 - 3072 * D2 * E2 * g3
        + 2048 * D2 * g4 + 7680 * D * E2 * g4 + 2304 * D * g5 - 8192 * E4 * g4
        - 6144 * E2 * g5 + 1728 * g6 + 512 * D4 * E * g - 512 * D3 * E3 * g
        + 512 * D3 * E * g2 - 2048 * D2 * E3 * g2 + 3328 * D2 * E * g3 + 1536 * D * E3 * g3
        + 7680 * D * E * g4 - 4096 * E5 * g3 - 16384 * E3 * g4 + 3840 * E * g5 + 64 * D5
        - 64 * D4 * E2 + 256 * D4 * g - 768 * D3 * E2 * g + 512 * D3 * g2
        + 1024 * D2 * E2 * g2 + 2176 * D2 * g3 - 1536 * D * E4 * g2 + 2304 * D * E2 * g3
        + 2208 * D * g4 - 10240 * E4 * g3 - 2688 * E2 * g4 + 2944 * g5 - 64 * D4 * E
        - 224 * D3 * E * g + 256 * D2 * E3 * g + 2048 * D2 * E * g2 - 3072 * D * E3 * g2
        + 672 * D * E * g3 - 3840 * E3 * g3 + 5504 * E * g4 - 64 * D4 + 96 * D3 * E2
        + 16 * D3 * g + 384 * D2 * E2 * g - 52 * D2 * g2 - 1440 * D * E2 * g2 - 48 * D * g3
        + 960 * E4 * g2 + 4480 * E2 * g3 + 1024 * g4 + 96 * D3 * E - 40 * D2 * E * g
        + 96 * D * E3 * g + 96 * D * E * g2 + 1920 * E3 * g2 + 1744 * E * g3 + 20 * D3
        - 52 * D2 * E2 - 84 * D2 * g + 144 * D * E2 * g + 60 * D * g2 + 672 * E2 * g2
        - 216 * g3 - 52 * D2 * E + 72 * D * E * g - 48 * E3 * g - 288 * E * g2 - 2 * D2
        + 12 * D * E2 + 12 * D * g - 72 * E2 * g - 25 * g2 + 12 * D * E - 26 * E * g - E2
        - g - E
    )
    d0 = -poly / (4 * g**10)
    pc = (16 * E * g + 8 * D + 8 * g - 5) / g2
    qc = -8 / g4 * (8 * D * g2 + 8 * D * E * g + 2 * D2 + 4 * D * g - 8 * E * g - 3 * D - 4 * g + 1)
    r0 = -2 * (2 * D + 8 * E * g + 8 * g2 + 4 * g - 1) / g3
    s0 = (
        16 * D2 + 64 * D * E * g - 192 * D * g2 + 32 * D * g - 8 * D
        + 256 * E2 * g2 + 256 * E * g2 + 32 * E * g + 64 * g2 + 16 * g + 1
    ) / (16 * g4)
    return LagrangeInvariants(d0, pc, qc, r0, s0)


@dataclass(frozen=True)
class Infeasible:
    """A request with no admissible Rabi parameters, and why."""

    reason: str
    witness: dict = field(default_factory=dict)

    def __bool__(self):
        return False


def cylinder_residual(c: QuarticCoeffs) -> float:
    """Left side of the parabolic-cylinder equation; zero on the Rabi surface."""
    a = c.c3
    return (c.c1 + a) ** 2 - a * a * c.c2 - a * a * c.c0 - (a * a / 4.0) * (4.0 + 3.0 * a * a)


def _cylinder_scale(c: QuarticCoeffs) -> float:
    a = c.c3
    return max(
        1.0,
        (c.c1 + a) ** 2,
        abs(a * a * c.c2),
        abs(a * a * c.c0),
        (a * a / 4.0) * (4.0 + 3.0 * a * a),
    )


@dataclass(frozen=True)
class CylinderPoint:
    a: float
    X: float
    Y: float
    Z: float
    c: float

    def residual(self) -> float:
        return cylinder_residual(QuarticCoeffs(self.a, self.X, self.Y, self.Z))

    def relation_residuals(self) -> tuple[float, float]:
        """Mismatch of the two linear-in-c relations for X and Z."""
        a, Y = self.a, self.Y
        x_pred = -(8 * Y + a**3 + 16 * a) / (4 * a) + self.c
        z_pred = (2 * Y * Y + 8 * a * Y - a**4 + 8 * a * a) / (2 * a * a) - self.c
        return self.X - x_pred, self.Z - z_pred


def cylinder_point(c: QuarticCoeffs) -> CylinderPoint:
    a = c.c3
    if a == 0:
        raise InvalidInput("the cylinder is parametrised by a = c3 != 0")
    shift = c.c2 + (8 * c.c1 + a**3 + 16 * a) / (4 * a)
    return CylinderPoint(a, c.c2, c.c1, c.c0, shift)


def params_from_coeffs(c: QuarticCoeffs, tol: float = 1e-8) -> RabiParams | Infeasible:
    """Invert :func:`coeffs_from_params`.

    Returns :class:`Infeasible` when ``c3 = 0``, when the point is off the
    cylinder by more than ``tol`` (relative), or when the recovered
    ``c = a^2 Delta^2`` is negative. The sign of Delta is not recoverable.
    """
    a = c.c3
    if a == 0:
        return Infeasible("c3 = 0 does not occur for finite coupling", {"c3": 0.0})
    residual = cylinder_residual(c)
    if abs(residual) > tol * _cylinder_scale(c):
        return Infeasible("off the parabolic cylinder", {"residual": residual})
    point = cylinder_point(c)
    if point.c < -1e-12:
        return Infeasible("recovered a^2 Delta^2 is negative", {"c": point.c})
    energy = -(2 * c.c1 + a * a + 4 * a) / (2 * a * a)
    return RabiParams(max(point.c, 0.0) / (a * a), energy, 1.0 / a)


def mirror_params(p: RabiParams) -> RabiParams:
    """Parameters whose zeros are the negatives of the zeros of ``p``."""
    return RabiParams(p.delta_sq, -(p.energy + 1.0), -p.g_sq)


@dataclass(frozen=True)
class GarnierModel:
    t: float
    theta: float
    a3: float
    a2: float
    a1: float
    a0: float
    rescaling_error: float = 0.0


def garnier_q(z, m: GarnierModel):
    """Q(z, t) of the Garnier form with numerator z^4 + a3 z^3 + ... + a0."""
    num = (((z + m.a3) * z + m.a2) * z + m.a1) * z + m.a0
    return -0.25 * num / (z * z * (z - m.t) ** 2)


def garnier_coeffs(p: RabiParams, samples: int = 32, seed: int = 0) -> GarnierModel:
    """Garnier-form coefficients, checked against Q0 after rescaling.

    Under z -> (t/2)(1 - w), four times Q(z, t) equals Q0(w). The check runs
    at ``samples`` random points and raises if the relative mismatch exceeds
    1e-9.
    """
    _require_coupling(p)
    t = -4.0 * p.g_sq
    th = p.energy + p.g_sq
    d2 = p.delta_sq
    model = GarnierModel(
        t,
        th,
        -2 * t + 2,
        t * t - t * (2 * th + 4) + 4 * d2 - 1,
        t * t * (2 * th + 2) - t * (4 * d2 - 2 * th - 2),
        t * t * (th * th - 1),
    )
    c = coeffs_from_params(p)
    rng = np.random.default_rng(seed)
    w = rng.normal(size=samples) + 1j * rng.normal(size=samples)
    lhs = 4.0 * garnier_q(0.5 * t * (1.0 - w), model)
    rhs = -c(w) / ((w - 1) ** 2 * (w + 1) ** 2)
    err = float(np.max(np.abs(lhs - rhs) / np.maximum(1.0, np.abs(rhs))))
    if err > 1e-9:
        raise ArithmeticError(f"Garnier rescaling mismatch {err:.3e}")
    return GarnierModel(*(getattr(model, f) for f in ("t", "theta", "a3", "a2", "a1", "a0")), err)


class SpecialMode(str, Enum):
    VerticalLine = "VerticalLine"
    CircleCentered = "CircleCentered"
    SymRealPairComplexPair = "SymRealPairComplexPair"
    SymRealQuadruple = "SymRealQuadruple"
    HorizontalLines = "HorizontalLines"
    TwoRays = "TwoRays"


@dataclass(frozen=True)
class SpecialConfig:
    """A zero geometry to realise.

    Fields used per mode: VerticalLine (alpha, beta1); CircleCentered
    (r, theta1); SymRealPairComplexPair and SymRealQuadruple (alpha, delta);
    HorizontalLines (alpha, beta); TwoRays (theta).
    """

    mode: SpecialMode
    alpha: float = 0.0
    beta1: float = 0.0
    beta: float = 0.0
    delta: float = 0.0
    r: float = 1.0
    theta1: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class SpecialSolution:
    params: RabiParams
    zeros: tuple[complex, ...]
    geometry: dict


def _rabi_from_inverse_coupling(inv_g_sq, energy, delta_sq, zeros, geometry):
    params = RabiParams(delta_sq, energy, 1.0 / inv_g_sq)
    return SpecialSolution(params, tuple(complex(z) for z in zeros), geometry)


def _vertical_line(s: SpecialConfig):
    alpha, beta1 = s.alpha, s.beta1
    if alpha <= 0:
        return Infeasible("requires alpha > 0", {"alpha": alpha})
    rad = beta1 * beta1 - 8 * alpha
    if rad <= 0:
        return Infeasible("requires beta1^2 > 8 alpha", {"beta1^2 - 8 alpha": rad})
    beta2 = math.sqrt(rad)
    energy = (alpha**2 - 6 * alpha + 2 + beta1**2) / (4 * alpha)
    delta_sq = (3 * alpha**2 - 4 * alpha + 1 + beta1**2) / (4 * alpha**2)
    zeros = (alpha + 1j * beta1, alpha + 1j * beta2, alpha - 1j * beta1, alpha - 1j * beta2)
    return _rabi_from_inverse_coupling(-4 * alpha, energy, delta_sq, zeros, {"beta2": beta2})


def _circle(s: SpecialConfig):
    r, th1 = s.r, s.theta1
    if r <= 0:
        return Infeasible("requires r > 0", {"r": r})
    if not 0 <= th1 <= math.pi / 2:
        return Infeasible("requires 0 <= theta1 < pi/2", {"theta1": th1})
    alpha = math.cos(th1) / 3.0
    if abs(alpha) < 1e-15:
        return Infeasible("cos(theta1) = 0 forces 1/g^2 = 0", {"cos_theta1": math.cos(th1)})
    th2 = math.pi - math.acos(alpha)
    energy = (r * r - 2 * r * alpha + 2) / (4 * r * alpha)
    delta_sq = (r * r + 1 - 2 * r * r * alpha**2) / (4 * r * r * alpha**2)
    zeros = tuple(r * np.exp(1j * a) for a in (th1, th2, -th1, -th2))
    return _rabi_from_inverse_coupling(-4 * r * alpha, energy, delta_sq, zeros, {"theta2": th2})


def _symmetric_pair(s: SpecialConfig, quadruple: bool):
    alpha, delta = s.alpha, s.delta
    if alpha <= 0 or delta == 0 or alpha == 1:
        return Infeasible("requires alpha > 0, alpha != 1 and delta != 0", {"alpha": alpha, "delta": delta})
    a2, d2 = alpha * alpha, delta * delta
    lower = 4 * (a2 - 1) ** 2 / (a2 + 2)
    upper = a2 * (a2 - 1) / (4 - a2) if a2 != 4 else math.inf
    r85, r2 = math.sqrt(8 / 5), math.sqrt(2)
    if not quadruple:
        if 1 < alpha < r85 or r2 < alpha < 2:
            ok, which = d2 > upper, "(a)"
        elif r85 <= alpha <= r2:
            ok, which = d2 > lower, "(b)"
        else:
            ok, which = False, "alpha outside (1, 2)"
    else:
        if 0 < alpha < 1:
            ok, which = d2 <= lower, "(a)"
        elif 1 < alpha <= r85 or r2 <= alpha <= 2:
            ok, which = lower <= d2 < upper, "(b)"
        elif alpha > 2:
            ok, which = d2 >= lower, "(c)"
        else:
            ok, which = False, "alpha in (sqrt(8/5), sqrt(2))"
    if not ok:
        return Infeasible(f"condition {which} violated", {"delta^2": d2, "lower": lower, "upper": upper})
    beta_sq = ((4 - a2) * d2 - a2 * (a2 - 1)) / (a2 - 1)
    if quadruple:
        beta_sq = -beta_sq
    energy = -(delta + a2 - 2) / (2 * delta)
    delta_sq = ((a2 + 2) * d2 - 4 * (a2 - 1) ** 2) / (4 * d2 * (a2 - 1))
    beta = math.sqrt(max(beta_sq, 0.0))
    if quadruple:
        zeros = (-alpha, alpha, delta - beta, delta + beta)
    else:
        zeros = (-alpha, alpha, delta + 1j * beta, delta - 1j * beta)
    return _rabi_from_inverse_coupling(
        -2 * delta, energy, delta_sq, zeros, {"beta_sq": beta_sq, "condition": which}
    )


def _horizontal_lines(s: SpecialConfig):
    a = -4 * s.alpha
    beta_sq = s.beta * s.beta
    if beta_sq == 0:
        return Infeasible("requires beta > 0", {"beta": s.beta})
    return Infeasible(
        "zeros on two horizontal lines force a negative delta^2",
        {"delta_sq": -(a * a) / (4 * beta_sq)},
    )


def _two_rays(s: SpecialConfig):
    t = math.cos(s.theta)
    return Infeasible(
        "ratio equation for r1/r2 has negative discriminant",
        {"discriminant": 16 * t * t * (t * t - 1), "t": t},
    )


def special_config_solve(s: SpecialConfig) -> SpecialSolution | Infeasible:
    """Rabi parameters realising a prescribed symmetric zero geometry."""
    mode = SpecialMode(s.mode)
    if mode is SpecialMode.VerticalLine:
        return _vertical_line(s)
    if mode is SpecialMode.CircleCentered:
        return _circle(s)
    if mode is SpecialMode.SymRealPairComplexPair:
        return _symmetric_pair(s, quadruple=False)
    if mode is SpecialMode.SymRealQuadruple:
        return _symmetric_pair(s, quadruple=True)
    if mode is SpecialMode.HorizontalLines:
        return _horizontal_lines(s)
    return _two_rays(s)
