"""Second-order curvature rate at a flat centre and the bounds it obeys.

Throughout, the rate is normalized as

    K''(O) = lim_{w -> 0} K(w) / (|w|^2 + <grad f(w), w>^2)  (<= 0),

which at a horizontal tangent plane is lim K(w)/|w|^2. For data (p, q) with
q'(0) = 0 it equals -4|q''(0)|^2 / (|p(0)|^4 (1 + |q(0)|^2)^6).
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, replace
from fractions import Fraction

import numpy as np

from .analytic import AnalyticFunction, jet
from .weierstrass import (
    WeierstrassData,
    curvature,
    default_trust_radius,
    gradient_f,
    invert_projection,
)

__all__ = [
    "BoundConstant",
    "GENERAL_BOUND",
    "FLAT_BOUND",
    "HALL_CONSTANT",
    "PremiseError",
    "DirectionDependenceError",
    "CurvatureReport",
    "kpp_closed_form",
    "intermediate_bound",
    "limit_estimates",
    "kpp_numeric",
    "schwarz_bound_check",
    "hall_bound_check",
    "bound_margins",
    "build_report",
]


@dataclass(frozen=True)
class BoundConstant:
    """Rational multiple of a power of pi, realized in floating point on demand."""

    expression: str
    ratio: Fraction
    pi_power: int
    provenance: str

    @property
    def value(self) -> float:
        return self.ratio.numerator * math.pi**self.pi_power / self.ratio.denominator


GENERAL_BOUND = BoundConstant(
    "256*pi^4/729", Fraction(256, 729), 4,
    "16 * (4 pi^2 / 27)^2 from |q''(0)| <= 2(1-|q(0)|^2) and Hall's lower bound on |p(0)|^2",
)
FLAT_BOUND = BoundConstant(
    "16*pi^4/81", Fraction(16, 81), 4,
    "(2 pi)^4 / 3^4, attained in closed form by the hexagon Scherk-type graph",
)
HALL_CONSTANT = BoundConstant(
    "27/(4*pi^2)", Fraction(27, 4), -2,
    "Hall's sharp lower bound for |h'(0)|^2 + |g'(0)|^2 of disk self-maps with f(0)=0",
)


class PremiseError(ValueError):
    """Input data violate the premise of a check (e.g. q'(0) != 0)."""


class DirectionDependenceError(ArithmeticError):
    """Directional limits disagree beyond tolerance."""


@dataclass
class CurvatureReport:
    label: str
    p0: complex
    q0: complex
    q2: complex
    K_at_origin: float
    kpp_closed: float
    kpp_numeric: float | None = None
    kpp_numeric_spread: float | None = None
    schwarz_lhs: float | None = None
    schwarz_rhs: float | None = None
    hall_lhs: float | None = None
    hall_rhs: float | None = None
    intermediate_rhs: float | None = None
    margin_general: float | None = None
    margin_flat: float | None = None
    annotations: list = field(default_factory=list)

    @property
    def magnitude(self) -> float:
        return abs(self.kpp_closed)

    @property
    def is_extremal(self) -> bool:
        return any(a.startswith("extremal datum") for a in self.annotations)

    def violations(self) -> list[str]:
        out = []
        if self.margin_general is not None and not self.margin_general > 0:
            out.append("general bound")
        if self.margin_flat is not None and not self.margin_flat > 0 and not self.is_extremal:
            out.append("flat bound")
        if self.hall_lhs is not None and self.hall_lhs < self.hall_rhs - 1e-12:
            out.append("hall bound")
        if self.schwarz_lhs is not None and self.schwarz_lhs > self.schwarz_rhs + 1e-12:
            out.append("schwarz bound")
        return out

    def to_dict(self) -> dict:
        d = asdict(self)
        for key in ("p0", "q0", "q2"):
            d[key] = [d[key].real, d[key].imag]
        d["constants"] = {
            c.expression: {"value": c.value, "provenance": c.provenance}
            for c in (GENERAL_BOUND, FLAT_BOUND, HALL_CONSTANT)
        }
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=True)


def kpp_closed_form(p0: complex, q0: complex, q2: complex) -> float:
    """|K''(O)| = 4|q''(0)|^2 / (|p(0)|^4 (1+|q(0)|^2)^6)."""
    if p0 == 0:
        raise ZeroDivisionError("p(0) = 0")
    return 4 * abs(q2) ** 2 / (abs(p0) ** 4 * (1 + abs(q0) ** 2) ** 6)


def intermediate_bound(p0: complex, q0: complex) -> float:
    """16(1-|q0|^2)^2 / (|p0|^4 (1+|q0|^2)^6): the bound before Hall's estimate."""
    return 16 * (1 - abs(q0) ** 2) ** 2 / (abs(p0) ** 4 * (1 + abs(q0) ** 2) ** 6)


def _richardson(values):
    """Extrapolate a sequence taken at r, r/2, r/4, ... to r = 0 (powers r, r^2, ...)."""
    table = [list(values)]
    for k in range(1, len(values)):
        prev = table[-1]
        fac = 2.0**k
        table.append([(fac * prev[m + 1] - prev[m]) / (fac - 1) for m in range(len(prev) - 1)])
    best = table[-1][0]
    err = abs(best - table[-2][-1]) if len(table) > 1 else math.inf
    return best, err


def limit_estimates(data: WeierstrassData, r0: float | None = None, directions: int = 8,
                    levels: int = 7):
    """Richardson-extrapolated directional limits of K / (|w|^2 + <grad f, w>^2)."""
    if r0 is None:
        r0 = 0.05 * default_trust_radius(data)
    radii = r0 * 2.0 ** -np.arange(levels)
    angles = 2 * np.pi * np.arange(directions) / directions
    w = radii[:, None] * np.exp(1j * angles)[None, :]
    z = invert_projection(data, w)
    K = curvature(data, z)
    fu, fv = gradient_f(data, z)
    tilt = fu * w.real + fv * w.imag
    ratio = K / (np.abs(w) ** 2 + tilt**2)
    est = np.empty(directions)
    for k in range(directions):
        est[k], _ = _richardson(ratio[:, k])
    return est


def kpp_numeric(data: WeierstrassData, r0: float | None = None, directions: int = 8,
                levels: int = 7, spread_tol: float = 1e-6, centre_tol: float = 1e-10,
                return_spread: bool = False):
    """Numeric K''(O): mean of the directional limits, checked for direction independence."""
    k0 = float(curvature(data, 0.0))
    if abs(k0) > centre_tol:
        raise PremiseError(f"curvature at the centre is {k0:.3g}, not zero")
    est = limit_estimates(data, r0, directions, levels)
    mean = float(np.mean(est))
    scale = abs(mean) if mean != 0 else 1.0
    spread = float((np.max(est) - np.min(est)) / scale)
    if spread > spread_tol:
        raise DirectionDependenceError(f"directional limits spread {spread:.3g} > {spread_tol}")
    return (mean, spread) if return_spread else mean


def schwarz_bound_check(q: AnalyticFunction, tol: float = 1e-12, radius: float = 1.0):
    """(|q''(0)|, 2(1-|q(0)|^2)/radius^2, ok) for q with q'(0) = 0 and |q| < 1 on |z| < radius."""
    j = jet(q, 0.0, 2)
    if abs(j[1]) > 1e-10:
        raise PremiseError(f"q'(0) = {complex(j[1]):.3g} is not zero")
    lhs = float(abs(j[2]))
    rhs = 2 * (1 - abs(complex(j[0])) ** 2) / radius**2
    return lhs, rhs, lhs <= rhs + tol


def hall_bound_check(p0: complex, q0: complex, tol: float = 1e-12):
    """(|p0|^2, 27/(4 pi^2) / (1+|q0|^4), ok) for disk self-maps with f(0) = 0."""
    lhs = abs(p0) ** 2
    rhs = HALL_CONSTANT.value / (1 + abs(q0) ** 4)
    return lhs, rhs, lhs >= rhs - tol


def bound_margins(report: CurvatureReport) -> CurvatureReport:
    mag = report.magnitude
    flat = abs(report.q0) <= 1e-12
    return replace(
        report,
        margin_general=GENERAL_BOUND.value - mag,
        margin_flat=FLAT_BOUND.value - mag if flat else None,
    )


def build_report(data: WeierstrassData, label: str = "", disk_target: bool = False,
                 numeric: bool = True, annotations=()) -> CurvatureReport:
    """Full report for data with a flat centre."""
    pj = jet(data.p, 0.0, 0)
    qj = jet(data.q, 0.0, 2)
    p0, q0, q1, q2 = complex(pj[0]), complex(qj[0]), complex(qj[1]), complex(qj[2])
    if abs(q1) > 1e-10:
        raise PremiseError(f"q'(0) = {q1:.3g}: the centre is not a zero-curvature point")
    report = CurvatureReport(
        label=label, p0=p0, q0=q0, q2=q2,
        K_at_origin=float(curvature(data, 0.0)),
        kpp_closed=-kpp_closed_form(p0, q0, q2),
        intermediate_rhs=intermediate_bound(p0, q0),
        annotations=list(annotations),
    )
    if numeric:
        report.kpp_numeric, report.kpp_numeric_spread = kpp_numeric(data, return_spread=True)
    report.schwarz_lhs, report.schwarz_rhs, _ = schwarz_bound_check(data.q, radius=min(1.0, data.domain_radius))
    if disk_target:
        report.hall_lhs, report.hall_rhs, _ = hall_bound_check(p0, q0)
    else:
        report.annotations.append("hall check skipped: image is not the unit disk")
    return bound_margins(report)
