"""Minimal graphs from Enneper-Weierstrass data (p, q).

The conformal parametrization over the disk is

    w(z) = (Re f(z), Im f(z), t(z)),   f = A + conj(B),
    A' = p,  B' = p q**2,  t = 2 Im C,  C' = p q,

which is the integrated form of phi = (p(1+q^2), -i p(1-q^2), -2i p q).
Setting ``mirrored`` on the data flips q -> -q (phi_3 = +2i p q); every
sign-sensitive quantity (height, normal, Gauss map, slopes) follows.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .analytic import (
    DEFAULT_RADIUS,
    AnalyticFunction,
    Constant,
    RadiusError,
    Rational,
    RadialPath,
    SeriesFunction,
    _winding_number,
    radial_primitive,
)
from .special_functions import PowerSeries

__all__ = [
    "AdmissibilityError",
    "ConvergenceError",
    "WeierstrassData",
    "SurfacePoint",
    "ew_components",
    "projection",
    "height",
    "surface_point",
    "unit_normal",
    "gauss_map",
    "curvature",
    "curvature_omega_form",
    "gradient_from_q",
    "gradient_f",
    "jacobian",
    "invert_projection",
    "default_trust_radius",
    "disk_samples",
    "dumps_data",
    "loads_data",
]


class AdmissibilityError(ValueError):
    """Data violate the invariants needed for an oriented minimal graph."""


class ConvergenceError(ArithmeticError):
    """Newton inversion failed."""


def disk_samples(radius: float, n: int = 1000) -> np.ndarray:
    """Deterministic, roughly uniform points in |z| <= radius (sunflower lattice)."""
    k = np.arange(n) + 0.5
    r = radius * np.sqrt(k / n)
    golden = np.pi * (3 - np.sqrt(5))
    return r * np.exp(1j * golden * k)


def _has_zeros(fn: AnalyticFunction, radius: float) -> bool:
    """Zeros of fn in |z| < radius: exact roots for rationals, argument principle otherwise."""
    if isinstance(fn, Constant):
        return fn.value == 0
    if isinstance(fn, Rational):
        num = np.trim_zeros(np.asarray(fn.numerator, dtype=complex), "b")
        if num.size == 0:
            return True
        roots = np.roots(num[::-1]) if num.size > 1 else np.array([])
        # cancelled factors shared with the denominator are not zeros
        live = [r for r in roots if abs(np.polynomial.polynomial.polyval(r, fn.denominator)) > 1e-10]
        return any(abs(r) < radius for r in live)
    wind = _winding_number(fn, radius * (1 - 1e-9))
    return wind is None or wind != 0


@dataclass(frozen=True)
class WeierstrassData:
    p: AnalyticFunction
    q: AnalyticFunction
    domain_radius: float = DEFAULT_RADIUS
    mirrored: bool = False
    # optional exact primitives (A, B, C) trusted on |z| < their domain radius
    primitives: tuple | None = field(default=None, compare=False, repr=False)
    validate: bool = field(default=True, compare=False, repr=False)

    def __post_init__(self):
        if self.validate:
            self.check()

    def check(self, n: int = 1000):
        z = disk_samples(self.domain_radius * (1 - 1e-9), n)
        pv = self.p(z)
        qv = self.q(z)
        if np.min(np.abs(pv)) <= 1e-12 * max(np.max(np.abs(pv)), 1e-300) or _has_zeros(
            self.p, self.domain_radius
        ):
            raise AdmissibilityError("p vanishes on the working disk")
        if np.max(np.abs(qv)) >= 1.0:
            raise AdmissibilityError(
                f"|q| reaches {np.max(np.abs(qv)):.6g} >= 1 on the working disk"
            )

    @property
    def sign(self) -> float:
        return -1.0 if self.mirrored else 1.0

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= self.domain_radius):
            raise RadiusError(
                f"|z| = {np.max(np.abs(z)):.6g} outside working radius {self.domain_radius}"
            )
        return z

    def pq(self, z, order: int = 0):
        """Taylor stacks of p and of the convention-signed q at z."""
        return self.p.taylor(z, order), self.sign * self.q.taylor(z, order)

    @property
    def omega(self) -> AnalyticFunction:
        return self.q * self.q

    @property
    def h_prime(self) -> AnalyticFunction:
        return self.p

    @property
    def g_prime(self) -> AnalyticFunction:
        return self.p * self.q * self.q

    def integrand(self, zeta):
        p = self.p(zeta)
        q = self.sign * self.q(zeta)
        return np.stack([p, p * q * q, p * q])

    def primitive_values(self, z, path: RadialPath | None = None):
        """(A, B, C) at z; exact primitives when available, else quadrature."""
        z = self._check(z)
        if path is None and self.primitives is not None:
            radius = min(fn.domain_radius for fn in self.primitives)
            if np.all(np.abs(z) < radius):
                A, B, C = (fn(z) for fn in self.primitives)
                return A, B, self.sign * C
        if path is not None:
            vals = radial_primitive(
                _Integrand(self), z, start=path.start, segments=path.segments,
                nodes=path.nodes_per_segment,
            )
        else:
            vals = radial_primitive(_Integrand(self), z)
        return vals[0], vals[1], vals[2]


class _Integrand:
    def __init__(self, data):
        self.data = data
        self.domain_radius = data.domain_radius

    def __call__(self, zeta):
        return self.data.integrand(zeta)


@dataclass(frozen=True)
class SurfacePoint:
    z: complex
    position: tuple
    normal: tuple


def ew_components(data: WeierstrassData, z):
    """(phi_1, phi_2, phi_3) = (p(1+q^2), -i p(1-q^2), -2i p q)."""
    z = data._check(z)
    p = data.p(z)
    q = data.sign * data.q(z)
    return p * (1 + q * q), -1j * p * (1 - q * q), -2j * p * q


def projection(data: WeierstrassData, z, path: RadialPath | None = None):
    """Harmonic projection f(z) = A(z) + conj(B(z)) with A(0) = B(0) = 0."""
    A, B, _ = data.primitive_values(z, path)
    return A + np.conj(B)


def height(data: WeierstrassData, z, path: RadialPath | None = None):
    """Third coordinate t(z) = Re int phi_3 = 2 Im C(z)."""
    _, _, C = data.primitive_values(z, path)
    return 2 * np.imag(C)


def unit_normal(q):
    """Upward unit normal -(2 Im q, 2 Re q, |q|^2 - 1) / (1 + |q|^2)."""
    q = np.asarray(q, dtype=complex)
    s = 1 + np.abs(q) ** 2
    return np.stack([-2 * q.imag / s, -2 * q.real / s, (1 - np.abs(q) ** 2) / s])


def surface_point(data: WeierstrassData, z: complex, path: RadialPath | None = None) -> SurfacePoint:
    z = complex(z)
    A, B, C = data.primitive_values(z, path)
    f = complex(A + np.conj(B))
    t = float(2 * np.imag(C))
    n = unit_normal(data.sign * data.q(z))
    return SurfacePoint(z, (f.real, f.imag, t), tuple(float(x) for x in n))


def gauss_map(data: WeierstrassData, z):
    """Stereographic image (from the south pole) of the normal: i q."""
    z = data._check(z)
    return 1j * data.sign * data.q(z)


def curvature(data: WeierstrassData, z):
    """Gaussian curvature -4|q'|^2 / (|p|^2 (1+|q|^2)^4); always <= 0."""
    z = data._check(z)
    p = data.p(z)
    qt = data.q.taylor(z, 1)
    return -4 * np.abs(qt[1]) ** 2 / (np.abs(p) ** 2 * (1 + np.abs(qt[0]) ** 2) ** 4)


def curvature_omega_form(data: WeierstrassData, z):
    """-|omega'|^2 / (|h' g'| (1+|omega|)^4), the (h, g, omega) expression.

    The denominator carries |h'g'| unsquared; this is the form consistent
    with the (p, q) expression. Undefined where q = 0.
    """
    z = data._check(z)
    om = data.omega.taylor(z, 1)
    hp = data.h_prime(z)
    gp = data.g_prime(z)
    return -np.abs(om[1]) ** 2 / (np.abs(hp * gp) * (1 + np.abs(om[0])) ** 4)


def gradient_from_q(q, mirrored: bool = False):
    """Slopes (f_u, f_v) of the graph where the convention-signed q takes value q.

    For the phi_3 = -2i p q convention, f_u + i f_v = 2i conj(q) / (1 - |q|^2).
    """
    q = np.asarray(q, dtype=complex)
    if mirrored:
        q = -q
    a, b = q.real, q.imag
    d = 1 - a * a - b * b
    if np.any(d <= 0):
        raise AdmissibilityError("|q| >= 1: graph slope is unbounded")
    return 2 * b / d, 2 * a / d


def gradient_f(data: WeierstrassData, z):
    z = data._check(z)
    return gradient_from_q(data.sign * data.q(z))


def jacobian(data: WeierstrassData, z):
    """J(f, z) = |p|^2 (1 - |q|^4)."""
    z = data._check(z)
    return np.abs(data.p(z)) ** 2 * (1 - np.abs(data.q(z)) ** 4)


def default_trust_radius(data: WeierstrassData) -> float:
    return 0.5 * abs(complex(data.p(0.0))) * data.domain_radius


def invert_projection(data: WeierstrassData, w, trust_radius: float | None = None,
                      z_guess=None, max_iter: int = 64, tol: float = 1e-12,
                      path: RadialPath | None = None):
    """Solve f(z) = w by Newton's method on the real 2x2 system.

    The linearization p dz + conj(p q^2 dz) = r is solved in closed form.
    Iteration continues past ``tol`` until the step stops shrinking, so
    the result is typically accurate to roundoff. Vectorized over ``w``.
    """
    w = np.asarray(w, dtype=complex)
    if trust_radius is None:
        trust_radius = default_trust_radius(data)
    if np.any(np.abs(w) > trust_radius):
        raise RadiusError(f"|w| = {np.max(np.abs(w)):.6g} exceeds trust radius {trust_radius:.6g}")
    p0 = complex(data.p(0.0))
    z = w / p0 if z_guess is None else np.array(np.broadcast_to(z_guess, w.shape), dtype=complex)
    last_step = np.full(w.shape, np.inf)
    done = np.zeros(w.shape, dtype=bool)
    for _ in range(max_iter):
        if np.any(np.abs(z) >= data.domain_radius):
            raise ConvergenceError("Newton iterate left the working disk")
        r = w - projection(data, z, path)
        p = data.p(z)
        q = data.q(z)
        a, b = p, p * q * q
        jac = np.abs(a) ** 2 - np.abs(b) ** 2
        if np.any(jac <= 0):
            raise ConvergenceError("degenerate Jacobian in Newton inversion")
        dz = (np.conj(a) * r - np.conj(b) * np.conj(r)) / jac
        step = np.abs(dz)
        res = np.abs(r)
        converged = (res <= tol * (1 + np.abs(w))) & (
            (step >= 0.5 * last_step) | (step <= 1e-16 * (1 + np.abs(z)))
        )
        done |= converged
        z = np.where(done, z, z + dz)
        last_step = np.where(done, last_step, step)
        if np.all(done):
            return z if z.ndim else complex(z)
    raise ConvergenceError(f"Newton inversion did not converge in {max_iter} iterations")


# ---------------------------------------------------------------------------
# Serialization


def _cplx_list(c):
    return [[float(x.real), float(x.imag)] for x in np.asarray(c, dtype=complex)]


def _from_list(c):
    return np.array([complex(a, b) for a, b in c], dtype=complex)


def _fn_to_doc(fn: AnalyticFunction) -> dict:
    if isinstance(fn, Constant):
        return {"kind": "rational", "numerator": _cplx_list([fn.value]), "denominator": _cplx_list([1.0])}
    if isinstance(fn, Rational):
        return {
            "kind": "rational",
            "numerator": _cplx_list(fn.numerator),
            "denominator": _cplx_list(fn.denominator),
        }
    if isinstance(fn, SeriesFunction):
        return {
            "kind": "series",
            "coefficients": _cplx_list(fn.series.coefficients),
            "radius": fn.series.radius,
        }
    raise TypeError(f"cannot serialize {type(fn).__name__}")


def _fn_from_doc(doc: dict, domain_radius: float) -> AnalyticFunction:
    kind = doc.get("kind")
    if kind == "rational":
        return Rational(_from_list(doc["numerator"]), _from_list(doc["denominator"]), domain_radius)
    if kind == "series":
        s = PowerSeries(_from_list(doc["coefficients"]), float(doc.get("radius", 1.0)))
        return SeriesFunction(s, domain_radius)
    raise ValueError(f"unknown function kind {kind!r}")


def dumps_data(data: WeierstrassData) -> str:
    doc = {
        "p": _fn_to_doc(data.p),
        "q": _fn_to_doc(data.q),
        "domain_radius": data.domain_radius,
        "mirrored": data.mirrored,
    }
    return json.dumps(doc, indent=2)


def loads_data(text: str) -> WeierstrassData:
    doc = json.loads(text)
    try:
        radius = float(doc["domain_radius"])
        p = _fn_from_doc(doc["p"], radius)
        q = _fn_from_doc(doc["q"], radius)
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed Weierstrass data document: {exc}") from exc
    return WeierstrassData(p, q, radius, mirrored=bool(doc.get("mirrored", False)))
