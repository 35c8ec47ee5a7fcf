"""Holomorphic function handles, radial quadrature and jets.

Every handle exposes ``taylor(z, order)``, the normalized Taylor
coefficients f^(k)(z)/k! stacked along axis 0, vectorized over ``z``.
Exact rules are used for rational and series backends; composites combine
them with Taylor-mode arithmetic. Black-box callables fall back to Cauchy
differentiation on a small circle.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import polynomial as P

from .special_functions import PowerSeries, series_sqrt

__all__ = [
    "RadiusError",
    "BranchError",
    "QuadratureError",
    "AnalyticFunction",
    "Constant",
    "Rational",
    "SeriesFunction",
    "BlackBox",
    "SqrtFunction",
    "RadialPath",
    "integrate_radial",
    "radial_primitive",
    "jet",
    "cauchy_jet",
    "sqrt_branch",
    "DEFAULT_RADIUS",
]

DEFAULT_RADIUS = 0.999
NODES_PER_SEGMENT = 32
MAX_SEGMENTS = 2**10


class RadiusError(ValueError):
    """Point outside the disk where a function is trusted."""


class BranchError(ValueError):
    """No single-valued holomorphic square root on the working disk."""


class QuadratureError(ArithmeticError):
    """Composite quadrature did not reach its tolerance."""


# ---------------------------------------------------------------------------
# Taylor-mode arithmetic on normalized coefficient stacks


def t_mul(a, b):
    n = min(len(a), len(b))
    out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=complex)
    for k in range(n):
        for j in range(k + 1):
            out[k] += a[j] * b[k - j]
    return out


def t_div(a, b):
    n = min(len(a), len(b))
    out = np.zeros((n,) + np.broadcast_shapes(a.shape[1:], b.shape[1:]), dtype=complex)
    for k in range(n):
        acc = a[k].astype(complex)
        for j in range(k):
            acc = acc - out[j] * b[k - j]
        out[k] = acc / b[0]
    return out


def t_sqrt(a, s0):
    """Taylor stack of sqrt(a) given the chosen branch value s0 = sqrt(a[0])."""
    out = np.zeros(a.shape, dtype=complex)
    out[0] = s0
    for k in range(1, len(a)):
        acc = a[k].astype(complex)
        for j in range(1, k):
            acc = acc - out[j] * out[k - j]
        out[k] = acc / (2 * s0)
    return out


def _factorials(order, ndim):
    f = np.array([math.factorial(k) for k in range(order + 1)], dtype=float)
    return f.reshape((-1,) + (1,) * ndim)


# ---------------------------------------------------------------------------
# Function handles


class AnalyticFunction:
    """Base class; subclasses implement ``taylor``."""

    domain_radius: float = DEFAULT_RADIUS
    exact_derivatives = True

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) >= self.domain_radius):
            raise RadiusError(
                f"|z| = {np.max(np.abs(z)):.6g} outside domain radius {self.domain_radius}"
            )
        return z

    def taylor(self, z, order: int):
        raise NotImplementedError

    def __call__(self, z):
        return self.taylor(z, 0)[0]

    def jet(self, z, order: int):
        t = self.taylor(z, order)
        return t * _factorials(order, t.ndim - 1)

    def deflate(self, k: int) -> "AnalyticFunction":
        """The function divided by z**k, when the backend can do it exactly."""
        if k == 0:
            return self
        raise NotImplementedError(f"{type(self).__name__} cannot be deflated exactly")

    # arithmetic builds composites
    def __mul__(self, other):
        return _Product(self, _lift(other, self.domain_radius))

    __rmul__ = __mul__

    def __truediv__(self, other):
        return _Quotient(self, _lift(other, self.domain_radius))

    def __add__(self, other):
        return _Sum(self, _lift(other, self.domain_radius), 1.0)

    __radd__ = __add__

    def __sub__(self, other):
        return _Sum(self, _lift(other, self.domain_radius), -1.0)

    def __neg__(self):
        return _Product(self, Constant(-1.0, self.domain_radius))


def _lift(x, radius):
    if isinstance(x, AnalyticFunction):
        return x
    return Constant(complex(x), radius)


class Constant(AnalyticFunction):
    def __init__(self, value: complex, domain_radius: float = DEFAULT_RADIUS):
        self.value = complex(value)
        self.domain_radius = domain_radius

    def taylor(self, z, order):
        z = self._check(z)
        out = np.zeros((order + 1,) + z.shape, dtype=complex)
        out[0] = self.value
        return out

    def deflate(self, k):
        if k == 0:
            return self
        if self.value == 0:
            return self
        raise BranchError("nonzero constant has vanishing order 0")

    def __repr__(self):
        return f"Constant({self.value!r})"


class Rational(AnalyticFunction):
    """Ratio of polynomials with ascending coefficient lists."""

    def __init__(self, numerator, denominator=(1.0,), domain_radius: float = DEFAULT_RADIUS):
        self.numerator = np.atleast_1d(np.asarray(numerator, dtype=complex))
        self.denominator = np.atleast_1d(np.asarray(denominator, dtype=complex))
        self.domain_radius = domain_radius

    def _poly_taylor(self, c, z, order):
        out = []
        for k in range(order + 1):
            out.append(P.polyval(z, c) if len(c) else np.zeros(z.shape, complex))
            c = P.polyder(c) / (k + 1) if len(c) > 1 else np.zeros(1, complex)
        return np.array(out, dtype=complex)

    def taylor(self, z, order):
        z = self._check(z)
        num = self._poly_taylor(self.numerator, z, order)
        if len(self.denominator) == 1:
            return num / self.denominator[0]
        return t_div(num, self._poly_taylor(self.denominator, z, order))

    def deflate(self, k):
        if k == 0:
            return self
        head = self.numerator[:k]
        scale = max(np.max(np.abs(self.numerator)), 1e-300)
        if np.any(np.abs(head) > 1e-14 * scale) or self.denominator[0] == 0:
            raise BranchError(f"function does not vanish to order {k} at 0")
        return Rational(self.numerator[k:], self.denominator, self.domain_radius)

    def __repr__(self):
        return f"Rational({self.numerator.tolist()!r}, {self.denominator.tolist()!r})"


class SeriesFunction(AnalyticFunction):
    def __init__(self, series: PowerSeries, domain_radius: float | None = None):
        self.series = series
        self.domain_radius = series.radius if domain_radius is None else domain_radius

    def taylor(self, z, order):
        z = self._check(z)
        return self.series.taylor(z, order)

    def deflate(self, k):
        if k == 0:
            return self
        c = self.series.coefficients
        if self.series.vanishing_order() < k:
            raise BranchError(f"series does not vanish to order {k} at 0")
        return SeriesFunction(PowerSeries(c[k:], self.series.radius), self.domain_radius)

    def __repr__(self):
        return f"SeriesFunction(degree={self.series.degree}, radius={self.series.radius})"


class BlackBox(AnalyticFunction):
    """Vectorized callable without a derivative rule (Cauchy fallback)."""

    exact_derivatives = False

    def __init__(self, fn, domain_radius: float = DEFAULT_RADIUS):
        self.fn = fn
        self.domain_radius = domain_radius

    def taylor(self, z, order):
        z = self._check(z)
        if order == 0:
            return np.asarray(self.fn(z), dtype=complex)[None]
        return cauchy_taylor(self, z, order)


class _Product(AnalyticFunction):
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.domain_radius = min(a.domain_radius, b.domain_radius)

    def taylor(self, z, order):
        return t_mul(self.a.taylor(z, order), self.b.taylor(z, order))

    def deflate(self, k):
        if k == 0:
            return self
        # split z**k between the factors, largest share to the first
        for j in range(k, -1, -1):
            try:
                return _Product(self.a.deflate(j), self.b.deflate(k - j))
            except (BranchError, NotImplementedError):
                continue
        raise BranchError(f"product does not factor z**{k} exactly")


class _Quotient(AnalyticFunction):
    def __init__(self, a, b):
        self.a, self.b = a, b
        self.domain_radius = min(a.domain_radius, b.domain_radius)

    def taylor(self, z, order):
        return t_div(self.a.taylor(z, order), self.b.taylor(z, order))


class _Sum(AnalyticFunction):
    def __init__(self, a, b, sign):
        self.a, self.b, self.sign = a, b, sign
        self.domain_radius = min(a.domain_radius, b.domain_radius)

    def taylor(self, z, order):
        return self.a.taylor(z, order) + self.sign * self.b.taylor(z, order)


class SqrtFunction(AnalyticFunction):
    """z**m * sqrt(psi(z)), branch continued radially from Re sqrt(psi(0)) >= 0."""

    def __init__(self, psi: AnalyticFunction, half_order: int, steps: int = 64):
        self.psi = psi
        self.m = half_order
        self.steps = steps
        self.domain_radius = psi.domain_radius
        self.root0 = np.sqrt(complex(psi(0.0)))

    def _branch_value(self, z):
        t = np.linspace(0.0, 1.0, self.steps + 1).reshape((-1,) + (1,) * z.ndim)
        vals = self.psi(t * z)
        prev = np.broadcast_to(self.root0, z.shape).astype(complex)
        for k in range(1, self.steps + 1):
            s = np.sqrt(vals[k])
            flip = (s * np.conj(prev)).real < 0
            prev = np.where(flip, -s, s)
        return prev

    def taylor(self, z, order):
        z = self._check(z)
        root = t_sqrt(self.psi.taylor(z, order), self._branch_value(z))
        if self.m == 0:
            return root
        zm = np.zeros_like(root)
        for k in range(min(order, self.m) + 1):
            zm[k] = math.comb(self.m, k) * z ** (self.m - k)
        return t_mul(zm, root)


# ---------------------------------------------------------------------------
# Jets


def cauchy_taylor(fn, z, order, n_points: int = 64):
    z = np.asarray(z, dtype=complex)
    gap = (fn.domain_radius - np.abs(z)) / 2
    rho = np.minimum(0.1, gap)
    theta = 2 * np.pi * np.arange(n_points) / n_points
    ring = np.exp(1j * theta).reshape((-1,) + (1,) * z.ndim)
    samples = np.asarray(fn(z + rho * ring), dtype=complex)
    coeffs = np.fft.fft(samples, axis=0) / n_points
    return np.array([coeffs[k] / rho**k for k in range(order + 1)])


def cauchy_jet(fn: AnalyticFunction, z, order: int, n_points: int = 64):
    """Derivatives 0..order by trapezoidal Cauchy integrals."""
    z = fn._check(z)
    t = cauchy_taylor(fn, z, order, n_points)
    return t * _factorials(order, t.ndim - 1)


def jet(fn: AnalyticFunction, z, order: int):
    """Value and derivatives up to ``order`` (at most 4) of ``fn`` at ``z``."""
    if order > 4:
        raise ValueError("jet order is limited to 4")
    z = fn._check(z)
    if fn.exact_derivatives:
        return fn.jet(z, order)
    return cauchy_jet(fn, z, order)


# ---------------------------------------------------------------------------
# Radial quadrature


@lru_cache(maxsize=None)
def _gauss_legendre(n):
    x, w = np.polynomial.legendre.leggauss(n)
    x.setflags(write=False)
    w.setflags(write=False)
    return x, w


@dataclass(frozen=True)
class RadialPath:
    """Straight segment from ``start`` (default 0) to ``endpoint``."""

    endpoint: complex
    segments: int = 1
    nodes_per_segment: int = NODES_PER_SEGMENT
    start: complex = 0j

    def __post_init__(self):
        if self.segments < 1:
            raise ValueError("segments must be >= 1")
        if abs(self.endpoint) >= 1 or abs(self.start) >= 1:
            raise RadiusError("path must stay inside the unit disk")


def _composite_gl(fn, a, b, segments, nodes):
    """Composite Gauss-Legendre of fn over [a, b], vectorized over b."""
    x, w = _gauss_legendre(nodes)
    b = np.asarray(b, dtype=complex)
    a = np.broadcast_to(np.asarray(a, dtype=complex), b.shape)
    k = np.arange(segments)
    # local parameter in [0, 1] for every (segment, node)
    s = ((k[:, None] + (x[None, :] + 1) / 2) / segments).ravel()
    ws = np.tile(w, segments) / (2 * segments)
    s = s.reshape((-1,) + (1,) * b.ndim)
    zeta = a + s * (b - a)
    vals = np.asarray(fn(zeta), dtype=complex)
    ws = ws.reshape((-1,) + (1,) * b.ndim)
    # fn may stack components ahead of the node axis
    return (b - a) * np.sum(vals * ws, axis=-1 - b.ndim)


def radial_primitive(fn, z, start=0j, segments: int = 1, nodes: int = NODES_PER_SEGMENT,
                     tol: float = 1e-12, max_segments: int = MAX_SEGMENTS):
    """Vectorized integral of fn from ``start`` to each ``z`` along segments.

    Segment count is doubled for every endpoint until two successive
    estimates agree to ``tol * (1 + |I|)``.
    """
    z = np.asarray(z, dtype=complex)
    radius = getattr(fn, "domain_radius", 1.0)
    if np.any(np.abs(z) >= radius) or abs(start) >= radius:
        raise RadiusError(f"integration endpoint outside domain radius {radius}")
    prev = _composite_gl(fn, start, z, segments, nodes)
    n = segments
    while True:
        n *= 2
        cur = _composite_gl(fn, start, z, n, nodes)
        err = np.abs(cur - prev)
        if np.all(err <= tol * (1 + np.abs(cur))):
            return cur
        if n >= max_segments:
            raise QuadratureError(
                f"radial quadrature stalled at {n} segments (max change {np.max(err):.3g})"
            )
        prev = cur


def integrate_radial(fn, path: RadialPath, tol: float = 1e-12) -> complex:
    """Integral of ``fn`` along ``path`` by doubled composite Gauss-Legendre."""
    return complex(
        radial_primitive(
            fn, path.endpoint, start=path.start, segments=path.segments,
            nodes=path.nodes_per_segment, tol=tol,
        )
    )


# ---------------------------------------------------------------------------
# Square roots


def _winding_number(fn, radius, n=4096):
    theta = 2 * np.pi * np.arange(n + 1) / n
    vals = fn(radius * np.exp(1j * theta))
    if np.min(np.abs(vals)) == 0:
        return None
    dphase = np.angle(vals[1:] / vals[:-1])
    return int(round(np.sum(dphase) / (2 * np.pi)))


def sqrt_branch(omega: AnalyticFunction, vanishing_order: int,
                radius: float | None = None) -> AnalyticFunction:
    """Holomorphic q with q**2 = omega on the working disk.

    ``omega`` must factor as z**vanishing_order * psi with psi free of zeros
    on the disk; the branch is fixed by Re sqrt(psi(0)) >= 0.
    """
    if vanishing_order < 0 or vanishing_order % 2:
        raise BranchError(f"vanishing order {vanishing_order} is not a nonnegative even integer")
    radius = omega.domain_radius if radius is None else radius
    psi = omega.deflate(vanishing_order)
    if abs(complex(psi(0.0))) == 0:
        raise BranchError("omega vanishes to higher order than stated")
    wind = _winding_number(psi, radius * (1 - 1e-9))
    if wind != 0:
        raise BranchError(f"psi has zeros inside |z| < {radius} (winding {wind})")
    m = vanishing_order // 2
    if isinstance(psi, Rational) and len(psi.numerator) == len(psi.denominator) == 1:
        psi = Constant(psi.numerator[0] / psi.denominator[0], psi.domain_radius)
    if isinstance(psi, SeriesFunction):
        root = series_sqrt(psi.series).coefficients
        c = np.concatenate([np.zeros(m, complex), root])
        return SeriesFunction(PowerSeries(c, psi.series.radius), psi.domain_radius)
    if isinstance(psi, Constant):
        c = np.zeros(m + 1, complex)
        c[m] = np.sqrt(psi.value)
        return Rational(c, (1.0,), omega.domain_radius)
    return SqrtFunction(psi, m)
