"""Gauss hypergeometric series and truncated complex power series.

The series here are the numeric backbone of the hexagon model and of the
boundary-correspondence pipeline: Taylor coefficients are stored together
with the disk on which they are trusted and a bound on the discarded tail.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "SeriesRadiusError",
    "PowerSeries",
    "hyp2f1",
    "hyp2f1_coefficients",
    "estimate_tail",
    "series_eval_jet",
    "series_mul",
    "series_div",
    "series_sqrt",
]

MAX_TERMS = 200_000
_STOP_RUN = 3


class SeriesRadiusError(ValueError):
    """Evaluation requested outside the validity disk of a series."""


def _fsum_complex(terms):
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def hyp2f1(a: float, b: float, c: float, x: complex) -> complex:
    """Gauss hypergeometric series 2F1(a, b; c; x) for |x| < 1.

    Summed forward with exact (fsum) accumulation of real and imaginary
    parts; stops once three consecutive terms fall below 1e-16 of the
    partial sum.
    """
    if c <= 0 and float(c).is_integer():
        raise ValueError(f"c = {c} is a nonpositive integer")
    x = complex(x)
    if abs(x) >= 1.0:
        raise ValueError(f"|x| = {abs(x)} >= 1: series diverges (no continuation provided)")
    if x == 0:
        return 1.0 + 0.0j

    term = 1.0 + 0.0j
    terms = [term]
    running = term
    small = 0
    for m in range(MAX_TERMS):
        if b == 1:
            # (1)_m / m! = 1
            term = term * (a + m) / (c + m) * x
        else:
            term = term * (a + m) * (b + m) / ((c + m) * (m + 1)) * x
        terms.append(term)
        running += term
        if term == 0 or abs(term) < 1e-16 * abs(running):
            small += 1
            if small >= _STOP_RUN:
                return _fsum_complex(terms)
        else:
            small = 0
    raise ArithmeticError(f"2F1 series did not converge in {MAX_TERMS} terms at x={x}")


def hyp2f1_coefficients(a: float, b: float, c: float, n_terms: int) -> np.ndarray:
    """Taylor coefficients (a)_m (b)_m / ((c)_m m!) of 2F1(a, b; c; x), m < n_terms."""
    out = np.empty(n_terms)
    term = 1.0
    for m in range(n_terms):
        out[m] = term
        term = term * (a + m) * (b + m) / ((c + m) * (m + 1))
    return out


def estimate_tail(coefficients, radius: float, look_back: int = 8) -> float:
    """Geometric estimate of sup |sum_{n>N} a_n z^n| on |z| <= radius.

    The decay ratio is fitted from the trailing nonzero terms; a ratio at
    or above one yields ``inf``. Trailing terms already at roundoff level
    relative to the largest term are summed as they stand.
    """
    a = np.abs(np.asarray(coefficients, dtype=complex))
    if a.size == 0:
        return 0.0
    scaled = a * radius ** np.arange(a.size)
    peak = scaled.max()
    tail = scaled[-look_back:]
    tail = tail[tail > 0]
    if peak == 0 or tail.size == 0:
        return 0.0
    if tail.max() <= 1e-15 * peak:
        return float(tail.sum())
    if tail.size < 2:
        return math.inf
    rho = (tail[-1] / tail[0]) ** (1.0 / (tail.size - 1))
    if rho >= 1.0:
        return math.inf
    return float(tail[-1] * rho / (1.0 - rho))


@dataclass(frozen=True)
class PowerSeries:
    """Truncated Taylor series about 0.

    ``tail_bound`` bounds the discarded tail on the closed disk of radius
    ``radius``.
    """

    coefficients: np.ndarray
    radius: float
    tail_bound: float = field(default=math.nan)

    def __post_init__(self):
        c = np.array(self.coefficients, dtype=complex)
        c.setflags(write=False)
        object.__setattr__(self, "coefficients", c)
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if math.isnan(self.tail_bound):
            object.__setattr__(self, "tail_bound", estimate_tail(c, self.radius))

    @property
    def degree(self) -> int:
        return len(self.coefficients) - 1

    def _check(self, z):
        z = np.asarray(z, dtype=complex)
        if np.any(np.abs(z) > self.radius * (1 + 1e-15)):
            raise SeriesRadiusError(
                f"|z| = {np.max(np.abs(z)):.6g} exceeds series radius {self.radius}"
            )
        return z

    def __call__(self, z):
        z = self._check(z)
        return np.polynomial.polynomial.polyval(z, self.coefficients)

    def taylor(self, z, order: int):
        """Normalized Taylor coefficients f^(k)(z)/k!, k = 0..order."""
        z = self._check(z)
        out = []
        c = self.coefficients
        for k in range(order + 1):
            out.append(np.polynomial.polynomial.polyval(z, c))
            c = np.polynomial.polynomial.polyder(c) / (k + 1) if len(c) > 1 else np.zeros(1, complex)
        return np.array(out)

    def jet(self, z, order: int):
        t = self.taylor(z, order)
        fact = np.array([math.factorial(k) for k in range(order + 1)], dtype=float)
        return t * fact.reshape((-1,) + (1,) * (t.ndim - 1))

    def jet_error(self, z, order: int) -> np.ndarray:
        """Cauchy-estimate bound for the truncation error of each jet entry."""
        r = abs(complex(z))
        gap = self.radius - r
        if gap <= 0:
            return np.array([self.tail_bound] + [math.inf] * order)
        return np.array([math.factorial(k) * self.tail_bound / gap**k for k in range(order + 1)])

    def derivative(self) -> "PowerSeries":
        c = np.polynomial.polynomial.polyder(self.coefficients) if self.degree > 0 else np.zeros(1)
        return PowerSeries(c, self.radius)

    def integral(self) -> "PowerSeries":
        c = np.polynomial.polynomial.polyint(self.coefficients)
        return PowerSeries(c, self.radius)

    def truncated(self, n_terms: int) -> "PowerSeries":
        return PowerSeries(self.coefficients[:n_terms], self.radius)

    def vanishing_order(self, tol: float = 1e-12) -> int:
        scale = max(np.max(np.abs(self.coefficients)), 1e-300)
        for k, a in enumerate(self.coefficients):
            if abs(a) > tol * scale:
                return k
        return len(self.coefficients)


def series_eval_jet(s: PowerSeries, z: complex, order: int) -> np.ndarray:
    """Value and derivatives 1..order of ``s`` at a single point."""
    if order > 4:
        raise ValueError("order must be <= 4")
    return s.jet(complex(z), order)


def series_mul(a: PowerSeries, b: PowerSeries, n_terms: int | None = None) -> PowerSeries:
    n = n_terms or max(len(a.coefficients), len(b.coefficients))
    c = np.convolve(a.coefficients, b.coefficients)[:n]
    return PowerSeries(c, min(a.radius, b.radius))


def series_div(a: PowerSeries, b: PowerSeries, n_terms: int | None = None) -> PowerSeries:
    """Quotient series a/b; requires b(0) != 0."""
    n = n_terms or max(len(a.coefficients), len(b.coefficients))
    bc = np.zeros(n, complex)
    bc[: min(n, len(b.coefficients))] = b.coefficients[:n]
    ac = np.zeros(n, complex)
    ac[: min(n, len(a.coefficients))] = a.coefficients[:n]
    if bc[0] == 0:
        raise ZeroDivisionError("divisor series vanishes at 0")
    out = np.zeros(n, complex)
    for k in range(n):
        out[k] = (ac[k] - np.dot(out[:k], bc[k:0:-1])) / bc[0]
    return PowerSeries(out, min(a.radius, b.radius))


def series_sqrt(a: PowerSeries, n_terms: int | None = None) -> PowerSeries:
    """Square root with the branch fixed by Re sqrt(a(0)) >= 0."""
    n = n_terms or len(a.coefficients)
    ac = np.zeros(n, complex)
    ac[: min(n, len(a.coefficients))] = a.coefficients[:n]
    if ac[0] == 0:
        raise ZeroDivisionError("sqrt series needs a(0) != 0")
    out = np.zeros(n, complex)
    out[0] = np.sqrt(ac[0])
    for k in range(1, n):
        out[k] = (ac[k] - np.dot(out[1:k], out[k - 1 : 0 : -1])) / (2 * out[0])
    return PowerSeries(out, a.radius)
