"""Nonparametric jets of the height function and the flat-point formulas.

Two independent routes produce the partials of the height f(u, v):

* ``analytic_jet`` reverts w = A(z) + conj(B(z)) as a truncated bivariate
  series in (w - w0, conj(w - w0)) and composes it with t = 2 Im C;
* ``numeric_jet`` inverts the projection on a 7x7 grid and applies central
  stencils with Richardson extrapolation over three step sizes.

On top of a jet sit the closure of the mixed third partials, the Hessian of
the Gaussian curvature at a flat point, the directional profile Q/Y/R and
the closed-form second-order curvature rate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .analytic import t_mul
from .weierstrass import (
    WeierstrassData,
    default_trust_radius,
    height,
    invert_projection,
    projection,
)

__all__ = [
    "SingularConfigurationError",
    "NotFlatError",
    "SurfaceJet",
    "HessianK",
    "close_third_jet",
    "third_jet_identities",
    "hessian_of_K",
    "direction_profile",
    "profile_display",
    "kpp_general",
    "kpp_general_statement",
    "minimal_surface_residual",
    "analytic_jet",
    "numeric_jet",
    "fd_weights",
]

FLAT_TOL = 1e-8


class SingularConfigurationError(ArithmeticError):
    """1 + f_u^2 + f_v^2 (1 - 3 f_u^2) vanishes; no closed form applies."""


class NotFlatError(ValueError):
    """Second partials do not vanish: the point has nonzero curvature."""


@dataclass(frozen=True)
class SurfaceJet:
    f_u: float
    f_v: float
    f_uu: float = 0.0
    f_uv: float = 0.0
    f_vv: float = 0.0
    f_uuu: float = 0.0
    f_uuv: float = 0.0
    f_uvv: float = 0.0
    f_vvv: float = 0.0
    errors: dict = field(default_factory=dict, compare=False)

    @classmethod
    def flat(cls, f_u, f_v, f_uuu, f_vvv) -> "SurfaceJet":
        """Flat jet with the mixed third partials closed by the PDE."""
        f_uvv, f_uuv = close_third_jet(f_u, f_v, f_uuu, f_vvv)
        return cls(f_u, f_v, 0.0, 0.0, 0.0, f_uuu, f_uuv, f_uvv, f_vvv)

    def is_flat(self, tol: float = FLAT_TOL) -> bool:
        return max(abs(self.f_uu), abs(self.f_uv), abs(self.f_vv)) <= tol

    def require_flat(self, tol: float = FLAT_TOL):
        if not self.is_flat(tol):
            raise NotFlatError(
                f"second partials ({self.f_uu:.3g}, {self.f_uv:.3g}, {self.f_vv:.3g}) exceed {tol}"
            )


@dataclass(frozen=True)
class HessianK:
    K_uu: float
    K_uv: float
    K_vv: float

    def matrix(self) -> np.ndarray:
        return np.array([[self.K_uu, self.K_uv], [self.K_uv, self.K_vv]])


def _closure_denominator(f_u, f_v):
    return -1 - f_u**2 + f_v**2 * (-1 + 3 * f_u**2)


def close_third_jet(f_u, f_v, f_uuu, f_vvv):
    """Mixed third partials (f_uvv, f_uuv) at a flat point.

    Solves the u- and v-derivatives of the minimal surface equation with
    all second partials set to zero.
    """
    d = _closure_denominator(f_u, f_v)
    if abs(d) < 1e-12:
        raise SingularConfigurationError(f"closure denominator {d:.3g} at slopes ({f_u}, {f_v})")
    f_uvv = (2 * f_v * f_vvv * (f_u + f_u**3) + (1 + f_v**2) ** 2 * f_uuu) / d
    f_uuv = (f_vvv * (1 + f_u**2) ** 2 + 2 * (f_v + f_v**3) * f_u * f_uuu) / d
    return f_uvv, f_uuv


def third_jet_identities(f_u, f_v, f_uuu, f_uuv, f_uvv, f_vvv):
    """Residuals of the differentiated minimal surface equation (flat point)."""
    r_u = (1 + f_u**2) * f_uvv - 2 * f_v * f_u * f_uuv + (1 + f_v**2) * f_uuu
    r_v = f_vvv * (1 + f_u**2) - 2 * f_v * f_u * f_uvv + (1 + f_v**2) * f_uuv
    return r_u, r_v


def minimal_surface_residual(jet: SurfaceJet) -> float:
    return (
        (1 + jet.f_u**2) * jet.f_vv
        - 2 * jet.f_u * jet.f_v * jet.f_uv
        + (1 + jet.f_v**2) * jet.f_uu
    )


def hessian_of_K(jet: SurfaceJet, tol: float = FLAT_TOL) -> HessianK:
    """Second partials of K = (f_uu f_vv - f_uv^2)/(1+|grad f|^2)^2 at a flat point."""
    jet.require_flat(tol)
    w = (1 + jet.f_v**2 + jet.f_u**2) ** 2
    k_uu = (-2 * jet.f_uuv**2 + 2 * jet.f_uvv * jet.f_uuu) / w
    k_uv = (-jet.f_uvv * jet.f_uuv + jet.f_vvv * jet.f_uuu) / w
    k_vv = (-2 * jet.f_uvv**2 + 2 * jet.f_vvv * jet.f_uuv) / w
    return HessianK(k_uu, k_uv, k_vv)


def profile_display(jet: SurfaceJet, t: float) -> float:
    """(A + B)/(1+|grad f|^2)^2 written out in sin t, cos t.

    The mixed partial entering both A and B is f_uuv; with that reading the
    expression equals <H e, e> for e = (cos t, sin t).
    """
    s, c = math.sin(t), math.cos(t)
    a = -2 * s * s * jet.f_uvv**2 + 2 * s * (s * jet.f_vvv - c * jet.f_uvv) * jet.f_uuv
    b = -2 * c * c * jet.f_uuv**2 + 2 * c * (s * jet.f_vvv + c * jet.f_uvv) * jet.f_uuu
    return (a + b) / (1 + jet.f_v**2 + jet.f_u**2) ** 2


def direction_profile(jet: SurfaceJet, t: float):
    """(Q(t), Y(t), R(t)) along the unit direction e = (cos t, sin t).

    Q is the Hessian quadratic form <H e, e>, so K(r e) = Q r^2 / 2 + o(r^2);
    Y = -2 (1 + <grad f, e>^2) and R = Q / (1 + <grad f, e>^2).
    """
    h = hessian_of_K(jet)
    c, s = math.cos(t), math.sin(t)
    q = h.K_uu * c * c + 2 * h.K_uv * c * s + h.K_vv * s * s
    tilt = 1 + (jet.f_u * c + jet.f_v * s) ** 2
    return q, -2 * tilt, q / tilt


def _kpp(jet, cross):
    jet.require_flat()
    fu, fv, a, b = jet.f_u, jet.f_v, jet.f_uuu, jet.f_vvv
    d0 = 1 + fu**2 + fv**2 * (1 - 3 * fu**2)
    if abs(d0) < 1e-12:
        raise SingularConfigurationError(f"denominator 1+f_u^2+f_v^2(1-3f_u^2) = {d0:.3g}")
    num = (1 + fu**2) ** 3 * b**2 + 2 * fv * b * fu * cross * a + (1 + fv**2) ** 3 * a**2
    return -num / ((1 + fv**2 + fu**2) ** 2 * d0**2)


def kpp_general(jet: SurfaceJet) -> float:
    """Closed-form limit of K(w) / (|w|^2 + <grad f, w>^2) at a flat point.

    Uses the cross coefficient f_v^2 (3 - f_u^2) + 3 (1 + f_u^2). Equals R(t)/2
    for every direction t; at zero slope it is -(f_uuu^2 + f_vvv^2).
    """
    cross = jet.f_v**2 * (3 - jet.f_u**2) + 3 * (1 + jet.f_u**2)
    return _kpp(jet, cross)


def kpp_general_statement(jet: SurfaceJet) -> float:
    """Variant with cross coefficient 3 (f_u^2 + f_v^2) - f_u^2 f_v^2 (kept for comparison)."""
    cross = 3 * (jet.f_u**2 + jet.f_v**2) - jet.f_u**2 * jet.f_v**2
    return _kpp(jet, cross)


# ---------------------------------------------------------------------------
# Exact jet by bivariate series reversion

_DEG = 3


def _bmul(a, b):
    out = np.zeros((_DEG + 1, _DEG + 1), complex)
    for j in range(_DEG + 1):
        for k in range(_DEG + 1 - j):
            if a[j, k] == 0:
                continue
            for m in range(_DEG + 1 - j - k):
                for n in range(_DEG + 1 - j - k - m):
                    out[j + m, k + n] += a[j, k] * b[m, n]
    return out


def _bconj(a):
    return np.conj(a).T


def _compose(coeffs, delta):
    """sum_{n>=1} coeffs[n] * delta**n, truncated."""
    out = np.zeros_like(delta)
    power = delta.copy()
    for n in range(1, _DEG + 1):
        out += coeffs[n] * power
        power = _bmul(power, delta)
    return out


def analytic_jet(data: WeierstrassData, z0: complex = 0j) -> SurfaceJet:
    """Partials of the height function through order 3, from exact Taylor data."""
    z0 = complex(z0)
    pt, qt = data.pq(z0, _DEG - 1)
    pt, qt = pt.ravel(), qt.ravel()
    pq2 = t_mul(t_mul(pt, qt), qt)
    pq = t_mul(pt, qt)
    n = np.arange(1, _DEG + 1)
    A = np.concatenate([[0], pt / n])
    B = np.concatenate([[0], pq2 / n])
    C = np.concatenate([[0], pq / n])
    a, b = A[1], B[1]
    jac = abs(a) ** 2 - abs(b) ** 2

    eps = np.zeros((_DEG + 1, _DEG + 1), complex)
    eps[1, 0] = 1.0
    delta = np.zeros_like(eps)
    for _ in range(_DEG):
        nonlin = _compose(np.r_[0, 0, A[2:]], delta) + _bconj(_compose(np.r_[0, 0, B[2:]], delta))
        r = eps - nonlin
        delta = (np.conj(a) * r - np.conj(b) * _bconj(r)) / jac
    T = _compose(C, delta)
    G = -1j * (T - _bconj(T))  # 2 Im T

    # expand sum g_jk (u + iv)^j (u - iv)^k into monomials u^a v^b
    H = np.zeros((_DEG + 1, _DEG + 1), complex)
    plus = np.array([[0, 1j], [1, 0]])  # u + i v as coef[a, b] of u^a v^b
    minus = np.array([[0, -1j], [1, 0]])
    pw_plus = [np.ones((1, 1), complex)]
    pw_minus = [np.ones((1, 1), complex)]
    for _ in range(_DEG):
        pw_plus.append(_poly2_mul(pw_plus[-1], plus))
        pw_minus.append(_poly2_mul(pw_minus[-1], minus))
    for j in range(_DEG + 1):
        for k in range(_DEG + 1 - j):
            if G[j, k] == 0:
                continue
            term = G[j, k] * _poly2_mul(pw_plus[j], pw_minus[k])
            H[: term.shape[0], : term.shape[1]] += term
    def d(i, j):
        return float((math.factorial(i) * math.factorial(j) * H[i, j]).real)

    return SurfaceJet(
        f_u=d(1, 0), f_v=d(0, 1),
        f_uu=d(2, 0), f_uv=d(1, 1), f_vv=d(0, 2),
        f_uuu=d(3, 0), f_uuv=d(2, 1), f_uvv=d(1, 2), f_vvv=d(0, 3),
    )


def _poly2_mul(a, b):
    out = np.zeros((a.shape[0] + b.shape[0] - 1, a.shape[1] + b.shape[1] - 1), complex)
    for i in range(a.shape[0]):
        for j in range(a.shape[1]):
            if a[i, j] != 0:
                out[i : i + b.shape[0], j : j + b.shape[1]] += a[i, j] * b
    return out


# ---------------------------------------------------------------------------
# Finite-difference oracle

_OFFSETS = np.arange(-3, 4)


def fd_weights(offsets, order: int) -> np.ndarray:
    """Finite-difference weights for the ``order``-th derivative on integer offsets."""
    offsets = np.asarray(offsets, dtype=float)
    n = len(offsets)
    vander = np.vander(offsets, n, increasing=True).T
    rhs = np.zeros(n)
    rhs[order] = math.factorial(order)
    return np.linalg.solve(vander, rhs)


_W = {k: fd_weights(_OFFSETS, k) for k in range(4)}
# leading truncation order of each 7-point stencil
_ORDER = {0: 7, 1: 6, 2: 6, 3: 4}

_PARTIALS = {
    "f_u": (1, 0), "f_v": (0, 1),
    "f_uu": (2, 0), "f_uv": (1, 1), "f_vv": (0, 2),
    "f_uuu": (3, 0), "f_uuv": (2, 1), "f_uvv": (1, 2), "f_vvv": (0, 3),
}


def _grid_derivatives(F, s):
    out = {}
    for name, (i, j) in _PARTIALS.items():
        w = np.outer(_W[i], _W[j])
        out[name] = float(np.sum(w * F)) / s ** (i + j)
    return out


def numeric_jet(data: WeierstrassData, z0: complex = 0j, order: int = 3,
                step: float | None = None, levels: int = 3,
                trust_radius: float | None = None, tol3: float = 1e-4) -> SurfaceJet:
    """Brute-force partials of the height over the projected point f(z0).

    Heights are sampled on 7x7 grids of spacing step, step/2, step/4 by
    inverting the projection; stencil values are Richardson-extrapolated
    over the levels. The reported ``errors`` are the last extrapolation
    corrections.
    """
    if order != 3:
        raise ValueError("numeric_jet computes through order 3 only")
    z0 = complex(z0)
    trust = default_trust_radius(data) if trust_radius is None else trust_radius
    h = 1e-2 * trust if step is None else step
    w0 = complex(projection(data, z0))
    p0 = complex(data.p(z0))
    q0 = complex(data.q(z0))
    b0 = p0 * q0 * q0

    tables = {name: [] for name in _PARTIALS}
    for level in range(levels):
        s = h / 2**level
        du, dv = np.meshgrid(_OFFSETS * s, _OFFSETS * s, indexing="ij")
        dw = du + 1j * dv
        guess = z0 + (np.conj(p0) * dw - np.conj(b0) * np.conj(dw)) / (abs(p0) ** 2 - abs(b0) ** 2)
        z = invert_projection(data, w0 + dw, trust_radius=np.inf, z_guess=guess)
        F = height(data, z) - height(data, z0)
        for name, val in _grid_derivatives(F, s).items():
            tables[name].append(val)

    values, errors = {}, {}
    for name, (i, j) in _PARTIALS.items():
        row = tables[name]
        p = _ORDER[i] if j == 0 else (_ORDER[j] if i == 0 else min(_ORDER[i], _ORDER[j]))
        for k in range(1, len(row)):
            fac = 2.0 ** (p + 2 * (k - 1))
            row = [(fac * row[m + 1] - row[m]) / (fac - 1) for m in range(len(row) - 1)]
            if len(row) == 1:
                break
        values[name] = row[0]
        errors[name] = abs(row[0] - _last_level_estimate(tables[name], p))
    for name in ("f_uuu", "f_uuv", "f_uvv", "f_vvv"):
        if errors[name] > tol3:
            raise ArithmeticError(f"{name} error estimate {errors[name]:.3g} exceeds {tol3}")
    return SurfaceJet(**values, errors=errors)


def _last_level_estimate(row, p):
    if len(row) < 2:
        return row[-1]
    fac = 2.0**p
    return (fac * row[-1] - row[-2]) / (fac - 1)
