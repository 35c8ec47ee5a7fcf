"""Named numerical checks shared by the ``verify`` command and the acceptance suite.

Every check returns a :class:`CheckResult` with the measured value, the
target, the tolerance used and the wall time. Tolerances can be overridden
through ``ZEROCURV_TOL_<NAME>`` environment variables.
"""
from __future__ import annotations

import functools
import math
import os
import time
from dataclasses import asdict, dataclass, field

import numpy as np

from .analytic import Rational, radial_primitive
from .bounds import (
    FLAT_BOUND,
    GENERAL_BOUND,
    kpp_closed_form,
    kpp_numeric,
    limit_estimates,
    schwarz_bound_check,
)
from .graph_jets import (
    close_third_jet,
    direction_profile,
    kpp_general,
    numeric_jet,
    third_jet_identities,
)
from .hexagon import boundary_geometry, build_hexagon, height as hex_height, kpp_report
from .rkc import BatchConfig, generate_batch
from .weierstrass import WeierstrassData, height, invert_projection, projection

__all__ = [
    "CheckResult",
    "DEFAULT_TOLERANCES",
    "tolerance",
    "tilted_datum",
    "schwarz_pick_sample",
    "fd_minimal_residual",
    "check_hexagon_closed_form",
    "check_hexagon_numeric_limit",
    "check_theorem_bounds",
    "check_pde_residual",
    "check_lemma_oracle",
    "check_third_jet_closure",
    "check_hypergeometric_identity",
    "check_height_formula",
    "check_bound_machinery",
    "check_flat_point_identity",
    "check_hexagon_margin",
    "check_hexagon_boundary",
    "run_suite",
]

DEFAULT_TOLERANCES = {
    "closed_form": 1e-12,
    "numeric_limit": 1e-3,
    "direction_spread": 1e-6,
    "pde_residual": 1e-6,
    "lemma_oracle": 1e-4,
    "profile_spread": 1e-9,
    "identities": 1e-12,
    "closure_fd": 1e-4,
    "hypergeometric": 1e-10,
    "height": 1e-10,
    "schwarz_gap": 1e-12,
    "flat_identity": 1e-4,
    "hexagon_margin": 1e-9,
    "boundary_distance": 1e-2,
}


def tolerance(name: str, overrides: dict | None = None) -> float:
    if overrides and name in overrides:
        return float(overrides[name])
    env = os.environ.get(f"ZEROCURV_TOL_{name.upper()}")
    return float(env) if env else DEFAULT_TOLERANCES[name]


@dataclass
class CheckResult:
    name: str
    passed: bool
    value: float
    target: str
    tolerance: float
    seconds: float = 0.0
    detail: dict = field(default_factory=dict)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"{status} {self.name}: value={self.value:.12g} target={self.target} "
                f"tol={self.tolerance:.1e} time={self.seconds:.3f}s")

    def to_dict(self) -> dict:
        return asdict(self)


def _timed(fn):
    def wrapper(*args, **kwargs):
        t0 = time.perf_counter()
        res = fn(*args, **kwargs)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_HEX = None


def _hexagon():
    global _HEX
    if _HEX is None:
        _HEX = build_hexagon()
    return _HEX


@functools.lru_cache(maxsize=4)
def _batch(seed: int, size: int):
    return generate_batch(BatchConfig(size=size, seed=seed))


def tilted_datum() -> WeierstrassData:
    """p = 1, q = 0.3 + z^2: flat centre with nonzero slope, admissible for |z| < 0.8."""
    return WeierstrassData(Rational([1.0], [1.0], 0.8), Rational([0.3, 0, 1], [1.0], 0.8), 0.8)


def schwarz_pick_sample(rng: np.random.Generator) -> Rational:
    """q = M_a(c z^2 (z - b)/(1 - conj(b) z)): a disk self-map with q'(0) = 0 and |c b| < 1."""
    a = 0.9 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    b = 0.9 * math.sqrt(rng.uniform()) * np.exp(2j * np.pi * rng.uniform())
    c = 0.99 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    # inner map g = c z^2 (z - b) / (1 - conj(b) z) = N / D
    N = np.array([0, 0, -c * b, c])
    D = np.array([1, -np.conj(b), 0, 0])
    num = N + a * D
    den = D + np.conj(a) * N
    return Rational(num, den, 0.999)


def fd_minimal_residual(data: WeierstrassData, z, step: float = 2e-3):
    """Minimal surface operator on the height, by 3-point differences and one Richardson step."""
    z = np.asarray(z, dtype=complex)
    w0 = projection(data, z)
    t0 = height(data, z)

    def second_partials(s):
        off = s * np.array([1, -1, 1j, -1j, 1 + 1j, 1 - 1j, -1 + 1j, -1 - 1j])
        w = w0[:, None] + off[None, :]
        zz = invert_projection(data, w, trust_radius=np.inf, z_guess=np.repeat(z[:, None], 8, axis=1))
        t = height(data, zz)
        f_u = (t[:, 0] - t[:, 1]) / (2 * s)
        f_v = (t[:, 2] - t[:, 3]) / (2 * s)
        f_uu = (t[:, 0] - 2 * t0 + t[:, 1]) / s**2
        f_vv = (t[:, 2] - 2 * t0 + t[:, 3]) / s**2
        f_uv = (t[:, 4] - t[:, 5] - t[:, 6] + t[:, 7]) / (4 * s**2)
        return np.array([f_u, f_v, f_uu, f_vv, f_uv])

    d1 = second_partials(step)
    d2 = second_partials(step / 2)
    f_u, f_v, f_uu, f_vv, f_uv = (4 * d2 - d1) / 3
    return (1 + f_u**2) * f_vv - 2 * f_u * f_v * f_uv + (1 + f_v**2) * f_uu


def _random_disk(rng, n, radius):
    return np.sqrt(rng.uniform(0, radius**2, n)) * np.exp(2j * np.pi * rng.uniform(size=n))


# ---------------------------------------------------------------------------
# Checks


@_timed
def check_hexagon_closed_form(overrides=None) -> CheckResult:
    tol = tolerance("closed_form", overrides)
    value = kpp_closed_form(3 / math.pi, 0.0, 2.0)
    err = abs(value / FLAT_BOUND.value - 1)
    return CheckResult("hexagon_closed_form", err <= tol, value, FLAT_BOUND.expression, tol,
                       detail={"relative_error": err})


@_timed
def check_hexagon_numeric_limit(overrides=None) -> CheckResult:
    tol = tolerance("numeric_limit", overrides)
    spread_tol = tolerance("direction_spread", overrides)
    est = -limit_estimates(_hexagon().data, directions=8)
    value = float(np.mean(est))
    err = abs(value / FLAT_BOUND.value - 1)
    spread = float((est.max() - est.min()) / value)
    return CheckResult("hexagon_numeric_limit", err <= tol and spread <= spread_tol, value,
                       FLAT_BOUND.expression, tol,
                       detail={"relative_error": err, "direction_spread": spread,
                               "spread_tolerance": spread_tol})


@_timed
def check_theorem_bounds(seed: int = 0, size: int = 200, overrides=None) -> CheckResult:
    batch = _batch(seed, size)
    ordered = GENERAL_BOUND.value > FLAT_BOUND.value
    general = sum(1 for _, r, _ in batch if not r.magnitude < GENERAL_BOUND.value)
    flat_cases = [r for _, r, _ in batch if abs(r.q0) <= 1e-12]
    flat = sum(1 for r in flat_cases if not r.magnitude < FLAT_BOUND.value)
    worst = max(r.magnitude for _, r, _ in batch)
    return CheckResult(
        "theorem_bounds", ordered and general == 0 and flat == 0, worst,
        f"< {GENERAL_BOUND.expression} (flat centre < {FLAT_BOUND.expression})", 0.0,
        detail={"instances": len(batch), "flat_centre_instances": len(flat_cases),
                "general_violations": general, "flat_violations": flat,
                "rejected_draws": sum(a for *_, a in batch),
                "worst_flat_centre": max((r.magnitude for r in flat_cases), default=0.0)},
    )


@_timed
def check_pde_residual(seed: int = 0, n: int = 100, overrides=None) -> CheckResult:
    tol = tolerance("pde_residual", overrides)
    rng = np.random.default_rng(seed)
    z = _random_disk(rng, n, 0.8)
    res = np.abs(fd_minimal_residual(_hexagon().data, z))
    return CheckResult("pde_residual", bool(res.max() <= tol), float(res.max()), "0", tol,
                       detail={"points": n})


@_timed
def check_lemma_oracle(overrides=None) -> CheckResult:
    tol = tolerance("lemma_oracle", overrides)
    ptol = tolerance("profile_spread", overrides)
    data = tilted_datum()
    jet = numeric_jet(data, 0j)
    closed = kpp_general(jet)
    limit = kpp_numeric(data)
    err = abs(closed / limit - 1)
    R = np.array([direction_profile(jet, t)[2] for t in np.linspace(0, np.pi, 16, endpoint=False)])
    spread = float((R.max() - R.min()) / abs(R.mean()))
    return CheckResult("lemma_oracle", err <= tol and spread <= ptol, closed, f"{limit:.12g}", tol,
                       detail={"relative_error": err, "profile_spread": spread,
                               "profile_tolerance": ptol, "R_mean": float(R.mean())})


@_timed
def check_third_jet_closure(seed: int = 0, n: int = 1000, overrides=None) -> CheckResult:
    tol = tolerance("identities", overrides)
    fd_tol = tolerance("closure_fd", overrides)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for f_u, f_v, a, b in rng.uniform(-3, 3, (n, 4)):
        uvv, uuv = close_third_jet(f_u, f_v, a, b)
        r_u, r_v = third_jet_identities(f_u, f_v, a, uuv, uvv, b)
        scale = 1 + abs(a) + abs(b)
        worst = max(worst, abs(r_u) / scale, abs(r_v) / scale)
    jet = numeric_jet(_hexagon().data, 0j)
    uvv, uuv = close_third_jet(jet.f_u, jet.f_v, jet.f_uuu, jet.f_vvv)
    fd_err = max(abs(uvv - jet.f_uvv), abs(uuv - jet.f_uuv))
    return CheckResult("third_jet_closure", worst <= tol and fd_err <= fd_tol, worst, "0", tol,
                       detail={"pairs": n, "fd_mismatch": fd_err, "fd_tolerance": fd_tol})


@_timed
def check_hypergeometric_identity(seed: int = 0, n: int = 1000, overrides=None) -> CheckResult:
    tol = tolerance("hypergeometric", overrides)
    rng = np.random.default_rng(seed)
    z = _random_disk(rng, n, 0.95)
    dg = _hexagon().g_series.derivative()
    err = np.abs(dg(z) - 3 / (math.pi * (1 + z**6)))
    return CheckResult("hypergeometric_identity", bool(err.max() <= tol), float(err.max()), "0", tol,
                       detail={"points": n})


@_timed
def check_height_formula(seed: int = 0, n: int = 100, overrides=None) -> CheckResult:
    tol = tolerance("height", overrides)
    rng = np.random.default_rng(seed)
    z = _random_disk(rng, n, 0.95)
    data = _hexagon().data

    class _TwoPQ:
        domain_radius = data.domain_radius

        def __call__(self, zeta):
            return 2 * data.p(zeta) * data.q(zeta)

    quad = radial_primitive(_TwoPQ(), z).imag
    err = np.abs(hex_height(z) - quad)
    return CheckResult("height_formula", bool(err.max() <= tol), float(err.max()), "0", tol,
                       detail={"points": n})


@_timed
def check_bound_machinery(seed: int = 0, n: int = 50, batch_size: int = 200,
                          overrides=None) -> CheckResult:
    tol = tolerance("schwarz_gap", overrides)
    q = Rational([0, 0, 1], [1], 0.999)
    lhs, rhs, ok = schwarz_bound_check(q)
    gap = abs(rhs - lhs)
    rng = np.random.default_rng(seed)
    strict = 0
    for _ in range(n):
        l2, r2, ok2 = schwarz_bound_check(schwarz_pick_sample(rng))
        strict += ok2 and l2 < r2
    batch = _batch(seed, batch_size)
    halls = [r for _, r, _ in batch if r.hall_lhs is not None]
    hall_fail = sum(1 for r in halls if r.hall_lhs < r.hall_rhs)
    passed = ok and gap <= tol and strict == n and hall_fail == 0 and len(halls) > 0
    return CheckResult("bound_machinery", passed, gap, "0 (equality case q = z^2)", tol,
                       detail={"strict_schwarz": strict, "schwarz_samples": n,
                               "hall_instances": len(halls), "hall_failures": hall_fail,
                               "min_hall_gap": min((r.hall_lhs - r.hall_rhs for r in halls), default=0.0)})


@_timed
def check_flat_point_identity(target: float | None = None, target_label: str | None = None,
                              overrides=None, name: str = "flat_point_identity") -> CheckResult:
    """FD f_uuu^2 + f_vvv^2 at the hexagon centre against ``target`` (default |K''(O)|)."""
    tol = tolerance("flat_identity", overrides)
    if target is None:
        target, target_label = FLAT_BOUND.value, FLAT_BOUND.expression
    jet = numeric_jet(_hexagon().data, 0j)
    value = jet.f_uuu**2 + jet.f_vvv**2
    return CheckResult(name, abs(value - target) <= tol, value, target_label or f"{target:.12g}",
                       tol, detail={"f_uuu": jet.f_uuu, "f_vvv": jet.f_vvv,
                                    "abs_error": abs(value - target)})


@_timed
def check_hexagon_margin(overrides=None) -> CheckResult:
    tol = tolerance("hexagon_margin", overrides)
    rep = kpp_report(_hexagon(), numeric=False)
    margin = rep.margin_flat
    passed = abs(margin) <= tol * FLAT_BOUND.value and rep.is_extremal and not rep.violations()
    return CheckResult("hexagon_margin_flat", passed, margin, "0 (extremal datum)", tol,
                       detail={"annotations": rep.annotations})


@_timed
def check_hexagon_boundary(overrides=None) -> CheckResult:
    tol = tolerance("boundary_distance", overrides)
    _, _, dist, vertices = boundary_geometry(model=_hexagon())
    vert_err = float(np.max(np.abs(np.abs(vertices) - 1)))
    return CheckResult("hexagon_boundary", dist.max() <= tol and vert_err <= tol, float(dist.max()),
                       "0", tol, detail={"vertex_modulus_error": vert_err})


def run_suite(seed: int = 0, overrides=None) -> list[CheckResult]:
    """All invariant checks, ordered by name."""
    checks = [
        check_hexagon_closed_form(overrides=overrides),
        check_hexagon_numeric_limit(overrides=overrides),
        check_theorem_bounds(seed=seed, overrides=overrides),
        check_pde_residual(seed=seed, overrides=overrides),
        check_lemma_oracle(overrides=overrides),
        check_third_jet_closure(seed=seed, overrides=overrides),
        check_hypergeometric_identity(seed=seed, overrides=overrides),
        check_height_formula(seed=seed, overrides=overrides),
        check_bound_machinery(seed=seed, overrides=overrides),
        check_flat_point_identity(overrides=overrides),
        check_hexagon_margin(overrides=overrides),
        check_hexagon_boundary(overrides=overrides),
    ]
    return sorted(checks, key=lambda c: c.name)
