"""Harmonic maps from boundary correspondences (Rado-Kneser-Choquet).

A monotone correspondence theta -> phi(theta) onto a convex curve has a
univalent harmonic extension; its Fourier coefficients give the analytic
parts A, B of f = A + conj(B), and from them p = A', q = sqrt(B'/A').
Correspondences of the form theta + sum_j eps_j sin(m j theta + delta_j)
are m-fold equivariant, which pins the spectrum of e^{i phi} to k = 1 mod m.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .analytic import SeriesFunction, sqrt_branch
from .bounds import CurvatureReport, PremiseError, build_report, hall_bound_check
from .special_functions import PowerSeries, series_div, series_mul
from .weierstrass import AdmissibilityError, WeierstrassData

__all__ = [
    "N_SAMPLES",
    "AliasingError",
    "CorrespondenceError",
    "BoundaryCorrespondence",
    "sine_family",
    "concentration_family",
    "hexagon_step_correspondence",
    "hexagon_curve",
    "analytic_parts",
    "weierstrass_from_parts",
    "equivariant_projection",
    "pipeline",
    "DiffeoCheck",
    "validate_diffeo",
    "family_report",
    "BatchConfig",
    "random_correspondence",
    "generate_batch",
    "load_correspondence",
    "dump_correspondence",
]

N_SAMPLES = 4096
TARGETS = ("disk", "hexagon")
# corners of the hexagon alias at O(1/N^2); smooth disk data only at roundoff
NOISE_FLOOR = {"disk": 1e-10, "hexagon": 1e-4}


class AliasingError(ValueError):
    """Requested modes reach the Nyquist band of the sample grid."""


class CorrespondenceError(ValueError):
    """Samples are not a valid (monotone, equivariant) boundary correspondence."""


def sample_angles(n: int = N_SAMPLES) -> np.ndarray:
    return 2 * np.pi * np.arange(n) / n


def hexagon_curve(phi):
    """Point of the regular hexagon with vertices e^{ik pi/3} at polar angle phi."""
    phi = np.asarray(phi, dtype=float)
    local = np.mod(phi, np.pi / 3) - np.pi / 6
    return np.exp(1j * phi) * math.cos(math.pi / 6) / np.cos(local)


@dataclass(frozen=True)
class BoundaryCorrespondence:
    phi: np.ndarray  # samples at sample_angles(len(phi))
    symmetry_order: int = 1
    target: str = "disk"
    allow_plateaus: bool = False  # weakly monotone step maps (polygon limits)
    validate: bool = True
    params: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        phi = np.array(self.phi, dtype=float)
        phi.setflags(write=False)
        object.__setattr__(self, "phi", phi)
        if self.target not in TARGETS:
            raise CorrespondenceError(f"unknown target {self.target!r}")
        if self.validate:
            self.check()

    @property
    def theta(self) -> np.ndarray:
        return sample_angles(len(self.phi))

    def increments(self) -> np.ndarray:
        return np.diff(np.concatenate([self.phi, [self.phi[0] + 2 * np.pi]]))

    def is_monotone(self) -> bool:
        inc = self.increments()
        return bool(np.all(inc >= 0) if self.allow_plateaus else np.all(inc > 0))

    def check(self):
        n = len(self.phi)
        if not self.is_monotone():
            raise CorrespondenceError("samples are not monotone")
        m = self.symmetry_order
        if m < 1:
            raise CorrespondenceError(f"symmetry order {m} is not positive")
        # phi(theta + 2pi/m) = phi(theta) + 2pi/m, up to the bracketing samples
        shift = n / m
        k = np.floor(np.arange(n) + shift).astype(int)
        lifted = np.concatenate([self.phi, self.phi + 2 * np.pi, self.phi[:1] + 4 * np.pi])
        target = self.phi + 2 * np.pi / m
        tol = 1e-12
        if np.any(target < lifted[k] - tol) or np.any(target > lifted[k + 1] + tol):
            raise CorrespondenceError(f"samples are not {m}-fold equivariant")

    def boundary_values(self) -> np.ndarray:
        if self.target == "disk":
            return np.exp(1j * self.phi)
        return hexagon_curve(self.phi)


def sine_family(epsilons, deltas, symmetry_order: int, target: str = "disk",
                n: int = N_SAMPLES, validate: bool = True) -> BoundaryCorrespondence:
    """phi(theta) = theta + sum_j eps_j sin(m j theta + delta_j)."""
    eps = np.asarray(epsilons, dtype=float)
    dlt = np.asarray(deltas, dtype=float)
    if eps.shape != dlt.shape:
        raise ValueError("epsilons and deltas differ in length")
    th = sample_angles(n)
    j = np.arange(1, len(eps) + 1)
    phi = th + np.sum(eps[:, None] * np.sin(symmetry_order * j[:, None] * th + dlt[:, None]), axis=0)
    params = {"epsilons": eps.tolist(), "deltas": dlt.tolist()}
    return BoundaryCorrespondence(phi, symmetry_order, target, validate=validate, params=params)


def _step6(theta):
    return np.pi / 3 * np.round(theta / (np.pi / 3))


def hexagon_step_correspondence(n: int = N_SAMPLES) -> BoundaryCorrespondence:
    """Arc (kpi/3 - pi/6, kpi/3 + pi/6) -> vertex e^{ik pi/3}: the hexagon graph's boundary map."""
    return BoundaryCorrespondence(_step6(sample_angles(n)), 6, "hexagon", allow_plateaus=True)


def concentration_family(lam: float, target: str = "disk", n: int = N_SAMPLES) -> BoundaryCorrespondence:
    """e^{6i phi} = (e^{6i theta} + lam) / (1 + lam e^{6i theta}).

    Identity at lam = 0; as lam -> 1 the arcs around k pi/3 collapse onto the
    six vertices, the boundary map of the hexagon graph. Equivalently the sine
    family with eps_j = (-1)^j lam^j / (3j), delta_j = 0.
    """
    if not 0 <= lam < 1:
        raise ValueError("lam must lie in [0, 1)")
    th = sample_angles(n)
    phi = th - np.arctan2(lam * np.sin(6 * th), 1 + lam * np.cos(6 * th)) / 3
    return BoundaryCorrespondence(phi, 6, target, params={"lambda": lam})


def analytic_parts(bc: BoundaryCorrespondence, modes: int = 512, radius: float = 1.0):
    """Fourier split of the boundary values into A (k >= 0) and B (k < 0)."""
    n = len(bc.phi)
    if modes > 2048:
        raise ValueError("modes must be <= 2048")
    if modes >= n // 2:
        raise AliasingError(f"{modes} modes alias on {n} samples")
    c = np.fft.fft(bc.boundary_values()) / n
    a = c[: modes + 1].copy()
    b = np.zeros(modes + 1, complex)
    b[1:] = np.conj(c[n - modes :][::-1])
    return PowerSeries(a, radius), PowerSeries(b, radius)


def weierstrass_from_parts(A: PowerSeries, B: PowerSeries, working_radius: float = 0.99,
                           validate: bool = True, noise_floor: float = 1e-10) -> WeierstrassData:
    """(p, q) = (A', sqrt(B'/A')), with exact primitives (A, B, int pq) attached.

    Coefficients of omega below ``noise_floor`` times its largest coefficient
    count as zero when locating the vanishing order at 0.
    """
    r = working_radius
    dA = A.derivative()
    dB = B.derivative()
    if abs(dA.coefficients[0]) == 0:
        raise AdmissibilityError("A'(0) = 0: the map is not locally univalent at 0")
    omega = series_div(PowerSeries(dB.coefficients, r), PowerSeries(dA.coefficients, r))
    order = omega.vanishing_order(noise_floor)
    if np.max(np.abs(omega.coefficients)) < 1e-13:
        q = SeriesFunction(PowerSeries(np.zeros(1, complex), r), r)
    else:
        # drop roundoff below the leading term before taking the root
        c = omega.coefficients.copy()
        c[:order] = 0
        q = sqrt_branch(SeriesFunction(PowerSeries(c, r), r), order)
    p = SeriesFunction(PowerSeries(dA.coefficients, r), r)
    C = series_mul(p.series, q.series).integral()
    prims = (
        SeriesFunction(PowerSeries(A.coefficients, r), r),
        SeriesFunction(PowerSeries(B.coefficients, r), r),
        SeriesFunction(C, r),
    )
    return WeierstrassData(p, q, r, primitives=prims, validate=validate)


def equivariant_projection(A: PowerSeries, B: PowerSeries, symmetry_order: int):
    """Keep the exponents allowed by m-fold equivariance: A on 1 mod m, B on -1 mod m.

    Removes the aliasing left by sampling a non-smooth boundary map on a grid
    whose size is not a multiple of m.
    """
    m = symmetry_order
    if m <= 1:
        return A, B
    k = np.arange(len(A.coefficients))
    a = np.where(k % m == 1 % m, A.coefficients, 0)
    k = np.arange(len(B.coefficients))
    b = np.where(k % m == (-1) % m, B.coefficients, 0)
    return PowerSeries(a, A.radius), PowerSeries(b, B.radius)


def pipeline(bc: BoundaryCorrespondence, modes: int = 512, working_radius: float = 0.99,
             project: bool = True):
    A, B = analytic_parts(bc, modes)
    if project:
        A, B = equivariant_projection(A, B, bc.symmetry_order)
    return weierstrass_from_parts(A, B, working_radius, noise_floor=NOISE_FLOOR[bc.target])


@dataclass(frozen=True)
class DiffeoCheck:
    ok: bool
    min_jacobian: float
    at: complex


def validate_diffeo(data: WeierstrassData, grid: int = 64, radius: float = 0.99) -> DiffeoCheck:
    """Sign of J = |p|^2 (1 - |q|^4) on a grid x grid polar mesh up to ``radius``."""
    r_max = min(radius, data.domain_radius * (1 - 1e-9))
    r = r_max * np.arange(1, grid + 1) / grid
    s = 2 * np.pi * np.arange(grid) / grid
    z = np.concatenate([[0.0], (r[:, None] * np.exp(1j * s[None, :])).ravel()])
    J = np.abs(data.p(z)) ** 2 * (1 - np.abs(data.q(z)) ** 4)
    k = int(np.argmin(J))
    return DiffeoCheck(bool(J[k] > 0), float(J[k]), complex(z[k]))


def family_report(bc: BoundaryCorrespondence, modes: int = 512, working_radius: float = 0.99,
                  numeric: bool = False, label: str = "") -> CurvatureReport:
    """CurvatureReport for the harmonic extension of ``bc``."""
    data = pipeline(bc, modes, working_radius)
    report = build_report(data, label=label or f"rkc-{bc.target}-m{bc.symmetry_order}",
                          disk_target=False, numeric=numeric)
    report.annotations = [a for a in report.annotations if not a.startswith("hall")]
    if bc.target == "disk":
        f0 = complex(data.primitives[0](0.0))
        if abs(f0) > 1e-10:
            report.annotations.append(f"hall check skipped: f(0) = {f0:.3g}")
        else:
            report.hall_lhs, report.hall_rhs, _ = hall_bound_check(report.p0, report.q0)
    else:
        report.annotations.append("hall check skipped: image is the hexagon")
    return report


# ---------------------------------------------------------------------------
# Seeded batches


@dataclass(frozen=True)
class BatchConfig:
    size: int = 200
    seed: int = 0
    n_harmonics: int = 3
    # (target, symmetry order) cycled over the batch; order-2 hexagon maps
    # generically give omega simple zeros off the origin, hence no single-valued q
    kinds: tuple = (("disk", 6), ("disk", 2), ("hexagon", 6))
    # sum_j |eps_j| m j is drawn up to this; values above 1 may break monotonicity
    max_budget: float = 1.2
    modes: int = 512
    working_radius: float = 0.99
    max_attempts: int = 50


def random_correspondence(rng: np.random.Generator, symmetry_order: int, target: str,
                          n_harmonics: int = 3, max_budget: float = 1.2):
    m = symmetry_order
    j = np.arange(1, n_harmonics + 1)
    w = rng.dirichlet(np.ones(n_harmonics))
    budget = rng.uniform(0.0, max_budget)
    eps = rng.choice([-1.0, 1.0], n_harmonics) * budget * w / (m * j)
    dlt = rng.uniform(0, 2 * np.pi, n_harmonics)
    return sine_family(eps, dlt, m, target, validate=False)


def generate_batch(config: BatchConfig = BatchConfig()):
    """Deterministic list of (correspondence, report, rejected_draws)."""
    rng = np.random.default_rng(config.seed)
    out = []
    for i in range(config.size):
        target, m = config.kinds[i % len(config.kinds)]
        for attempt in range(config.max_attempts):
            bc = random_correspondence(rng, m, target, config.n_harmonics, config.max_budget)
            if not bc.is_monotone():
                continue
            try:
                report = family_report(bc, config.modes, config.working_radius,
                                       label=f"rkc-{i:03d}")
            except (AdmissibilityError, PremiseError, ValueError):
                continue
            out.append((bc, report, attempt))
            break
        else:
            raise RuntimeError(f"no admissible draw for instance {i} in {config.max_attempts} attempts")
    return out


def dump_correspondence(bc: BoundaryCorrespondence) -> str:
    if "epsilons" not in bc.params:
        raise ValueError("only sine-family correspondences are serializable")
    doc = {"target": bc.target, "symmetry_order": bc.symmetry_order, **bc.params}
    return json.dumps(doc, indent=2, sort_keys=True)


def load_correspondence(source: str | Path) -> BoundaryCorrespondence:
    """Read {target, epsilons, deltas, symmetry_order} from a JSON file or string."""
    text = Path(source).read_text() if not str(source).lstrip().startswith("{") else str(source)
    doc = json.loads(text)
    missing = {"target", "epsilons", "deltas", "symmetry_order"} - set(doc)
    if missing:
        raise CorrespondenceError(f"missing fields: {sorted(missing)}")
    return sine_family(doc["epsilons"], doc["deltas"], int(doc["symmetry_order"]), doc["target"])
