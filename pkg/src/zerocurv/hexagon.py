"""The six-sided Scherk-type graph: p = 3/(pi(1+z^6)), q = z^2.

The analytic parts are hypergeometric,

    A(z) = 3 z 2F1(1/6, 1; 7/6; -z^6) / pi,
    B(z) = 3 z^5 2F1(5/6, 1; 11/6; -z^6) / (5 pi),

and f = A + conj(B) maps the disk onto the regular hexagon with vertices
exp(i k pi/3). Each boundary arc between consecutive poles
exp(i(pi/6 + k pi/3)) of p is sent to one vertex; the poles themselves
correspond to the sides, over which the height diverges.
"""
from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analytic import Rational, SeriesFunction, radial_primitive
from .bounds import CurvatureReport, build_report
from .special_functions import PowerSeries, hyp2f1_coefficients
from .weierstrass import WeierstrassData

__all__ = [
    "HexagonModel",
    "build_hexagon",
    "height",
    "log_primitives",
    "kpp_report",
    "boundary_geometry",
    "hexagon_distance",
    "MeshArtifact",
    "polar_mesh",
    "export_mesh",
    "SERIES_RADIUS",
    "HEXAGON_RADIUS",
]

SERIES_RADIUS = 0.95
HEXAGON_RADIUS = 0.9999
_POLES = np.exp(1j * np.pi * (2 * np.arange(6) + 1) / 6)


def _terms_for(radius: float, tol: float = 1e-15) -> int:
    # derivative tail (3/pi) sum_{m>=M} radius^(6m) / (1 - radius^6) below tol
    r6 = radius**6
    return int(math.ceil(math.log(tol * (1 - r6) * math.pi / 3) / math.log(r6))) + 1


def _hyp_series(shift: int, a: float, c: float, scale: float, n_terms: int) -> PowerSeries:
    """scale * z^shift * 2F1(a, 1; c; -z^6) as a PowerSeries on |z| <= SERIES_RADIUS."""
    coef = hyp2f1_coefficients(a, 1.0, c, n_terms) * (-1.0) ** np.arange(n_terms)
    out = np.zeros(shift + 6 * (n_terms - 1) + 1)
    out[shift::6] = scale * coef
    r = SERIES_RADIUS
    # alternating terms dominated by |a_m| <= 1, geometric in r^6
    tail = scale * r ** (6 * n_terms + shift) / (1 - r**6)
    return PowerSeries(out, r, tail)


@dataclass(frozen=True)
class HexagonModel:
    data: WeierstrassData
    g_series: PowerSeries  # A: p = A'
    h_series: PowerSeries  # B: B' = p q^2
    c_series: PowerSeries  # C: C' = p q
    singular_angles: np.ndarray

    def f(self, z):
        return self.data.primitive_values(z)[0] + np.conj(self.data.primitive_values(z)[1])


def build_hexagon(n_terms: int | None = None) -> HexagonModel:
    n = _terms_for(SERIES_RADIUS) if n_terms is None else n_terms
    g = _hyp_series(1, 1 / 6, 7 / 6, 3 / math.pi, n)
    h = _hyp_series(5, 5 / 6, 11 / 6, 3 / (5 * math.pi), n)
    # C = int p q = arctan(z^3)/pi = z^3 2F1(1/2, 1; 3/2; -z^6)/pi
    c = _hyp_series(3, 1 / 2, 3 / 2, 1 / math.pi, n)
    p = Rational([3 / math.pi], [1, 0, 0, 0, 0, 0, 1], HEXAGON_RADIUS)
    q = Rational([0, 0, 1], [1], HEXAGON_RADIUS)
    prims = tuple(SeriesFunction(s, SERIES_RADIUS) for s in (g, h, c))
    data = WeierstrassData(p, q, HEXAGON_RADIUS, primitives=prims)
    angles = np.pi / 6 + np.pi / 3 * np.arange(6)
    return HexagonModel(data, g, h, c, angles)


def height(z, mirrored: bool = False):
    """Closed-form third coordinate, z = r e^{is}.

    t = (1/2pi) log[(1 + r^6 + 2 r^3 sin 3s) / (1 + r^6 - 2 r^3 sin 3s)] = 2 Im arctan(z^3)/pi
    for the phi_3 = -2i p q convention; ``mirrored`` returns the opposite sign.
    """
    z = np.asarray(z, dtype=complex)
    r = np.abs(z)
    if np.any(r >= 1):
        raise ValueError("height is defined on the open unit disk")
    s = np.angle(z)
    r3, r6 = r**3, r**6
    t = np.log((1 + r6 + 2 * r3 * np.sin(3 * s)) / (1 + r6 - 2 * r3 * np.sin(3 * s))) / (2 * np.pi)
    return -t if mirrored else t


def log_primitives(z):
    """A and B on the closed disk minus the poles, by partial fractions over z^6 = -1."""
    z = np.asarray(z, dtype=complex)
    logs = np.log(1 - z[..., None] / _POLES)
    A = 3 / math.pi * np.sum(-_POLES / 6 * logs, axis=-1)
    B = 3 / math.pi * np.sum(1 / (6 * _POLES) * logs, axis=-1)
    return A, B


def kpp_report(model: HexagonModel | None = None, numeric: bool = True) -> CurvatureReport:
    model = build_hexagon() if model is None else model
    return build_report(
        model.data, label="hexagon", disk_target=False, numeric=numeric,
        annotations=["extremal datum: graph over the inscribed hexagon, not the disk"],
    )


def hexagon_distance(w, vertices=None):
    """Distance from points w to the boundary of the hexagon with given vertices."""
    if vertices is None:
        vertices = np.exp(1j * np.pi / 3 * np.arange(6))
    w = np.asarray(w, dtype=complex)[..., None]
    a = vertices
    b = np.roll(vertices, -1)
    t = np.clip(((w - a) * np.conj(b - a)).real / np.abs(b - a) ** 2, 0, 1)
    return np.min(np.abs(w - (a + t * (b - a))), axis=-1)


def boundary_geometry(samples: int = 360, radius: float = 0.999, guard: float = 1e-3,
                      model: HexagonModel | None = None):
    """Images of the circle |z| = radius and their distance to the ideal hexagon.

    Returns (angles, images, distances, vertices). Angles within ``guard`` of
    a pole are dropped. Vertices are the one-sided radial limits just past
    each pole, read from the logarithmic primitives at r = 1.
    """
    if samples < 6:
        raise ValueError("need at least 6 samples")
    model = build_hexagon() if model is None else model
    theta = 2 * np.pi * np.arange(samples) / samples
    d = (theta - np.pi / 6) % (np.pi / 3)
    gap = np.minimum(d, np.pi / 3 - d)
    theta = theta[gap > guard]
    z = radius * np.exp(1j * theta)
    vals = radial_primitive(_HexIntegrand(model.data), z, segments=8)
    images = vals[0] + np.conj(vals[1])
    limits = [log_primitives(np.exp(1j * (a + guard))) for a in model.singular_angles - np.pi / 3]
    vertices = np.array([A + np.conj(B) for A, B in limits])
    return theta, images, hexagon_distance(images, vertices), vertices


class _HexIntegrand:
    def __init__(self, data):
        self.data = data
        self.domain_radius = data.domain_radius

    def __call__(self, zeta):
        return self.data.integrand(zeta)[:2]


# ---------------------------------------------------------------------------
# Mesh export


@dataclass(frozen=True)
class MeshArtifact:
    params: np.ndarray  # (n, 2) of (r, s)
    vertices: np.ndarray  # (n, 3) of (u, v, t)
    faces: np.ndarray  # (m, 3), zero-based

    def to_obj(self) -> str:
        lines = ["# hexagon Scherk-type graph, polar tessellation"]
        lines += [f"v {u:.12g} {v:.12g} {t:.12g}" for u, v, t in self.vertices]
        lines += [f"f {a + 1} {b + 1} {c + 1}" for a, b, c in self.faces]
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["r", "s", "u", "v", "t"])
        for (r, s), (u, v, t) in zip(self.params, self.vertices):
            writer.writerow([f"{r:.12g}", f"{s:.12g}", f"{u:.12g}", f"{v:.12g}", f"{t:.12g}"])
        return buf.getvalue()


def polar_mesh(n_radial: int, n_angular: int, r_max: float,
               model: HexagonModel | None = None) -> MeshArtifact:
    if not 0 < r_max < 1:
        raise ValueError("r_max must lie in (0, 1)")
    if n_radial < 1 or n_angular < 3:
        raise ValueError("need n_radial >= 1 and n_angular >= 3")
    model = build_hexagon() if model is None else model
    r = np.repeat(r_max * np.arange(1, n_radial + 1) / n_radial, n_angular)
    s = np.tile(2 * np.pi * np.arange(n_angular) / n_angular, n_radial)
    r = np.concatenate([[0.0], r])
    s = np.concatenate([[0.0], s])
    z = r * np.exp(1j * s)
    A, B, _ = model.data.primitive_values(z)
    f = A + np.conj(B)
    t = height(z)
    t[np.isclose(np.sin(3 * s), 0.0, atol=1e-15)] = 0.0
    verts = np.column_stack([f.real, f.imag, t])

    faces = []
    ring = lambda i, j: 1 + i * n_angular + (j % n_angular)  # noqa: E731
    for j in range(n_angular):
        faces.append((0, ring(0, j), ring(0, j + 1)))
    for i in range(n_radial - 1):
        for j in range(n_angular):
            a, b = ring(i, j), ring(i, j + 1)
            c, d = ring(i + 1, j), ring(i + 1, j + 1)
            faces.append((a, c, d))
            faces.append((a, d, b))
    return MeshArtifact(np.column_stack([r, s]), verts, np.array(faces, dtype=int))


def export_mesh(n_radial: int, n_angular: int, r_max: float, format: str = "obj",
                out: str | Path | None = None, model: HexagonModel | None = None) -> MeshArtifact:
    """Tessellate the hexagon graph and optionally write it as OBJ or CSV."""
    mesh = polar_mesh(n_radial, n_angular, r_max, model)
    if format not in ("obj", "csv"):
        raise ValueError(f"unknown mesh format {format!r}")
    if out is not None:
        text = mesh.to_obj() if format == "obj" else mesh.to_csv()
        Path(out).write_text(text, encoding="utf-8", newline="\n")
    return mesh
