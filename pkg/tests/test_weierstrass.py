import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerocurv.analytic import Constant, Rational
from zerocurv.hexagon import height as hex_height
from zerocurv.weierstrass import (
    AdmissibilityError,
    ConvergenceError,
    WeierstrassData,
    curvature,
    curvature_omega_form,
    dumps_data,
    ew_components,
    gauss_map,
    gradient_f,
    gradient_from_q,
    height,
    invert_projection,
    jacobian,
    loads_data,
    projection,
    surface_point,
)

polar = st.tuples(st.floats(0.0, 0.85), st.floats(0, 2 * math.pi)).map(
    lambda rs: complex(rs[0] * np.exp(1j * rs[1]))
)


def plane(q0=0.0):
    return WeierstrassData(Constant(1.0), Constant(q0))


def test_ew_components(hexagon):
    phi = ew_components(hexagon.data, 0.0)
    np.testing.assert_allclose(phi, [3 / math.pi, -3j / math.pi, 0], atol=1e-15)
    phi = ew_components(plane(), 0.3 + 0.2j)
    np.testing.assert_allclose(phi, [1, -1j, 0], atol=1e-15)
    phi = ew_components(hexagon.data, 0.5)
    assert abs(sum(x * x for x in phi)) <= 1e-14


def test_admissibility_checks():
    with pytest.raises(AdmissibilityError):
        WeierstrassData(Constant(1.0), Rational([0, 1.2]))
    with pytest.raises(AdmissibilityError):
        WeierstrassData(Rational([0.5, 1.0]), Constant(0.0))


def test_surface_point_examples(hexagon):
    sp = surface_point(hexagon.data, 0.0)
    assert sp.position == (0.0, 0.0, 0.0)
    np.testing.assert_allclose(sp.normal, (0, 0, 1), atol=0)
    r, s = 0.6, 0.4
    sp = surface_point(hexagon.data, r * np.exp(1j * s))
    printed = math.log((1 + r**6 - 2 * r**3 * math.sin(3 * s)) / (1 + r**6 + 2 * r**3 * math.sin(3 * s))) / (2 * math.pi)
    # phi_3 = -2i p q gives the opposite sign of the printed height; mirroring restores it
    assert abs(sp.position[2] + printed) <= 1e-10
    mirrored = WeierstrassData(hexagon.data.p, hexagon.data.q, hexagon.data.domain_radius, mirrored=True,
                               primitives=hexagon.data.primitives)
    assert abs(surface_point(mirrored, r * np.exp(1j * s)).position[2] - printed) <= 1e-10
    assert abs(surface_point(hexagon.data, 0.6).position[2]) <= 1e-15


@given(polar)
def test_surface_point_invariants(z):
    from zerocurv.hexagon import build_hexagon

    data = build_hexagon().data
    sp = surface_point(data, z)
    assert abs(np.linalg.norm(sp.normal) - 1) <= 1e-12
    f = projection(data, z)
    assert sp.position[:2] == pytest.approx((f.real, f.imag), abs=1e-15)


def test_gauss_map(hexagon):
    assert gauss_map(hexagon.data, 0.0) == 0
    assert gauss_map(hexagon.data, 0.5) == pytest.approx(0.25j)
    assert gauss_map(plane(0.3), 0.77j) == pytest.approx(0.3j)


def test_curvature_examples(hexagon):
    assert curvature(hexagon.data, 0.0) == 0
    z = 0.5
    oracle = -4 * abs(2 * z) ** 2 * math.pi**2 * abs(1 + z**6) ** 2 / (9 * (1 + abs(z) ** 4) ** 4)
    assert abs(curvature(hexagon.data, z) - oracle) <= 1e-12
    assert curvature(plane(0.4), 0.3j) == 0


@given(polar)
def test_curvature_is_nonpositive_and_matches_omega_form(z):
    from zerocurv.hexagon import build_hexagon

    data = build_hexagon().data
    k = curvature(data, z)
    assert k <= 0
    if abs(z) > 1e-3:
        assert curvature_omega_form(data, z) == pytest.approx(k, rel=1e-10, abs=1e-14)


def test_gradient_examples():
    assert gradient_from_q(0.0) == (0.0, 0.0)
    # library convention; the mirrored flag gives the printed relations
    assert gradient_from_q(0.5) == pytest.approx((0.0, 4 / 3))
    assert gradient_from_q(0.5, mirrored=True) == pytest.approx((0.0, -4 / 3))
    assert gradient_from_q(0.5j, mirrored=True) == pytest.approx((-4 / 3, 0.0))
    with pytest.raises(AdmissibilityError):
        gradient_from_q(1.0)


def test_jacobian_examples(hexagon):
    assert jacobian(hexagon.data, 0.0) == pytest.approx(9 / math.pi**2, rel=1e-15)
    assert jacobian(WeierstrassData(Constant(2.0), Constant(0.0)), 0.1) == pytest.approx(4.0)
    p5 = 3 / (math.pi * (1 + 0.5**6))
    assert jacobian(hexagon.data, 0.5) == pytest.approx(p5**2 * (1 - 0.5**8), rel=1e-14)


def test_invert_projection_examples(hexagon):
    assert invert_projection(hexagon.data, 0.0) == 0
    z0 = 0.3 + 0.2j
    w = projection(hexagon.data, z0)
    assert abs(invert_projection(hexagon.data, w) - z0) <= 1e-10
    z = invert_projection(hexagon.data, 0.01)
    assert abs(projection(hexagon.data, z) - 0.01) <= 1e-12


def test_invert_projection_reports_failure():
    from zerocurv.analytic import RadiusError

    with pytest.raises(RadiusError):
        invert_projection(plane(), 0.9)
    with pytest.raises(ConvergenceError):
        invert_projection(plane(), 0.9, trust_radius=np.inf, max_iter=0)


@given(st.floats(0, 0.6), st.floats(0, 2 * math.pi))
def test_conformality(r, s):
    from zerocurv.hexagon import build_hexagon

    data = build_hexagon().data
    z = r * np.exp(1j * s)
    h = 1e-5

    def X(z):
        return np.array(surface_point(data, z).position)

    Xx = (X(z + h) - X(z - h)) / (2 * h)
    Xy = (X(z + 1j * h) - X(z - 1j * h)) / (2 * h)
    scale = Xx @ Xx
    assert abs(Xx @ Xx - Xy @ Xy) <= 1e-8 * scale
    assert abs(Xx @ Xy) <= 1e-8 * scale


def test_harmonicity_ratio(hexagon):
    z = 0.4 + 0.2j

    def lap(h):
        f = projection(hexagon.data, np.array([z + h, z - h, z + 1j * h, z - 1j * h, z]))
        return abs(f[:4].sum() - 4 * f[4]) / h**2

    ratios = [lap(h) / lap(h / 2) for h in (0.04, 0.02)]
    assert all(r >= 3.9 for r in ratios)


@given(polar.filter(lambda z: abs(z) < 0.7))
def test_gradient_matches_fd_of_height(z):
    from zerocurv.hexagon import build_hexagon

    data = build_hexagon().data
    w0 = projection(data, z)
    h = 1e-5
    ws = w0 + np.array([h, -h, 1j * h, -1j * h])
    zs = invert_projection(data, ws, trust_radius=np.inf, z_guess=np.full(4, z))
    t = height(data, zs)
    fd = ((t[0] - t[1]) / (2 * h), (t[2] - t[3]) / (2 * h))
    assert gradient_f(data, z) == pytest.approx(fd, abs=1e-6)


def test_height_agrees_with_closed_form(hexagon):
    z = 0.6 * np.exp(0.4j)
    assert abs(height(hexagon.data, z) - hex_height(z)) <= 1e-10


def test_serialization_roundtrip():
    data = WeierstrassData(Rational([1.0, 0.1 + 0.2j], [1.0, -0.3]), Rational([0.1, 0, 0.5j], [1.0]), 0.9)
    text = dumps_data(data)
    back = loads_data(text)
    np.testing.assert_array_equal(back.p.numerator, data.p.numerator)
    np.testing.assert_array_equal(back.q.numerator, data.q.numerator)
    assert back.domain_radius == 0.9
    assert dumps_data(back) == text
    with pytest.raises(ValueError):
        loads_data('{"p": {"kind": "spline"}, "q": {}, "domain_radius": 0.9}')
