import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zerocurv.analytic import Constant, Rational
from zerocurv.bounds import kpp_numeric
from zerocurv.graph_jets import (
    NotFlatError,
    SingularConfigurationError,
    SurfaceJet,
    analytic_jet,
    close_third_jet,
    direction_profile,
    hessian_of_K,
    kpp_general,
    kpp_general_statement,
    minimal_surface_residual,
    numeric_jet,
    profile_display,
    third_jet_identities,
)
from zerocurv.weierstrass import WeierstrassData, curvature, invert_projection

HEX_KPP = 16 * math.pi**4 / 81
reals = st.floats(-3, 3, allow_nan=False)
slopes = st.floats(-0.5, 0.5, allow_nan=False)


def tilted(q0=0.3, radius=0.8):
    return WeierstrassData(Rational([1.0], [1.0], radius), Rational([q0, 0, 1], [1.0], radius), radius)


@given(reals, reals)
def test_closure_at_zero_slope(a, b):
    uvv, uuv = close_third_jet(0.0, 0.0, a, b)
    assert uvv == pytest.approx(-a, abs=1e-15)
    assert uuv == pytest.approx(-b, abs=1e-15)


@given(slopes, slopes, reals, reals)
def test_closure_satisfies_identities(fu, fv, a, b):
    uvv, uuv = close_third_jet(fu, fv, a, b)
    r_u, r_v = third_jet_identities(fu, fv, a, uuv, uvv, b)
    assert abs(r_u) <= 1e-12 * (1 + abs(a) + abs(b))
    assert abs(r_v) <= 1e-12 * (1 + abs(a) + abs(b))


def test_closure_matches_linear_solve():
    fu, fv, a, b = 0.5, 0.5, 0.0, 1.0
    # unknowns (f_uvv, f_uuv) in the two differentiated equations
    M = np.array([[1 + fu**2, -2 * fu * fv], [-2 * fu * fv, 1 + fv**2]])
    rhs = -np.array([(1 + fv**2) * a, (1 + fu**2) * b])
    np.testing.assert_allclose(close_third_jet(fu, fv, a, b), np.linalg.solve(M, rhs), rtol=1e-13)


def test_closure_singular_configuration():
    fu = 1.0
    fv = math.sqrt((1 + fu**2) / (3 * fu**2 - 1))
    with pytest.raises(SingularConfigurationError):
        close_third_jet(fu, fv, 1.0, 1.0)


def test_closure_against_fd_on_tilted_datum():
    data = tilted(0.2 + 0.1j, 0.75)
    jet = numeric_jet(data, 0j)
    assert jet.is_flat(1e-8)
    uvv, uuv = close_third_jet(jet.f_u, jet.f_v, jet.f_uuu, jet.f_vvv)
    assert uvv == pytest.approx(jet.f_uvv, abs=1e-4)
    assert uuv == pytest.approx(jet.f_uuv, abs=1e-4)


@given(reals, reals)
def test_hessian_zero_slope(a, b):
    h = hessian_of_K(SurfaceJet.flat(0.0, 0.0, a, b))
    assert h.K_uu == pytest.approx(-2 * b * b - 2 * a * a, abs=1e-12)
    assert h.K_vv == pytest.approx(-2 * a * a - 2 * b * b, abs=1e-12)
    assert h.K_uv == pytest.approx(0.0, abs=1e-12)
    assert np.trace(h.matrix()) == pytest.approx(-4 * (a * a + b * b), abs=1e-12)


def test_hessian_zero_jet():
    assert np.all(hessian_of_K(SurfaceJet.flat(0.1, 0.2, 0.0, 0.0)).matrix() == 0)


def test_hessian_rejects_curved_jet():
    with pytest.raises(NotFlatError):
        hessian_of_K(SurfaceJet(0, 0, f_uu=1e-3, f_vv=-1e-3))


def _fd_hessian_K(data, s):
    offs = {(i, j): s * (i + 1j * j) for i in (-1, 0, 1) for j in (-1, 0, 1)}
    w = np.array(list(offs.values()))
    K = dict(zip(offs, curvature(data, invert_projection(data, w, trust_radius=np.inf))))
    k_uu = (K[1, 0] - 2 * K[0, 0] + K[-1, 0]) / s**2
    k_vv = (K[0, 1] - 2 * K[0, 0] + K[0, -1]) / s**2
    k_uv = (K[1, 1] - K[1, -1] - K[-1, 1] + K[-1, -1]) / (4 * s**2)
    return np.array([[k_uu, k_uv], [k_uv, k_vv]])


@pytest.mark.parametrize("which", ["hexagon", "tilted"])
def test_hessian_against_fd(which, hexagon):
    data = hexagon.data if which == "hexagon" else tilted(0.2 + 0.1j, 0.75)
    H = hessian_of_K(analytic_jet(data)).matrix()
    fd = (4 * _fd_hessian_K(data, 5e-4) - _fd_hessian_K(data, 1e-3)) / 3
    np.testing.assert_allclose(fd, H, rtol=1e-5, atol=1e-5 * np.abs(H).max())


def test_hexagon_hessian_trace(hexagon):
    jet = analytic_jet(hexagon.data)
    H = hessian_of_K(jet).matrix()
    assert np.trace(H) == pytest.approx(-4 * (jet.f_uuu**2 + jet.f_vvv**2), rel=1e-12)


@given(reals, reals, st.floats(0, 2 * math.pi))
def test_profile_zero_slope(a, b, t):
    jet = SurfaceJet.flat(0.0, 0.0, a, b)
    Q, Y, R = direction_profile(jet, t)
    assert -Q == pytest.approx(2 * (a * a + b * b), abs=1e-12)
    assert Y == -2.0
    assert R == Q


@given(slopes, slopes, reals, reals, st.floats(0, 2 * math.pi))
def test_profile_display_is_quadratic_form(fu, fv, a, b, t):
    jet = SurfaceJet.flat(fu, fv, a, b)
    assert profile_display(jet, t) == pytest.approx(direction_profile(jet, t)[0], abs=1e-10)


@given(slopes, slopes, reals, reals)
def test_R_is_direction_independent(fu, fv, a, b):
    jet = SurfaceJet.flat(fu, fv, a, b)
    R = np.array([direction_profile(jet, k * math.pi / 8)[2] for k in range(16)])
    scale = max(abs(R).max(), 1e-300)
    assert (R.max() - R.min()) <= 1e-9 * scale + 1e-300
    assert kpp_general(jet) == pytest.approx(R[0] / 2, rel=1e-9, abs=1e-300)


def test_R_constant_on_tilted_jet():
    jet = SurfaceJet.flat(0.2, -0.1, 1.0, 2.0)
    R = np.array([direction_profile(jet, k * math.pi / 8)[2] for k in range(16)])
    assert np.ptp(R) <= 1e-9 * abs(R.mean())


def _dY(jet, t, h=1e-5):
    return (direction_profile(jet, t + h)[1] - direction_profile(jet, t - h)[1]) / (2 * h)


def test_Y_stationary_iff_zero_slope():
    ts = np.linspace(0, 2 * math.pi, 17)
    flat = SurfaceJet.flat(0.0, 0.0, 1.0, 2.0)
    assert max(abs(_dY(flat, t)) for t in ts) == 0.0
    tilt = SurfaceJet.flat(0.3, 0.4, 1.0, 2.0)
    assert max(abs(_dY(tilt, t)) for t in ts) > 0.1


@given(reals, reals)
def test_kpp_general_zero_slope(a, b):
    assert kpp_general(SurfaceJet.flat(0.0, 0.0, a, b)) == pytest.approx(-(a * a + b * b), abs=1e-12)


def test_kpp_general_zero_slope_exact_rationals():
    from fractions import Fraction

    a, b = Fraction(3, 7), Fraction(-5, 11)
    jet = SurfaceJet(Fraction(0), Fraction(0), 0, 0, 0, a, -b, -a, b)
    assert kpp_general(jet) == -(a * a + b * b)


def test_kpp_general_hexagon(hexagon):
    assert kpp_general(analytic_jet(hexagon.data)) == pytest.approx(-HEX_KPP, rel=1e-12)


def test_kpp_general_rejects_singular_slope():
    fu = 1.0
    fv = math.sqrt((1 + fu**2) / (3 * fu**2 - 1))
    jet = SurfaceJet(fu, fv, f_uuu=1.0, f_vvv=1.0)
    with pytest.raises(SingularConfigurationError):
        kpp_general(jet)


def test_cross_coefficient_adjudication():
    # both slopes nonzero so the two cross coefficients differ
    data = tilted(0.3 + 0.2j, 0.75)
    jet = analytic_jet(data)
    assert abs(jet.f_u) > 0.1 and abs(jet.f_v) > 0.1
    limit = kpp_numeric(data)
    assert kpp_general(jet) == pytest.approx(limit, rel=1e-4)
    assert abs(kpp_general_statement(jet) / limit - 1) > 1e-3


def test_plane_jet():
    jet = numeric_jet(WeierstrassData(Constant(1.0), Constant(0.0)), 0.1 + 0.2j)
    values = [jet.f_u, jet.f_v, jet.f_uu, jet.f_uv, jet.f_vv, jet.f_uuu, jet.f_uuv, jet.f_uvv, jet.f_vvv]
    assert max(abs(v) for v in values) <= 1e-12


def test_numeric_jet_hexagon_origin(hexagon):
    jet = numeric_jet(hexagon.data, 0j)
    assert abs(jet.f_u) <= 1e-8 and abs(jet.f_v) <= 1e-8
    assert max(abs(jet.f_uu), abs(jet.f_uv), abs(jet.f_vv)) <= 1e-9
    # the FD value is |K''(O)| in this normalization
    assert jet.f_uuu**2 + jet.f_vvv**2 == pytest.approx(HEX_KPP, abs=1e-4)


def test_pde_residual_off_centre(hexagon):
    assert abs(minimal_surface_residual(analytic_jet(hexagon.data, 0.2))) <= 1e-8
    assert abs(minimal_surface_residual(numeric_jet(hexagon.data, 0.2))) <= 1e-6


def _random_datum(rng):
    c = rng.normal(size=3) + 1j * rng.normal(size=3)
    p = Rational([1.0, 0.3 * c[0]], [1.0], 0.8)
    q0 = 0.5 * rng.uniform() * np.exp(2j * np.pi * rng.uniform())
    q = Rational([q0, 0.2 * c[1], 0.2 * c[2]], [1.0], 0.8)
    return WeierstrassData(p, q, 0.8)


@pytest.mark.parametrize("seed", range(20))
def test_numeric_vs_analytic_jets(seed):
    data = _random_datum(np.random.default_rng(seed))
    z0 = 0.1 * np.exp(0.7j * seed)
    a, n = analytic_jet(data, z0), numeric_jet(data, z0)
    for name in ("f_u", "f_v"):
        assert getattr(n, name) == pytest.approx(getattr(a, name), abs=1e-8)
    for name in ("f_uuu", "f_uuv", "f_uvv", "f_vvv"):
        assert getattr(n, name) == pytest.approx(getattr(a, name), abs=1e-4)


def test_symbolic_profile_and_cross_coefficient():
    sp = pytest.importorskip("sympy")
    fu, fv, a, b, u = sp.symbols("f_u f_v a b u", real=True)
    D = -1 - fu**2 + fv**2 * (-1 + 3 * fu**2)
    uvv = (2 * fv * b * (fu + fu**3) + (1 + fv**2) ** 2 * a) / D
    uuv = (b * (1 + fu**2) ** 2 + 2 * (fv + fv**3) * fu * a) / D
    w = (1 + fu**2 + fv**2) ** 2
    K_uu, K_uv, K_vv = (-2 * uuv**2 + 2 * uvv * a) / w, (-uvv * uuv + b * a) / w, \
        (-2 * uvv**2 + 2 * b * uuv) / w

    def R(c, s):
        return (K_uu * c**2 + 2 * K_uv * c * s + K_vv * s**2) / (1 + (fu * c + fv * s) ** 2)

    d0 = 1 + fu**2 + fv**2 * (1 - 3 * fu**2)

    def closed(cross):
        num = (1 + fu**2) ** 3 * b**2 + 2 * fv * b * fu * cross * a + (1 + fv**2) ** 3 * a**2
        return -num / (w * d0**2)

    proof = closed(fv**2 * (3 - fu**2) + 3 * (1 + fu**2))
    statement = closed(3 * (fu**2 + fv**2) - fu**2 * fv**2)
    # rational parametrization of the unit circle
    c, s = (1 - u**2) / (1 + u**2), 2 * u / (1 + u**2)
    assert sp.cancel(R(c, s) - R(1, 0)) == 0
    assert sp.cancel(R(1, 0) / 2 - proof) == 0
    assert sp.cancel((statement - proof) * w * d0**2 - 6 * a * b * fu * fv) == 0

    # the library evaluates the same expressions
    f_proof = sp.lambdify((fu, fv, a, b), proof)
    f_stmt = sp.lambdify((fu, fv, a, b), statement)
    rng = np.random.default_rng(5)
    for x in rng.uniform(-0.5, 0.5, (20, 4)):
        jet = SurfaceJet.flat(*x)
        assert kpp_general(jet) == pytest.approx(f_proof(*x), rel=1e-12)
        assert kpp_general_statement(jet) == pytest.approx(f_stmt(*x), rel=1e-12)
