import cmath
import math
from dataclasses import replace

import mpmath
import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.integrate._ivp import rk as scipy_rk

from oracles import airy_origin, gauss_legendre_integral, parabolic_f0, parabolic_f0_gamma, parabolic_logderiv_series
from sibuya import _kernels
from sibuya.errors import DegenerateInputError
from sibuya.integrator import (
    RayConfig,
    ScaledPair,
    canonical_origin,
    green_residual,
    green_sides,
    green_transform_sides,
    plan_seed,
    ray_integrals,
    resolve_config,
    riccati_coefficients,
    wkb_seed,
)
from sibuya.potential import Potential, exponent_rm


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


def test_tableau_matches_scipy_dormand_prince():
    ref = scipy_rk.RK45
    assert np.allclose(_kernels.DP_A[:6, :5], ref.A, atol=1e-15)
    assert np.allclose(_kernels.DP_B[:6], ref.B, atol=1e-15)
    assert np.allclose(_kernels.DP_C[:6], ref.C, atol=1e-15)
    # scipy stores the embedded difference with the opposite sign; only |err| matters
    assert np.allclose(_kernels.DP_E, -ref.E, atol=1e-15)


def test_kernel_integrates_exponential_exactly_enough():
    # W = 1 (m = 0 analogue): Phi = exp(-t) from t = 5 down to 0
    poly = np.array([1.0 + 0j])
    mom = np.zeros(0)
    v, d, gain, _, _, status = _kernels.integrate_segment(poly, 1.0 + 0j, 5.0, 0.0, cmath.exp(-5), -cmath.exp(-5),
                                                         0.1, 1e-12, 1e-300, 100000, mom)
    assert status == _kernels.OK
    assert v * math.exp(gain) == pytest.approx(1.0, rel=1e-10)
    assert d * math.exp(gain) == pytest.approx(-1.0, rel=1e-10)


def test_kernel_reports_step_budget():
    poly = np.array([1.0 + 0j])
    out = _kernels.integrate_segment(poly, 1.0 + 0j, 5.0, 0.0, 1.0 + 0j, -1.0 + 0j, 0.1, 1e-12, 1e-300, 3, np.zeros(0))
    assert out[-1] == _kernels.MAX_STEPS


@pytest.mark.parametrize("lam", [0.0, 1.0, 3.0, -2.5, 2.0 + 1.5j, -1.0 - 3.0j, 7.3])
def test_parabolic_origin_matches_special_function(lam):
    v, d = canonical_origin(Potential.from_coeffs((0.0, lam))).as_complex()
    rv, rd = parabolic_f0_gamma(lam)
    assert rel(v, rv) < 1e-9
    assert rel(d, rd) < 1e-9


def test_parabolic_oracles_agree_with_each_other():
    for lam in (0.5, 2.0 - 1j):
        assert np.allclose(parabolic_f0(lam), parabolic_f0_gamma(lam), rtol=1e-12)
    v, d = parabolic_f0_gamma(1.7)
    assert d / v == pytest.approx(parabolic_logderiv_series(1.7), rel=1e-10)


@pytest.mark.parametrize("a1", [0.0, 1.3, -2.0, 0.7 + 0.9j])
def test_airy_origin(a1):
    v, d = canonical_origin(Potential.from_coeffs((a1,))).as_complex()
    rv, rd = airy_origin(a1)
    assert rel(v, rv) < 1e-9
    assert rel(d, rd) < 1e-9


@given(st.floats(-4, 4), st.floats(-4, 4))
def test_shifted_airy_property(re, im):
    # X + a1 shifts the Airy argument: Phi_0(0; a1) = 2 sqrt(pi) Ai(a1) for any complex a1
    a1 = complex(re, im)
    v, _ = canonical_origin(Potential.from_coeffs((a1,))).as_complex()
    assert rel(v, airy_origin(a1)[0]) < 1e-8


@pytest.mark.parametrize("coeffs", [(0.0, 0.0, 1.0), (1.0, -0.5, 2.0, 0.3), (0.2, 0.0, -1.0, 0.5, 1.0)])
def test_riccati_series_contains_rm(coeffs):
    p = Potential.from_coeffs(coeffs)
    c = riccati_coefficients(p, p.m + 4)
    assert c[0] == -1
    assert c[p.m + 2] == pytest.approx(exponent_rm(p), abs=1e-14)


def test_riccati_series_solves_riccati_equation():
    # y' + y^2 = W at a large point, with the series truncated optimally
    p = Potential.from_coeffs((0.5, -1.0, 2.0))
    cfg = resolve_config(p, RayConfig())
    plan = plan_seed(p, cfg)
    c = riccati_coefficients(p, plan.n_used)
    x = 30.0
    n = np.arange(len(c))
    e = (p.m - n) / 2
    y = np.sum(c * x**e)
    dy = np.sum(c * e * x ** (e - 1))
    w = x**3 + 0.5 * x**2 - x + 2
    assert abs(dy + y * y - w) < 1e-10 * w


def test_seed_agrees_with_first_order_seed_at_large_radius():
    p = Potential.from_coeffs((0.3, -0.2, 1.0))
    cfg = replace(resolve_config(p, RayConfig()), radius=60.0)
    a = wkb_seed(p, cfg=cfg)
    b = wkb_seed(p, cfg=cfg, first_order=True)
    la = cmath.log(a.value) + a.log_scale
    lb = cmath.log(b.value) + b.log_scale
    # first-order seed is off by O(R^-(m+2)/2)
    assert abs(la - lb) < 60.0 ** -2.5 * 10
    assert rel(a.deriv / a.value, b.deriv / b.value) < 60.0 ** -2.5 * 10


@pytest.mark.parametrize("coeffs", [(0.0, 0.0, 2.0), (1.0 + 1j, -0.5, 3.0), (0.5, 0.5, -1.0, 2.0)])
def test_result_independent_of_matching_radius(coeffs):
    p = Potential.from_coeffs(coeffs)
    base = canonical_origin(p)
    cfg = resolve_config(p, RayConfig())
    far = canonical_origin(p, replace(cfg, radius=2.5 * cfg.radius))
    assert rel(base.as_complex()[0], far.as_complex()[0]) < 1e-9
    adaptive = canonical_origin(p, RayConfig(adaptive_radius=True))
    assert rel(base.as_complex()[1], adaptive.as_complex()[1]) < 1e-9


def test_scaled_pair_survives_huge_values():
    # f0 at large negative lambda overflows a double; the log scale keeps it
    big = canonical_origin(Potential.monomial(3, 4000.0 * cmath.exp(0.1j)))
    assert math.isfinite(big.log_abs_value())
    assert abs(big.value) <= 1.0 + 1e-12


def test_ray_angle_outside_sector_rejected():
    with pytest.raises(DegenerateInputError):
        canonical_origin(Potential.monomial(3, 1.0), RayConfig(theta=3 * math.pi / 5))


def test_rotated_ray_gives_same_solution():
    # Phi_0 is one function: integrating along a tilted ray reaches the same value at 0
    p = Potential.from_coeffs((0.2, -0.4, 1.5))
    a = canonical_origin(p).as_complex()
    b = canonical_origin(p, RayConfig(theta=0.35)).as_complex()
    assert rel(a[0], b[0]) < 1e-9 and rel(a[1], b[1]) < 1e-9


def test_moments_match_quadrature_of_airy_solution():
    a1 = 0.4
    res = ray_integrals(Potential.from_coeffs((a1,)))
    norm = abs(res.origin.value) ** 2 / abs(airy_origin(a1)[0]) ** 2
    c2 = 4 * math.pi
    radius = resolve_config(Potential.from_coeffs((a1,)), RayConfig()).radius
    ai = lambda t: float(mpmath.airyai(t + a1))
    dai = lambda t: float(mpmath.airyai(t + a1, derivative=1))
    m0 = c2 * gauss_legendre_integral(lambda t: ai(t) ** 2, 0.0, radius)
    m1 = c2 * gauss_legendre_integral(lambda t: t * ai(t) ** 2, 0.0, radius)
    dn = c2 * gauss_legendre_integral(lambda t: dai(t) ** 2, 0.0, radius)
    assert res.moments[0] / norm == pytest.approx(m0, rel=1e-9)
    assert res.moments[1] / norm == pytest.approx(m1, rel=1e-9)
    assert res.dnorm / norm == pytest.approx(dn, rel=1e-9)


@pytest.mark.parametrize("m,theta", [(3, 0.0), (3, 0.4), (3, 2 * math.pi / 5), (4, -0.3), (5, 1.0)])
def test_green_identity_on_rays(m, theta):
    p = Potential.from_coeffs(tuple(np.linspace(0.3, -0.6, m - 1)) + (1.2,))
    assert green_residual(p, theta) < 1e-9


def test_green_identity_constant_solution():
    # w = 1 solves w'' = 0: both sides vanish identically
    lhs, rhs = green_transform_sides(lambda z: 1.0, lambda z: 0.0, lambda z: 0.0, 0.0, 2.0 + 1.0j)
    assert lhs == 0 and rhs == 0


def test_green_desk_check_with_exponential():
    # w = exp(k z), f = k^2
    k = 0.7 - 0.2j
    lhs, rhs = green_transform_sides(lambda z: cmath.exp(k * z), lambda z: k * cmath.exp(k * z),
                                     lambda z: k * k, 0.1, 1.5 + 0.8j)
    assert rel(lhs, rhs) < 1e-12


def test_green_sides_detect_a_wrong_solution():
    p = Potential.monomial(3, 1.0)
    res = ray_integrals(p)
    lhs, rhs = green_sides(p, 0.0, res.origin, res.dnorm, res.moments, res.far_term())
    assert rel(lhs, rhs) < 1e-9
    bent = ScaledPair(res.origin.value, 1.05 * res.origin.deriv, res.origin.log_scale)
    lhs2, _ = green_sides(p, 0.0, bent, res.dnorm, res.moments, res.far_term())
    assert rel(lhs2, rhs) > 1e-3


def test_tail_series_matches_quadrature():
    # oracle: 50-digit quadrature of sqrt(W) minus its first Laurent terms (sympy coefficients)
    import sympy

    from sibuya.integrator import tail_integral
    from sibuya.potential import asymptotic_frame

    coeffs = (0.5, -1.0, 0.3, 2.0)
    m = len(coeffs)
    p = Potential.from_coeffs(coeffs)
    u = sympy.symbols("u")
    ser = sympy.series(sympy.sqrt(1 + sum(sympy.nsimplify(c) * u ** (i + 1) for i, c in enumerate(coeffs))),
                       u, 0, m // 2 + 2).removeO()
    b_exact = [sympy.Rational(ser.coeff(u, k)) for k in range(m // 2 + 2)]
    theta, radius = 0.2, 6.0
    with mpmath.workdps(50):
        e = mpmath.expj(theta)

        def f(t):
            x = t * e
            w = x**m + sum(_mp(sympy.nsimplify(c)) * x ** (m - 1 - i) for i, c in enumerate(coeffs))
            head = sum(_mp(bk) * x ** (mpmath.mpf(m) / 2 - k) for k, bk in enumerate(b_exact))
            return (x ** (mpmath.mpf(m) / 2) * mpmath.sqrt(w / x**m) - head) * e

        # beyond 1e12 the integrand is O(t^-2): the dropped piece is ~1e-12
        ref = complex(mpmath.quad(f, [radius, 4 * radius, 40 * radius, 1e4, 1e8, 1e12]))
    assert rel(tail_integral(p, asymptotic_frame(p), radius, theta), ref) < 1e-10


def _mp(q):
    return mpmath.mpf(int(q.p)) / int(q.q)
