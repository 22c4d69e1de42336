import cmath
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import sibuya.stokes as stokes_mod
from oracles import parabolic_f0_gamma, parabolic_stokes
from sibuya.errors import NearZeroError
from sibuya.potential import Potential, omega_pow, unit_root
from sibuya.stokes import (
    c_tilde,
    c_tilde_numeric,
    lemma_wronskian,
    numeric_wronskian,
    stokes_c,
    stokes_c_from_f0,
    stokes_ck,
    unnormalized_c0,
)

cplx = st.complex_numbers(max_magnitude=1.5, allow_nan=False, allow_infinity=False)


def rel(a, b):
    return abs(a - b) / max(abs(a), abs(b))


@pytest.mark.parametrize("m", [1, 2, 3, 4, 5, 6])
def test_c_at_origin_closed_form(m):
    # a = 0: C(0) = omega^(m/4) - omega^(-m/4) since f0(0) cancels
    c = stokes_c(Potential.monomial(m, 0.0)).c
    assert c == pytest.approx(2j * math.sin(math.pi * m / (2 * (m + 2))), abs=1e-10)


def test_named_values_at_origin():
    assert (-1j * stokes_c(Potential.monomial(3, 0.0)).c).real == pytest.approx(2 * math.sin(3 * math.pi / 10), rel=1e-9)
    assert (-1j * stokes_c(Potential.monomial(4, 0.0)).c).real == pytest.approx(math.sqrt(3), rel=1e-9)


@pytest.mark.parametrize("lam", [0.3, 1.0, 2.2, 4.9, 1.0 + 2.0j, -3.0 - 1.0j])
def test_parabolic_stokes_multiplier(lam):
    c = stokes_c(Potential.from_coeffs((0.0, lam))).c
    ref = parabolic_stokes(lam)
    assert abs(c - ref) <= 1e-9 * max(1.0, abs(ref))


def test_parabolic_zeros_are_odd_integers():
    for n in range(4):
        assert abs(stokes_c(Potential.from_coeffs((0.0, 2 * n + 1.0))).c) < 1e-10


@pytest.mark.parametrize("m", [3, 4, 5])
@pytest.mark.parametrize("k", [-1, 0, 1, 2])
def test_wronskian_lemma(m, k):
    rng = np.random.default_rng(m * 10 + k + 5)
    p = Potential.from_coeffs(tuple(rng.normal(size=m) + 1j * rng.normal(size=m)))
    assert rel(numeric_wronskian(p, k), lemma_wronskian(p, k)) < 1e-8


def test_lemma_periodic_in_k():
    p = Potential.from_coeffs((0.3, -0.2, 1.0))
    assert lemma_wronskian(p, 1) == pytest.approx(lemma_wronskian(p, 1 + 5), rel=1e-12)


def test_lemma_target_for_cubic_at_zero():
    assert lemma_wronskian(Potential.monomial(3), 0) == pytest.approx(2 * omega_pow(3, 0.75), rel=1e-14)


def test_flipped_wronskian_sign_breaks_lemma(monkeypatch):
    monkeypatch.setattr(stokes_mod, "WRONSKIAN_SIGN", -1)
    p = Potential.from_coeffs((0.2, 0.1, 1.0))
    assert rel(numeric_wronskian(p, 0), lemma_wronskian(p, 0)) > 1.0


@given(st.sampled_from([3, 4, 5]), st.lists(cplx, min_size=5, max_size=5))
def test_conjugation_symmetry(m, vals):
    p = Potential.from_coeffs(tuple(vals[:m]))
    c = stokes_c(p).c
    assert abs(c.conjugate() + stokes_c(p.conj()).c) <= 1e-8 * (1 + abs(c))


@given(st.sampled_from([3, 4, 5]), st.lists(st.floats(-2, 2), min_size=5, max_size=5))
def test_real_coefficients_give_imaginary_c(m, vals):
    c = stokes_c(Potential.from_coeffs(tuple(vals[:m]))).c
    assert abs(c.real) <= 1e-8 * (1 + abs(c))


@given(st.sampled_from([3, 4, 5]), st.lists(cplx, min_size=5, max_size=5))
def test_unit_coefficient_and_dual_path(m, vals):
    p = Potential.from_coeffs(tuple(vals[:m]))
    data = stokes_c(p)
    assert data.unit_coeff_residual < 1e-8
    try:
        alt = stokes_c_from_f0(p)
    except NearZeroError:
        return
    assert abs(alt - data.c) <= 1e-8 * (1 + abs(data.c))


def test_dual_path_refuses_at_zero_of_f0():
    # m = 2: f0 vanishes where Gamma((3+lam)/4) has a pole, lam = -3
    with pytest.raises(NearZeroError):
        stokes_c_from_f0(Potential.from_coeffs((0.0, -3.0)))


def test_c0_is_rescaled_c():
    p = Potential.from_coeffs((0.4, -0.3, 1.1))
    assert unnormalized_c0(p) == pytest.approx(stokes_ck(p, 0), rel=1e-9)


@pytest.mark.parametrize("k", [-1, 0, 1])
def test_c_tilde_closed_form(k):
    p = Potential.from_coeffs((0.5 - 0.2j, 0.3, -1.0, 0.7j))
    assert rel(c_tilde_numeric(p, k), c_tilde(p, k)) < 1e-9


def test_ck_shift_relation():
    # C_k(a) = C_0(omega_-k(a)) rotated: Phi_k(X, a) is Phi_0 for omega_-k(a)
    from sibuya.potential import rotate

    p = Potential.from_coeffs((0.5, 0.2, -0.3))
    assert rel(stokes_ck(p, 1), stokes_ck(rotate(p, -1), 0)) < 1e-9


def test_parabolic_value_cross_check_through_f0():
    # C f0 = g - h with closed-form f0 values reproduces the closed-form C
    lam = 1.7
    f = parabolic_f0_gamma(lam)[0]
    g = omega_pow(2, 1 + (-0.5 - lam / 2)) * parabolic_f0_gamma(-lam)[0]
    h = omega_pow(2, -1 - (-0.5 - lam / 2)) * parabolic_f0_gamma(-lam)[0]
    assert (g - h) / f == pytest.approx(parabolic_stokes(lam), rel=1e-12)
