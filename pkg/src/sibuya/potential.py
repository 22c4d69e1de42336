"""Polynomial potentials ``W(X) = X^m + a1 X^(m-1) + ... + am`` and their
large-``X`` algebra.

Everything here is exact arithmetic on coefficient vectors: the expansion
coefficients of ``sqrt(W)``, the positive-power part ``S`` of its primitive,
the algebraic exponent ``r_m`` and the rotation ``a -> omega_k(a)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DegenerateInputError


def omega(m: int) -> complex:
    """Primitive ``(m+2)``-th root of unity ``exp(2 pi i/(m+2))``."""
    return cmath.exp(2j * math.pi / (m + 2))


def omega_pow(m: int, z: complex) -> complex:
    """``omega**z`` with ``log(omega) = 2 pi i/(m+2)`` (complex ``z`` allowed)."""
    return cmath.exp(2j * math.pi * z / (m + 2))


@dataclass(frozen=True)
class Potential:
    """Monic polynomial potential of degree ``m``.

    ``coeffs`` holds ``(a1, ..., am)``; the last entry doubles as the spectral
    parameter ``lambda``.
    """

    m: int
    coeffs: tuple[complex, ...]

    def __post_init__(self):
        if self.m < 1:
            raise DegenerateInputError(f"degree must be >= 1, got {self.m}")
        coeffs = tuple(complex(c) for c in self.coeffs)
        if len(coeffs) != self.m:
            raise DegenerateInputError(f"expected {self.m} coefficients, got {len(coeffs)}")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[complex]) -> "Potential":
        return cls(len(coeffs), tuple(coeffs))

    @classmethod
    def monomial(cls, m: int, lam: complex = 0.0) -> "Potential":
        return cls(m, (0.0,) * (m - 1) + (lam,))

    @classmethod
    def with_lambda(cls, a: Sequence[complex], lam: complex) -> "Potential":
        """Potential from ``(a1, ..., a_{m-1})`` and ``lambda = a_m``."""
        return cls(len(a) + 1, tuple(a) + (lam,))

    @property
    def real_flag(self) -> bool:
        return all(c.imag == 0.0 for c in self.coeffs)

    @property
    def lam(self) -> complex:
        return self.coeffs[-1]

    @property
    def head(self) -> tuple[complex, ...]:
        """``(a1, ..., a_{m-1})``."""
        return self.coeffs[:-1]

    def replace_lambda(self, lam: complex) -> "Potential":
        return Potential(self.m, self.coeffs[:-1] + (lam,))

    def conj(self) -> "Potential":
        return Potential(self.m, tuple(c.conjugate() for c in self.coeffs))

    def poly(self) -> np.ndarray:
        """Coefficients ``[1, a1, ..., am]`` (highest power first)."""
        return np.array((1.0,) + self.coeffs, dtype=complex)

    def turning_radius(self) -> float:
        """Cauchy-type bound ``max_k |a_k|^(1/k)`` on the turning points."""
        return max((abs(c) ** (1.0 / k) for k, c in enumerate(self.coeffs, 1)), default=0.0)


def eval_w(p: Potential, x: complex) -> complex:
    acc = 1.0 + 0j
    for c in p.coeffs:
        acc = acc * x + c
    return acc


def sqrt_series(p: Potential, K: int) -> np.ndarray:
    """Coefficients ``b_1..b_K`` of ``(1 + a1 u + ... + am u^m)^(1/2)``."""
    if K < 1:
        raise DegenerateInputError("K must be >= 1")
    q = np.zeros(K + 1, dtype=complex)
    n = min(K, p.m)
    q[1 : n + 1] = p.coeffs[:n]
    b = np.zeros(K + 1, dtype=complex)
    b[0] = 1.0
    # (sum b_k u^k)^2 = 1 + q(u)
    for k in range(1, K + 1):
        b[k] = 0.5 * (q[k] - np.dot(b[1:k], b[k - 1 : 0 : -1]))
    return b[1:]


@dataclass(frozen=True)
class AsymptoticFrame:
    m: int
    b: np.ndarray
    s_terms: tuple[tuple[Fraction, complex], ...]
    log_coeff: complex
    r_m: complex
    omega: complex = field(repr=False)


def asymptotic_frame(p: Potential, K: int | None = None) -> AsymptoticFrame:
    m = p.m
    K = m + 4 if K is None else max(K, m // 2 + 1)
    b = np.concatenate([[1.0 + 0j], sqrt_series(p, K)])
    terms = []
    for k in range(0, K + 1):
        expo = Fraction(m + 2 - 2 * k, 2)
        if expo <= 0:
            break
        terms.append((expo, complex(b[k] / float(expo))))
    log_coeff = complex(b[m // 2 + 1]) if m % 2 == 0 else 0j
    r_m = -m / 4 - log_coeff
    return AsymptoticFrame(m, b[1:], tuple(terms), log_coeff, r_m, omega(m))


def _power(x: complex, expo: Fraction) -> complex:
    return cmath.exp(float(expo) * cmath.log(x))


def principal_action(p: Potential, frame: AsymptoticFrame | None, x: complex) -> complex:
    """``S(x, a)``: positive-power part of the primitive of ``sqrt(W)``.

    Powers use the principal branch, which is continuous along any ray
    ``arg x = theta`` with ``|theta| < pi``.
    """
    if x == 0:
        raise DegenerateInputError("S(x) is not defined at x = 0")
    frame = asymptotic_frame(p) if frame is None else frame
    return sum(c * _power(x, e) for e, c in frame.s_terms)


def action_derivative(p: Potential, frame: AsymptoticFrame, x: complex) -> complex:
    """``dS/dx``, the part of ``sqrt(W)`` whose primitive has positive powers."""
    return sum(c * float(e) * _power(x, e - 1) for e, c in frame.s_terms)


def exponent_rm(p: Potential, frame: AsymptoticFrame | None = None) -> complex:
    frame = asymptotic_frame(p) if frame is None else frame
    return frame.r_m


def unit_root(m: int, n: int) -> complex:
    """``omega**n`` for integer ``n``; ``unit_root(m, -n)`` is the exact conjugate."""
    n %= m + 2
    if n == 0:
        return 1.0 + 0j
    if 2 * n == m + 2:
        return -1.0 + 0j
    if 2 * n > m + 2:
        return unit_root(m, m + 2 - n).conjugate()
    return cmath.exp(2j * math.pi * n / (m + 2))


def rotate(p: Potential, k: int) -> Potential:
    """``omega_k(a) = (omega^k a1, omega^(2k) a2, ..., omega^(km) am)``."""
    return Potential(p.m, tuple(c * unit_root(p.m, j * k) for j, c in enumerate(p.coeffs, 1)))


def sqrt_w_on_ray(p: Potential, x: complex) -> complex:
    """``sqrt(W(x))`` on the branch asymptotic to ``x^(m/2)`` (for ``|x|`` past the turning points)."""
    return _power(x, Fraction(p.m, 2)) * cmath.sqrt(eval_w(p, x) / x**p.m)
