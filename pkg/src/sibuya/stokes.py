"""Stokes multipliers from Wronskians of rotated canonical solutions.

``Phi_k(X, a) = Phi_0(omega^-k X, omega_-k(a))`` decays in the sector
``S_k``. With the renormalised companions

    Phi_1  = omega^(-m/2 - r_m(a)) Phi_0(omega^-1 X, omega_-1(a))
    Phi_-1 = omega^( m/2 + r_m(a)) Phi_0(omega X,    omega_1(a))

the connection formula reads ``Phi_-1 = C(a) Phi_0 + Phi_1``. All three
solutions are evaluated at ``X = 0`` only.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

from .errors import IntegrationError, NearZeroError
from .integrator import RayConfig, ScaledPair, canonical_origin
from .potential import Potential, exponent_rm, omega_pow, rotate, unit_root

# Wr(f, g) = f g' - f' g; fixed against the closed-form Wronskian lemma.
WRONSKIAN_SIGN = 1


@dataclass(frozen=True)
class ScaledValue:
    """``mantissa * exp(log_scale)`` for quantities that may overflow a double."""

    mantissa: complex
    log_scale: complex = 0j

    def to_complex(self) -> complex:
        if self.mantissa == 0:
            return 0j
        return self.mantissa * cmath.exp(self.log_scale)

    def log_abs(self) -> float:
        return math.log(abs(self.mantissa)) + self.log_scale.real if self.mantissa else -math.inf

    def __truediv__(self, other: "ScaledValue") -> "ScaledValue":
        return ScaledValue(self.mantissa / other.mantissa, self.log_scale - other.log_scale)

    def __mul__(self, other: "ScaledValue") -> "ScaledValue":
        return ScaledValue(self.mantissa * other.mantissa, self.log_scale + other.log_scale)


@lru_cache(maxsize=50_000)
def origin_cached(p: Potential, cfg: RayConfig) -> ScaledPair:
    """Memoised :func:`canonical_origin`; both arguments are immutable."""
    return canonical_origin(p, cfg)


def rotated_origin(p: Potential, k: int, cfg: RayConfig = RayConfig()) -> ScaledPair:
    """Unnormalised ``Phi_k`` and its ``X``-derivative at the origin."""
    pair = origin_cached(rotate(p, -k), cfg)
    return pair.scaled(deriv_factor=unit_root(p.m, -k))


def _prefactor_log(p: Potential) -> complex:
    """``log omega^(m/2 + r_m(a))``."""
    return 2j * math.pi * (p.m / 2 + exponent_rm(p)) / (p.m + 2)


def companion_origin(p: Potential, k: int, cfg: RayConfig = RayConfig()) -> ScaledPair:
    """Renormalised ``Phi_{+1}`` or ``Phi_{-1}`` at the origin."""
    if k not in (1, -1):
        raise ValueError("companion index must be +1 or -1")
    return rotated_origin(p, k, cfg).scaled(log_factor=-k * _prefactor_log(p))


def wronskian(u: ScaledPair, v: ScaledPair) -> ScaledValue:
    return ScaledValue(WRONSKIAN_SIGN * (u.value * v.deriv - u.deriv * v.value), u.log_scale + v.log_scale)


@dataclass(frozen=True)
class ConnectionData:
    c: complex
    wr_01: complex
    wr_m11: complex
    wr_m10: complex
    unit_coeff_residual: float
    scale_audit: complex
    c_scaled: ScaledValue


def stokes_c(p: Potential, cfg: RayConfig = RayConfig()) -> ConnectionData:
    """``C(a) = Wr(Phi_-1, Phi_1) / Wr(Phi_0, Phi_1)`` with audit fields."""
    phi0 = origin_cached(p, cfg)
    phi1 = companion_origin(p, 1, cfg)
    phim = companion_origin(p, -1, cfg)
    w01 = wronskian(phi0, phi1)
    wm11 = wronskian(phim, phi1)
    wm10 = wronskian(phim, phi0)
    w10 = wronskian(phi1, phi0)
    if w01.mantissa == 0:
        raise IntegrationError("Wr(Phi_0, Phi_1) vanished numerically")
    c = wm11 / w01
    unit = (wm10 / w10).to_complex()
    return ConnectionData(
        c=c.to_complex(),
        wr_01=w01.to_complex(),
        wr_m11=wm11.to_complex(),
        wr_m10=wm10.to_complex(),
        unit_coeff_residual=abs(unit - 1.0),
        scale_audit=c.log_scale,
        c_scaled=c,
    )


def functional_terms(p: Potential, cfg: RayConfig = RayConfig()):
    """``(f0(a), g_a, conj-type term)`` entering ``C f0 = g_a(lam) - h_a(lam)``.

    ``g_a = omega^(m/2+r) f0(omega_1(a))``, ``h_a = omega^(-m/2-r) f0(omega_-1(a))``;
    returned as :class:`ScaledValue`.
    """
    pref = _prefactor_log(p)
    f = origin_cached(p, cfg)
    g = origin_cached(rotate(p, 1), cfg)
    h = origin_cached(rotate(p, -1), cfg)
    return (
        ScaledValue(f.value, f.log_scale),
        ScaledValue(g.value, g.log_scale + pref),
        ScaledValue(h.value, h.log_scale - pref),
    )


def stokes_c_from_f0(p: Potential, cfg: RayConfig = RayConfig(), near_zero: float = 1e-9) -> complex:
    """``C`` from the values ``f0`` alone (no derivatives); independent of the Wronskian path.

    Raises :class:`NearZeroError` when ``|f0(a)|`` is below ``near_zero``
    times the larger right-hand term.
    """
    f, g, h = functional_terms(p, cfg)
    ref = max(g.log_abs(), h.log_abs())
    if f.mantissa == 0 or f.log_abs() - ref < math.log(near_zero):
        raise NearZeroError("f0 is numerically zero here; use the Wronskian path (stokes_c)")
    shift = ref
    num = g.mantissa * cmath.exp(g.log_scale - shift) - h.mantissa * cmath.exp(h.log_scale - shift)
    return num / f.mantissa * cmath.exp(shift - f.log_scale)


def unnormalized_c0(p: Potential, cfg: RayConfig = RayConfig()) -> complex:
    """``C_0(a) = omega^(-m/2-r_m(a)) C(a)``."""
    return stokes_c(p, cfg).c * cmath.exp(-_prefactor_log(p))


def stokes_ck(p: Potential, k: int, cfg: RayConfig = RayConfig()) -> complex:
    """``C_k(a) = Wr(Phi_{k-1}, Phi_{k+1}) / Wr(Phi_k, Phi_{k+1})`` from unnormalised solutions."""
    lo = rotated_origin(p, k - 1, cfg)
    mid = rotated_origin(p, k, cfg)
    hi = rotated_origin(p, k + 1, cfg)
    return (wronskian(lo, hi) / wronskian(mid, hi)).to_complex()


def c_tilde(p: Potential, k: int) -> complex:
    """Closed form ``omega^(-m - 2 r_m(omega_-k(a)))``; never zero."""
    return omega_pow(p.m, -p.m - 2 * exponent_rm(rotate(p, -k)))


def c_tilde_numeric(p: Potential, k: int, cfg: RayConfig = RayConfig()) -> complex:
    """``Wr(Phi_{k-1}, Phi_k) / Wr(Phi_{k+1}, Phi_k)`` from unnormalised solutions."""
    lo = rotated_origin(p, k - 1, cfg)
    mid = rotated_origin(p, k, cfg)
    hi = rotated_origin(p, k + 1, cfg)
    return (wronskian(lo, mid) / wronskian(hi, mid)).to_complex()


def lemma_wronskian(p: Potential, k: int) -> complex:
    """Closed form ``Wr(Phi_k, Phi_{k+1}) = 2 (-1)^k omega^(k m/2 - r_m(omega_{-k-1}(a)))``."""
    return 2 * (-1) ** (k % 2) * omega_pow(p.m, k * p.m / 2 - exponent_rm(rotate(p, -k - 1)))


def numeric_wronskian(p: Potential, k: int, cfg: RayConfig = RayConfig()) -> complex:
    return wronskian(rotated_origin(p, k, cfg), rotated_origin(p, k + 1, cfg)).to_complex()
