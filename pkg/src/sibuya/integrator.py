"""Canonical (recessive) solution ``Phi_0`` at the origin.

The solution is seeded at ``X = R e^{i theta}`` from its large-``X``
asymptotics and integrated inward to ``X = 0``. Inward integration follows
the recessive solution in its growing direction, so any admixture of the
dominant solution in the seed is damped by ``exp(-2 Re S)``.

Seeding uses the asymptotic series of the logarithmic derivative
``y = Phi'/Phi`` (the Riccati equation ``y' = W - y^2``) in powers of
``X^(-1/2)``: its positive-power part integrates to ``-S``, the ``1/X`` term
is ``r_m`` and the remaining terms give the normalisation correction, all
in closed form. The series is truncated where its terms are smallest.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy import integrate as _quad

from . import _kernels
from .errors import DegenerateInputError, IntegrationError
from .potential import (
    AsymptoticFrame,
    Potential,
    action_derivative,
    asymptotic_frame,
    eval_w,
    principal_action,
    sqrt_series,
    sqrt_w_on_ray,
)


@dataclass(frozen=True)
class ScaledPair:
    """``(value, deriv) * exp(log_scale)``; mantissas kept near unit size."""

    value: complex
    deriv: complex
    log_scale: complex = 0j

    def normalized(self) -> "ScaledPair":
        mag = max(abs(self.value), abs(self.deriv))
        if mag == 0.0 or not math.isfinite(mag):
            raise IntegrationError(f"cannot normalise pair with magnitude {mag}")
        return ScaledPair(self.value / mag, self.deriv / mag, self.log_scale + math.log(mag))

    def scaled(self, factor: complex = 1.0, log_factor: complex = 0j, deriv_factor: complex = 1.0) -> "ScaledPair":
        """Multiply by ``factor * exp(log_factor)``; ``deriv_factor`` hits the derivative only."""
        return ScaledPair(self.value * factor, self.deriv * factor * deriv_factor, self.log_scale + log_factor)

    def as_complex(self) -> tuple[complex, complex]:
        e = cmath.exp(self.log_scale)
        return self.value * e, self.deriv * e

    def log_abs_value(self) -> float:
        if self.value == 0:
            return -math.inf
        return math.log(abs(self.value)) + self.log_scale.real

    def conj(self) -> "ScaledPair":
        return ScaledPair(self.value.conjugate(), self.deriv.conjugate(), self.log_scale.conjugate())


def relative_gap(u: ScaledPair, v: ScaledPair) -> float:
    """``max |u - v| / max |u|`` over (value, deriv), compared in log space."""
    shift = cmath.exp(v.log_scale - u.log_scale)
    dv = abs(u.value - v.value * shift)
    dd = abs(u.deriv - v.deriv * shift)
    return max(dv, dd) / max(abs(u.value), abs(u.deriv))


@dataclass(frozen=True)
class RayConfig:
    theta: float = 0.0
    radius: float | None = None
    rel_tol: float = 1e-12
    abs_tol: float = 1e-18
    max_steps: int = 2_000_000
    adaptive_radius: bool = False
    seed_tol: float = 1e-14
    radius_tol: float = 1e-9
    radius_cap: float = 1e4

    def validate(self, m: int) -> None:
        if not abs(self.theta) < 3 * math.pi / (m + 2):
            raise DegenerateInputError(f"ray angle {self.theta} outside the sector |arg X| < 3 pi/{m + 2}")
        if self.rel_tol <= 0 or self.abs_tol < 0:
            raise DegenerateInputError("tolerances must be positive")
        if self.radius is not None and self.radius <= 0:
            raise DegenerateInputError("radius must be positive")


# ---------------------------------------------------------------------------
# Riccati asymptotic series


def riccati_coefficients(p: Potential, n_terms: int) -> np.ndarray:
    """Coefficients ``c_n`` with ``Phi'/Phi ~ sum_n c_n X^((m-n)/2)``.

    ``c_0 = -1`` picks the recessive branch; ``c_n`` for ``n <= m+1`` are the
    coefficients of ``-sqrt(W)`` and ``c_{m+2} = r_m``.
    """
    m = p.m
    w = np.zeros(n_terms + 1, dtype=complex)
    poly = p.poly()
    for k in range(m + 1):
        if 2 * k <= n_terms:
            w[2 * k] = poly[k]
    c = np.zeros(n_terms + 1, dtype=complex)
    c[0] = -1.0
    for n in range(1, n_terms + 1):
        acc = w[n] - np.dot(c[1:n], c[n - 1 : 0 : -1])
        if n >= m + 2:
            acc -= 0.5 * (2 * m + 2 - n) * c[n - m - 2]
        c[n] = -0.5 * acc
    return c


@dataclass(frozen=True)
class SeedPlan:
    radius: float
    n_used: int
    error: float


def _seed_terms(m: int, c: np.ndarray, radius: float) -> np.ndarray:
    """``|c_n R^e / e|`` with ``e = (m+2-n)/2`` for the normalisation tail ``n > m+2``."""
    n = np.arange(len(c))
    e = (m + 2 - n) / 2.0
    with np.errstate(divide="ignore"):
        mag = np.abs(c) * radius**e / np.where(e == 0, 1.0, np.abs(e))
    mag[: m + 3] = 0.0
    return mag


def plan_seed(p: Potential, cfg: RayConfig, c: np.ndarray | None = None) -> SeedPlan:
    """Pick the matching radius and truncation order of the seed series.

    With ``cfg.radius`` fixed only the truncation is chosen; otherwise the
    radius grows geometrically from just outside the turning points until the
    estimated truncation error drops below ``cfg.seed_tol``.
    """
    m = p.m
    c = _riccati_cached(p) if c is None else c
    n_max = len(c) - 1
    width = m + 2

    def best(radius):
        mag = _seed_terms(m, c, radius)
        # error after keeping n <= J: largest of the next `width` terms
        errs = np.array([mag[j + 1 : j + 1 + width].max() for j in range(m + 2, n_max - width + 1)])
        j = int(np.argmin(errs))
        return j + m + 2, float(errs[j])

    if cfg.radius is not None:
        if cfg.radius <= 1.0 + p.turning_radius():
            raise IntegrationError(
                f"radius {cfg.radius} too close to the turning points (need > {1.0 + p.turning_radius():.4g})"
            )
        n_used, err = best(cfg.radius)
        return SeedPlan(cfg.radius, n_used, err)
    radius = 1.25 * (1.0 + p.turning_radius())
    while True:
        n_used, err = best(radius)
        if err <= cfg.seed_tol:
            return SeedPlan(radius, n_used, err)
        radius *= 1.2
        if radius > cfg.radius_cap:
            raise IntegrationError(f"seed series did not reach {cfg.seed_tol:g} below radius cap {cfg.radius_cap}")


def _series_length(m: int) -> int:
    return 30 * (m + 2)


@lru_cache(maxsize=4096)
def _riccati_cached(p: Potential) -> np.ndarray:
    return riccati_coefficients(p, _series_length(p.m))


def resolve_config(p: Potential, cfg: RayConfig) -> RayConfig:
    """Config with the matching radius filled in."""
    cfg.validate(p.m)
    if cfg.radius is not None:
        plan_seed(p, cfg)
        return cfg
    return replace(cfg, radius=plan_seed(p, cfg).radius)


def wkb_seed(p: Potential, frame: AsymptoticFrame | None = None, cfg: RayConfig = RayConfig(),
             first_order: bool = False) -> ScaledPair:
    """``Phi_0`` and ``Phi_0'`` at ``X = R e^{i theta}`` in Sibuya's normalisation.

    The default seed sums the Riccati asymptotic series to its optimal
    truncation. ``first_order=True`` gives the classical
    ``W^(-1/4) exp(-S - L log X + T)`` seed, ``T`` being the convergent tail
    integral of ``sqrt(W) - S' - L/X`` from ``X`` to infinity; its relative
    error is only ``O(R^(-(m+2)/2))``.
    """
    cfg = resolve_config(p, cfg)
    if first_order:
        return _first_order_seed(p, frame or asymptotic_frame(p), cfg)
    m = p.m
    c = _riccati_cached(p)
    plan = plan_seed(p, cfg, c)
    x = cfg.radius * cmath.exp(1j * cfg.theta)
    log_x = math.log(cfg.radius) + 1j * cfg.theta
    n = np.arange(plan.n_used + 1)
    e = (m + 2 - n) / 2.0
    pw = np.exp(np.outer(e, [log_x]).ravel())
    terms = c[: plan.n_used + 1] * pw
    log_phi = complex(np.sum(np.where(e == 0, 0.0, terms / np.where(e == 0, 1.0, e)))) + c[m + 2] * log_x
    y = complex(np.sum(terms)) / x
    return ScaledPair(1.0 + 0j, y, log_phi)


def tail_integral(p: Potential, frame: AsymptoticFrame, radius: float, theta: float = 0.0) -> complex:
    """``int_{R e^{i theta}}^{infinity e^{i theta}} (sqrt(W) - S' - L/X) dX``.

    Past the largest root ``sqrt(W) = X^(m/2) sum b_k X^-k`` converges, so the
    integrand is the tail ``k > m/2 + 1`` of that series and integrates term
    by term. Closer in, adaptive quadrature in ``s = sqrt(R/t)`` is used.
    """
    rho = float(np.max(np.abs(np.roots(p.poly())))) if p.m else 0.0
    if radius > 1.25 * rho:
        return _tail_series(p, radius * cmath.exp(1j * theta), rho / radius)
    direction = cmath.exp(1j * theta)
    lc = frame.log_coeff

    def integrand(s):
        if s == 0.0:
            return 0j
        t = radius / (s * s)
        x = t * direction
        val = sqrt_w_on_ray(p, x) - action_derivative(p, frame, x) - lc / x
        return val * direction * 2 * radius / s**3

    re, err_re = _quad.quad(lambda s: integrand(s).real, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-11)
    im, err_im = _quad.quad(lambda s: integrand(s).imag, 0.0, 1.0, limit=400, epsabs=1e-13, epsrel=1e-11)
    if max(err_re, err_im) > 1e-8 * max(1.0, abs(re), abs(im)):
        raise IntegrationError(f"tail quadrature did not converge (residual {max(err_re, err_im):.3g})")
    return complex(re, im)


def _tail_series(p: Potential, x: complex, ratio: float) -> complex:
    m = p.m
    k0 = m // 2 + 2 if m % 2 == 0 else (m + 3) // 2
    # geometric convergence with ratio rho/R; enough terms for double precision
    n = k0 + int(math.ceil(40 / max(-math.log(max(ratio, 1e-300)), 0.2))) + 8
    b = sqrt_series(p, n)
    log_x = cmath.log(x)
    total = 0j
    for k in range(k0, n + 1):
        e = m / 2 - k + 1
        total += b[k - 1] * cmath.exp(e * log_x) / (-e)
    return total


def _first_order_seed(p: Potential, frame: AsymptoticFrame, cfg: RayConfig) -> ScaledPair:
    x = cfg.radius * cmath.exp(1j * cfg.theta)
    log_x = math.log(cfg.radius) + 1j * cfg.theta
    wx = eval_w(p, x)
    sw = sqrt_w_on_ray(p, x)
    dw = _poly_derivative(p, x)
    t = tail_integral(p, frame, cfg.radius, cfg.theta)
    # W^(-1/4) ~ X^(-m/4) along the ray: fold its ratio into the mantissa
    ratio = cmath.exp(-0.25 * cmath.log(wx / x**p.m))
    log_phi = -principal_action(p, frame, x) - (p.m / 4 + frame.log_coeff) * log_x + t
    value = ratio
    deriv = (-sw - dw / (4 * wx)) * value
    return ScaledPair(value, deriv, log_phi)


def _poly_derivative(p: Potential, x: complex) -> complex:
    acc = 0j
    m = p.m
    for k, c in enumerate(p.poly()[:-1]):
        acc = acc * x + (m - k) * c
    return acc


# ---------------------------------------------------------------------------
# integration


def _run(p_poly: np.ndarray, theta: float, t0: float, t1: float, pair: ScaledPair, cfg: RayConfig,
         moments: np.ndarray, h0: float | None = None):
    direction = cmath.exp(1j * theta)
    if h0 is None:
        w0 = abs(_kernels.horner(p_poly, t0 * direction))
        h0 = min(abs(t1 - t0) / 8 or 1.0, 0.05 / math.sqrt(max(1.0, w0)))
    v, d, gain, h, steps, status = _kernels.integrate_segment(
        p_poly, direction, float(t0), float(t1), complex(pair.value), complex(pair.deriv),
        float(h0), cfg.rel_tol, cfg.abs_tol, int(cfg.max_steps), moments,
    )
    if status == _kernels.MAX_STEPS:
        raise IntegrationError(f"step budget {cfg.max_steps} exhausted between t={t0} and t={t1}")
    if status != _kernels.OK:
        raise IntegrationError(f"integration broke down (status {status}); matching radius likely unsuitable")
    return ScaledPair(v, d, pair.log_scale + gain), h, steps


def integrate_ray(p: Potential, seed: ScaledPair, cfg: RayConfig) -> ScaledPair:
    """Carry ``seed`` from ``X = R e^{i theta}`` to ``X = 0``."""
    if cfg.radius is None:
        raise DegenerateInputError("integrate_ray needs a resolved radius (see resolve_config)")
    out, _, _ = _run(p.poly(), cfg.theta, cfg.radius, 0.0, seed.normalized(), cfg, np.zeros(0))
    return out.normalized()


def canonical_origin(p: Potential, cfg: RayConfig = RayConfig()) -> ScaledPair:
    """``(Phi_0(0), Phi_0'(0))`` for potential ``p``.

    With ``cfg.adaptive_radius`` the radius is multiplied by 1.6 until two
    successive results agree to ``cfg.radius_tol``.
    """
    cfg = resolve_config(p, cfg)
    out = integrate_ray(p, wkb_seed(p, None, cfg), cfg)
    if not cfg.adaptive_radius:
        return out
    radius = cfg.radius
    while True:
        radius *= 1.6
        if radius > cfg.radius_cap:
            raise IntegrationError("radius loop did not converge below the cap")
        nxt_cfg = replace(cfg, radius=radius)
        nxt = integrate_ray(p, wkb_seed(p, None, nxt_cfg), nxt_cfg)
        if relative_gap(nxt, out) <= cfg.radius_tol:
            return nxt
        out = nxt


def f0(p: Potential, cfg: RayConfig = RayConfig()) -> ScaledPair:
    """Alias of :func:`canonical_origin`; ``f0 = Phi_0(0)``, ``f1 = Phi_0'(0)``."""
    return canonical_origin(p, cfg)


# ---------------------------------------------------------------------------
# Green's transform


@dataclass(frozen=True)
class RayIntegrals:
    """Integrals of ``Phi_0`` along ``[0, R e^{i theta}]``.

    ``moments[j] = int t^j |Phi|^2 dt`` and ``dnorm = int |Phi'|^2 dt``, both at
    the scale ``exp(2 Re origin.log_scale)``. Each checkpoint holds
    ``(t_i, pair at t_i, dnorm over [t_i, R], moments over [t_i, R])`` at the
    scale of that pair. ``far`` is the seed at ``R e^{i theta}``; its boundary
    term (see :meth:`far_term`) replaces the neglected tail beyond ``R``.
    """

    origin: ScaledPair
    theta: float
    dnorm: float
    moments: np.ndarray
    checkpoints: tuple
    far: ScaledPair | None = None

    def far_term(self, unit: ScaledPair | None = None) -> complex:
        """``conj(w(R)) w'(R)`` in the mantissa units of ``unit`` (default: the origin pair)."""
        if self.far is None:
            return 0j
        unit = self.origin if unit is None else unit
        shift = 2 * (self.far.log_scale - unit.log_scale).real
        return self.far.value.conjugate() * self.far.deriv * math.exp(shift)


def ray_integrals(p: Potential, cfg: RayConfig = RayConfig(), checkpoints: int = 1) -> RayIntegrals:
    """Integrate ``Phi_0`` inward while accumulating the Green's-transform integrals."""
    cfg = resolve_config(p, cfg)
    pair = wkb_seed(p, None, cfg).normalized()
    far = pair
    nodes = np.linspace(cfg.radius, 0.0, max(checkpoints, 1) + 1)
    # [int |Phi'|^2, int |Phi|^2, int t |Phi|^2, ..., int t^m |Phi|^2]
    mom = np.zeros(p.m + 2)
    poly = p.poly()
    h = None
    record = []
    for a, b in zip(nodes[:-1], nodes[1:]):
        pair, h, _ = _run(poly, cfg.theta, a, b, pair, cfg, mom, h)
        if b > 0:
            record.append((float(b), pair, float(mom[0]), mom[1:].copy()))
    return RayIntegrals(pair, cfg.theta, float(mom[0]), mom[1:].copy(), tuple(record), far)


def green_sides(p: Potential, theta: float, pair: ScaledPair, dnorm: float, moments: np.ndarray,
                far_term: complex = 0j):
    """``(lhs, rhs)`` of the Green's transform on ``[t, R] e^{i theta}``.

    ``lhs = conj(w(R)) w'(R) - conj(w(t)) w'(t)`` (``far_term`` is the first
    product; zero stands for ``R = infinity``), ``rhs = e^{-i theta} int |w'|^2 dt +
    e^{i theta} int W |w|^2 dt``; mantissa units of ``pair``.
    """
    e = cmath.exp(1j * theta)
    poly = p.poly()
    m = p.m
    wint = sum(poly[k] * e ** (m - k) * moments[m - k] for k in range(m + 1))
    return far_term - pair.value.conjugate() * pair.deriv, dnorm / e + e * wint


def green_residual(p: Potential, theta: float, samples: int = 8, cfg: RayConfig = RayConfig()) -> float:
    """Worst relative Green's-transform residual for the solution recessive along ``arg X = theta``.

    That solution is ``Phi_k(X) = Phi_0(omega^-k X, omega_-k(a))``, ``k`` the
    nearest sector index. The identity is frame invariant under
    ``Y = omega^-k X`` (``|dw/dX|^2 |dX| = |dw/dY|^2 |dY|``,
    ``W_p(X) dX = W_q(Y) dY``), so it is evaluated in the rotated frame, on the
    whole ray and on ``samples`` nested sub-rays ``[t_i, infinity)``.
    """
    from .potential import rotate

    m = p.m
    k = round(theta * (m + 2) / (2 * math.pi))
    local = theta - 2 * math.pi * k / (m + 2)
    q = rotate(p, -k)
    res = ray_integrals(q, replace(cfg, theta=local), checkpoints=samples)
    rows = [(res.origin, res.dnorm, res.moments)] + [(pr, dn, mo) for _, pr, dn, mo in res.checkpoints]
    worst = 0.0
    for pair, dn, mo in rows:
        lhs, rhs = green_sides(q, local, pair, dn, mo, res.far_term(pair))
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), dn))
    return worst


def green_transform_sides(w, dw, f, z1: complex, z2: complex, n: int = 64):
    """Both sides of the Green's transform for user-supplied ``w, w', f`` on ``[z1, z2]``.

    Gauss-Legendre quadrature in the arclength ``t``; used for desk checks of
    the identity independent of the ODE solver.
    """
    r = abs(z2 - z1)
    e = (z2 - z1) / r if r else 1.0
    nodes, weights = np.polynomial.legendre.leggauss(n)
    t = 0.5 * r * (nodes + 1.0)
    z = z1 + t * e
    wz = np.array([w(zz) for zz in z])
    dwz = np.array([dw(zz) for zz in z])
    fz = np.array([f(zz) for zz in z])
    half = 0.5 * r
    rhs = np.conj(e) * half * np.sum(weights * np.abs(dwz) ** 2) + e * half * np.sum(weights * fz * np.abs(wz) ** 2)
    lhs = np.conj(w(z2)) * dw(z2) - np.conj(w(z1)) * dw(z1)
    return complex(lhs), complex(rhs)
