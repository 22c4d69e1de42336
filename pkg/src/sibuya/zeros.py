"""Zeros of ``lambda -> C(a, lambda)`` and of ``f0``: scanning, refinement,
argument-principle counts, simpleness certificates and parameter sweeps.

For real ``a`` the function ``-i C`` is real on the real axis, so real zeros
are bracketed by sign changes and refined with Brent's method.
"""

from __future__ import annotations

import cmath
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Callable, Sequence

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import ContourError, DegenerateInputError, VerificationError
from .integrator import RayConfig
from .potential import Potential
from .stokes import origin_cached, stokes_c
from .workers import pmap

log = logging.getLogger(__name__)


@dataclass
class ZeroRecord:
    lam: complex
    c_deriv: complex = complex("nan")
    winding: int = 0
    is_real: bool = True
    is_simple: bool = False
    residual: float = math.nan
    kind: str = "zero"
    alpha: float | None = None


@dataclass(frozen=True)
class SearchWindow:
    lo: float
    hi: float
    grid: int = 64
    box_height: float = 0.5
    tol: float = 1e-11

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DegenerateInputError(f"empty window [{self.lo}, {self.hi}]")
        if self.grid < 16:
            raise DegenerateInputError("grid must have at least 16 points")


@dataclass
class ScanResult:
    zeros: list[ZeroRecord]
    tangencies: list[float] = field(default_factory=list)
    evaluations: int = 0

    def __iter__(self):
        return iter(self.zeros)

    def __len__(self):
        return len(self.zeros)

    def __getitem__(self, i):
        return self.zeros[i]

    @property
    def lambdas(self) -> np.ndarray:
        return np.array([z.lam.real for z in self.zeros])


def c_value(a: Sequence[complex], lam: complex, cfg: RayConfig = RayConfig()) -> complex:
    return stokes_c(Potential.with_lambda(a, lam), cfg).c


def f0_value(a: Sequence[complex], lam: complex, cfg: RayConfig = RayConfig()) -> complex:
    return origin_cached(Potential.with_lambda(a, lam), cfg).as_complex()[0]


def real_c_function(a: Sequence[float], cfg: RayConfig = RayConfig(), imag_tol: float = 1e-8) -> Callable[[float], float]:
    """``lambda -> -i C(a, lambda)`` as a real function; checks the discarded imaginary part."""
    if any(complex(x).imag for x in a):
        raise DegenerateInputError("real scans need real coefficients")
    a = tuple(float(complex(x).real) for x in a)

    def f(lam: float) -> float:
        val = -1j * c_value(a, float(lam), cfg)
        if abs(val.imag) > imag_tol * max(1.0, abs(val)):
            raise VerificationError(f"-iC has imaginary residue {val.imag:.3g} at lambda={lam}")
        return val.real

    return f


def real_f0_function(a: Sequence[float], cfg: RayConfig = RayConfig(), imag_tol: float = 1e-8) -> Callable[[float], float]:
    a = tuple(float(complex(x).real) for x in a)

    def f(lam: float) -> float:
        val = f0_value(a, float(lam), cfg)
        if abs(val.imag) > imag_tol * max(1e-300, abs(val)):
            raise VerificationError(f"f0 has imaginary residue {val.imag:.3g} at lambda={lam}")
        return val.real

    return f


# ---------------------------------------------------------------------------
# real-axis scanning


def _sign_changes(xs, ys):
    """Brackets ``(i, i + 1)``; an exact zero on the grid is reported once as ``(i, i)``."""
    out = []
    for i in range(len(xs) - 1):
        if ys[i] == 0:
            out.append((i, i))
        elif ys[i + 1] != 0 and np.sign(ys[i]) != np.sign(ys[i + 1]):
            out.append((i, i + 1))
    if len(ys) and ys[-1] == 0:
        out.append((len(ys) - 1, len(ys) - 1))
    return out


def scan_real(func: Callable[[float], float], window: SearchWindow, tangency: float = 1e-3) -> ScanResult:
    """Zeros of a real function on ``[lo, hi]`` by sign changes plus tangency repair.

    The grid is doubled until two successive grids see the same number of
    sign changes. Interior local minima of ``|f|`` without a sign change and
    below ``tangency`` times the median local peak are probed with a bounded
    minimisation; a hidden sign change there yields two more zeros, otherwise
    the point is reported as a tangency.
    """
    xs = np.linspace(window.lo, window.hi, window.grid)
    ys = np.array(pmap(func, xs))
    n_eval = len(xs)
    count = len(_sign_changes(xs, ys))
    while True:
        mid = 0.5 * (xs[:-1] + xs[1:])
        ym = np.array(pmap(func, mid))
        n_eval += len(mid)
        nx = np.empty(2 * len(xs) - 1)
        ny = np.empty_like(nx)
        nx[0::2], nx[1::2] = xs, mid
        ny[0::2], ny[1::2] = ys, ym
        xs, ys = nx, ny
        new_count = len(_sign_changes(xs, ys))
        if new_count == count or len(xs) > 8 * window.grid:
            break
        count = new_count

    brackets = _sign_changes(xs, ys)
    roots = []
    for i, j in brackets:
        if i == j:
            roots.append(xs[i])
            continue
        roots.append(brentq(func, xs[i], xs[j], xtol=window.tol, rtol=4 * np.finfo(float).eps, maxiter=200))

    tangencies = []
    ay = np.abs(ys)
    peaks = [ay[i] for i in range(1, len(ay) - 1) if ay[i] >= ay[i - 1] and ay[i] >= ay[i + 1]]
    scale = float(np.median(peaks)) if peaks else float(ay.max())
    for i in range(1, len(xs) - 1):
        if not (ay[i] <= ay[i - 1] and ay[i] <= ay[i + 1]) or ay[i] == 0:
            continue
        if np.sign(ys[i - 1]) != np.sign(ys[i]) or np.sign(ys[i + 1]) != np.sign(ys[i]):
            continue
        if ay[i] > tangency * scale:
            continue
        s = np.sign(ys[i])
        res = minimize_scalar(lambda x: s * func(x), bounds=(xs[i - 1], xs[i + 1]), method="bounded",
                              options={"xatol": window.tol})
        n_eval += res.nfev
        if res.fun < 0:
            roots.append(brentq(func, xs[i - 1], res.x, xtol=window.tol))
            roots.append(brentq(func, res.x, xs[i + 1], xtol=window.tol))
        else:
            tangencies.append(float(res.x))

    roots.sort()
    zeros = []
    for r in roots:
        # Newton-step estimate of the distance to the true zero
        h = max(window.tol * 100, 1e-7 * max(1.0, abs(r)))
        slope = (func(r + h) - func(r - h)) / (2 * h)
        n_eval += 2
        val = func(r)
        zeros.append(ZeroRecord(complex(r), residual=abs(val / slope) if slope else math.inf))
    return ScanResult(zeros, tangencies, n_eval)


def scan_real_zeros(a: Sequence[float], window: SearchWindow, cfg: RayConfig = RayConfig()) -> ScanResult:
    """Real zeros of ``lambda -> C(a, lambda)`` in the window, increasing order."""
    return scan_real(real_c_function(a, cfg), window)


# ---------------------------------------------------------------------------
# derivatives


def cauchy_derivative(func: Callable[[complex], complex], z: complex, radius: float = 0.1, n: int = 16) -> complex:
    """``f'(z)`` by the trapezoid rule on ``|zeta - z| = radius`` (spectrally accurate for entire ``f``)."""
    phases = np.exp(2j * np.pi * np.arange(n) / n)
    vals = np.array([func(z + radius * ph) for ph in phases])
    return complex(np.sum(vals / phases) / (n * radius))


def derivative_c(a: Sequence[complex], lam: complex, cfg: RayConfig = RayConfig(), n: int = 16,
                 radius: float = 0.1) -> complex:
    return cauchy_derivative(lambda z: c_value(a, z, cfg), lam, radius, n)


def finite_difference(func: Callable[[complex], complex], z: complex, h: float = 1e-2) -> complex:
    """Fourth-order central difference."""
    return (func(z - 2 * h) - 8 * func(z - h) + 8 * func(z + h) - func(z + 2 * h)) / (12 * h)


# ---------------------------------------------------------------------------
# argument principle


def winding_number(func: Callable[[complex], complex], path: Callable[[float], complex], n0: int = 64,
                   max_phase: float = math.pi / 2, max_points: int = 20_000, pinch: float = 1e-12,
                   min_step: float = 1e-10) -> int:
    """Winding number of ``func`` along the closed curve ``path(s)``, ``s`` in ``[0, 1]``.

    Segments are bisected until every phase increment is below ``max_phase``.
    Raises :class:`ContourError` if ``|func|`` drops below ``pinch`` times the
    largest of its neighbouring samples (the modulus may span many decades
    around a large contour, so the scale is local), or if a segment has to be
    split below ``min_step`` in ``s``.
    """
    ss = list(np.linspace(0.0, 1.0, n0 + 1))
    vals = [func(path(s)) for s in ss[:-1]]
    vals.append(vals[0])
    total = 0.0
    i = 0
    while i < len(ss) - 1:
        a, b = vals[i], vals[i + 1]
        local = max(abs(v) for v in vals[max(i - 1, 0):i + 3])
        if a == 0 or b == 0 or min(abs(a), abs(b)) < pinch * local:
            raise ContourError(f"function vanishes on the contour near {path(ss[i])}")
        step = cmath.phase(b / a)
        if abs(step) > max_phase:
            if len(ss) >= max_points or ss[i + 1] - ss[i] < min_step:
                raise ContourError("phase increments did not resolve; contour too close to a zero")
            sm = 0.5 * (ss[i] + ss[i + 1])
            ss.insert(i + 1, sm)
            vals.insert(i + 1, func(path(sm)))
            continue
        total += step
        i += 1
    return int(round(total / (2 * math.pi)))


def box_path(lo: float, hi: float, height: float, center_im: float = 0.0) -> Callable[[float], complex]:
    """Positively oriented rectangle ``[lo, hi] x [-height, height] i``."""
    corners = [complex(lo, center_im - height), complex(hi, center_im - height),
               complex(hi, center_im + height), complex(lo, center_im + height)]
    w, h = hi - lo, 2 * height
    per = 2 * (w + h)
    cuts = np.cumsum([0.0, w, h, w, h]) / per

    def path(s: float) -> complex:
        s = s % 1.0
        k = min(int(np.searchsorted(cuts, s, side="right")) - 1, 3)
        frac = (s - cuts[k]) / (cuts[k + 1] - cuts[k])
        return corners[k] + frac * (corners[(k + 1) % 4] - corners[k])

    return path


def disc_path(center: complex, radius: float) -> Callable[[float], complex]:
    return lambda s: center + radius * cmath.exp(2j * math.pi * s)


def _nudged(count_fn, attempts=3):
    err = None
    for k in range(attempts):
        try:
            return count_fn(k)
        except ContourError as exc:
            err = exc
    raise err


def winding_count(a: Sequence[complex], region, cfg: RayConfig = RayConfig(), target: str = "c",
                  n0: int | None = None) -> int:
    """Zeros of ``C(a, .)`` (or ``f0(a, .)`` with ``target='f0'``) inside ``region``.

    ``region`` is ``('box', lo, hi, height)`` or ``('disc', center, radius)``.
    A contour that grazes a zero is nudged outward and retried.
    """
    func = {"c": lambda z: c_value(a, z, cfg), "f0": lambda z: f0_value(a, z, cfg)}[target]
    kind = region[0]
    if kind == "box":
        _, lo, hi, height = region

        def attempt(k):
            d = 1e-3 * k * (hi - lo)
            return winding_number(func, box_path(lo - d, hi + d, height + d), n0 or 64)
    elif kind == "disc":
        _, center, radius = region

        def attempt(k):
            return winding_number(func, disc_path(center, radius * (1 + 0.01 * k)), n0 or 32)
    else:
        raise DegenerateInputError(f"unknown region {region!r}")
    return _nudged(attempt)


# ---------------------------------------------------------------------------
# certification


def classify_zeros(records: Sequence[ZeroRecord], a: Sequence[float], cfg: RayConfig = RayConfig(),
                   derivative_floor: float = 1e-6, real_tol: float = 1e-8, require_hypothesis: bool | None = None,
                   disc_radius: float = 0.1) -> list[ZeroRecord]:
    """Fill derivative, winding and simpleness flags.

    When the coefficients satisfy (H) with its supplement (checked here unless
    ``require_hypothesis`` says otherwise) every zero must come out real,
    positive and simple; anything else raises :class:`VerificationError`.
    """
    from .verify import check_hypothesis

    recs = [replace(r) for r in records]
    lams = [r.lam for r in recs]
    for i, r in enumerate(recs):
        gaps = [abs(r.lam - other) for j, other in enumerate(lams) if j != i]
        rad = min([disc_radius] + [0.3 * g for g in gaps])
        r.c_deriv = derivative_c(a, r.lam, cfg, radius=rad / 2)
        r.winding = winding_count(a, ("disc", r.lam, rad), cfg)
        r.is_real = abs(r.lam.imag) <= real_tol * max(1.0, abs(r.lam))
        r.residual = abs(c_value(a, r.lam, cfg)) / abs(r.c_deriv) if r.c_deriv else math.inf
    derivs = [abs(r.c_deriv) for r in recs]
    for i, r in enumerate(recs):
        neigh = [derivs[j] for j in (i - 1, i + 1) if 0 <= j < len(recs)] or [derivs[i]]
        floor = derivative_floor * max(neigh)
        r.is_simple = r.winding == 1 and abs(r.c_deriv) > floor

    holds = check_hypothesis(a, len(a) + 1).accepted if require_hypothesis is None else require_hypothesis
    if holds:
        bad = [r for r in recs if not (r.is_real and r.lam.real > 0 and r.is_simple)]
        if bad:
            raise VerificationError(f"zeros violating real/positive/simple under (H)+(s): {[b.lam for b in bad]}")
    return recs


# ---------------------------------------------------------------------------
# f0 special case


@dataclass
class F0Zeros:
    zeros: list[ZeroRecord]
    positive_min: float
    box_count: int

    @property
    def real_count(self) -> int:
        return len(self.zeros)


def f0_negative_zeros(m: int, window: SearchWindow, cfg: RayConfig = RayConfig(), positive_upper: float = 20.0,
                      positive_samples: int = 50) -> F0Zeros:
    """Zeros of ``f0(lambda)`` for ``W = X^m + lambda`` on a window inside ``(-inf, 0)``.

    Also samples ``f0`` on ``[0, positive_upper]`` (must stay positive) and
    counts zeros in the box ``[lo, hi] x [-h, h] i`` by the argument principle.
    """
    a = (0.0,) * (m - 1)
    func = real_f0_function(a, cfg)
    res = scan_real(func, window)
    for z in res.zeros:
        z.kind = "f0_zero"
        z.winding = winding_count(a, ("disc", z.lam, 0.2 * min([1.0] + [abs(z.lam - o.lam) for o in res.zeros if o is not z])), cfg, target="f0")
        z.is_simple = z.winding == 1
        z.c_deriv = cauchy_derivative(lambda lam: f0_value(a, lam, cfg), z.lam, 0.05)
    samples = np.linspace(0.0, positive_upper, positive_samples)
    pos = min(func(x) for x in samples)
    if pos <= 0:
        raise VerificationError(f"f0 is not positive on [0, {positive_upper}] (min {pos:.3g})")
    box = winding_count(a, ("box", window.lo, window.hi, window.box_height), cfg, target="f0")
    return F0Zeros(res.zeros, float(pos), box)


# ---------------------------------------------------------------------------
# parameter sweeps


@dataclass
class CoalescenceEvent:
    alpha: float
    lam: float
    c_abs: float
    dc_abs: float
    winding: int
    dc: complex
    box_before: int
    box_after: int


@dataclass
class SweepResult:
    alphas: np.ndarray
    zeros: list[np.ndarray]
    tracks: list[list[tuple[float, float]]]
    events: list[CoalescenceEvent]
    tangencies: list[tuple[float, float]]


def _pair_minimum(func, lo, hi, tol):
    """``min s f`` over ``[lo, hi]``, ``s`` the sign of ``f`` at the ends; negative iff the pair is present."""
    xs = np.linspace(lo, hi, 17)
    ys = np.array(pmap(func, xs))
    s = np.sign(ys[0]) if ys[0] != 0 else np.sign(ys[-1])
    i = int(np.argmin(s * ys))
    a, b = xs[max(i - 1, 0)], xs[min(i + 1, len(xs) - 1)]
    res = minimize_scalar(lambda x: s * func(x), bounds=(a, b), method="bounded", options={"xatol": tol})
    return float(res.x), float(res.fun), s


def _match_tracks(prev, cur, jump):
    """Nearest-neighbour continuation; returns ``{cur_index: prev_index}``."""
    pairs = sorted((abs(c - p), i, j) for i, c in enumerate(cur) for j, p in enumerate(prev) if abs(c - p) < jump)
    link, taken = {}, set()
    for _, i, j in pairs:
        if i not in link and j not in taken:
            link[i] = j
            taken.add(j)
    return link


def sweep_family(family: Callable[[float], Sequence[float]], alphas: Sequence[float], window: SearchWindow,
                 cfg: RayConfig = RayConfig(), alpha_tol: float = 1e-12, box_height: float = 1.0,
                 disc_radius: float = 0.02, edge: float | None = None, mapper=None) -> SweepResult:
    """Follow the real zeros of ``C(family(alpha), .)`` along ``alphas``.

    Zeros are continued by nearest neighbour. When two adjacent tracks end at
    the same step away from the window edges, ``alpha`` is bisected on the
    sign of ``min s(-iC)`` over their gap until the double zero is pinned
    down; the event records ``|C|`` and ``|dC/dlambda|`` there and the
    winding number of a small disc. ``mapper`` may be a parallel ``map``.
    """
    alphas = np.asarray(alphas, dtype=float)
    if len(alphas) < 2:
        raise DegenerateInputError("a sweep needs at least two parameter values")
    step = float(np.max(np.abs(np.diff(alphas))))
    jump = max(0.5, 5 * step)
    edge = jump if edge is None else edge
    scans = (mapper or pmap)(lambda al: scan_real_zeros(family(al), window, cfg), alphas)
    zeros = [s.lambdas for s in scans]
    tangencies = [(al, t) for al, s in zip(alphas, scans) for t in s.tangencies]
    tracks = [[(alphas[0], z)] for z in zeros[0]]
    open_ids = list(range(len(tracks)))
    events = []
    for idx in range(1, len(alphas)):
        prev, cur = zeros[idx - 1], zeros[idx]
        link = _match_tracks(prev, cur, jump)
        ended = sorted(set(range(len(prev))) - set(link.values()))
        new_open = []
        for i, z in enumerate(cur):
            if i in link:
                t = open_ids[link[i]]
                tracks[t].append((alphas[idx], z))
            else:
                tracks.append([(alphas[idx], z)])
                t = len(tracks) - 1
            new_open.append(t)
        interior = [j for j in ended if window.lo + edge < prev[j] < window.hi - edge]
        k = 0
        while k < len(interior) - 1:
            j = interior[k]
            if interior[k + 1] == j + 1:
                lo_n = prev[j - 1] if j > 0 else window.lo
                hi_n = prev[j + 2] if j + 2 < len(prev) else window.hi
                gap = prev[j + 1] - prev[j]
                lo = max(prev[j] - 0.5 * gap - 0.1, 0.5 * (lo_n + prev[j]))
                hi = min(prev[j + 1] + 0.5 * gap + 0.1, 0.5 * (hi_n + prev[j + 1]))
                events.append(_locate_coalescence(family, alphas[idx - 1], alphas[idx], lo, hi, window, cfg,
                                                  alpha_tol, box_height, disc_radius))
                k += 2
            else:
                log.warning("zero at lambda=%.6g lost between alpha=%g and %g without a partner",
                            prev[j], alphas[idx - 1], alphas[idx])
                k += 1
        if interior and k == len(interior) - 1:
            log.warning("zero at lambda=%.6g lost between alpha=%g and %g without a partner",
                        prev[interior[-1]], alphas[idx - 1], alphas[idx])
        open_ids = new_open
    return SweepResult(alphas, zeros, tracks, events, tangencies)


def _locate_coalescence(family, a_present, a_absent, lo, hi, window, cfg, alpha_tol, box_height, disc_radius):
    box = ("box", lo, hi, box_height)
    before = winding_count(family(a_present), box, cfg)
    after = winding_count(family(a_absent), box, cfg)
    lam_hat = 0.5 * (lo + hi)
    while abs(a_present - a_absent) > alpha_tol:
        mid = 0.5 * (a_present + a_absent)
        x, val, _ = _pair_minimum(real_c_function(family(mid), cfg), lo, hi, window.tol)
        if val < 0:
            a_present = mid
        else:
            a_absent, lam_hat = mid, x
    a_hat = a_absent
    coeffs = family(a_hat)
    lam_hat, _, _ = _pair_minimum(real_c_function(coeffs, cfg), lam_hat - 0.05, lam_hat + 0.05, 1e-10)
    c_abs = abs(c_value(coeffs, lam_hat, cfg))
    dc = derivative_c(coeffs, lam_hat, cfg, radius=0.05)
    dc_abs = abs(dc)
    wind = winding_count(coeffs, ("disc", lam_hat, disc_radius), cfg)
    log.info("coalescence at alpha=%.12g lambda=%.10g |C|=%.3g |C'|=%.3g winding=%d", a_hat, lam_hat, c_abs, dc_abs, wind)
    return CoalescenceEvent(float(a_hat), float(lam_hat), c_abs, dc_abs, wind, dc, before, after)
