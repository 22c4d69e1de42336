"""Compiled inner loops for ray integration of ``Phi'' = W Phi``.

The state along ``X = t e^{i theta}`` is the mantissa pair ``(Phi, Phi')``
plus a real log-scale; ``Phi'`` is always the derivative in ``X``.
"""

import math

import numba as nb
import numpy as np

# Dormand-Prince 5(4); fifth-order solution propagated, FSAL row unused.
DP_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0])
DP_A = np.array(
    [
        [0, 0, 0, 0, 0, 0, 0],
        [1 / 5, 0, 0, 0, 0, 0, 0],
        [3 / 40, 9 / 40, 0, 0, 0, 0, 0],
        [44 / 45, -56 / 15, 32 / 9, 0, 0, 0, 0],
        [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729, 0, 0, 0],
        [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656, 0, 0],
        [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0],
    ]
)
DP_B = np.array([35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0])
DP_E = np.array([71 / 57600, 0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40])
DP_ORDER = 5

RENORM_HI = 2.0**40
RENORM_LO = 2.0**-40

OK, MAX_STEPS, NONFINITE, UNDERFLOW = 0, 1, 2, 3


@nb.njit(cache=True, nogil=True)
def horner(poly, x):
    acc = 0j
    for c in poly:
        acc = acc * x + c
    return acc


@nb.njit(cache=True, nogil=True)
def integrate_segment(poly, direction, t0, t1, v, d, h, rtol, atol, max_steps, moments):
    """Adaptive DP5(4) from ``t0`` to ``t1`` along ``X = t * direction``.

    ``moments`` (length ``1 + k``) accumulates ``int |Phi'|^2 dt`` and
    ``int t^j |Phi|^2 dt`` for ``j < k`` over the traversed interval with
    positive orientation, in current mantissa units.

    Returns ``(v, d, log_gain, h_last, n_steps, status)``.
    """
    nmom = moments.shape[0]
    sgn = 1.0 if t1 >= t0 else -1.0
    h = sgn * abs(h)
    t = t0
    log_gain = 0.0
    kv = np.empty(7, dtype=np.complex128)
    kd = np.empty(7, dtype=np.complex128)
    km = np.empty((7, nmom), dtype=np.float64)
    steps = 0
    span = abs(t1 - t0)
    if span == 0.0:
        return v, d, log_gain, h, steps, OK
    hmin = 1e-14 * max(abs(t0), abs(t1), 1.0)
    while True:
        remaining = t1 - t
        if sgn * remaining <= 0.0:
            break
        final = abs(h) >= abs(remaining)
        if final:
            h = remaining
        if steps >= max_steps:
            return v, d, log_gain, h, steps, MAX_STEPS
        for i in range(7):
            sv = v
            sd = d
            for j in range(i):
                a = DP_A[i, j]
                if a != 0.0:
                    sv += h * a * kv[j]
                    sd += h * a * kd[j]
            ti = t + DP_C[i] * h
            x = ti * direction
            kv[i] = direction * sd
            kd[i] = direction * horner(poly, x) * sv
            if nmom > 0:
                km[i, 0] = sd.real * sd.real + sd.imag * sd.imag
                p2 = sv.real * sv.real + sv.imag * sv.imag
                tp = 1.0
                for q in range(1, nmom):
                    km[i, q] = tp * p2
                    tp *= ti
        nv = v
        nd = d
        ev = 0j
        ed = 0j
        for i in range(7):
            nv += h * DP_B[i] * kv[i]
            nd += h * DP_B[i] * kd[i]
            ev += h * DP_E[i] * kv[i]
            ed += h * DP_E[i] * kd[i]
        xn = (t + h) * direction
        kappa = math.sqrt(max(1.0, abs(horner(poly, xn))))
        scale = atol + rtol * max(abs(v), abs(d) / kappa, abs(nv), abs(nd) / kappa)
        err = max(abs(ev), abs(ed) / kappa) / scale
        if not (err == err) or not (abs(nv) < math.inf and abs(nd) < math.inf):
            return v, d, log_gain, h, steps, NONFINITE
        steps += 1
        if err <= 1.0:
            if nmom > 0:
                for q in range(nmom):
                    acc = 0.0
                    for i in range(7):
                        acc += DP_B[i] * km[i, q]
                    moments[q] += abs(h) * acc
            t = t1 if final else t + h
            v = nv
            d = nd
            mag = max(abs(v), abs(d))
            if mag > RENORM_HI or mag < RENORM_LO:
                if mag == 0.0:
                    return v, d, log_gain, h, steps, NONFINITE
                v /= mag
                d /= mag
                for q in range(nmom):
                    moments[q] /= mag * mag
                log_gain += math.log(mag)
            fac = 5.0 if err == 0.0 else min(5.0, max(0.2, 0.9 * err ** (-1.0 / DP_ORDER)))
        else:
            fac = min(1.0, max(0.2, 0.9 * err ** (-1.0 / DP_ORDER)))
        h *= fac
        if abs(h) < hmin and sgn * (t1 - t) > hmin:
            return v, d, log_gain, h, steps, UNDERFLOW
    return v, d, log_gain, h, steps, OK
