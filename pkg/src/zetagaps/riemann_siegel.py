"""Riemann-Siegel machinery shared by the zeta evaluators.

The correction terms C0..C4 are the standard Gabcke combinations of the
derivatives of Psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p), stored as
polynomials in z = p - 1/2.  Everything here is written for real or complex
height ``tau`` so the same formula is continued off the critical line via
zeta(1/2 + delta + i t) = exp(-i theta(tau)) Z(tau) with tau = t - i delta.
"""

from __future__ import annotations

import functools
import math

import mpmath
import numpy as np
from numpy.polynomial import polynomial as npoly

from .special_fn import theta_series, theta_series_derivative

TWO_PI = 2.0 * math.pi
_PSI_DEGREE = 60
# Upper bound on (rows x terms) handled in one vectorised block.
_BLOCK = 1 << 21


def _poly_add(*polys):
    out = np.zeros(max(len(p) for p in polys))
    for p in polys:
        out[: len(p)] += p
    return out


@functools.lru_cache(maxsize=1)
def correction_polynomials():
    """Coefficient arrays of C0..C4 and of their derivatives, in powers of z."""
    with mpmath.workdps(50):
        def psi(p):
            return mpmath.cos(2 * mpmath.pi * (p * p - p - mpmath.mpf(1) / 16)) / mpmath.cos(2 * mpmath.pi * p)
        base = np.array([float(c) for c in mpmath.taylor(psi, mpmath.mpf(1) / 2, _PSI_DEGREE)])

    def d(k):
        return npoly.polyder(base, k) if k else base

    pi2, pi4, pi6, pi8 = math.pi ** 2, math.pi ** 4, math.pi ** 6, math.pi ** 8
    polys = [
        d(0),
        -d(3) / (96 * pi2),
        _poly_add(d(2) / (64 * pi2), d(6) / (18432 * pi4)),
        _poly_add(-d(1) / (64 * pi2), -d(5) / (3840 * pi4), -d(9) / (5308416 * pi6)),
        _poly_add(d(0) / (128 * pi2), 19 * d(4) / (24576 * pi4),
                  11 * d(8) / (5898240 * pi6), d(12) / (2038431744 * pi8)),
    ]
    return tuple(polys), tuple(npoly.polyder(p) for p in polys)


def _remainder(tau, n_main, derivative=False):
    """(-1)^(N-1) a^(-1/2) sum_k C_k(p) a^(-k), with a = sqrt(tau / 2 pi)."""
    polys, dpolys = correction_polynomials()
    a = np.sqrt(tau / TWO_PI)
    z = a - n_main - 0.5
    sign = np.where(n_main % 2 == 1, 1.0, -1.0)
    ainv = 1.0 / a
    series = 0.0
    for k in range(len(polys) - 1, -1, -1):
        series = npoly.polyval(z, polys[k]) + ainv * series
    rem = sign * np.sqrt(ainv) * series
    if not derivative:
        return rem
    # d/da of a^(-1/2) sum_k C_k a^(-k) with dz/da = 1
    total = 0.0
    for k in range(len(polys)):
        ck = npoly.polyval(z, polys[k])
        dck = npoly.polyval(z, dpolys[k])
        total = total + (dck - (k + 0.5) * ck * ainv) * ainv ** (k + 0.5)
    drem = sign * total / (2.0 * TWO_PI * a)  # da/dtau = 1 / (4 pi a)
    return rem, drem


def _main_terms(t):
    return np.floor(np.sqrt(np.asarray(t, dtype=float) / TWO_PI)).astype(np.int64)


def _row_blocks(rows, cols):
    step = max(1, _BLOCK // max(cols, 1))
    for lo in range(0, rows, step):
        yield slice(lo, min(rows, lo + step))


def hardy_z_rs(t, derivative=False):
    """Riemann-Siegel Z(t) (and Z'(t)) for real t > 2 pi, vectorised."""
    t = np.asarray(t, dtype=float)
    shape = t.shape
    t = t.ravel()
    n_main = _main_terms(t)
    z = np.empty_like(t)
    dz = np.empty_like(t) if derivative else None
    nmax = int(n_main.max()) if t.size else 0
    n = np.arange(1, nmax + 1, dtype=float)
    ln = np.log(n)
    w = n ** -0.5
    for sl in _row_blocks(t.size, nmax):
        tt = t[sl]
        th = theta_series(tt) if tt.min() >= 10 else _theta_any(tt)
        mask = n[None, :] <= n_main[sl, None]
        phase = th[:, None] - tt[:, None] * ln[None, :]
        wm = np.where(mask, w[None, :], 0.0)
        if derivative:
            rem, drem = _remainder(tt, n_main[sl], derivative=True)
            dth = theta_series_derivative(tt)
            z[sl] = 2.0 * (wm * np.cos(phase)).sum(axis=1) + rem
            dz[sl] = -2.0 * (wm * np.sin(phase) * (dth[:, None] - ln[None, :])).sum(axis=1) + drem
        else:
            z[sl] = 2.0 * (wm * np.cos(phase)).sum(axis=1) + _remainder(tt, n_main[sl])
    if derivative:
        return z.reshape(shape), dz.reshape(shape)
    return z.reshape(shape)


def _theta_any(t):
    from .special_fn import theta
    return np.asarray(theta(t), dtype=float)


def zeta_rs(s, derivative=False):
    """zeta(s) for Re s in [1/2, 10] and large Im s, by the continued formula.

    The main sums are the approximate functional equation
    sum n^-s + chi(s) sum n^(s-1) with chi(s) = exp(-2 i theta(tau)); the
    Riemann-Siegel correction is continued analytically to tau = t - i(sigma - 1/2).
    Intended for Im s >= 200 (relative error around 1e-9 or better there).
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    t = s.imag
    tau = -1j * (s - 0.5)
    n_main = _main_terms(t)
    nmax = int(n_main.max()) if s.size else 0
    n = np.arange(1, nmax + 1, dtype=float)
    ln = np.log(n)
    out = np.empty_like(s)
    dout = np.empty_like(s) if derivative else None
    for sl in _row_blocks(s.size, nmax):
        ss = s[sl]
        tt = tau[sl]
        mask = n[None, :] <= n_main[sl, None]
        e1 = np.where(mask, np.exp(-ss[:, None] * ln[None, :]), 0.0)
        e2 = np.where(mask, np.exp((ss[:, None] - 1.0) * ln[None, :]), 0.0)
        t1 = e1.sum(axis=1)
        t2 = e2.sum(axis=1)
        th = theta_series(tt)
        half = np.exp(-1j * th)
        chi = half * half
        if derivative:
            rem, drem = _remainder(tt, n_main[sl], derivative=True)
        else:
            rem = _remainder(tt, n_main[sl])
        out[sl] = t1 + chi * t2 + half * rem
        if derivative:
            dth = theta_series_derivative(tt)
            dt1 = -(e1 * ln[None, :]).sum(axis=1)
            dt2 = (e2 * ln[None, :]).sum(axis=1)
            # dtau/ds = -i
            dout[sl] = dt1 + chi * (dt2 - 2.0 * dth * t2) + half * (-dth * rem - 1j * drem)
    if derivative:
        return out.reshape(shape), dout.reshape(shape)
    return out.reshape(shape)
