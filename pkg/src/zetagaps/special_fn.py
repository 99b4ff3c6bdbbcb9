"""Riemann-Siegel theta function and the principal branch of Lambert W."""

from __future__ import annotations

import enum
import math

import mpmath
import numpy as np
from scipy import special

from .errors import DomainError

TWO_PI = 2.0 * math.pi
EXTENDED_DPS = 32

# Below this height the Stirling tail is not trusted and log-Gamma is used.
_SERIES_MIN_T = 50.0

# Coefficients of the odd powers 1/t, 1/t^3, ... in the Stirling expansion.
_THETA_TAIL = (1 / 48, 7 / 5760, 31 / 80640, 127 / 430080, 511 / 1216512)


class ThetaMode(enum.Enum):
    EXACT = "exact"
    STIRLING_LEADING = "stirling"


def _check_precision(precision):
    if precision not in ("double", "extended"):
        raise DomainError(f"unknown precision {precision!r}")


def theta_series(tau):
    """Stirling series for theta at real or complex ``tau``.

    Accurate to double precision for ``|tau| >= 10``; the expression is
    analytic in ``tau`` so it also serves the continuation of theta off the
    real axis.
    """
    tau = np.asarray(tau)
    r = 1.0 / tau
    r2 = r * r
    tail = 0.0
    for c in reversed(_THETA_TAIL):
        tail = c + r2 * tail
    return 0.5 * tau * np.log(tau / TWO_PI) - 0.5 * tau - math.pi / 8 + r * tail


def theta_series_derivative(tau):
    tau = np.asarray(tau)
    r2 = 1.0 / (tau * tau)
    tail = 0.0
    for k, c in reversed(list(enumerate(_THETA_TAIL))):
        tail = -(2 * k + 1) * c + r2 * tail
    return 0.5 * np.log(tau / TWO_PI) + r2 * tail


def _theta_loggamma(t):
    t = np.asarray(t, dtype=float)
    return special.loggamma(0.25 + 0.5j * t).imag - 0.5 * t * math.log(math.pi)


def theta(t, mode=ThetaMode.EXACT, precision="double"):
    """Riemann-Siegel theta function.

    Parameters
    ----------
    t : float or ndarray
        Positive ordinate(s).
    mode : ThetaMode
        ``EXACT`` evaluates Im log Gamma(1/4 + it/2) - t log sqrt(pi) (through
        the Stirling series with five correction terms above t = 50, where it
        is exact to double precision). ``STIRLING_LEADING`` keeps only
        (t/2) log(t/(2 pi e)) - pi/8.
    precision : {"double", "extended"}
        ``extended`` returns an mpmath value carrying 32 significant digits
        (scalar input only).
    """
    _check_precision(precision)
    mode = ThetaMode(mode)
    if precision == "extended":
        t = mpmath.mpf(t)
        if t <= 0:
            raise DomainError("theta requires t > 0")
        with mpmath.workdps(EXTENDED_DPS):
            if mode is ThetaMode.STIRLING_LEADING:
                return t / 2 * mpmath.log(t / (2 * mpmath.pi * mpmath.e)) - mpmath.pi / 8
            return mpmath.siegeltheta(t)
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise DomainError("theta requires t > 0")
    if mode is ThetaMode.STIRLING_LEADING:
        out = 0.5 * arr * np.log(arr / (TWO_PI * math.e)) - math.pi / 8
    else:
        out = np.where(arr >= _SERIES_MIN_T,
                       theta_series(np.maximum(arr, _SERIES_MIN_T)),
                       _theta_loggamma(np.minimum(arr, _SERIES_MIN_T)))
    return float(out) if out.ndim == 0 else out


def theta_derivative(t):
    """d theta / dt for t > 2 pi, where it is positive."""
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= TWO_PI):
        raise DomainError("theta_derivative requires t > 2*pi")
    small = np.minimum(arr, _SERIES_MIN_T)
    exact = 0.5 * special.psi(0.25 + 0.5j * small).real - 0.5 * math.log(math.pi)
    out = np.where(arr >= _SERIES_MIN_T,
                   theta_series_derivative(np.maximum(arr, _SERIES_MIN_T)), exact)
    return float(out) if out.ndim == 0 else out


def lambert_w(x):
    """Principal branch W0 of the Lambert W function by Halley iteration.

    Accepts scalars or arrays with ``x >= -1/e``.
    """
    xa = np.asarray(x, dtype=float)
    if np.any(xa < -1.0 / math.e - 1e-15) or np.any(np.isnan(xa)):
        raise DomainError("lambert_w requires x >= -1/e")
    xa = np.maximum(xa, -1.0 / math.e)
    # initial guesses: branch-point series, log(1+x) and the asymptotic form
    p = np.sqrt(np.maximum(2.0 * (math.e * np.minimum(xa, 0.0) + 1.0), 0.0))
    w = np.where(xa < -0.25, -1.0 + p - p * p / 3.0 + 11.0 / 72.0 * p ** 3,
                 np.log1p(np.maximum(xa, -0.25)))
    big = xa > 3.0
    if np.any(big):
        lx = np.log(np.where(big, xa, 3.0))
        w = np.where(big, lx - np.log(lx), w)
    done = (xa == 0.0) | (xa <= -1.0 / math.e)
    w = np.where(xa == 0.0, 0.0, w)
    w = np.where(xa <= -1.0 / math.e, -1.0, w)
    for _ in range(60):
        if np.all(done):
            break
        ew = np.exp(w)
        f = w * ew - xa
        wp1 = w + 1.0
        with np.errstate(divide="ignore", invalid="ignore"):
            denom = ew * wp1 - (w + 2.0) * f / (2.0 * wp1)
            step = f / denom
        # w = -1 exactly is the branch point itself
        step = np.where(done | ~np.isfinite(step), 0.0, step)
        w = w - step
        done = done | (np.abs(step) <= 4e-16 * np.maximum(np.abs(w), 1e-300))
    return float(w) if w.ndim == 0 else w
