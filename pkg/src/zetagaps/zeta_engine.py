"""Evaluation of zeta on and near the critical line, zero scanning, N(T)."""

from __future__ import annotations

import dataclasses
import enum
import logging
import math

import mpmath
import numpy as np

from . import riemann_siegel as rs
from .errors import DomainError, NonInteger, Unresolved
from .special_fn import EXTENDED_DPS, theta

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
# Above this height the continued Riemann-Siegel formula replaces Euler-Maclaurin.
RS_MIN_HEIGHT = 200.0

# B_2, B_4, ..., B_16
_BERNOULLI = (1 / 6, -1 / 30, 1 / 42, -1 / 30, 5 / 66, -691 / 2730, 7 / 6, -3617 / 510)
_EM_TERMS = 8


class Method(enum.Enum):
    SIGN_SCAN = "scan"
    TRANSCENDENTAL = "trans"
    INGESTED = "ingest"


@dataclasses.dataclass(frozen=True)
class ZetaPoint:
    sigma: float
    t: float
    value: complex


@dataclasses.dataclass(frozen=True)
class ZeroRecord:
    n: int
    t: float
    method: Method = Method.SIGN_SCAN
    residual_trans: float = math.nan
    bracket_width: float = math.nan


def em_terms(t):
    """Default Euler-Maclaurin truncation N = max(10, ceil(2|t|))."""
    return np.maximum(10, np.ceil(2.0 * np.abs(t))).astype(np.int64)


def zeta_em(s, n_terms=None, derivative=False):
    """Vectorised Euler-Maclaurin evaluation of zeta(s) (and zeta'(s)).

    Uses sum_{n<N} n^-s + N^(1-s)/(s-1) + N^-s/2 plus eight Bernoulli terms.
    """
    s = np.asarray(s, dtype=complex)
    shape = s.shape
    s = s.ravel()
    nn = em_terms(s.imag) if n_terms is None else np.broadcast_to(
        np.asarray(n_terms, dtype=np.int64), s.shape)
    nmax = int(nn.max()) if s.size else 0
    n = np.arange(1, nmax, dtype=float)
    ln = np.log(n)
    out = np.empty_like(s)
    dout = np.empty_like(s) if derivative else None
    for sl in rs._row_blocks(s.size, max(nmax, 1)):
        ss = s[sl]
        big_n = nn[sl].astype(float)
        mask = n[None, :] < big_n[:, None]
        terms = np.where(mask, np.exp(-ss[:, None] * ln[None, :]), 0.0)
        lnn = np.log(big_n)
        npow = np.exp(-ss * lnn)  # N^-s
        head = terms.sum(axis=1) + big_n * npow / (ss - 1.0) + 0.5 * npow
        # Bernoulli tail: B_2k/(2k)! s(s+1)...(s+2k-2) N^(-s-2k+1)
        poch = ss.copy()
        dpoch = np.ones_like(ss)
        npk = npow / big_n
        fact = 2.0
        tail = 0.0
        dtail = 0.0
        for k, b in enumerate(_BERNOULLI, start=1):
            coef = b / fact
            tail = tail + coef * poch * npk
            if derivative:
                dtail = dtail + coef * (dpoch - lnn * poch) * npk
            # advance to the next k
            j1 = ss + 2 * k - 1
            j2 = ss + 2 * k
            if derivative:
                dpoch = dpoch * j1 * j2 + poch * (j1 + j2)
            poch = poch * j1 * j2
            npk = npk / (big_n * big_n)
            fact *= (2 * k + 1) * (2 * k + 2)
        out[sl] = head + tail
        if derivative:
            dhead = (-(terms * ln[None, :]).sum(axis=1)
                     - big_n * npow * (lnn / (ss - 1.0) + 1.0 / (ss - 1.0) ** 2)
                     - 0.5 * lnn * npow)
            dout[sl] = dhead + dtail
    if derivative:
        return out.reshape(shape), dout.reshape(shape)
    return out.reshape(shape)


def zeta_eval(s, derivative=False):
    """Fast zeta(s) on 1/2 <= Re s <= 10: Euler-Maclaurin low, Riemann-Siegel high."""
    s = np.asarray(s, dtype=complex)
    high = s.imag >= RS_MIN_HEIGHT
    if np.all(high):
        return rs.zeta_rs(s, derivative=derivative)
    if not np.any(high):
        return zeta_em(s, derivative=derivative)
    out = np.empty_like(s)
    dout = np.empty_like(s)
    res_hi = rs.zeta_rs(s[high], derivative=derivative)
    res_lo = zeta_em(s[~high], derivative=derivative)
    if derivative:
        out[high], dout[high] = res_hi
        out[~high], dout[~high] = res_lo
        return out, dout
    out[high] = res_hi
    out[~high] = res_lo
    return out


def z_values(t, derivative=False):
    """Z(t) (and Z'(t)) for real arrays; Euler-Maclaurin below RS_MIN_HEIGHT."""
    t = np.asarray(t, dtype=float)
    low = t < RS_MIN_HEIGHT
    if not np.any(low):
        return rs.hardy_z_rs(t, derivative=derivative)
    z = np.empty_like(t)
    dz = np.empty_like(t)
    if np.any(~low):
        res = rs.hardy_z_rs(t[~low], derivative=derivative)
        if derivative:
            z[~low], dz[~low] = res
        else:
            z[~low] = res
    tl = t[low]
    th = np.asarray(theta(tl), dtype=float)
    rot = np.exp(1j * th)
    if derivative:
        f, df = zeta_em(0.5 + 1j * tl, derivative=True)
        z[low] = (rot * f).real
        dth = np.asarray(_theta_prime_any(tl), dtype=float)
        dz[low] = (rot * (1j * dth * f + 1j * df)).real
        return z, dz
    z[low] = (rot * zeta_em(0.5 + 1j * tl)).real
    return z


def _theta_prime_any(t):
    from scipy import special
    return 0.5 * special.psi(0.25 + 0.5j * np.asarray(t)).real - 0.5 * math.log(math.pi)


def hardy_z(t, precision="double"):
    """Hardy's Z(t) = exp(i theta(t)) zeta(1/2 + it).

    Riemann-Siegel main sum of floor(sqrt(t/2pi)) terms with the corrections
    C0..C4 from height 200 up; below that the asymptotic remainder is too
    coarse and Euler-Maclaurin is used instead. ``t`` may be an array.
    """
    if precision == "extended":
        t = mpmath.mpf(t)
        if t <= TWO_PI:
            raise DomainError("hardy_z requires t > 2*pi")
        with mpmath.workdps(EXTENDED_DPS):
            return mpmath.siegelz(t)
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= TWO_PI):
        raise DomainError("hardy_z requires t > 2*pi")
    out = z_values(arr)
    return float(out) if out.ndim == 0 else out


def hardy_z_derivative(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= TWO_PI):
        raise DomainError("hardy_z requires t > 2*pi")
    z, dz = z_values(arr, derivative=True)
    return (float(z), float(dz)) if z.ndim == 0 else (z, dz)


def zeta_off_line(sigma, t, n_terms=None, precision="double"):
    """zeta(sigma + it) by Euler-Maclaurin summation for sigma in [1/2, 10]."""
    if not 0.5 <= sigma <= 10.0 or t < 0:
        raise DomainError("zeta_off_line requires 1/2 <= sigma <= 10 and t >= 0")
    if sigma == 1.0 and t == 0.0:
        raise DomainError("pole of zeta at s = 1")
    if precision == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            return mpmath.zeta(mpmath.mpc(sigma, t))
    return complex(zeta_em(np.array([complex(sigma, t)]), n_terms=n_terms)[0])


def average_gap(t):
    """Mean spacing 2 pi / log(t / 2 pi) of zeros near height t."""
    return TWO_PI / np.log(np.maximum(np.asarray(t, dtype=float), 2 * TWO_PI) / TWO_PI)


def count_zeros(T, precision="double"):
    """Number of zeros with 0 < Im rho <= T from N(T) = theta(T)/pi + 1 + S(T).

    S(T) comes from horizontal continuation of arg zeta(sigma + iT). The
    unrounded value must sit within 1e-3 of an integer.
    """
    from .arg_tracker import arg_at

    if T <= 0:
        raise DomainError("count_zeros requires T > 0")
    if T < 1.0:
        return 0
    a = arg_at(T, 1e-9, precision=precision).a
    value = float(theta(T)) / math.pi + 1.0 + a / math.pi
    nearest = round(value)
    if abs(value - nearest) > 1e-3:
        raise NonInteger(f"N({T}) evaluates to {value:.6f}")
    return int(nearest)


def count_zeros_safe(T):
    """count_zeros, nudging T when it lands too close to a zero."""
    for k in range(8):
        for sgn in (1, -1):
            shift = 0.0 if k == 0 else sgn * 1e-6 * 10 ** k
            try:
                return count_zeros(T + shift), T + shift
            except NonInteger:
                if k == 0:
                    break
    raise NonInteger(f"could not evaluate N(T) near {T}")


def _grid(t_lo, t_hi, fraction, gapfun=None):
    gapfun = average_gap if gapfun is None else gapfun
    pts = [np.array([t_lo])]
    start = t_lo
    while start < t_hi:
        h = fraction * float(gapfun(min(t_hi, start + 50.0)))
        count = int(min(max(1, math.ceil((min(t_hi, start + 50.0) - start) / h)), 200000))
        seg = start + h * np.arange(1, count + 1)
        seg = seg[seg < t_hi]
        pts.append(seg)
        start = start + h * count
    pts.append(np.array([t_hi]))
    return np.unique(np.concatenate(pts))


def _bisect(lo, hi, zlo, tol, zfun=None):
    zfun = z_values if zfun is None else zfun
    lo = lo.copy()
    hi = hi.copy()
    for _ in range(80):
        if np.all(hi - lo <= tol):
            break
        mid = 0.5 * (lo + hi)
        zm = zfun(mid)
        left = np.sign(zm) == np.sign(zlo)
        lo = np.where(left, mid, lo)
        zlo = np.where(left, zm, zlo)
        hi = np.where(left, hi, mid)
    return lo, hi


def _refine_dips(grid, z, max_halvings, zfun=None):
    """Subdivide around local minima of |Z| that show no sign change."""
    zfun = z_values if zfun is None else zfun
    az = np.abs(z)
    same = np.sign(z[:-2]) == np.sign(z[2:])
    same &= np.sign(z[1:-1]) == np.sign(z[:-2])
    dips = np.nonzero(same & (az[1:-1] < az[:-2]) & (az[1:-1] < az[2:]))[0] + 1
    if dips.size == 0:
        return grid, z
    extra = []
    for i in dips:
        lo, hi = grid[i - 1], grid[i + 1]
        for level in range(1, max_halvings + 1):
            pts = np.linspace(lo, hi, 2 ** (level + 1) + 1)[1:-1]
            zp = zfun(pts)
            if np.any(np.sign(zp) != np.sign(z[i])):
                extra.append(pts)
                break
    if not extra:
        return grid, z
    pts = np.concatenate(extra)
    grid2 = np.concatenate([grid, pts])
    z2 = np.concatenate([z, zfun(pts)])
    order = np.argsort(grid2, kind="stable")
    return grid2[order], z2[order]


def sign_changes(t_lo, t_hi, fraction=0.125, max_halvings=6, tol=1e-9, zfun=None, gapfun=None):
    """Refined sign changes of Z on [t_lo, t_hi]: (ordinates, bracket widths).

    ``zfun``/``gapfun`` substitute another real function and its mean zero
    spacing (used for Dirichlet L-functions).
    """
    zfun = z_values if zfun is None else zfun
    grid = _grid(t_lo, t_hi, fraction, gapfun)
    z = zfun(grid)
    grid, z = _refine_dips(grid, z, max_halvings, zfun)
    idx = np.nonzero(np.sign(z[:-1]) * np.sign(z[1:]) < 0)[0]
    if idx.size == 0:
        return np.empty(0), np.empty(0)
    lo, hi = _bisect(grid[idx], grid[idx + 1], z[idx], tol, zfun)
    return 0.5 * (lo + hi), hi - lo


def scan_zeros(t_lo, t_hi, fraction=0.125, max_halvings=6, tol=1e-9, n_start=None):
    """All zeros of Z on [t_lo, t_hi], refined by bisection to width ``tol``.

    Indices come from the counting formula at ``t_lo``; the number found must
    equal N(t_hi) - N(t_lo), otherwise the grid is halved (up to
    ``max_halvings`` times) before giving up with ``Unresolved``.
    """
    if not TWO_PI < t_lo < t_hi:
        raise DomainError("scan_zeros requires 2*pi < t_lo < t_hi")
    if n_start is None:
        n_lo, t_lo = count_zeros_safe(t_lo)
    else:
        n_lo = n_start
    n_hi, t_hi = count_zeros_safe(t_hi)
    expected = n_hi - n_lo
    frac = fraction
    for _ in range(max_halvings + 1):
        ts, widths = sign_changes(t_lo, t_hi, frac, max_halvings, tol)
        if ts.size == expected:
            return [ZeroRecord(n=n_lo + k + 1, t=float(x), method=Method.SIGN_SCAN,
                               bracket_width=float(w))
                    for k, (x, w) in enumerate(zip(ts, widths))]
        log.info("scan [%g, %g]: %d sign changes, %d expected; halving grid",
                 t_lo, t_hi, ts.size, expected)
        frac /= 2
    raise Unresolved(f"scan of [{t_lo}, {t_hi}] found {ts.size} zeros, counting formula gives {expected}")
