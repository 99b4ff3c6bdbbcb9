"""Random access to the n-th zero by solving theta(t) + a(t) = (n - 3/2) pi.

Seeds come from the Lambert-W solution of the leading-order equation
(t/2) log(t / 2 pi e) - pi/8 = (n - 3/2) pi.  The iteration is a
quasi-Newton step with slope theta'(t), which brackets the solution; inside a
bracket where the tracked left-hand side stays within pi of the target the
equation is equivalent to Im[exp(i(theta - (n - 3/2) pi)) zeta(1/2 + delta + it)] = 0,
solved by Newton with a bisection safeguard.
"""

from __future__ import annotations

import dataclasses
import logging
import math

import numpy as np

from .arg_tracker import DEFAULT_LADDER, arg_limit_at_zeros, track_arg
from .errors import DomainError, MultipleCandidates, NoConvergence
from .special_fn import lambert_w, theta, theta_derivative
from .zeta_engine import (Method, ZeroRecord, average_gap, count_zeros_safe, sign_changes,
                          zeta_eval)

log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
MAX_ITER = 50
RESIDUAL_TOL = 1e-6
AGREEMENT_TOL = 1e-8
_T_MIN = 8.0


@dataclasses.dataclass
class SolveReport:
    n: int
    seed: float
    t: float
    iterations: int
    residual: float
    agreed_with_scan: bool | None = None
    oscillated: bool = False
    b: int = 0
    a: float = math.nan
    A: float = math.nan
    delta: float = math.nan

    def zero_record(self):
        return ZeroRecord(n=self.n, t=self.t, method=Method.TRANSCENDENTAL,
                          residual_trans=self.residual, bracket_width=math.nan)


def seed_ordinate(n):
    """t0 = 2 pi (n - 11/8) / W((n - 11/8) / e); accepts arrays."""
    n_arr = np.asarray(n)
    if np.any(n_arr < 2):
        raise DomainError("seed_ordinate requires n >= 2")
    m = n_arr.astype(float) - 11.0 / 8.0
    out = TWO_PI * m / lambert_w(m / math.e)
    return float(out) if np.ndim(out) == 0 else out


def _tracked_lhs(t, n, delta):
    a, _ = track_arg(zeta_eval, t, delta)
    return np.asarray(theta(t), dtype=float) + a - (n - 1.5) * math.pi


def _bracket(n, t0, delta):
    """Quasi-Newton on the tracked equation until a bracket with |F| < pi on both ends."""
    k = n.size
    lo = np.full(k, np.nan)
    hi = np.full(k, np.nan)
    flo = np.full(k, np.nan)
    fhi = np.full(k, np.nan)
    t = np.maximum(t0.copy(), _T_MIN)
    iters = np.zeros(k, dtype=int)
    flips = np.zeros(k, dtype=int)
    prev_sign = np.zeros(k)
    active = np.ones(k, dtype=bool)
    for _ in range(MAX_ITER):
        idx = np.nonzero(active)[0]
        if idx.size == 0:
            break
        f = _tracked_lhs(t[idx], n[idx], delta)
        iters[idx] += 1
        for j, i in enumerate(idx):
            if f[j] < 0 and (np.isnan(lo[i]) or t[i] > lo[i]):
                lo[i], flo[i] = t[i], f[j]
            elif f[j] >= 0 and (np.isnan(hi[i]) or t[i] < hi[i]):
                hi[i], fhi[i] = t[i], f[j]
            sgn = math.copysign(1.0, f[j])
            if prev_sign[i] and sgn != prev_sign[i]:
                flips[i] += 1
            prev_sign[i] = sgn
        ok = (~np.isnan(lo) & ~np.isnan(hi) & (flo > -math.pi) & (fhi < math.pi))
        active = ~ok
        idx = np.nonzero(active)[0]
        for i in idx:
            if not np.isnan(lo[i]) and not np.isnan(hi[i]):
                t[i] = 0.5 * (lo[i] + hi[i])
            else:
                fi = flo[i] if not np.isnan(lo[i]) else fhi[i]
                ti = lo[i] if not np.isnan(lo[i]) else hi[i]
                step = -fi / float(theta_derivative(max(ti, 7.0)))
                if abs(step) < 0.05 * float(average_gap(ti)):
                    step = math.copysign(0.05 * float(average_gap(ti)), step)
                t[i] = max(ti + step, _T_MIN)
    if np.any(active):
        raise NoConvergence(f"no bracket for n = {n[active].tolist()}")
    # one flip is the normal bracketing event; more means the steps cycled
    # and the bracket was closed by bisection
    return lo, hi, iters, flips >= 2


def _h(t, n, delta):
    """Im of exp(i(theta - (n - 3/2) pi)) zeta(1/2 + delta + it) and its t-derivative."""
    s = 0.5 + delta + 1j * t
    z, dz = zeta_eval(s, derivative=True)
    psi = np.asarray(theta(t), dtype=float) - (n - 1.5) * math.pi
    rot = np.exp(1j * psi)
    w = rot * z
    dw = rot * (1j * np.asarray(theta_derivative(t), dtype=float) * z + 1j * dz)
    return w.imag, dw.imag


def _polish(n, lo, hi, delta, iters):
    """Newton with bisection safeguard on the smooth form, lockstep over entries."""
    x = 0.5 * (lo + hi)
    done = np.zeros(x.size, dtype=bool)
    for _ in range(MAX_ITER):
        idx = np.nonzero(~done)[0]
        if idx.size == 0:
            break
        h, dh = _h(x[idx], n[idx], delta)
        iters[idx] += 1
        for j, i in enumerate(idx):
            if h[j] < 0:
                lo[i] = x[i]
            elif h[j] > 0:
                hi[i] = x[i]
            else:
                done[i] = True
                continue
            tol = max(1e-12, 4 * math.ulp(x[i]))
            newton = x[i] - h[j] / dh[j] if dh[j] != 0 else math.nan
            if abs(newton - x[i]) <= tol or hi[i] - lo[i] <= tol:
                done[i] = True
                continue
            if not (lo[i] < newton < hi[i]):
                newton = 0.5 * (lo[i] + hi[i])
            x[i] = newton
    if not np.all(done):
        raise NoConvergence(f"Newton polish failed for n = {n[~done].tolist()}")
    return x


def solve_many(ns, ladder=DEFAULT_LADDER):
    """Solve the zero equation for every index in ``ns`` (each >= 2)."""
    n = np.asarray(ns, dtype=np.int64)
    if n.size == 0:
        return []
    if np.any(n < 2):
        raise DomainError("solve_transcendental requires n >= 2")
    delta = min(ladder)
    seeds = np.asarray(seed_ordinate(n), dtype=float).reshape(n.shape)
    lo, hi, iters, osc = _bracket(n, seeds, delta)
    t = _polish(n, lo, hi, delta, iters)
    recs = arg_limit_at_zeros(t, ladder)
    out = []
    for i in range(n.size):
        r = recs[i]
        res = float(theta(t[i])) + r.a - (n[i] - 1.5) * math.pi
        if iters[i] > MAX_ITER:
            raise NoConvergence(f"n = {n[i]}: {iters[i]} iterations")
        out.append(SolveReport(n=int(n[i]), seed=float(seeds[i]), t=float(t[i]),
                               iterations=int(iters[i]), residual=res,
                               oscillated=bool(osc[i]), b=r.b, a=r.a, A=r.A, delta=r.delta))
    return out


def candidates_in_window(n, t, ladder=DEFAULT_LADDER):
    """Scan zeros within 2 pi / log t of ``t`` that satisfy the equation for index ``n``.

    A scan zero qualifies when theta(t_s) + a(t_s) - (n - 3/2) pi is within
    pi/2 of zero; the equation has a unique solution exactly when one
    qualifies.
    """
    w = TWO_PI / math.log(t)
    ts, _ = sign_changes(max(t - w, 7.0), t + w)
    if ts.size == 0:
        return ts
    recs = arg_limit_at_zeros(ts, ladder)
    res = np.array([float(theta(x)) + r.a - (n - 1.5) * math.pi for x, r in zip(ts, recs)])
    return ts[np.abs(res) < math.pi / 2]


def solve_transcendental(n, ladder=DEFAULT_LADDER, cross_validate=False):
    """Solve theta(t) + a(t) = (n - 3/2) pi for the n-th zero ordinate (n >= 2)."""
    report = solve_many([n], ladder)[0]
    if abs(report.residual) >= RESIDUAL_TOL:
        raise NoConvergence(f"n = {n}: residual {report.residual}")
    if cross_validate:
        cands = candidates_in_window(n, report.t, ladder)
        if cands.size != 1:
            raise MultipleCandidates(
                f"n = {n}: {cands.size} scan zeros satisfy the equation near t = {report.t}")
        report.agreed_with_scan = bool(abs(cands[0] - report.t) < AGREEMENT_TOL)
    return report
