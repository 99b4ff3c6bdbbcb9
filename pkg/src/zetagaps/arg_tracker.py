"""The argument a(t) of zeta approached from the right of the critical line.

The unreduced argument is defined by continuous variation along the
horizontal path sigma = 10 -> 1/2 + delta at fixed height (the usual S(T)
convention).  At sigma = 10 the principal value is exact because
|zeta(10 + it) - 1| < 2^-9.
"""

from __future__ import annotations

import dataclasses
import math

import mpmath
import numpy as np

from .errors import DomainError, NoConvergence, StepFail
from .special_fn import EXTENDED_DPS, theta, theta_derivative
from .zeta_engine import ZeroRecord, zeta_eval

TWO_PI = 2.0 * math.pi
SIGMA_START = 10.0
DEFAULT_LADDER = (1e-3, 1e-4, 1e-5, 1e-6)
LADDER_TOL = 1e-4
# Largest principal-value jump accepted between neighbouring path samples.
MAX_STEP_ARG = math.pi / 4
MAX_HALVINGS = 20


@dataclasses.dataclass(frozen=True)
class ArgRecord:
    t: float
    delta: float
    a: float
    A: float
    b: int

    def __post_init__(self):
        if not -math.pi < self.A < math.pi:
            raise DomainError(f"principal part {self.A} outside (-pi, pi)")


def decompose(a):
    """Split an unreduced argument into (A, b) with a = A + 2 pi b, -pi < A < pi."""
    b = round(a / TWO_PI)
    A = a - TWO_PI * b
    if A <= -math.pi or A >= math.pi:
        raise DomainError(f"argument {a} lies on a branch boundary")
    return A, int(b)


def make_record(t, delta, a):
    A, b = decompose(a)
    return ArgRecord(t=float(t), delta=float(delta), a=A + TWO_PI * b, A=A, b=b)


def wrap(x):
    """Reduce to (-pi, pi]."""
    return x - TWO_PI * np.round(np.asarray(x) / TWO_PI)


def path_offsets(u_end, checkpoints=(), step_scale=1.0):
    """Descending offsets u = sigma - 1/2 from 9.5 down to ``u_end``."""
    h = 0.1 / step_scale
    nodes = [np.arange(2.0, 9.5, 0.5 / step_scale), np.arange(h, 2.0, h), [9.5]]
    u = 0.05
    geo = []
    while u > u_end:
        geo.append(u)
        u /= 4.0 ** (1.0 / step_scale)
    nodes += [geo, list(checkpoints), [u_end]]
    grid = np.unique(np.concatenate([np.asarray(x, dtype=float) for x in nodes]))
    grid = grid[grid >= u_end]
    return grid[::-1]


def track_arg(fn, t, u_end, checkpoints=(), step_scale=1.0, sigma_start=SIGMA_START):
    """Continuously tracked arg fn(1/2 + u + i t) from u = sigma_start - 1/2 down to u_end.

    Parameters
    ----------
    fn : callable
        Vectorised analytic function of complex ``s``.
    t : array_like
        Heights, one path per entry.
    u_end : float
        Final offset from the critical line (> 0).
    checkpoints : sequence of float
        Extra offsets at which the tracked value is also reported.

    Returns
    -------
    end : ndarray
        Tracked argument at ``u_end`` for each height.
    at_checkpoints : ndarray, shape (len(t), len(checkpoints))
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    offsets = path_offsets(u_end, checkpoints, step_scale)
    offsets = offsets[offsets <= sigma_start - 0.5]
    if offsets[0] < sigma_start - 0.5:
        offsets = np.concatenate([[sigma_start - 0.5], offsets])
    sig = 0.5 + offsets
    vals = fn(sig[None, :] + 1j * t[:, None])
    if np.any(vals == 0) or not np.all(np.isfinite(vals)):
        raise StepFail("evaluator returned zero or non-finite value on the path")
    steps = np.angle(vals[:, 1:] / vals[:, :-1])
    cum = np.empty((t.size, offsets.size))
    cum[:, 0] = np.angle(vals[:, 0])
    cum[:, 1:] = cum[:, :1] + np.cumsum(steps, axis=1)
    bad_rows = np.nonzero(np.any(np.abs(steps) > MAX_STEP_ARG, axis=1))[0]
    for r in bad_rows:
        cum[r] = _refine_row(fn, t[r], offsets, vals[r])
    cp_index = [int(np.nonzero(offsets == c)[0][0]) for c in checkpoints]
    return cum[:, -1], cum[:, cp_index]


def _refine_row(fn, t, offsets, vals):
    out = np.empty(offsets.size)
    out[0] = np.angle(vals[0])
    for j in range(1, offsets.size):
        out[j] = out[j - 1] + _segment_change(fn, t, offsets[j - 1], offsets[j], vals[j - 1], vals[j], 0)
    return out


def _segment_change(fn, t, u0, u1, v0, v1, depth):
    step = float(np.angle(v1 / v0))
    if abs(step) <= MAX_STEP_ARG:
        return step
    if depth >= MAX_HALVINGS:
        raise StepFail(f"argument tracking at t={t} did not resolve near sigma={0.5 + u1}")
    um = 0.5 * (u0 + u1)
    vm = complex(fn(np.array([0.5 + um + 1j * t]))[0])
    if vm == 0:
        raise StepFail(f"zero of the evaluator on the path at t={t}")
    return (_segment_change(fn, t, u0, um, v0, vm, depth + 1)
            + _segment_change(fn, t, um, u1, vm, v1, depth + 1))


def _zeta_mp(s):
    with mpmath.workdps(EXTENDED_DPS):
        return np.array([complex(mpmath.zeta(mpmath.mpc(x.real, x.imag))) for x in np.ravel(s)]).reshape(np.shape(s))


def arg_at(t, delta, precision="double", step_scale=1.0):
    """a(t) at offset ``delta``: arg zeta(1/2 + delta + it), horizontally tracked."""
    if not t > 0:
        raise DomainError("arg_at requires t > 0")
    if not 0 < delta <= 0.5:
        raise DomainError("arg_at requires 0 < delta <= 1/2")
    fn = _zeta_mp if precision == "extended" else zeta_eval
    end, _ = track_arg(fn, [t], delta, step_scale=step_scale)
    return make_record(t, delta, float(end[0]))


def arg_at_many(t, delta, checkpoints=()):
    """Vectorised tracked arguments at many heights (double precision)."""
    return track_arg(zeta_eval, t, delta, checkpoints)


def _limit_principal(t, precision="double"):
    """Principal arg zeta'(rho) and the offset estimate (t - t_rho) at a refined zero."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    s = 0.5 + 1j * t
    if precision == "extended":
        with mpmath.workdps(EXTENDED_DPS):
            z = np.array([complex(mpmath.zeta(mpmath.mpc(0.5, x))) for x in t])
            dz = np.array([complex(mpmath.zeta(mpmath.mpc(0.5, x), derivative=1)) for x in t])
    else:
        z, dz = zeta_eval(s, derivative=True)
    # zeta(rho + i eps) ~ zeta'(rho) * i eps
    eps = (z / dz).imag
    return np.angle(dz), eps


def richardson_ladder(values, deltas, tol=LADDER_TOL):
    """Extrapolate ladder values linearly in delta; return (limit, delta used).

    Successive extrapolations must agree within ``tol``.
    """
    ext = []
    for k in range(1, len(deltas)):
        d0, d1 = deltas[k - 1], deltas[k]
        ext.append((d0 * values[k] - d1 * values[k - 1]) / (d0 - d1))
        if len(ext) >= 2 and abs(ext[-1] - ext[-2]) < tol:
            return ext[-1], d1
    return None, deltas[-1]


def arg_limit_at_zeros(t, ladder=DEFAULT_LADDER, precision="double"):
    """Batch form of :func:`arg_limit_at_zero` over refined zero ordinates.

    The ladder arg zeta(1/2 + delta + i t) is tracked along one horizontal
    path per zero, corrected for the residual offset of ``t`` from the exact
    zero (the term arg(delta + i eps)) and Richardson-extrapolated.  The
    principal part of the limit is the analytic value arg zeta'(rho); the
    ladder supplies the branch and must agree with it.
    """
    t = np.atleast_1d(np.asarray(t, dtype=float))
    ladder = tuple(sorted(ladder, reverse=True))
    fn = _zeta_mp if precision == "extended" else zeta_eval
    _, rungs = track_arg(fn, t, ladder[-1], checkpoints=ladder)
    phi, eps = _limit_principal(t, precision)
    records = []
    for i in range(t.size):
        corrected = [rungs[i, k] - math.atan2(eps[i], d) for k, d in enumerate(ladder)]
        limit, used = richardson_ladder(corrected, ladder)
        if limit is None:
            raise NoConvergence(f"delta ladder did not stabilise at t={t[i]!r}")
        A = float(wrap(phi[i]))
        b = round((limit - A) / TWO_PI)
        if abs(limit - (A + TWO_PI * b)) > 1e-3:
            raise NoConvergence(
                f"ladder limit {limit} disagrees with arg zeta'(rho) = {A} (mod 2pi) at t={t[i]!r}")
        records.append(ArgRecord(t=float(t[i]), delta=float(used), a=A + TWO_PI * b, A=A, b=int(b)))
    return records


def arg_limit_at_zero(zr: ZeroRecord, ladder=DEFAULT_LADDER, precision="double"):
    """a(t_n) = lim_{delta -> 0+} arg zeta(1/2 + delta + i t_n) at a refined zero."""
    try:
        return arg_limit_at_zeros([zr.t], ladder, precision)[0]
    except NoConvergence:
        if precision == "extended":
            raise
        return arg_limit_at_zeros([zr.t], ladder, "extended")[0]


def branch_delta(z_lo: ZeroRecord, z_hi: ZeroRecord, ladder=DEFAULT_LADDER):
    """b(z_hi) - b(z_lo) for consecutive zeros."""
    if z_hi.n != z_lo.n + 1:
        raise DomainError("branch_delta needs consecutive indices")
    return arg_limit_at_zero(z_hi, ladder).b - arg_limit_at_zero(z_lo, ladder).b


def trans_residual(n, t, a):
    """theta(t) + a - (n - 3/2) pi."""
    return float(theta(t)) + a - (n - 1.5) * math.pi
