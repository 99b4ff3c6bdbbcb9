import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetagaps.arg_tracker import (ArgRecord, arg_at, arg_limit_at_zero, arg_limit_at_zeros,
                                  branch_delta, decompose, make_record, richardson_ladder,
                                  track_arg, trans_residual)
from zetagaps.errors import DomainError, NoConvergence, StepFail
from zetagaps.special_fn import theta
from zetagaps.zeta_engine import ZeroRecord, scan_zeros

TWO_PI = 2 * math.pi


def test_below_first_zero_principal():
    for t in (1.0, 5.0, 10.0, 14.0):
        for d in (0.5, 1e-2, 1e-6):
            r = arg_at(t, d)
            assert abs(r.a) < math.pi and r.b == 0


def test_at_first_zero_finite(first_zero):
    r = arg_at(first_zero, 1e-5)
    assert math.isfinite(r.a) and r.A == r.a and r.b == 0


def test_principal_branch_small_heights(zeros_to_100):
    ts = np.array([z.t for z in zeros_to_100])
    mids = 0.5 * (ts[1:] + ts[:-1])
    for t in mids:
        assert abs(arg_at(t, 1e-5).a) < math.pi


def test_arg_at_domain():
    with pytest.raises(DomainError):
        arg_at(0.0, 1e-3)
    with pytest.raises(DomainError):
        arg_at(10.0, 0.0)
    with pytest.raises(DomainError):
        arg_at(10.0, 0.6)


def test_step_fail_on_path_zero():
    # a root at sigma = 2 on the horizontal path at height 5
    fn = lambda s: s - (2.0 + 5.0j)
    with pytest.raises(StepFail):
        track_arg(fn, [5.0], 1e-3)


def test_path_independence():
    for t in (37.5, 333.3, 7.5e4):
        a1 = arg_at(t, 1e-4).a
        a2 = arg_at(t, 1e-4, step_scale=2.0).a
        assert abs(a1 - a2) < 1e-6


def test_extended_precision_agrees():
    assert abs(arg_at(123.4, 1e-3, precision="extended").a - arg_at(123.4, 1e-3).a) < 1e-9


def test_first_zero_trans_equation(first_zero):
    r = arg_limit_at_zero(ZeroRecord(n=1, t=first_zero))
    assert abs(float(theta(first_zero)) + r.a + math.pi / 2) < 1e-6
    assert r.delta <= 1e-4


def test_ladder_stabilises_up_to_1000():
    zs = scan_zeros(10, 1420)
    assert zs[-1].n >= 1000
    recs = arg_limit_at_zeros([z.t for z in zs])
    res = [trans_residual(z.n, z.t, r.a) for z, r in zip(zs, recs)]
    assert max(abs(x) for x in res) < 1e-6


def test_principal_branch_in_figure_window_sample():
    zs = scan_zeros(4992370.0, 4992381.1)
    assert zs[-1].n == 10**7
    recs = arg_limit_at_zeros([z.t for z in zs])
    assert all(r.b == 0 for r in recs)
    assert max(abs(trans_residual(z.n, z.t, r.a)) for z, r in zip(zs, recs)) < 1e-6


def test_no_convergence_away_from_a_zero():
    # the ladder converges to arg zeta(1/2 + 20i), which is not arg zeta'(rho)
    with pytest.raises(NoConvergence):
        arg_limit_at_zeros([20.0])


def test_richardson_ladder():
    d = (1e-3, 1e-4, 1e-5, 1e-6)
    lim, used = richardson_ladder([1.0 + 3 * x for x in d], d)
    assert lim == pytest.approx(1.0, abs=1e-12) and used in d
    lim, _ = richardson_ladder([0.0, 1.0, -1.0, 1.0], d)
    assert lim is None


def test_branch_delta(zeros_to_100):
    zs = zeros_to_100
    assert branch_delta(zs[3], zs[4]) == 0
    total = sum(branch_delta(a, b) for a, b in zip(zs[:10], zs[1:11]))
    assert total == arg_limit_at_zero(zs[10]).b - arg_limit_at_zero(zs[0]).b
    with pytest.raises(DomainError):
        branch_delta(zs[0], zs[2])


def test_known_branch_change():
    # n = 28813 sits just beyond -pi: a = A + 2 pi b with b = -1
    zs = scan_zeros(24854.0, 24858.0)
    by_n = {z.n: z for z in zs}
    assert branch_delta(by_n[28812], by_n[28813]) == -1
    assert branch_delta(by_n[28813], by_n[28814]) == 1


def test_jump_by_pi_at_zeros(zeros_to_100):
    for z in zeros_to_100[:20]:
        jumps = []
        for eps in (1e-3, 1e-4, 1e-5):
            lo = arg_at(z.t - eps, 1e-9).a
            hi = arg_at(z.t + eps, 1e-9).a
            jumps.append(hi - lo)
        assert abs(jumps[-1] - math.pi) < 1e-3
        assert abs(jumps[-1] - math.pi) <= abs(jumps[0] - math.pi) + 1e-9


def test_record_rejects_boundary():
    with pytest.raises(DomainError):
        ArgRecord(t=1.0, delta=1e-3, a=math.pi, A=math.pi, b=0)
    with pytest.raises(DomainError):
        decompose(math.pi)


@settings(max_examples=300, deadline=None)
@given(st.floats(min_value=-200.0, max_value=200.0).filter(
    lambda a: abs(abs(math.remainder(a, TWO_PI)) - math.pi) > 1e-9))
def test_decomposition_identity(a):
    rec = make_record(1.0, 1e-3, a)
    assert rec.a - rec.A - TWO_PI * rec.b == 0
    assert -math.pi < rec.A < math.pi
    assert abs(rec.a - a) <= 1e-12 * max(1.0, abs(a))
