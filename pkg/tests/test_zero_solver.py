import math

import mpmath
import numpy as np
import pytest

from zetagaps import zero_solver
from zetagaps.errors import DomainError, MultipleCandidates
from zetagaps.zero_solver import seed_ordinate, solve_many, solve_transcendental
from zetagaps.zeta_engine import average_gap, count_zeros, scan_zeros


@pytest.mark.parametrize("n", [10, 10**3, 10**6])
def test_seed_back_substitution(n):
    t0 = seed_ordinate(n)
    lhs = 0.5 * t0 * math.log(t0 / (2 * math.pi * math.e)) - math.pi / 8
    assert abs(lhs - (n - 1.5) * math.pi) < 1e-8


def test_seed_near_ten_millionth_zero():
    t0 = seed_ordinate(10**7)
    zs = scan_zeros(t0 - 3.0, t0 + 3.0)
    t_n = {z.n: z.t for z in zs}[10**7]
    assert abs(t0 - t_n) < 0.5
    assert t_n == pytest.approx(4992381.01400318, abs=1e-6)


def test_seed_monotone(rng):
    ns = np.sort(rng.integers(2, 10**9, 200))
    s = seed_ordinate(ns)
    assert np.all(np.diff(s) >= 0)
    assert all(seed_ordinate(int(n) + 1) > seed_ordinate(int(n)) for n in ns[:50])


def test_seed_domain():
    with pytest.raises(DomainError):
        seed_ordinate(1)
    with pytest.raises(DomainError):
        solve_transcendental(1)


def test_second_zero(zeros_to_100):
    r = solve_transcendental(2, cross_validate=True)
    assert r.t == pytest.approx(zeros_to_100[1].t, abs=1e-6)
    assert r.t == pytest.approx(21.022, abs=1e-3)
    assert r.agreed_with_scan is True
    assert abs(r.residual) < 1e-6 and r.iterations <= 50


def test_residuals_up_to_ten_thousand():
    reps = solve_many(np.arange(2, 10001))
    assert max(abs(r.residual) for r in reps) < 1e-6
    assert max(r.iterations for r in reps) <= 50
    ts = np.array([r.t for r in reps])
    assert np.all(np.diff(ts) > 0)


def test_route_agreement_prefix():
    reps = solve_many(np.arange(2, 700))
    scan = {z.n: z.t for z in scan_zeros(15, reps[-1].t + 0.5)}
    assert max(abs(scan[r.n] - r.t) for r in reps) < 1e-8


def test_index_consistency(rng):
    # half the local gap on either side of the solved ordinate
    for n in rng.integers(3, 20000, 8):
        prev, r, nxt = solve_many([n - 1, n, n + 1])
        assert count_zeros(r.t + 0.5 * (nxt.t - r.t)) == n
        assert count_zeros(r.t - 0.5 * (r.t - prev.t)) == n - 1


def test_against_mpmath_zetazero():
    for n in (17, 1234, 99999):
        assert solve_transcendental(n).t == pytest.approx(float(mpmath.zetazero(n).imag), abs=1e-8)


def test_seed_quality():
    reps = solve_many(np.arange(10, 3000))
    errs = [abs(r.seed - r.t) / float(average_gap(r.t)) for r in reps]
    assert max(errs) < 2.0


def test_oscillation_fallback_still_converges():
    reps = solve_many(np.arange(2, 3000))
    osc = [r for r in reps if r.oscillated]
    assert osc, "expected some indices to need the bisection fallback"
    assert all(abs(r.residual) < 1e-6 for r in osc)


def test_cross_validation_multiple_candidates(monkeypatch):
    monkeypatch.setattr(zero_solver, "candidates_in_window",
                        lambda n, t, ladder=None: np.array([t - 0.1, t]))
    with pytest.raises(MultipleCandidates):
        solve_transcendental(50, cross_validate=True)


def test_cross_validation_window_has_one_candidate():
    for n in (3, 77, 1001):
        r = solve_transcendental(n, cross_validate=True)
        assert r.agreed_with_scan


def test_record_conversion():
    r = solve_transcendental(5)
    z = r.zero_record()
    assert z.n == 5 and z.t == r.t and z.residual_trans == r.residual
