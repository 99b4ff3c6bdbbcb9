import io
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zetagaps.arg_tracker import arg_limit_at_zeros
from zetagaps.errors import DomainError, GapInIndices, MalformedLine
from zetagaps.gap_stats import (CSV_FIELDS, GapRecord, SweepSummary, gap, make_gap, merge,
                                read_csv, summarize, verify_chain, write_csv)
from zetagaps.zeta_engine import ZeroRecord

TWO_PI_E = 2 * math.pi * math.e


def synthetic(n, t, dt, a0=0.0, a1=0.0, b0=0, b1=0):
    return make_gap(n, t, t + dt, a0, a1, b0, b1)


def random_records(rng, n0, count, t0=1e3):
    t = t0 + np.cumsum(rng.uniform(0.01, 3.0, count + 1))
    a = rng.uniform(-3.0, 3.0, count + 1)
    b = rng.integers(-2, 3, count + 1)
    return [make_gap(n0 + k, t[k], t[k + 1], a[k], a[k + 1], b[k], b[k + 1]).quantized()
            for k in range(count)]


def test_degenerate_gap_rejected():
    with pytest.raises(DomainError):
        synthetic(1, 100.0, 0.0)


def test_unit_normalized_gap():
    t = TWO_PI_E * math.e
    rec = make_gap(5, t, t + 2 * math.pi / math.log(t / TWO_PI_E), 0, 0, 0, 0)
    assert rec.g_prime == pytest.approx(1.0, rel=1e-15)


def test_gap_from_zero_records(zeros_to_100):
    z0, z1 = zeros_to_100[4], zeros_to_100[5]
    r0, r1 = arg_limit_at_zeros([z0.t, z1.t])
    rec = gap(z0, z1, r0, r1)
    assert rec.n == 5 and rec.db == 0
    assert rec.g == pytest.approx((z1.t - z0.t) * math.log(z0.t) / (2 * math.pi), rel=1e-15)
    with pytest.raises(DomainError):
        gap(z0, ZeroRecord(n=8, t=z1.t), r0, r1)


def test_chain_passes_without_branch_change():
    rec = synthetic(10, 1e4, 0.5, 0.3, -0.2)
    v = verify_chain(rec)
    assert rec.g_prime < 3 and v.gpb1 and v.gpb2 and v.bup and v.ok


def test_chain_flags_exactly_gpb1():
    good = synthetic(10, 1e4, 0.5, 0.3, -0.2)
    # push a_next up until the slack of (gpb1) is negative, nothing else changes
    bad = make_gap(10, good.t_n, good.t_next, good.a_n, good.a_n + math.pi * 1.05, 0, 0)
    v = verify_chain(bad)
    assert not v.gpb1 and v.gpb2 and v.bup and v.hyp2


def test_chain_flags_branch_inequalities():
    v = verify_chain(synthetic(10, 1e4, 0.5, 0, 0, 0, 2))
    assert not v.bup and not v.hyp2
    v = verify_chain(synthetic(10, 1e4, 0.5, 0, 0, 2, 0))
    assert v.bup and not v.hyp2


def test_g_minus_g_prime_identity(rng):
    for rec in random_records(rng, 1, 200):
        raw = make_gap(rec.n, rec.t_n, rec.t_next, 0, 0, 0, 0)
        expect = (raw.t_next - raw.t_n) * math.log(TWO_PI_E) / (2 * math.pi)
        assert abs((raw.g - raw.g_prime) - expect) <= 1e-12 * expect
        assert raw.g > raw.g_prime > 0


def test_summarize_gap_in_indices(rng):
    recs = random_records(rng, 1, 10)
    with pytest.raises(GapInIndices):
        summarize(recs[:3] + recs[4:])
    with pytest.raises(GapInIndices):
        summarize(recs[:3] + recs[2:])


def test_summarize_fields(rng):
    recs = random_records(rng, 7, 500)
    s = summarize(recs)
    gp = np.array([r.g_prime for r in recs])
    assert s.range == [7, 506] and s.count == 500
    assert s.max_g_prime == gp.max() and s.argmax_n == recs[int(np.argmax(gp))].n
    assert s.mean_g_prime == math.fsum(gp) / 500
    assert s.max_g >= s.max_g_prime
    assert sum(s.histogram) == 500
    assert s.count_bound3_violations == int(np.sum(gp >= 3))
    assert s.db_max == max(-r.db for r in recs)
    assert s.min_slack_gpb1 == min(r.slack_gpb1 for r in recs)


def test_histogram_overflow_bin():
    recs = [synthetic(1, 1e4, 10.0), synthetic(2, 1e4 + 10, 0.001)]
    s = summarize(recs)
    assert s.histogram[-1] == 1 and s.histogram[0] == 1


def test_json_schema(rng):
    d = summarize(random_records(rng, 2, 50)).to_json()
    assert set(d) == {"range", "max_g_prime", "argmax_n", "max_g", "mean_g_prime", "db_max",
                      "violations", "histogram"}
    assert set(d["violations"]) == {"gpb1", "bound3", "hyp2"}
    for k in ("max_g_prime", "max_g", "mean_g_prime"):
        assert len(repr(d[k]).replace(".", "").replace("-", "").lstrip("0")) <= 16


def test_state_round_trip(rng):
    s = summarize(random_records(rng, 2, 300))
    assert SweepSummary.from_state(s.to_state()) == s


def test_csv_round_trip_reproduces_summary(rng):
    recs = random_records(rng, 2, 400)
    buf = io.StringIO()
    write_csv(recs, buf)
    buf.seek(0)
    back = list(read_csv(buf))
    assert back == recs
    assert summarize(back) == summarize(recs)
    assert buf.getvalue().splitlines()[0] == ",".join(CSV_FIELDS)


def test_malformed_csv_row():
    buf = io.StringIO("n,t_n\n1,2,3\n")
    with pytest.raises(MalformedLine):
        list(read_csv(buf))


def test_gpb2_contrapositive(rng):
    for rec in random_records(rng, 1, 2000):
        if rec.g_prime >= 3 and verify_chain(rec).gpb1 and abs(rec.a_n) < math.pi and abs(rec.a_next) < math.pi:
            pytest.fail("a record with g' >= 3 and no branch change satisfied (gpb1)")


def test_running_max_non_decreasing(rng):
    recs = random_records(rng, 1, 300)
    acc = SweepSummary()
    prev = -math.inf
    for r in recs:
        acc = summarize([r], acc)
        assert acc.max_g_prime >= prev
        prev = acc.max_g_prime


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(1, 40), st.integers(1, 40),
       st.integers(1, 40))
def test_merge_associative(seed, k1, k2, k3):
    rng = np.random.default_rng(seed)
    recs = random_records(rng, 3, k1 + k2 + k3)
    a = summarize(recs[:k1])
    b = summarize(recs[k1:k1 + k2])
    c = summarize(recs[k1 + k2:])
    assert merge(merge(a, b), c) == merge(a, merge(b, c)) == summarize(recs)


def test_merge_requires_adjacency(rng):
    recs = random_records(rng, 1, 20)
    with pytest.raises(GapInIndices):
        merge(summarize(recs[:5]), summarize(recs[6:]))
    assert merge(SweepSummary(), summarize(recs)) == summarize(recs)


def test_argmax_tie_keeps_lower_index():
    r1 = synthetic(1, 1e4, 1.0)
    r2 = GapRecord(**{**r1.__dict__, "n": 2, "t_n": r1.t_next, "t_next": r1.t_next + 1.0})
    assert summarize([r1, r2]).argmax_n == 1
