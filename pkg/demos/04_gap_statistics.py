"""
Normalized gaps and the inequality chain
========================================

g_n scales by log(t)/2 pi, g'_n by log(t/2 pi e)/2 pi. The slack of the
first bound is 1 - (a_{n+1} - a_n)/pi - g'_n, which must stay positive.
"""
import numpy as np

from zetagaps.arg_tracker import arg_limit_at_zeros
from zetagaps.gap_stats import make_gap, merge, summarize, verify_chain
from zetagaps.zeta_engine import scan_zeros

zeros = scan_zeros(20, 400)
recs = arg_limit_at_zeros([z.t for z in zeros])
gaps = [make_gap(z0.n, z0.t, z1.t, r0.a, r1.a, r0.b, r1.b)
        for z0, z1, r0, r1 in zip(zeros, zeros[1:], recs, recs[1:])]

# the largest gap in this stretch
big = max(gaps, key=lambda g: g.g_prime)
print(big)
print(verify_chain(big))

# summaries fold exactly, so shards can be merged in any grouping
half = len(gaps) // 2
whole = summarize(gaps)
print(whole.to_json()["mean_g_prime"], merge(summarize(gaps[:half]), summarize(gaps[half:])) == whole)
print("min slack:", min(g.slack_gpb1 for g in gaps))
print("histogram (first bins):", np.asarray(whole.histogram[:30]))
