"""
Zeros from the transcendental equation
======================================

Each zero solves theta(t) + a(t) = (n - 3/2) pi. The Lambert-W seed is
already within about a gap of the answer; two Newton stages finish the job.
"""
import numpy as np

from zetagaps.zero_solver import seed_ordinate, solve_transcendental, solve_many
from zetagaps.zeta_engine import scan_zeros

# the seed inverts the smooth counting function
ns = np.array([10, 100, 1000, 10**6])
print("seeds:", seed_ordinate(ns))

# one zero at a time, cross-checked against a local scan
rep = solve_transcendental(1000, cross_validate=True)
print(f"n = 1000: t = {rep.t:.10f}  residual = {rep.residual:.2e}  "
      f"iterations = {rep.iterations}  scan agrees: {rep.agreed_with_scan}")

# batches are vectorized; compare with the scan route
reps = solve_many(np.arange(2, 30))
scan = {z.n: z.t for z in scan_zeros(10, 110)}
print("max |t_trans - t_scan| =", max(abs(r.t - scan[r.n]) for r in reps))
