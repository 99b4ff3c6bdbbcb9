"""
Hardy's Z function and the first zeros
======================================

Z(t) is real on the critical line, so its sign changes mark zeros.
"""
import numpy as np

from zetagaps.special_fn import theta
from zetagaps.zeta_engine import count_zeros, hardy_z, scan_zeros

# theta winds slowly; Z changes sign about once per mean gap
t = np.linspace(10, 50, 9)
for ti, zi, th in zip(t, hardy_z(t), theta(t)):
    print(f"t = {ti:6.2f}   Z = {zi:+.6f}   theta = {th:+.6f}")

# the scan brackets sign changes, refines double dips, and polishes by bisection
zeros = scan_zeros(10, 60)
for z in zeros:
    print(z.n, f"{z.t:.12f}", z.method.value)

# Backlund's count agrees with the scan
print("N(100) =", count_zeros(100.0), " scanned:", len(scan_zeros(10, 100)))

# high up, the Riemann-Siegel formula takes over (C0..C4 corrections)
print("Z(1e6) =", float(hardy_z(1e6)))
