"""
Argument from a truncated Euler product
=======================================

With N_c ~ t^2 primes, the product approximates arg zeta just right of the
line. At sigma = 2 it converges absolutely; at 1/2 it only roughly agrees.
"""
import numpy as np

from zetagaps.arg_tracker import arg_at
from zetagaps.euler_arg import EulerArgConfig, GonekTSquared, char_walk, euler_arg, euler_arg_sigma
from zetagaps.lfunc import character
from zetagaps.primes import first_primes
from zetagaps.zeta_engine import zeta_off_line

print("first primes:", first_primes(10))

for t in (60.0, 150.0, 333.3):
    e = euler_arg(t, None, EulerArgConfig(cutoff_rule=GonekTSquared()))
    print(f"t = {t}: Euler {e:+.4f}   tracked {arg_at(t, 1e-6).a:+.4f}")

# absolute convergence at sigma = 2
t = 123.0
print("sigma = 2 error:", abs(euler_arg_sigma(t, None, 2.0, 10**5) - np.angle(zeta_off_line(2.0, t))))

# sums of a real character over primes: a slow random walk
print("C(x) for chi mod 4:", char_walk(character(4, 1), 10**6))
