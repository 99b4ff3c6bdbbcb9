"""
Tracking arg zeta from the right
================================

The argument a(t) is continued horizontally from sigma = 10 to 1/2 + delta,
then the delta -> 0 limit is taken with a Richardson ladder. At a zero it
splits as a = A + 2 pi b with A in (-pi, pi).
"""
from zetagaps.arg_tracker import arg_at, arg_limit_at_zeros, decompose
from zetagaps.zeta_engine import scan_zeros

# away from zeros the argument is smooth in delta
for delta in (1e-3, 1e-6):
    print("a(30.0, delta = %g) = %.12f" % (delta, arg_at(30.0, delta).a))

# at zeros the limit is finite: the zero contributes half of its pi jump
zeros = scan_zeros(10, 40)
for z, rec in zip(zeros, arg_limit_at_zeros([z.t for z in zeros])):
    print(z.n, f"t = {z.t:.6f}  a = {rec.a:+.9f}  A = {rec.A:+.6f}  b = {rec.b}")

# a large positive jump pushes a(t) past -pi: the principal part wraps and b drops
A, b = decompose(-3.2237)
print("decompose(-3.2237) ->", A, b)
