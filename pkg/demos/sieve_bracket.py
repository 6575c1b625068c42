"""Beta-sieve weights bracketing the sifted sum of a_n = lambda_C(n) f(log n / log x) / n.

Run: python3 demos/sieve_bracket.py
"""

import math

from linniksieve.betasieve import build_weights, sifted_sum, solve_sieve_functions
from linniksieve.classgroup import enumerate_class_group
from linniksieve.linnik import build_sequence, decompose, s3_partition

G = enumerate_class_group(23)
x = 1e6
A = build_sequence(G, 1, x, 0.5)

# dimension-2 weights at level y; z is the sifting limit. With s = log y / log z
# below beta the lower bound carries no information (f(s) = 0).
y = 1e5
sf = solve_sieve_functions(2)
print(f"beta = {sf.beta}, A = {sf.A}")
for z in (3, 5, 8, 12, 20):
    lo = sifted_sum(A, build_weights(2, y, z, "lower"))
    hi = sifted_sum(A, build_weights(2, y, z, "upper"))
    s = math.log(y) / math.log(z)
    print(f"z = {z:>3}: {lo:.6f} <= S(A, z) = {A.sifted(z):.6f} <= {hi:.6f}   (s = {s:.2f}, F = {float(sf.upper(s)):.3f}, f = {float(sf.lower(s)):.3f})")

# S(A, sqrt x) through two Buchstab steps, then the last piece S3 split further
d = decompose(A, x, 6)
print(f"\nS(A, sqrt x) = {d.sifted:.6e} = S1 + S2 + S3 with S3 = {d.S3:.3e}, relative residual {d.residual:.1e}")
for J in (2, 3, 4, 6):
    r = s3_partition(A, x, 6, J)
    lo, hi = r.gaps
    print(f"J = {J}: W- = {r.W_minus:.4e} <= V = {r.V:.4e} <= W+ = {r.W_plus:.4e}   gaps {lo:.1%} / {hi:.1%}")
