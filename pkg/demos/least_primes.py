"""Class groups of Q(sqrt(-D)) and the least split prime in each class.

Run: python3 demos/least_primes.py
"""

from linniksieve.classgroup import enumerate_class_group, kronecker_chi
from linniksieve.linnik import exponent_survey, least_prime_search

# The class group of discriminant -23 is cyclic of order 3.
G = enumerate_class_group(23)
print(f"D = 23: h = {G.h}, structure {G.structure}")
for i, f in enumerate(G.elements):
    print(f"  class {i}: {f.a}x^2 + {f.b}xy + {f.c}y^2")

# A split prime p factors as p = P * conj(P); P and its conjugate sit in inverse
# classes, so the two non-principal classes of D = 23 share their least prime.
table = least_prime_search(G, 10**4)
for row in table.rows:
    assert kronecker_chi(23, row.p) == 1
    x, y = row.witness
    print(f"  least prime in class {row.class_index}: {row.p} = f({x}, {y}), log p / log D = {row.exponent:.3f}")

# Over many D the worst class needs p of size about D^L for a modest L.
rows, summary = exponent_survey(7, 2000, 10**7, threads=4)
print(f"\n{summary['count']} prime D = 3 mod 4 up to 2000, all certified: {summary['certified'] == summary['count']}")
print(f"largest exponent {summary['max_exponent']:.3f} at D = {summary['argmax_D']}")
tail = [r for r in rows if r.D > 1000]
print(f"largest exponent for D > 1000: {max(r.exponent for r in tail):.3f}")
print(f"mean exponent for D > 1000:    {sum(r.exponent for r in tail) / len(tail):.3f}")
