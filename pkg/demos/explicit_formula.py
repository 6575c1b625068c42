"""Primes against zeros: the explicit formula for the Dedekind zeta function of Q(sqrt(-7)).

The first run scans zeros (about half a minute); later runs read the cache.

Run: python3 demos/explicit_formula.py
"""

from linniksieve.lfunc import audit_hypothesis, cached_zeros, dirichlet_spec, explicit_formula_check, zeta_spec
from linniksieve.window import SmoothWindow

zeta, chi7 = zeta_spec(), dirichlet_spec(7)
zz, zc = cached_zeros(zeta, 50.0), cached_zeros(chi7, 50.0)
print(f"zeta: {zz.count} zeros up to 50, first at {zz.ordinates[0]:.8f}")
print(f"L(s, chi_-7): {zc.count} zeros up to 50, first at {zc.ordinates[0]:.8f}")

window = SmoothWindow(0.6, 0.9)
print("\n   T   zeros   prime side        zero side         residual   tail bound")
for T in (0.0, 10.0, 20.0, 30.0, 40.0):
    r = explicit_formula_check(7, 0, 1e5, window, T, [(zeta, zz), (chi7, zc)])
    print(f"{T:4.0f}  {r.zeros_used:5d}   {r.lhs:.12f}  {r.rhs:.12f}  {r.residual:.2e}   {r.tail_estimate:.2e}")

audit = audit_hypothesis(23)
for e in audit.entries:
    print(f"\n{e.name}: no zero with beta > {e.threshold:.4f} near the real axis (margin {e.margin:.4f})", end="")
print()
