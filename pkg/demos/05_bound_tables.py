"""
Where each recovery guarantee ends
==================================

Exact predicates at N = 144 (coherence 1/12) and the largest total sparsity
each one guarantees for every split of K into K_p + K_q.
"""

from fractions import Fraction

from prosparse import bound_report, evaluate_bounds, boundary_curves

rep = bound_report(144, Fraction(1, 12))
for name in ("p0_unique", "bp_simple", "prosparse_total"):
    print(f"{name:16s} K <= {rep.threshold(name)}")

# inside the window-search bound but outside the l1 one
print(evaluate_bounds(128, K_p=8, K_q=3))

# boundary curves as data (K_q as a function of K_p)
for row in boundary_curves(144)[::4]:
    print({k: (round(v, 2) if isinstance(v, float) else v) for k, v in row.items()})
