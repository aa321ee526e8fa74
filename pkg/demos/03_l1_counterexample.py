"""
When l1 minimization picks the wrong answer
===========================================

A picket fence and its Fourier transform give a null vector z of [F, I].
Flipping the largest entries of z gives an 11-sparse x whose l1 norm is
larger than that of x + z, so basis pursuit prefers the denser vector.
The window search still returns x.
"""

import numpy as np

from prosparse import make_bp_counterexample, prosparse_solve
from prosparse.bp import FourierCanonicalOperator, l1_equality_solve, support

ce = make_bp_counterexample(4)
N = ce.N
print(f"N={N}, K={ce.K}, |x|_1={np.abs(ce.x).sum():.4f}, |x+z|_1={np.abs(ce.x_tilde).sum():.4f}")

res = l1_equality_solve(FourierCanonicalOperator(N), ce.y)
supp = support(res.solution)
print(f"l1 solution: objective {res.objective:.4f}, {len(supp)} nonzeros,"
      f" matches x: {set(supp) == set(np.flatnonzero(ce.x))}")

sols = prosparse_solve(ce.y)
hit = sols.find(ce.x[:N], ce.x[N:])
print("window search recovers x:", hit is not None, (hit.kp, hit.kq))
