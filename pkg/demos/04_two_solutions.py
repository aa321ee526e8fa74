"""
Two equally sparse answers
==========================

Split the 24 nonzeros of the picket-fence null vector into two halves. Both
halves synthesize the same signal, so the 12-sparse representation is not
unique, yet both lie inside the recoverable region and both are listed.
"""

import numpy as np

from prosparse import make_two_solution_instance, prosparse_solve

for seed in range(3):
    inst = make_two_solution_instance(4, split_seed=seed)
    sols = prosparse_solve(inst.y)
    found = [sols.find(s.x_p, s.x_q) is not None for s in inst.solutions()]
    shapes = [(s.kp, s.kq) for s in inst.solutions()]
    print(f"split {seed}: shapes {shapes}, both found: {all(found)},"
          f" sqrt(N) = {np.sqrt(inst.N):.2f} < K = {inst.K}")
