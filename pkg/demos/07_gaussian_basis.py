"""
A random basis with calibrated windows
======================================

An i.i.d. Gaussian basis has no closed-form window length, so the sampling
constant is measured: the smallest c1 for which l1 recovery from
S(K) = c1 K log(N/K) consecutive rows succeeds in 95% of seeded trials.
Takes about half a minute.
"""

import numpy as np

from prosparse import gaussian_calibrate, gen_prosparse_solve, make_random_planted
from prosparse.bases import CanonicalBasis, Dictionary
from prosparse.generalized import GenSolveConfig

cal = gaussian_calibrate(64, K_range=(1, 2, 3, 4), target_rate=0.95, seed=0)
print("c1 =", cal.c1, "window lengths", cal.sampling, "rates", cal.rates)

d = Dictionary(cal.basis(), CanonicalBasis(64))
inst = make_random_planted(64, 2, 3, seed=1, dictionary=d)
sols = gen_prosparse_solve(inst.y, GenSolveConfig(d, kp_limit=4))
print("planted recovered:", sols.find(inst.planted.x_p, inst.planted.x_q, 1e-6) is not None)
