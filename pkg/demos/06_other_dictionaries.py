"""
Beyond Fourier and spikes
=========================

Any basis that can be read back from a short window can stand in for F, and
any basis with short atoms can stand in for the spikes. Here: Fourier with
8-sample local Fourier blocks, the DCT with spikes, and a preconditioned
dictionary [A F, A I].
"""

import numpy as np

from prosparse import gen_prosparse_solve, make_random_planted, preconditioned_solve
from prosparse.bases import make_dictionary

for kind, kp, kq, params in (("fourier-localfourier", 2, 3, {"L": 8}),
                             ("dct-canonical", 2, 4, {})):
    inst = make_random_planted(64, kp, kq, seed=5, dict_kind=kind, **params)
    sols = gen_prosparse_solve(inst.y, inst.dictionary)
    hit = sols.find(inst.planted.x_p, inst.planted.x_q)
    print(f"{kind}: ({kp}, {kq}) recovered {hit is not None}, {len(sols)} solutions listed")

rng = np.random.default_rng(0)
A = np.eye(32) + 0.1 * rng.standard_normal((32, 32))
inst = make_random_planted(32, 2, 3, seed=2)
sols = preconditioned_solve(A, A @ inst.y, make_dictionary("fourier-canonical", 32))
print("preconditioned:", sols.find(inst.planted.x_p, inst.planted.x_q) is not None)
