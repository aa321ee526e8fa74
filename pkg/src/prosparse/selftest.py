"""Fast invariant checks runnable without the test suite."""

from __future__ import annotations

import math

import numpy as np

from .bounds import bound_report
from .bp import FourierCanonicalOperator, l1_equality_solve, support
from .core import count_clean_windows, prosparse_solve
from .fixtures import fc_apply, make_bp_counterexample, make_random_planted
from .numerics import build_toeplitz, dft
from .prony import prony_fit


def check_dft():
    v = np.random.default_rng(0).standard_normal(16) + 0j
    return np.allclose(dft(dft(v), inverse=True), v, atol=1e-12)


def check_toeplitz():
    y = np.arange(8) + 0j
    T = build_toeplitz(y, 2, 6).entries
    return np.array_equal(T, np.array([[y[0], y[7], y[6]], [y[1], y[0], y[7]]]))


def check_prony():
    N = 32
    c = np.zeros(N, complex)
    c[[1, 7, 30]] = 1
    m = prony_fit(np.fft.ifft(c, norm="ortho")[:6], 3, N)
    return m.grid_indices == (1, 7, 30) and np.allclose(m.weights, 1 / math.sqrt(N))


def check_planted():
    for seed in range(5):
        inst = make_random_planted(32, 2, 3, seed)
        if prosparse_solve(inst.y).find(inst.planted.x_p, inst.planted.x_q) is None:
            return False
    return True


def check_counterexample():
    ce = make_bp_counterexample(4)
    return (np.max(np.abs(fc_apply(ce.z))) < 1e-10
            and prosparse_solve(ce.y).find(ce.x[:ce.N], ce.x[ce.N:]) is not None)


def check_clean_windows():
    return count_clean_windows([0, 4], 1, 8) == 4


def check_bounds():
    r = bound_report(144, "1/12")
    return (r.threshold("p0_unique"), r.threshold("bp_simple"),
            r.threshold("prosparse_total")) == (11, 10, 16)


def check_bp():
    N = 16
    y = np.zeros(N, complex)
    y[5] = 1
    res = l1_equality_solve(FourierCanonicalOperator(N), y)
    return res.converged and list(support(res.solution)) == [N + 5]


CHECKS = [check_dft, check_toeplitz, check_prony, check_planted, check_counterexample,
          check_clean_windows, check_bounds, check_bp]


def run(write=print) -> bool:
    ok = True
    for fn in CHECKS:
        try:
            passed = bool(fn())
        except Exception as exc:  # a crash is a failed check
            passed = False
            write(f"{fn.__name__}: error {exc}")
        write(f"{'PASS' if passed else 'FAIL'} {fn.__name__[6:]}")
        ok &= passed
    return ok
