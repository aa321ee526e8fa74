import numpy as np
import pytest
from scipy.optimize import linprog

from prosparse.bounds import as_mu2, bp_tight
from prosparse.bp import (
    DenseOperator, FourierCanonicalOperator, debias, l1_equality_solve, soft_threshold, support,
)
from prosparse.fixtures import make_bp_counterexample, make_random_planted
from prosparse.numerics import dft_matrix


def test_soft_threshold_keeps_phase():
    v = np.array([3 * np.exp(0.7j), 0.5j, -2.0])
    out = soft_threshold(v, 1.0)
    assert np.allclose(out, [2 * np.exp(0.7j), 0, -1.0])


def test_single_spike():
    N = 16
    y = np.zeros(N, complex)
    y[5] = 1
    res = l1_equality_solve(FourierCanonicalOperator(N), y)
    assert res.converged
    assert list(support(res.solution)) == [N + 5]
    assert res.objective == pytest.approx(1.0, abs=1e-8)


def test_counterexample_bp_fails():
    ce = make_bp_counterexample(4)
    res = l1_equality_solve(FourierCanonicalOperator(ce.N), ce.y)
    assert res.converged
    assert res.primal_residual <= 1e-9 * np.linalg.norm(ce.y)
    assert res.objective <= np.abs(ce.x_tilde).sum() + 1e-9
    assert res.objective < np.abs(ce.x).sum()
    assert set(support(res.solution)) != set(np.flatnonzero(ce.x))


def test_converged_implies_feasible():
    r = np.random.default_rng(2)
    for _ in range(10):
        A = r.standard_normal((10, 30))
        y = A @ (r.standard_normal(30) * (r.random(30) < 0.2))
        res = l1_equality_solve(A, y)
        if res.converged:
            assert res.primal_residual <= 1e-9 * np.linalg.norm(y) * 10


def test_nonconvergence_is_flagged():
    r = np.random.default_rng(3)
    A = r.standard_normal((10, 40))
    y = A @ r.standard_normal(40)
    res = l1_equality_solve(A, y, max_iter=5)
    assert not res.converged and res.iterations == 5


def _lp_oracle(A, y):
    n = A.shape[1]
    out = linprog(np.ones(2 * n), A_eq=np.hstack([A, -A]), b_eq=y, bounds=(0, None),
                  method="highs")
    assert out.status == 0
    return out.fun


def test_objective_matches_lp_oracle():
    r = np.random.default_rng(4)
    for _ in range(20):
        m, n = 12, 40
        A = r.standard_normal((m, n))
        y = A @ (r.standard_normal(n) * (r.random(n) < 0.3))
        res = l1_equality_solve(A, y)
        assert res.converged
        assert res.objective == pytest.approx(_lp_oracle(A, y), rel=1e-7)


def test_batched_matches_single():
    r = np.random.default_rng(5)
    A = r.standard_normal((3, 8, 20))
    Y = np.stack([A[i] @ (r.standard_normal(20) * (r.random(20) < 0.2)) for i in range(3)])
    batch = l1_equality_solve(A, Y)
    for i in range(3):
        one = l1_equality_solve(A[i], Y[i])
        assert np.allclose(batch.solution[i], one.solution, atol=1e-7)


def test_tight_bound_instances_recovered():
    N = 64
    m2 = as_mu2(None, N)
    pairs = [(a, b) for a in range(1, 8) for b in range(1, 8) if bp_tight(a, b, m2)[0]]
    r = np.random.default_rng(6)
    op = FourierCanonicalOperator(N)
    for t in range(100):
        kp, kq = pairs[int(r.integers(len(pairs)))]
        inst = make_random_planted(N, kp, kq, seed=1000 + t)
        res = l1_equality_solve(op, inst.y)
        truth = np.concatenate([inst.planted.x_p, inst.planted.x_q])
        assert res.converged
        assert np.max(np.abs(res.solution - truth)) <= 1e-6


def test_debias_refits_support():
    r = np.random.default_rng(7)
    A = r.standard_normal((10, 20))
    x = np.zeros(20)
    x[[3, 11]] = [1.5, -2]
    got = debias(A, A @ x, [3, 11])
    assert np.allclose(got, x)


def test_dense_operator_projection():
    r = np.random.default_rng(8)
    A = r.standard_normal((5, 9)) + 1j * r.standard_normal((5, 9))
    op = DenseOperator(A)
    y = r.standard_normal(5) + 0j
    v = r.standard_normal(9) + 0j
    assert np.allclose(A @ op.project(v, y), y)


@pytest.mark.xfail(strict=True, reason="ADMM is not a descent method; its l1 objective "
                                       "oscillates at the 1e-8..1e-4 level until it stops")
def test_objective_monotone_after_burn_in():
    ce = make_bp_counterexample(4)
    A = np.hstack([dft_matrix(ce.N), np.eye(ce.N)])
    res = l1_equality_solve(A, ce.y, record_objective=True)
    tail = np.array(res.history[-100:])
    assert np.all(np.diff(tail) <= 1e-12)
