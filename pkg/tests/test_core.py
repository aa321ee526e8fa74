import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import fourier_atom, spike
from prosparse.core import (
    clean_window_bound, count_clean_windows, dual_signal, map_dual, max_fourier_level,
    prosparse_solve, resynthesize, total_sparsity_solve,
)
from prosparse.fixtures import make_picket_planted, make_random_planted, make_two_solution_instance
from prosparse.solutions import SolutionSet, SolverInvariantError, SparseSolution


def test_atom_plus_spike():
    N = 32
    y = fourier_atom(N, 2) + spike(N, 5)
    sols = prosparse_solve(y)
    nt = sols.nontrivial()
    assert len(nt) == 1
    assert nt[0].p_support == (2,) and nt[0].q_support == (5,)
    assert np.allclose(nt[0].p_coeffs, [1], atol=1e-9)
    assert np.allclose(nt[0].q_coeffs, [1], atol=1e-9)
    trivial = sols.get((), tuple(range(N)))
    assert trivial is not None and np.allclose(trivial.x_q, y)


def test_two_solution_instance():
    inst = make_two_solution_instance(4, 0)
    sols = prosparse_solve(inst.y)
    for s in inst.solutions():
        assert sols.find(s.x_p, s.x_q, 1e-7) is not None


def test_picket_tight_instance_is_absent():
    inst = make_picket_planted(32, 2, 8, seed=3)
    assert 2 * 2 * 8 == 32
    assert count_clean_windows(inst.planted.q_support, 2, 32) == 0
    sols = prosparse_solve(inst.y)
    assert sols.find(inst.planted.x_p, inst.planted.x_q) is None


def test_clean_windows_examples():
    assert count_clean_windows([0, 4], 1, 8) == 4
    assert clean_window_bound(1, 2, 8) == 4
    assert count_clean_windows([], 3, 20) == 20
    # picket fence with K_p K_q = N/2 leaves nothing clean
    assert count_clean_windows(range(0, 32, 4), 2, 32) == 0


@settings(max_examples=60, deadline=None)
@given(st.integers(4, 48), st.integers(0, 2**31 - 1))
def test_clean_windows_lower_bound(N, seed):
    r = np.random.default_rng(seed)
    Kq = int(r.integers(0, N))
    Kp = int(r.integers(1, N // 2 + 1))
    spikes = r.choice(N, Kq, replace=False)
    got = count_clean_windows(spikes, Kp, N)
    assert got >= clean_window_bound(Kp, Kq, N)
    assert 0 <= got <= N


def test_loop_bound():
    assert max_fourier_level(32) == 3
    assert max_fourier_level(128) == 7
    assert max_fourier_level(2) == 0


def test_dual_map_is_involution():
    r = np.random.default_rng(0)
    N = 16
    xp = r.standard_normal(N) + 1j * r.standard_normal(N)
    xq = r.standard_normal(N) + 1j * r.standard_normal(N)
    y = resynthesize(xp, xq)
    # [I, F] conj(x) explains the dual signal with the roles swapped
    assert np.allclose(dual_signal(y), np.conj(xp) + np.fft.ifft(np.conj(xq), norm="ortho"))
    s = SparseSolution.from_dense(xp, xq)
    back = map_dual(map_dual(s))
    assert back.key == s.key
    assert np.allclose(back.x_p, s.x_p) and np.allclose(back.x_q, s.x_q)


def test_dual_pass_finds_fourier_heavy_solution():
    N = 64
    inst = make_random_planted(N, 5, 2, seed=11)
    sols = prosparse_solve(inst.y)
    hit = sols.find(inst.planted.x_p, inst.planted.x_q)
    assert hit is not None and hit.discovered_at[2] == "dual"


def test_zero_signal():
    sols = prosparse_solve(np.zeros(16))
    assert len(sols) == 1 and sols.solutions[0].kp == sols.solutions[0].kq == 0


def test_rejects_bad_input():
    with pytest.raises(ValueError):
        prosparse_solve(np.array([1.0, np.inf, 0, 0]))
    with pytest.raises(ValueError):
        prosparse_solve(np.ones((2, 2)))


def test_total_sparsity_filter():
    inst = make_random_planted(32, 3, 3, seed=4)
    sols = total_sparsity_solve(inst.y, 6)
    assert sols.find(inst.planted.x_p, inst.planted.x_q) is not None
    assert all(s.kp + s.kq <= 6 for s in sols)
    assert total_sparsity_solve(inst.y, 5).find(inst.planted.x_p, inst.planted.x_q) is None


def test_total_sparsity_two_solutions():
    inst = make_two_solution_instance(4, 5)
    sols = total_sparsity_solve(inst.y, 12)
    for s in inst.solutions():
        assert sols.find(s.x_p, s.x_q) is not None


def test_threads_do_not_change_output():
    inst = make_random_planted(64, 2, 5, seed=8)
    a = prosparse_solve(inst.y, threads=1)
    b = prosparse_solve(inst.y, threads=4)
    assert [s.key for s in a] == [s.key for s in b]
    for s, t in zip(a, b):
        assert np.array_equal(s.p_coeffs, t.p_coeffs) and np.array_equal(s.q_coeffs, t.q_coeffs)


@settings(max_examples=40, deadline=None)
@given(st.sampled_from([16, 32, 64]), st.integers(0, 2**31 - 1))
def test_planted_found_and_every_output_sound(N, seed):
    r = np.random.default_rng(seed)
    pairs = [(a, b) for a in range(1, N) for b in range(1, N) if 2 * a * b < N]
    kp, kq = pairs[int(r.integers(len(pairs)))]
    inst = make_random_planted(N, kp, kq, seed=seed)
    sols = prosparse_solve(inst.y)
    assert sols.find(inst.planted.x_p, inst.planted.x_q, 1e-7) is not None
    scale = np.max(np.abs(inst.y))
    for s in sols:
        assert np.max(np.abs(resynthesize(s.x_p, s.x_q) - inst.y)) <= 1e-8 * scale
        if not s.is_trivial:
            assert 2 * s.kp * s.kq < N
    keys = [s.sort_key for s in sols]
    assert keys == sorted(keys)


def test_solution_set_conflict_detected():
    S = SolutionSet(4)
    S.add(SparseSolution.from_dense([1, 0, 0, 0], [0, 1, 0, 0]))
    assert not S.add(SparseSolution.from_dense([1, 0, 0, 0], [0, 1, 0, 0]))
    with pytest.raises(SolverInvariantError):
        S.add(SparseSolution.from_dense([2, 0, 0, 0], [0, 1, 0, 0]))
