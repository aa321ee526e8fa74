import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from prosparse.numerics import (
    Degenerate, build_toeplitz, dft, dft_matrix, eval_poly_on_root_grid, nullspace_vector,
    solve_weights,
)


def test_dft_of_spike_is_constant():
    v = np.zeros(4)
    v[0] = 1
    assert np.allclose(dft(v), 0.5, atol=1e-15)


def test_inverse_of_constant_is_spike():
    out = dft(np.full(4, 0.5), inverse=True)
    assert np.allclose(out, [1, 0, 0, 0], atol=1e-15)


def test_picket_fence_maps_to_picket_fence():
    v = np.zeros(32)
    v[::8] = np.sqrt(2)
    w = dft(v)
    nz = np.flatnonzero(np.abs(w) > 1e-12)
    assert list(nz) == list(range(0, 32, 4))
    assert np.allclose(w[nz], 1.0, atol=1e-12)


def test_dft_matrix_matches_fft():
    N = 12
    F = dft_matrix(N)
    v = np.random.default_rng(0).standard_normal(N) + 1j
    assert np.allclose(F @ v, dft(v, inverse=True), atol=1e-12)
    assert np.allclose(F.conj().T @ F, np.eye(N), atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(2, 64), st.integers(0, 2**31 - 1))
def test_dft_unitary_roundtrip(N, seed):
    r = np.random.default_rng(seed)
    v = r.standard_normal(N) + 1j * r.standard_normal(N)
    w = dft(v)
    assert np.allclose(dft(w, inverse=True), v, atol=1e-12 * max(1, np.abs(v).max()))
    assert np.isclose(np.linalg.norm(w), np.linalg.norm(v), rtol=1e-12)


def test_dft_rejects_nonfinite():
    with pytest.raises(ValueError):
        dft([1.0, np.nan])


def test_toeplitz_k1():
    y = np.array([1, 2, 3, 4], complex)
    T = build_toeplitz(y, 1, 0)
    assert T.entries.shape == (1, 2)
    assert np.array_equal(T.entries, [[2, 1]])


def test_toeplitz_wraps_when_periodic():
    y = np.arange(8) + 0j
    T = build_toeplitz(y, 2, 6, periodic=True).entries
    assert np.array_equal(T, [[y[0], y[7], y[6]], [y[1], y[0], y[7]]])


def test_toeplitz_aperiodic_overrun():
    with pytest.raises(ValueError):
        build_toeplitz(np.arange(8) + 0j, 3, 4, periodic=False)


@settings(max_examples=30, deadline=None)
@given(st.integers(4, 40), st.integers(1, 6), st.integers(0, 100), st.integers(0, 2**31 - 1))
def test_toeplitz_entry_identity(N, K, start, seed):
    K = min(K, N // 2)
    r = np.random.default_rng(seed)
    y = r.standard_normal(N) + 1j * r.standard_normal(N)
    T = build_toeplitz(y, K, start).entries
    for i in range(K):
        for j in range(K + 1):
            assert T[i, j] == y[(start + K + i - j) % N]


def test_single_exponential_nullspace():
    u = np.exp(2j * np.pi / 8)
    h, r = nullspace_vector(np.array([[3 * u, 3]]))
    assert r == 1
    assert np.allclose(h, [1, -u], atol=1e-14)


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 6), st.integers(0, 2**31 - 1))
def test_full_rank_for_distinct_exponentials(K, seed):
    r = np.random.default_rng(seed)
    N = 64
    m = r.choice(N, K, replace=False)
    a = np.exp(2j * np.pi * r.random(K)) * (0.5 + r.random(K))
    y = (np.exp(2j * np.pi * np.outer(np.arange(N), m) / N) @ a)
    h, rank = nullspace_vector(build_toeplitz(y, K, int(r.integers(N))))
    assert rank == K
    mags = eval_poly_on_root_grid(h, N)
    assert np.all(mags[m] < 1e-8 * (1 + np.abs(h[1:]).sum()))


def test_overestimated_order_is_degenerate():
    N = 32
    m = np.array([3, 11])
    y = np.exp(2j * np.pi * np.outer(np.arange(N), m) / N) @ np.array([1.0, -0.7j])
    T = build_toeplitz(y, 3, 0)
    s = np.linalg.svd(T.entries, compute_uv=False)
    assert s[2] / s[0] < 1e-10
    with pytest.raises(Degenerate) as exc:
        nullspace_vector(T)
    assert exc.value.rank == 2


def test_grid_eval_root_at_one():
    assert np.allclose(eval_poly_on_root_grid([1, -1], 4), [0, np.sqrt(2), 2, np.sqrt(2)])


def test_grid_eval_monomial():
    assert np.allclose(eval_poly_on_root_grid([1, 0], 9), 1)


def test_grid_eval_planted_roots():
    roots = np.exp(2j * np.pi * np.array([3, 5]) / 8)
    h = np.poly(roots)
    mags = eval_poly_on_root_grid(h, 8)
    assert np.flatnonzero(mags < 1e-12).tolist() == [3, 5]


def test_solve_weights_single():
    u = np.exp(2j * np.pi / 8)
    y = 3 * u ** np.arange(2)
    w, res = solve_weights([u], y)
    assert np.allclose(w, [3]) and res < 1e-14


def test_solve_weights_roundtrip(rng):
    u = np.exp(2j * np.pi * np.array([0.1, 0.6]))
    a = rng.standard_normal(2) + 1j * rng.standard_normal(2)
    y = (u[None, :] ** (5 + np.arange(4))[:, None]) @ a
    w, _ = solve_weights(u, y, start=5)
    assert np.allclose(w, a, atol=1e-9)


def test_solve_weights_repeated_roots():
    with pytest.raises(ValueError):
        solve_weights([1, 1], [1, 1, 1, 1])
