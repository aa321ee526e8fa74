"""ProSparse for the Fourier + canonical dictionary.

For every sparsity level K_p up to ceil(sqrt(N/2) - 1) and every window
start, fit a grid-constrained Prony model to the 2K_p samples of the window,
subtract the resynthesized Fourier part from the whole signal and count the
surviving spikes. A second pass on the dual signal conj(F* y), whose roles
of Fourier atoms and spikes are swapped, covers the solutions with more
Fourier atoms than spikes.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from .prony import DEFAULT_TOLS, Reject, Tolerances, fourier_fit_windows, grid_vandermonde
from .solutions import SolutionSet, SolverInvariantError, SparseSolution

ZERO_TOL = 1e-8
RESYNTH_TOL = 1e-8


def max_fourier_level(N: int) -> int:
    """Largest K_p visited: ceil(sqrt(N/2) - 1)."""
    return max(0, math.ceil(math.sqrt(N / 2) - 1))


def dual_signal(y) -> np.ndarray:
    """conj(F* y): Fourier atoms of y become spikes and vice versa."""
    return np.conj(np.fft.fft(np.asarray(y, dtype=complex), norm="ortho"))


def map_dual(sol: SparseSolution, pass_id: str | None = None) -> SparseSolution:
    """Translate a solution of the dual signal back to the original one."""
    at = sol.discovered_at if pass_id is None else sol.discovered_at[:2] + (pass_id,)
    return SparseSolution(sol.N, sol.q_support, np.conj(sol.q_coeffs),
                          sol.p_support, np.conj(sol.p_coeffs), at, sol.resynthesis_error)


def resynthesize(x_p, x_q) -> np.ndarray:
    return np.fft.ifft(x_p, norm="ortho") + x_q


def _threshold(v, tol):
    v = np.array(v, dtype=complex)
    v[np.abs(v) <= tol] = 0
    return v


def _scan_level(y, K, zero_tol, tols):
    """All admissible (K, K_q) candidates from the windows of one level.

    Returns ``(start, c, spikes)`` tuples in ascending window order, with
    only the K <= K_q and 2 K K_q < N predicate applied.
    """
    N = y.size
    starts = np.arange(N)
    segs = y[(starts[:, None] + np.arange(2 * K)[None, :]) % N]
    fits = fourier_fit_windows(segs, starts, K, N, tols)
    n = np.arange(N)
    found = []
    cache: dict = {}
    for start, res in zip(starts, fits):
        if isinstance(res, Reject):
            continue
        idx, w = res
        key = (tuple(idx), w.tobytes())
        if key in cache:
            r = cache[key]
        else:
            r = _threshold(y - grid_vandermonde(n, idx, N) @ w, zero_tol)
            cache[key] = r
        kq = int(np.count_nonzero(r))
        if K <= kq and 2 * K * kq < N:
            c = np.zeros(N, dtype=complex)
            c[idx] = w * np.sqrt(N)
            found.append((int(start), c, r))
    return found


def _direct_pass(y, zero_tol, tols, threads):
    levels = range(1, max_fourier_level(y.size) + 1)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(lambda K: _scan_level(y, K, zero_tol, tols), levels))
    else:
        results = [_scan_level(y, K, zero_tol, tols) for K in levels]
    return [(K, start, c, r) for K, found in zip(levels, results) for start, c, r in found]


def prosparse_solve(y, tols: Tolerances = DEFAULT_TOLS, zero_tol: float = ZERO_TOL,
                    threads: int = 1) -> SolutionSet:
    """Every (K_p, K_q)-sparse x with y = [F, I] x and K_p K_q < N/2.

    The trivial representations (all spikes, and all Fourier atoms from the
    dual pass) are always included. Output order is canonical and does not
    depend on ``threads``.
    """
    y = np.asarray(y, dtype=complex)
    if y.ndim != 1 or y.size < 2:
        raise ValueError("need a signal of length N >= 2")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite samples")
    N = y.size
    scale = float(np.max(np.abs(y)))
    out = SolutionSet(N)
    if scale == 0:
        out.add(SparseSolution.from_dense(np.zeros(N), np.zeros(N), (0, None, "direct")))
        return out
    atol = zero_tol * scale
    ydual = dual_signal(y)

    def admit(x_p, x_q, at):
        err = float(np.max(np.abs(resynthesize(x_p, x_q) - y)))
        if err > RESYNTH_TOL * scale:
            return
        out.add(SparseSolution.from_dense(x_p, x_q, at, err))

    admit(np.zeros(N), _threshold(y, atol), (0, None, "direct"))
    admit(np.conj(_threshold(ydual, atol)), np.zeros(N), (0, None, "dual"))

    for K, start, c, r in _direct_pass(y, atol, tols, threads):
        admit(c, r, (K, start, "direct"))
    for K, start, c, r in _direct_pass(ydual, atol, tols, threads):
        # mapped back: K_p = ||r||_0, K_q = K; equal counts belong to the direct pass
        if np.count_nonzero(r) > K:
            admit(np.conj(r), np.conj(c), (K, start, "dual"))

    for s in out:
        if s.resynthesis_error > RESYNTH_TOL * scale:
            raise SolverInvariantError("returned solution does not resynthesize y")
    return out


def total_sparsity_solve(y, K_max: int, **kw) -> SolutionSet:
    """Solutions with K_p + K_q <= K_max.

    Any K < sqrt(2N) satisfies K_p K_q < N/2 because K >= 2 sqrt(K_p K_q),
    so for K_max < sqrt(2N) this returns every K_max-sparse representation.
    """
    return prosparse_solve(y, **kw).filtered(lambda s: s.kp + s.kq <= K_max)


def count_clean_windows(spikes, K_p: int, N: int) -> int:
    """Number of starts (mod N) whose length-2K_p window misses every spike."""
    spikes = set(int(s) % N for s in spikes)
    W = 2 * K_p
    return sum(1 for l in range(N)
               if not any((l + i) % N in spikes for i in range(W)))


def clean_window_bound(K_p: int, K_q: int, N: int) -> int:
    return N - 2 * K_p * K_q
