"""Small dense complex kernels shared by the solvers.

Everything here is a pure function of its inputs. The DFT uses the unitary
convention, so ``dft`` is the analysis operator F* and ``dft(.., inverse=True)``
is the synthesis operator F with entries exp(2j*pi*n*m/N)/sqrt(N).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

RANK_TOL = 1e-8
NORMALIZE_TOL = 1e-12
ROOT_SEPARATION = 1e-9


class Degenerate(Exception):
    """Raised when a Toeplitz system has no usable one-dimensional nullspace.

    ``rank`` is the effective rank; ``reason`` is ``"rank"`` for a rank
    deficiency and ``"normalization"`` when the nullspace vector has a
    vanishing leading entry.
    """

    def __init__(self, rank: int, reason: str = "rank"):
        super().__init__(f"degenerate Toeplitz system: reason={reason}, rank={rank}")
        self.rank = rank
        self.reason = reason


def _as_vector(v) -> np.ndarray:
    v = np.asarray(v, dtype=complex)
    if v.ndim != 1:
        raise ValueError("expected a one-dimensional vector")
    if v.size == 0:
        raise ValueError("empty input")
    if not np.all(np.isfinite(v)):
        raise ValueError("non-finite entries")
    return v


def dft(v, inverse: bool = False) -> np.ndarray:
    """Unitary DFT. Forward is F* (analysis), inverse is F (synthesis)."""
    v = _as_vector(v)
    if inverse:
        return np.fft.ifft(v, norm="ortho")
    return np.fft.fft(v, norm="ortho")


def dft_matrix(N: int) -> np.ndarray:
    """Synthesis matrix F, ``F[n, m] = exp(2j pi n m / N) / sqrt(N)``."""
    n = np.arange(N)
    return np.exp(2j * np.pi * (np.outer(n, n) % N) / N) / np.sqrt(N)


@dataclass(frozen=True)
class ToeplitzSystem:
    """The K x (K+1) annihilation matrix built from 2K consecutive samples."""

    K: int
    start: int
    entries: np.ndarray
    source_length: int
    periodic: bool


def window_indices(start: int, length: int, N: int, periodic: bool) -> np.ndarray:
    idx = start + np.arange(length)
    if periodic:
        return idx % N
    if start < 0 or start + length > N:
        raise ValueError(
            f"window [{start}, {start + length}) exceeds signal of length {N}")
    return idx


def toeplitz_from_segment(segment: np.ndarray, K: int) -> np.ndarray:
    """Batched Toeplitz assembly: ``T[..., i, j] = segment[..., K + i - j]``."""
    i = np.arange(K)[:, None]
    j = np.arange(K + 1)[None, :]
    return segment[..., K + i - j]


def build_toeplitz(y, K: int, start: int, periodic: bool = True) -> ToeplitzSystem:
    y = _as_vector(y)
    if K < 1:
        raise ValueError("K must be positive")
    N = y.size
    if periodic:
        start %= N
    seg = y[window_indices(start, 2 * K, N, periodic)]
    return ToeplitzSystem(K, start, toeplitz_from_segment(seg, K), N, periodic)


def nullspace_batch(T: np.ndarray, rank_tol: float = RANK_TOL):
    """Nullspace vectors of a stack of K x (K+1) matrices.

    Returns ``(h, rank, ok)`` where ``h`` is normalized so ``h[..., 0] == 1``
    wherever ``ok`` holds. ``rank`` is the effective rank of each matrix.
    """
    K = T.shape[-2]
    _, s, vh = np.linalg.svd(T, full_matrices=True)
    smax = s[..., 0]
    rank = np.sum(s > rank_tol * smax[..., None], axis=-1)
    rank = np.where(smax > 0, rank, 0)
    h = np.conj(vh[..., -1, :])
    lead = h[..., 0]
    normalizable = np.abs(lead) >= NORMALIZE_TOL * np.linalg.norm(h, axis=-1)
    safe = np.where(normalizable, lead, 1.0)
    h = h / safe[..., None]
    ok = (rank == K) & normalizable
    return h, rank, ok, normalizable


def nullspace_vector(T: ToeplitzSystem | np.ndarray, rank_tol: float = RANK_TOL):
    """Return ``(h, rank)`` with ``h[0] == 1``, or raise :class:`Degenerate`."""
    M = T.entries if isinstance(T, ToeplitzSystem) else np.asarray(T, dtype=complex)
    K = M.shape[0]
    if M.shape != (K, K + 1):
        raise ValueError("expected a K x (K+1) matrix")
    h, rank, ok, normalizable = nullspace_batch(M, rank_tol)
    rank = int(rank)
    if rank < K:
        raise Degenerate(rank, "rank")
    if not normalizable:
        raise Degenerate(rank, "normalization")
    return h, rank


def eval_poly_on_root_grid(h, N: int) -> np.ndarray:
    """|P(exp(2j pi m / N))| for m = 0..N-1, with P(x) = sum_i h[i] x**(K-i).

    On the unit circle |P(x)| = |sum_i h[i] x**(-i)|, which is an N-point FFT
    of the coefficients (folded modulo N when K + 1 > N). Works on stacks.
    """
    h = np.asarray(h, dtype=complex)
    K1 = h.shape[-1]
    if K1 > N:
        pad = (-K1) % N
        h = np.concatenate([h, np.zeros(h.shape[:-1] + (pad,), complex)], axis=-1)
        h = h.reshape(h.shape[:-1] + (-1, N)).sum(axis=-2)
    return np.abs(np.fft.fft(h, n=N, axis=-1))


def eval_poly_at(h, nodes) -> np.ndarray:
    """|P(p)| for each node p; ``h`` may be a stack of coefficient vectors."""
    h = np.asarray(h, dtype=complex)
    nodes = np.asarray(nodes, dtype=complex)
    K = h.shape[-1] - 1
    powers = nodes[:, None] ** (K - np.arange(K + 1))[None, :]
    return np.abs(h @ powers.T)


def min_separation(u) -> float:
    u = np.asarray(u, dtype=complex)
    if u.size < 2:
        return np.inf
    d = np.abs(u[:, None] - u[None, :])
    d[np.diag_indices(u.size)] = np.inf
    return float(d.min())


def solve_weights(roots, samples, start: int = 0):
    """Least-squares weights for ``samples[n] = sum_k a_k roots_k**(start + n)``.

    Returns ``(weights, residual)`` where the residual is the max-abs misfit
    over the window.
    """
    u = np.asarray(roots, dtype=complex)
    y = np.asarray(samples, dtype=complex)
    if y.size < u.size:
        raise ValueError("window shorter than the number of roots")
    if min_separation(u) < ROOT_SEPARATION:
        raise ValueError("numerically repeated roots")
    V = u[None, :] ** (start + np.arange(y.size))[:, None]
    alpha, *_ = np.linalg.lstsq(V, y, rcond=None)
    resid = float(np.max(np.abs(V @ alpha - y))) if y.size else 0.0
    return alpha, resid
