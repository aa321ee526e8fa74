"""Prony's method on short runs of consecutive samples.

Two flavours live here. The Fourier flavour recovers K exponentials
restricted to the N-th roots of unity from 2K samples (indices taken modulo
N). The generalized flavour handles bases of the form diag(lam) @ V @ S
where V is Vandermonde in a finite node set and every column of S has at
most D nonzeros; it needs 2DK consecutive samples.

Both are written over stacks of windows so the search loops can scan all
window positions of one sparsity level with a single batched SVD.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .numerics import (
    RANK_TOL,
    eval_poly_at,
    eval_poly_on_root_grid,
    min_separation,
    nullspace_batch,
    toeplitz_from_segment,
)

ROOT_TOL = 1e-7
AMPLITUDE_FLOOR = 1e-9
FIT_TOL = 1e-6

# reject reasons
DEGENERATE = "degenerate-rank"
NORMALIZATION = "normalization"
ROOT_COUNT = "root-count"
OFF_GRID = "off-grid"
WEIGHT_UNDERFLOW = "weight-underflow"
BAD_FIT = "bad-fit"
INCONSISTENT = "inconsistent-sparse-map"
TOO_DENSE = "too-dense"


class Reject(Exception):
    """A window that does not support a valid K-term model."""

    def __init__(self, reason: str, rank: int | None = None):
        msg = reason if rank is None else f"{reason} (rank {rank})"
        super().__init__(msg)
        self.reason = reason
        self.rank = rank


@dataclass(frozen=True, eq=False)
class PronyModel:
    """K exponentials ``y[n] = sum_k weights[k] * roots[k] ** n``.

    ``grid_indices`` is set when the roots were validated against the
    N-th roots of unity; ``N`` is then the grid size.
    """

    K: int
    roots: np.ndarray
    weights: np.ndarray
    grid_indices: tuple[int, ...] | None = None
    start: int = 0
    N: int | None = None

    def synthesize(self, n) -> np.ndarray:
        n = np.asarray(n)
        if self.K == 0:
            return np.zeros(n.shape, dtype=complex)
        if self.grid_indices is not None:
            V = grid_vandermonde(n, self.grid_indices, self.N)
        else:
            V = self.roots[None, :] ** n[:, None]
        return V @ self.weights


@dataclass(frozen=True)
class Tolerances:
    rank: float = RANK_TOL
    root: float = ROOT_TOL
    amplitude: float = AMPLITUDE_FLOOR
    fit: float = FIT_TOL


DEFAULT_TOLS = Tolerances()


def grid_vandermonde(exponents, m, N: int) -> np.ndarray:
    """``exp(2j pi m e / N)`` with the product reduced modulo N first."""
    e = np.asarray(exponents, dtype=np.int64)
    m = np.asarray(m, dtype=np.int64)
    return np.exp(2j * np.pi * (np.outer(e, m) % N) / N)


def _select(mags: np.ndarray, h: np.ndarray, K: int, root_tol: float):
    """Per-row candidates: the K smallest |P| that also pass the scale-aware test.

    A grid point qualifies when its |P| is among the K smallest of its row
    and |P| <= root_tol * (1 + sum|h|). A row is usable only when all K of
    its smallest values qualify.
    """
    tol = root_tol * (1.0 + np.sum(np.abs(h[..., 1:]), axis=-1))
    if K >= mags.shape[-1]:
        smallest = np.broadcast_to(np.arange(mags.shape[-1]), mags.shape)
    else:
        smallest = np.argpartition(mags, K - 1, axis=-1)[:, :K]
    hits = np.zeros(mags.shape, dtype=bool)
    rows = np.arange(mags.shape[0])[:, None]
    hits[rows, smallest] = np.take_along_axis(mags, smallest, axis=-1) <= tol[:, None]
    return hits, hits.sum(axis=-1)


def _fit_rows(z, exponents, K, vander, mags_fn, tols, ok, rank, normalizable, h):
    """Shared tail of the batched fits: root selection, weights, checks.

    Every row with a normalizable nullspace vector gets a full-order fit,
    including rows whose effective rank falls below K: large-order systems
    built from exact data can be badly conditioned without being deficient,
    and the grid test, amplitude floor and resynthesis check are what
    certify a fit. A row that fails and is rank deficient is reported as
    degenerate at its effective rank.
    """
    out: list = [None] * z.shape[0]
    rows = np.flatnonzero(normalizable & (rank > 0))
    fits: dict = {}
    if rows.size:
        mags = mags_fn(h[rows])
        hits, counts = _select(mags, h[rows], K, tols.root)
        for i, r in enumerate(rows):
            if counts[i] != K:
                fits[r] = Reject(OFF_GRID if counts[i] == 0 else ROOT_COUNT)
                continue
            idx = np.flatnonzero(hits[i])
            seg = z[r]
            V = vander(exponents[r], idx)
            w, *_ = np.linalg.lstsq(V, seg, rcond=None)
            scale = np.max(np.abs(seg))
            if np.any(np.abs(w) <= tols.amplitude * scale):
                fits[r] = Reject(WEIGHT_UNDERFLOW)
            elif np.max(np.abs(V @ w - seg)) > tols.fit * scale:
                fits[r] = Reject(BAD_FIT)
            else:
                fits[r] = (idx, w)
    for r in range(z.shape[0]):
        res = fits.get(r)
        if res is not None and not isinstance(res, Reject):
            out[r] = res
        elif rank[r] < K:
            out[r] = Reject(DEGENERATE, int(rank[r]))
        elif not normalizable[r]:
            out[r] = Reject(NORMALIZATION, int(rank[r]))
        else:
            out[r] = res
    return out


def fourier_fit_windows(segments, starts, K: int, N: int, tols: Tolerances = DEFAULT_TOLS):
    """Batched grid-constrained Prony fit.

    ``segments`` is (B, W) with W >= 2K; the Toeplitz system uses the first
    2K samples, the weight fit and resynthesis check use all W. Returns one
    entry per row: ``(grid_indices, weights)`` or a :class:`Reject`.
    """
    segments = np.atleast_2d(np.asarray(segments, dtype=complex))
    starts = np.atleast_1d(np.asarray(starts, dtype=np.int64))
    W = segments.shape[1]
    if W < 2 * K:
        raise ValueError(f"segment length {W} is shorter than 2K = {2 * K}")
    T = toeplitz_from_segment(segments[:, : 2 * K], K)
    h, rank, ok, normalizable = nullspace_batch(T, tols.rank)
    exponents = starts[:, None] + np.arange(W)[None, :]
    return _fit_rows(
        segments, exponents, K,
        lambda e, m: grid_vandermonde(e, m, N),
        lambda hh: eval_poly_on_root_grid(hh, N),
        tols, ok, rank, normalizable, h,
    )


def prony_fit(samples, K: int, N: int, start: int = 0, require_grid: bool = True,
              tols: Tolerances = DEFAULT_TOLS) -> PronyModel:
    """Fit K exponentials to the 2K samples y[start], ..., y[start + 2K - 1].

    With ``require_grid`` the roots must be exactly K distinct N-th roots of
    unity; otherwise any distinct roots are accepted. Raises :class:`Reject`
    when the window does not support such a model.
    """
    samples = np.asarray(samples, dtype=complex)
    if K < 1:
        raise ValueError("K must be positive")
    if samples.ndim != 1 or samples.size != 2 * K:
        raise ValueError(f"expected a segment of length 2K = {2 * K}, got {samples.shape}")
    if require_grid:
        res = fourier_fit_windows(samples[None, :], [start], K, N, tols)[0]
        if isinstance(res, Reject):
            raise res
        idx, w = res
        roots = np.exp(2j * np.pi * idx / N)
        return PronyModel(K, roots, w, tuple(int(i) for i in idx), start, N)

    T = toeplitz_from_segment(samples, K)
    h, rank, ok, normalizable = nullspace_batch(T, tols.rank)
    if not ok:
        reason = NORMALIZATION if (rank == K and not normalizable) else DEGENERATE
        raise Reject(reason, int(rank))
    roots = np.roots(h)
    if min_separation(roots) < 1e-9:
        raise Reject(ROOT_COUNT)
    V = roots[None, :] ** (start + np.arange(2 * K))[:, None]
    w, *_ = np.linalg.lstsq(V, samples, rcond=None)
    scale = np.max(np.abs(samples))
    if np.any(np.abs(w) <= tols.amplitude * scale):
        raise Reject(WEIGHT_UNDERFLOW)
    if np.max(np.abs(V @ w - samples)) > tols.fit * scale:
        raise Reject(BAD_FIT)
    return PronyModel(K, roots, w, None, start)


def fourier_coeffs_from_model(model: PronyModel, N: int) -> np.ndarray:
    """Sparse DFT-domain coefficients: c[m_k] = alpha_k * sqrt(N)."""
    c = np.zeros(N, dtype=complex)
    if model.K == 0:
        return c
    if model.grid_indices is None:
        raise ValueError("model roots were not validated against the grid")
    c[list(model.grid_indices)] = model.weights * np.sqrt(N)
    return c


# -- generalized bases -------------------------------------------------------


@dataclass(frozen=True, eq=False)
class FactorizedBasis:
    """Psi = diag(lam) @ V @ S with ``V[n, m] = nodes[m] ** n``."""

    lam: np.ndarray
    nodes: np.ndarray
    S: np.ndarray
    D: int

    def __post_init__(self):
        lam = np.asarray(self.lam, dtype=complex)
        nodes = np.asarray(self.nodes, dtype=complex)
        S = np.asarray(self.S, dtype=complex)
        object.__setattr__(self, "lam", lam)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "S", S)
        N = lam.size
        if S.shape != (nodes.size, N):
            raise ValueError("S must be M x N with M = len(nodes)")
        if np.any(lam == 0):
            raise ValueError("diagonal factor must be nonzero everywhere")
        if min_separation(nodes) < 1e-9:
            raise ValueError("Vandermonde nodes must be distinct")
        if np.max(np.count_nonzero(S, axis=0)) > self.D:
            raise ValueError("a column of S has more than D nonzeros")
        if np.linalg.cond(self.matrix()) > 1e12:
            raise ValueError("factorized basis is not invertible")

    @property
    def N(self) -> int:
        return self.lam.size

    def vandermonde(self, rows) -> np.ndarray:
        rows = np.asarray(rows)
        return self.nodes[None, :] ** rows[:, None]

    def matrix(self) -> np.ndarray:
        return self.lam[:, None] * (self.vandermonde(np.arange(self.N)) @ self.S)

    def sampling_factor(self, K: int) -> int:
        return 2 * self.D * K


def dct_factorization(N: int) -> FactorizedBasis:
    """Orthonormal DCT written as diag(b/sqrt(2N)) @ V @ ([1, 1]^T kron I_N)."""
    b = np.ones(N)
    b[0] = 1 / np.sqrt(2)
    m = np.arange(N)
    nodes = np.concatenate([np.exp(-1j * np.pi * (m + 0.5) / N),
                            -np.exp(1j * np.pi * (m + N + 0.5) / N)])
    S = np.kron(np.ones((2, 1)), np.eye(N))
    return FactorizedBasis(b / np.sqrt(2 * N), nodes, S, 2)


def _generalized_from_x(basis: FactorizedBasis, idx, w, K: int):
    x = np.zeros(basis.nodes.size, dtype=complex)
    x[idx] = w
    c, *_ = np.linalg.lstsq(basis.S, x, rcond=None)
    if np.linalg.norm(basis.S @ c - x) > FIT_TOL * max(np.linalg.norm(x), 1e-300):
        return Reject(INCONSISTENT)
    c[np.abs(c) <= AMPLITUDE_FLOOR * np.max(np.abs(c))] = 0
    if np.count_nonzero(c) > K:
        return Reject(TOO_DENSE)
    return c


def generalized_fit_windows(segments, starts, basis: FactorizedBasis, K: int,
                            tols: Tolerances = DEFAULT_TOLS):
    """Batched recovery of K-sparse c from windows of y = Psi c (no wrap).

    Each row must hold y[start], ..., y[start + W - 1] with W >= 2DK and
    2DK < N. Rank-deficient windows are refit at their effective order,
    since fewer than DK active nodes is a legal configuration.
    """
    segments = np.atleast_2d(np.asarray(segments, dtype=complex))
    starts = np.atleast_1d(np.asarray(starts, dtype=np.int64))
    B, W = segments.shape
    order = basis.D * K
    if W < 2 * order:
        raise ValueError(f"segment length {W} is shorter than 2DK = {2 * order}")
    if np.any(starts < 0) or np.any(starts + W > basis.N):
        raise ValueError("window exceeds the signal")
    exponents = starts[:, None] + np.arange(W)[None, :]
    z = segments / basis.lam[exponents]
    out: list = [None] * B
    pending = {order: np.arange(B)}
    while pending:
        k, rows = pending.popitem()
        T = toeplitz_from_segment(z[rows, : 2 * k], k)
        h, rank, ok, normalizable = nullspace_batch(T, tols.rank)
        fits = _fit_rows(
            z[rows], exponents[rows], k,
            lambda e, m: basis.nodes[None, m] ** e[:, None],
            lambda hh: eval_poly_at(hh, basis.nodes),
            tols, ok, rank, normalizable, h,
        )
        for i, r in enumerate(rows):
            res = fits[i]
            if isinstance(res, Reject):
                if res.reason == DEGENERATE and res.rank is not None and res.rank < k:
                    if res.rank == 0:
                        out[r] = np.zeros(basis.N, dtype=complex)
                    else:
                        pending.setdefault(res.rank, [])
                        pending[res.rank] = np.append(pending[res.rank], r).astype(int)
                    continue
                out[r] = res
            else:
                out[r] = _generalized_from_x(basis, res[0], res[1], K)
    return out


def generalized_prony_fit(segment, basis: FactorizedBasis, K: int, start: int = 0) -> np.ndarray:
    """Recover K-sparse c from ``segment = (Psi c)[start : start + len(segment)]``.

    When 2DK >= N the whole signal is required and c is obtained by direct
    inversion. Raises :class:`Reject` for windows that do not fit.
    """
    segment = np.asarray(segment, dtype=complex)
    N = basis.N
    need = basis.sampling_factor(K)
    if need >= N:
        if segment.size != N or start != 0:
            raise ValueError("direct inversion needs the full signal")
        return np.linalg.solve(basis.matrix(), segment)
    if segment.size < need:
        raise ValueError(f"segment length {segment.size} is shorter than 2DK = {need}")
    res = generalized_fit_windows(segment[None, :], [start], basis, K)[0]
    if isinstance(res, Reject):
        raise res
    return res
