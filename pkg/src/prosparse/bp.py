"""Equality-constrained l1 minimization (basis pursuit) by ADMM.

Solves ``min ||x||_1  s.t.  A x = y`` for complex data, where the l1 norm is
the sum of complex moduli. The splitting is x (affine set) / z (l1 term):

    x <- Proj_{Ax=y}(z - u)
    z <- shrink(x + u, 1/rho)
    u <- u + x - z

with residual balancing of rho every ``adapt_every`` iterations. The solver
accepts a single system or a stack of independent systems of equal shape.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import scipy.linalg


@dataclass
class L1SolveResult:
    solution: np.ndarray
    iterations: int | np.ndarray
    primal_residual: float | np.ndarray
    objective: float | np.ndarray
    converged: bool | np.ndarray
    history: list = field(default_factory=list, repr=False)


class DenseOperator:
    """A full-row-rank matrix (or stack of them) with a cached pseudo-inverse."""

    def __init__(self, A):
        A = np.asarray(A, dtype=complex)
        self.A = A
        AH = np.conj(np.swapaxes(A, -1, -2))
        G = A @ AH
        if A.ndim == 2:
            c = scipy.linalg.cho_factor(G)
            self.pinv = scipy.linalg.cho_solve(c, A).conj().T
        else:
            self.pinv = np.linalg.solve(G, A).conj().swapaxes(-1, -2)

    @property
    def shape(self):
        return self.A.shape[-2:]

    def forward(self, x):
        return (self.A @ x[..., None])[..., 0]

    def project(self, v, y):
        r = self.forward(v) - y
        return v - (self.pinv @ r[..., None])[..., 0]


class FourierCanonicalOperator:
    """D = [F, I] with F the unitary synthesis DFT; D D* = 2I."""

    def __init__(self, N: int):
        self.N = N

    @property
    def shape(self):
        return (self.N, 2 * self.N)

    def forward(self, x):
        N = self.N
        return np.fft.ifft(x[..., :N], norm="ortho", axis=-1) + x[..., N:]

    def adjoint(self, r):
        return np.concatenate([np.fft.fft(r, norm="ortho", axis=-1), r], axis=-1)

    def project(self, v, y):
        return v - 0.5 * self.adjoint(self.forward(v) - y)


def soft_threshold(v, t):
    """Complex shrinkage: reduce the modulus by t, keep the phase."""
    mag = np.abs(v)
    scale = np.maximum(mag - t, 0.0) / np.where(mag > 0, mag, 1.0)
    return v * scale


def _as_operator(A):
    if hasattr(A, "project"):
        return A
    return DenseOperator(A)


def _norm(v):
    return np.sqrt(np.sum(v.real ** 2 + v.imag ** 2, axis=-1))


def l1_equality_solve(A, y, feas_tol: float = 1e-9, max_iter: int = 50000,
                      rho: float = 1.0, adapt_every: int = 100, check_every: int = 10,
                      record_objective: bool = False) -> L1SolveResult:
    """Minimize sum |x_i| subject to A x = y.

    ``A`` is a matrix, a stack of matrices matching a stack of right-hand
    sides, or an operator exposing ``shape``, ``forward`` and ``project``.
    Stopping uses the primal residual ||x - z|| and the dual residual
    rho ||z - z_prev||, both relative to ``feas_tol``, tested every
    ``check_every`` iterations; batched problems stop independently.
    """
    op = _as_operator(A)
    y = np.asarray(y, dtype=complex)
    batched = y.ndim == 2
    Y = y if batched else y[None, :]
    B = Y.shape[0]
    n = op.shape[1]

    rho = np.full(B, float(rho))
    z = np.zeros((B, n), dtype=complex)
    u = np.zeros((B, n), dtype=complex)
    x = np.zeros((B, n), dtype=complex)
    active = np.ones(B, dtype=bool)
    iters = np.zeros(B, dtype=int)
    history = []
    a = np.arange(B)
    sub, Ya = op, Y
    xa, za, ua, ra = x, z, u, rho

    for k in range(1, max_iter + 1):
        xa = sub.project(za - ua, Ya)
        za_old = za
        za = soft_threshold(xa + ua, 1.0 / ra[:, None])
        ua = ua + xa - za
        if record_objective:
            x[a] = xa
            history.append(np.sum(np.abs(x), axis=-1))

        check = k % check_every == 0 or k % adapt_every == 0 or k == max_iter
        if not check:
            continue
        r = _norm(xa - za)
        s = ra * _norm(za - za_old)
        eps_p = feas_tol * np.maximum(np.maximum(_norm(xa), _norm(za)), 1e-300)
        eps_d = feas_tol * np.maximum(ra * _norm(ua), 1e-300)
        done = (r <= eps_p) & (s <= eps_d)

        if k % adapt_every == 0:
            up = (r > 10 * s) & ~done
            down = (s > 10 * r) & ~done
            ra = ra.copy()
            ra[up] *= 2.0
            ua[up] /= 2.0
            ra[down] /= 2.0
            ua[down] *= 2.0

        iters[a] = k
        if done.any() or k == max_iter:
            x[a], z[a], u[a], rho[a] = xa, za, ua, ra
            active[a[done]] = False
            keep = ~done
            a = a[keep]
            if a.size == 0:
                break
            sub = _subset(op, a, B)
            Ya = Y[a]
            xa, za, ua, ra = xa[keep], za[keep], ua[keep], ra[keep]
    else:
        x[a], z[a], u[a], rho[a] = xa, za, ua, ra

    feas = _norm(op.forward(x) - Y)
    obj = np.sum(np.abs(x), axis=-1)
    conv = ~active
    if batched:
        return L1SolveResult(x, iters, feas, obj, conv, history)
    return L1SolveResult(x[0], int(iters[0]), float(feas[0]), float(obj[0]),
                         bool(conv[0]), [h[0] for h in history])


def _subset(op, rows, B):
    if isinstance(op, DenseOperator) and op.A.ndim == 3 and rows.size != B:
        sub = DenseOperator.__new__(DenseOperator)
        sub.A = op.A[rows]
        sub.pinv = op.pinv[rows]
        return sub
    return op


def support(x, rel: float = 1e-6) -> np.ndarray:
    """Indices with modulus above ``rel`` times the largest modulus."""
    x = np.asarray(x)
    peak = np.max(np.abs(x)) if x.size else 0.0
    if peak == 0:
        return np.array([], dtype=int)
    return np.flatnonzero(np.abs(x) > rel * peak)


def debias(A, y, supp) -> np.ndarray:
    """Least-squares refit of y on the columns of A listed in ``supp``."""
    A = A if isinstance(A, np.ndarray) else _materialize(A)
    x = np.zeros(A.shape[1], dtype=complex)
    if len(supp):
        coef, *_ = np.linalg.lstsq(A[:, supp], y, rcond=None)
        x[supp] = coef
    return x


def _materialize(op) -> np.ndarray:
    n = op.shape[1]
    return op.forward(np.eye(n, dtype=complex)).T
