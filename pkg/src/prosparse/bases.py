"""Basis descriptors and two-basis dictionaries.

A basis is either *local* (every atom's support fits inside an interval of
``L`` consecutive samples) or *segment-recoverable* (a K-sparse coefficient
vector can be recovered from ``sampling_factor(K)`` consecutive samples of
the synthesized signal). ``periodic`` says whether such windows wrap modulo
N; the generalized search calls that flag tau = 0.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.fft
import scipy.linalg

from . import bp
from .numerics import dft_matrix
from .prony import (
    BAD_FIT,
    TOO_DENSE,
    FactorizedBasis,
    Reject,
    Tolerances,
    DEFAULT_TOLS,
    dct_factorization,
    fourier_fit_windows,
    generalized_fit_windows,
)

ZERO_REL = 1e-14


def support_length(v, rel: float = ZERO_REL) -> int:
    """Length of the shortest index interval covering the nonzeros of v."""
    v = np.abs(np.asarray(v))
    nz = np.flatnonzero(v > rel * v.max()) if v.size and v.max() > 0 else []
    if len(nz) == 0:
        return 0
    return int(nz[-1] - nz[0] + 1)


def max_support_length(M) -> int:
    return max(support_length(M[:, i]) for i in range(M.shape[1]))


class Basis:
    """Common surface: synthesis, analysis, atoms, and capabilities."""

    kind = "basis"
    periodic = False
    local_length: int | None = None

    def __init__(self, N: int):
        if N < 1:
            raise ValueError("N must be positive")
        self.N = int(N)

    # Subclasses override synth/analyze with fast transforms where available.
    def synth(self, c):
        return self.matrix @ np.asarray(c, dtype=complex)

    def analyze(self, v):
        return scipy.linalg.lu_solve(self._lu, np.asarray(v, dtype=complex))

    @cached_property
    def _lu(self):
        return scipy.linalg.lu_factor(self.matrix)

    @cached_property
    def matrix(self) -> np.ndarray:
        return self.synth(np.eye(self.N, dtype=complex))

    @property
    def tau(self) -> int:
        return 0 if self.periodic else 1

    @property
    def segment_recoverable(self) -> bool:
        return False

    def sampling_factor(self, K: int) -> int:
        raise NotImplementedError(f"{self.kind} is not segment-recoverable")

    def window_starts(self, S: int) -> np.ndarray:
        if self.periodic:
            return np.arange(self.N)
        return np.arange(max(self.N - S + 1, 0))

    def segments(self, y, S: int, starts=None):
        if starts is None:
            starts = self.window_starts(S)
        idx = np.asarray(starts)[:, None] + np.arange(S)[None, :]
        if self.periodic:
            idx = idx % self.N
        return np.asarray(y)[idx]

    def recover_windows(self, segments, starts, K: int, tols: Tolerances = DEFAULT_TOLS):
        raise NotImplementedError(f"{self.kind} is not segment-recoverable")

    def direct_inverse(self, y, K: int):
        """Full-signal recovery used when S(K) reaches N."""
        c = self.analyze(y)
        c = np.where(np.abs(c) <= 1e-12 * np.max(np.abs(c), initial=0), 0, c)
        if np.count_nonzero(c) > K:
            return Reject(TOO_DENSE)
        return c

    def describe(self) -> dict:
        return {"kind": self.kind, "params": {}}

    def __repr__(self):
        return f"{type(self).__name__}(N={self.N})"


class FourierBasis(Basis):
    kind = "fourier"
    periodic = True

    def synth(self, c):
        return np.fft.ifft(np.asarray(c, dtype=complex), norm="ortho", axis=0)

    def analyze(self, v):
        return np.fft.fft(np.asarray(v, dtype=complex), norm="ortho", axis=0)

    @cached_property
    def matrix(self):
        return dft_matrix(self.N)

    @property
    def segment_recoverable(self):
        return True

    def sampling_factor(self, K: int) -> int:
        return 2 * K

    def recover_windows(self, segments, starts, K, tols=DEFAULT_TOLS):
        out = []
        for res in fourier_fit_windows(segments, starts, K, self.N, tols):
            if isinstance(res, Reject):
                out.append(res)
                continue
            c = np.zeros(self.N, dtype=complex)
            c[res[0]] = res[1] * np.sqrt(self.N)
            out.append(c)
        return out


class CanonicalBasis(Basis):
    kind = "canonical"
    local_length = 1

    def synth(self, c):
        return np.array(c, dtype=complex)

    def analyze(self, v):
        return np.array(v, dtype=complex)

    @cached_property
    def matrix(self):
        return np.eye(self.N, dtype=complex)


class LocalFourierBasis(Basis):
    """Block-diagonal basis with an L-point unitary DFT on each block."""

    kind = "localfourier"

    def __init__(self, N: int, L: int):
        super().__init__(N)
        if L < 1 or N % L:
            raise ValueError("block length must divide N")
        self.L = int(L)
        self.local_length = self.L
        if max_support_length(self.matrix) != self.L:
            raise AssertionError("declared block length does not match atom supports")

    def synth(self, c):
        c = np.asarray(c, dtype=complex)
        blocks = c.reshape((self.N // self.L, self.L) + c.shape[1:])
        return np.fft.ifft(blocks, norm="ortho", axis=1).reshape(c.shape)

    def analyze(self, v):
        v = np.asarray(v, dtype=complex)
        blocks = v.reshape((self.N // self.L, self.L) + v.shape[1:])
        return np.fft.fft(blocks, norm="ortho", axis=1).reshape(v.shape)

    @cached_property
    def matrix(self):
        return scipy.linalg.block_diag(*[dft_matrix(self.L)] * (self.N // self.L))

    def describe(self):
        return {"kind": self.kind, "params": {"L": self.L}}


class BandedBasis(Basis):
    """Lower-banded invertible basis: atom i lives on rows i .. i+L-1.

    Not one of the textbook pairs; it exercises local atoms with support
    length L > 1 at every offset.
    """

    kind = "banded"

    def __init__(self, N: int, L: int, seed: int = 0):
        super().__init__(N)
        self.L = int(L)
        self.seed = int(seed)
        rng = np.random.default_rng(self.seed)
        M = np.zeros((N, N), dtype=complex)
        for i in range(N):
            stop = min(i + self.L, N)
            M[i:stop, i] = 0.3 * (rng.standard_normal(stop - i)
                                  + 1j * rng.standard_normal(stop - i))
            M[i, i] = 1.0 + 0.5 * rng.random()
        self._matrix = M
        self.local_length = max_support_length(M)
        if self.local_length != self.L:
            raise AssertionError("declared band length does not match atom supports")

    @cached_property
    def matrix(self):
        return self._matrix

    def synth(self, c):
        return self._matrix @ np.asarray(c, dtype=complex)

    def describe(self):
        return {"kind": self.kind, "params": {"L": self.L, "seed": self.seed}}


class FactorizedPronyBasis(Basis):
    """diag(lam) @ V @ S basis recovered by generalized Prony (tau = 1)."""

    kind = "factorized"

    def __init__(self, factors: FactorizedBasis):
        super().__init__(factors.N)
        self.factors = factors

    @cached_property
    def matrix(self):
        return self.factors.matrix()

    def synth(self, c):
        return self.matrix @ np.asarray(c, dtype=complex)

    @property
    def segment_recoverable(self):
        return True

    def sampling_factor(self, K: int) -> int:
        return self.factors.sampling_factor(K)

    def recover_windows(self, segments, starts, K, tols=DEFAULT_TOLS):
        return generalized_fit_windows(segments, starts, self.factors, K, tols)

    def describe(self):
        f = self.factors
        return {"kind": self.kind, "params": {
            "lam": _pairs(f.lam), "nodes": _pairs(f.nodes),
            "S": [_pairs(row) for row in f.S], "D": f.D}}


class DCTBasis(FactorizedPronyBasis):
    """Orthonormal DCT, ``psi[n, m] = b(n) sqrt(2/N) cos(pi n (m + 1/2) / N)``."""

    kind = "dct"

    def __init__(self, N: int):
        super().__init__(dct_factorization(N))

    def synth(self, c):
        c = np.asarray(c, dtype=complex)
        return (scipy.fft.dct(c.real, norm="ortho", axis=0)
                + 1j * scipy.fft.dct(c.imag, norm="ortho", axis=0))

    def analyze(self, v):
        v = np.asarray(v, dtype=complex)
        return (scipy.fft.idct(v.real, norm="ortho", axis=0)
                + 1j * scipy.fft.idct(v.imag, norm="ortho", axis=0))

    def describe(self):
        return {"kind": self.kind, "params": {}}


def log_floor(N: int) -> float:
    """Default p(N) = 3 ln N."""
    return 3.0 * math.log(N)


class GaussianBasis(Basis):
    """I.i.d. N(0, 1) basis with windows taken modulo N.

    ``sampling_factor`` follows S(K) = max{p(N), min{N, c1 K log(N/K)}},
    rounded up. Beyond the peak of K log(N/K) the value is held at its
    running maximum so S never decreases with K.
    """

    kind = "gaussian"
    periodic = True

    def __init__(self, N: int, seed: int = 0, c1: float = 4.0, p_floor: float | None = None,
                 feas_tol: float = 1e-9, max_iter: int = 3000):
        super().__init__(N)
        self.seed = int(seed)
        self.c1 = float(c1)
        self.p_floor = log_floor(N) if p_floor is None else float(p_floor)
        self.feas_tol = feas_tol
        self.max_iter = max_iter
        self._matrix = np.random.default_rng(self.seed).standard_normal((N, N))
        self._ops: dict = {}
        self._l1_cache: dict = {}
        self.calibration = None

    @cached_property
    def matrix(self):
        return self._matrix.astype(complex)

    def synth(self, c):
        return self._matrix @ np.asarray(c, dtype=complex)

    @property
    def segment_recoverable(self):
        return True

    def raw_sampling_factor(self, K: int) -> float:
        N = self.N
        if K <= 0:
            core = 0.0
        else:
            core = min(N, self.c1 * K * math.log(N / K)) if K < N else 0.0
        return max(self.p_floor, core)

    def sampling_factor(self, K: int) -> int:
        N = self.N
        if K <= 0:
            value = self.raw_sampling_factor(0)
        elif K <= N / math.e:
            value = self.raw_sampling_factor(K)
        else:
            lo = int(N / math.e)
            value = max(self.raw_sampling_factor(k) for k in (lo, lo + 1) if 1 <= k <= K)
        return min(N, int(math.ceil(value - 1e-12)))

    def _operator(self, S: int):
        op = self._ops.get(S)
        if op is None:
            starts = self.window_starts(S)
            rows = (starts[:, None] + np.arange(S)[None, :]) % self.N
            op = bp.DenseOperator(self._matrix[rows])
            self._ops[S] = op
        return op

    def l1_windows(self, segments, starts):
        """l1 solutions of every window, cached on the window contents.

        The l1 program does not depend on K, so levels sharing a window
        length reuse the same solves.
        """
        segments = np.atleast_2d(np.asarray(segments, dtype=complex))
        starts = np.asarray(starts)
        key = (segments.shape[1], starts.tobytes(), segments.tobytes())
        hit = self._l1_cache.get(key)
        if hit is not None:
            return hit
        full = self._operator(segments.shape[1])
        op = bp.DenseOperator.__new__(bp.DenseOperator)
        op.A, op.pinv = full.A[starts], full.pinv[starts]
        res = bp.l1_equality_solve(op, segments, feas_tol=self.feas_tol, max_iter=self.max_iter)
        if len(self._l1_cache) >= 8:
            self._l1_cache.pop(next(iter(self._l1_cache)))
        self._l1_cache[key] = (op, res.solution)
        return op, res.solution

    def recover_windows(self, segments, starts, K, tols=DEFAULT_TOLS):
        """l1 solve per window, keep entries above 1e-6 of the peak, refit.

        Windows whose detected support exceeds K or whose refit leaves a
        residual above ``tols.fit`` of the window norm are rejected; an
        unconverged l1 solve therefore never yields an accepted vector.
        """
        segments = np.atleast_2d(np.asarray(segments, dtype=complex))
        op, sol = self.l1_windows(segments, np.asarray(starts))
        out = []
        for i in range(segments.shape[0]):
            seg = segments[i]
            supp = bp.support(sol[i])
            if len(supp) > K:
                out.append(Reject(TOO_DENSE))
                continue
            c = bp.debias(op.A[i], seg, supp)
            if np.linalg.norm(op.A[i] @ c - seg) > tols.fit * np.linalg.norm(seg):
                out.append(Reject(BAD_FIT))
                continue
            out.append(c)
        return out

    def describe(self):
        return {"kind": self.kind, "params": {"c1": self.c1, "p_floor": self.p_floor},
                "seed": self.seed}


def _pairs(v):
    v = np.asarray(v, dtype=complex)
    return [[float(z.real), float(z.imag)] for z in v]


def recover_segment(basis: Basis, segment, start: int, K: int,
                    tols: Tolerances = DEFAULT_TOLS) -> np.ndarray:
    """Recover a K-sparse coefficient vector from one window of ``basis @ c``.

    The segment must hold exactly ``sampling_factor(K)`` samples starting at
    ``start``. Raises :class:`Reject` when the window does not fit.
    """
    if not basis.segment_recoverable:
        raise ValueError(f"{basis.kind} basis is not segment-recoverable")
    segment = np.asarray(segment, dtype=complex)
    S = basis.sampling_factor(K)
    if segment.size != S:
        raise ValueError(f"expected {S} samples, got {segment.size}")
    if S >= basis.N:
        y = segment[:basis.N]
        if basis.periodic:
            y = np.roll(y, start)
        elif start != 0:
            raise ValueError("full-length window must start at 0")
        res = basis.direct_inverse(y, K)
    else:
        res = basis.recover_windows(segment[None, :], [start], K, tols)[0]
    if isinstance(res, Reject):
        raise res
    return res


@dataclass(eq=False)
class Dictionary:
    """D = [Psi, Phi], optionally preconditioned as [A Psi, A Phi]."""

    psi: Basis
    phi: Basis
    precondition: np.ndarray | None = None
    _lu: tuple | None = field(default=None, init=False, repr=False)

    def __post_init__(self):
        if self.psi.N != self.phi.N:
            raise ValueError("bases must share the dimension N")
        if self.precondition is not None:
            A = np.asarray(self.precondition, dtype=complex)
            if A.shape != (self.N, self.N):
                raise ValueError("preconditioner must be N x N")
            if np.linalg.cond(A) >= 1e12:
                raise ValueError("preconditioner is singular or badly conditioned")
            self.precondition = A
            self._lu = scipy.linalg.lu_factor(A)

    @property
    def N(self) -> int:
        return self.psi.N

    def synthesize(self, x_p, x_q) -> np.ndarray:
        y = self.psi.synth(x_p) + self.phi.synth(x_q)
        if self.precondition is not None:
            y = self.precondition @ y
        return y

    def unprecondition(self, y) -> np.ndarray:
        if self._lu is None:
            return np.asarray(y, dtype=complex)
        return scipy.linalg.lu_solve(self._lu, np.asarray(y, dtype=complex))

    def matrix(self) -> np.ndarray:
        M = np.hstack([self.psi.matrix, self.phi.matrix])
        if self.precondition is not None:
            M = self.precondition @ M
        return M

    def base(self) -> "Dictionary":
        return Dictionary(self.psi, self.phi)


def mutual_coherence(d: Dictionary) -> float:
    """Largest normalized inner product over distinct column pairs."""
    M = d.matrix()
    M = M / np.linalg.norm(M, axis=0)
    G = np.abs(M.conj().T @ M)
    np.fill_diagonal(G, 0.0)
    return float(G.max())


def synthesize(d: Dictionary, x_p, x_q) -> np.ndarray:
    return d.synthesize(x_p, x_q)


DICT_KINDS = ("fourier-canonical", "fourier-localfourier", "dct-canonical",
              "gaussian-canonical", "fourier-banded")


def make_dictionary(kind: str, N: int, L: int = 8, basis_seed: int = 0,
                    c1: float = 4.0, p_floor: float | None = None) -> Dictionary:
    """Build one of the named dictionaries used by the CLI and fixtures."""
    if kind == "fourier-canonical":
        return Dictionary(FourierBasis(N), CanonicalBasis(N))
    if kind == "fourier-localfourier":
        return Dictionary(FourierBasis(N), LocalFourierBasis(N, L))
    if kind == "dct-canonical":
        return Dictionary(DCTBasis(N), CanonicalBasis(N))
    if kind == "gaussian-canonical":
        return Dictionary(GaussianBasis(N, seed=basis_seed, c1=c1, p_floor=p_floor),
                          CanonicalBasis(N))
    if kind == "fourier-banded":
        return Dictionary(FourierBasis(N), BandedBasis(N, L, seed=basis_seed))
    raise ValueError(f"unknown dictionary kind {kind!r}; expected one of {DICT_KINDS}")


def dictionary_params(d: Dictionary) -> dict:
    """Parameters that rebuild ``d`` through :func:`make_dictionary`."""
    params: dict = {}
    for b in (d.psi, d.phi):
        desc = b.describe()
        params.update(desc["params"])
        if "seed" in desc:
            params["basis_seed"] = desc["seed"]
        elif "seed" in desc["params"]:
            params["basis_seed"] = params.pop("seed")
    return params


# -- Gaussian calibration ----------------------------------------------------


class CalibrationError(RuntimeError):
    pass


@dataclass
class GaussianCalibration:
    N: int
    c1: float
    p_floor: float
    target_rate: float
    seed: int
    basis_seed: int
    trials: int
    K_range: tuple
    sampling: dict
    rates: dict

    def to_dict(self) -> dict:
        return {"N": self.N, "c1": self.c1, "p_floor": self.p_floor,
                "target_rate": self.target_rate, "seed": self.seed,
                "basis_seed": self.basis_seed, "trials": self.trials,
                "K_range": list(self.K_range),
                "sampling": {str(k): v for k, v in self.sampling.items()},
                "rates": {str(k): v for k, v in self.rates.items()}}

    def basis(self) -> GaussianBasis:
        b = GaussianBasis(self.N, seed=self.basis_seed, c1=self.c1, p_floor=self.p_floor)
        b.calibration = self
        return b


def _segment_trials(basis: GaussianBasis, K: int, trials: int, rng):
    N = basis.N
    C = np.zeros((trials, N), dtype=complex)
    for t in range(trials):
        C[t, rng.choice(N, K, replace=False)] = np.exp(2j * np.pi * rng.random(K))
    starts = rng.integers(0, N, trials)
    return C, starts, C @ basis._matrix.T


def _segment_rate(basis: GaussianBasis, K: int, S: int, C, starts, Y) -> float:
    if S >= basis.N:
        return 1.0
    segs = np.stack([basis.segments(Y[t], S, [starts[t]])[0] for t in range(len(starts))])
    res = basis.recover_windows(segs, starts, K)
    ok = 0
    for c_true, c in zip(C, res):
        if isinstance(c, Reject):
            continue
        if (np.array_equal(np.flatnonzero(c), np.flatnonzero(c_true))
                and np.max(np.abs(c - c_true)) <= 1e-6 * np.max(np.abs(c_true))):
            ok += 1
    return ok / len(starts)


def gaussian_calibrate(N: int, K_range=(1, 2, 3, 4), target_rate: float = 0.95,
                       seed: int = 0, trials: int = 200, basis_seed: int = 0,
                       c1_max: float = 12.0, step: float = 0.05) -> GaussianCalibration:
    """Smallest c1 whose sampling factor meets ``target_rate`` for every K.

    For each K the smallest window length S_K reaching the target rate is
    found by bisection over seeded trials (the same trials for every S);
    c1 is then the smallest multiple of ``step`` with S(K) >= S_K for all K,
    bumped further if a rate re-measured at the final S falls short.
    """
    K_range = tuple(int(k) for k in K_range)
    rng = np.random.default_rng(seed)
    base = GaussianBasis(N, seed=basis_seed)
    floor = int(math.ceil(base.p_floor - 1e-12))
    data = {K: _segment_trials(base, K, trials, rng) for K in K_range}
    cache: dict = {}

    def rate(K, S):
        if (K, S) not in cache:
            cache[K, S] = _segment_rate(base, K, S, *data[K])
        return cache[K, S]

    need = {}
    for K in K_range:
        lo, hi = max(K + 1, floor), N - 1
        if lo > hi or rate(K, hi) < target_rate:
            raise CalibrationError(
                f"segment recovery for K={K} stays below {target_rate} even with S={hi}")
        while lo < hi:
            mid = (lo + hi) // 2
            if rate(K, mid) >= target_rate:
                hi = mid
            else:
                lo = mid + 1
        need[K] = lo

    c1 = step
    while c1 <= c1_max + 1e-12:
        b = GaussianBasis(N, seed=basis_seed, c1=c1)
        S = {K: b.sampling_factor(K) for K in K_range}
        if all(S[K] >= need[K] for K in K_range):
            rates = {K: rate(K, S[K]) for K in K_range}
            if all(r >= target_rate for r in rates.values()):
                return GaussianCalibration(N, round(c1, 10), base.p_floor, target_rate, seed,
                                           basis_seed, trials, K_range, S, rates)
        c1 += step
    raise CalibrationError(f"no c1 <= {c1_max} reaches rate {target_rate}")
