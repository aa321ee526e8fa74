"""Generalized ProSparse for a segment-recoverable Psi paired with a local Phi.

A window of S(K_p) samples that no Phi atom touches is a clean segment of
Psi x_p, so the segment recovery of Psi gives x_p; Phi^{-1} of the residual
gives x_q. A (K_p, K_q) pair is admitted when

    (S(K_p) + L - 1)(K_q + tau) < N + tau L

which is exactly the condition that guarantees at least one clean window.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .bases import Basis, Dictionary
from .prony import DEFAULT_TOLS, Reject, Tolerances
from .solutions import SolutionSet, SolverInvariantError, SparseSolution

ZERO_TOL = 1e-8
RESYNTH_TOL = 1e-8


@dataclass
class GenSolveConfig:
    dictionary: Dictionary
    kp_limit: int | None = None
    tols: Tolerances = DEFAULT_TOLS
    zero_tol: float = ZERO_TOL
    threads: int = 1

    def __post_init__(self):
        psi, phi = self.dictionary.psi, self.dictionary.phi
        if not psi.segment_recoverable:
            raise ValueError(f"{psi.kind} basis is not segment-recoverable")
        if phi.local_length is None:
            raise ValueError(f"{phi.kind} basis is not local")


def admissible(S: int, L: int, kq: int, tau: int, N: int) -> bool:
    return (S + L - 1) * (kq + tau) < N + tau * L


def clean_interval_bound(N: int, L: int, S: int, K: int, tau: int) -> int:
    """Guaranteed number of clean windows: N + tau L - (S + L - 1)(K + tau)."""
    return N + tau * L - (S + L - 1) * (K + tau)


def count_clean_intervals_general(atom_supports, S: int, tau: int, N: int) -> int:
    """Window starts whose length-S window misses every atom support.

    With tau = 0 windows wrap modulo N and every start counts; with tau = 1
    only the N - S + 1 windows inside the signal count.
    """
    hit = np.zeros(N, dtype=bool)
    for supp in atom_supports:
        hit[np.asarray(list(supp), dtype=int) % N] = True
    if tau == 0:
        starts = np.arange(N)
        idx = (starts[:, None] + np.arange(S)[None, :]) % N
    else:
        starts = np.arange(max(N - S + 1, 0))
        idx = starts[:, None] + np.arange(S)[None, :]
    if starts.size == 0:
        return 0
    return int(np.sum(~hit[idx].any(axis=1)))


def _threshold(v, tol):
    v = np.array(v, dtype=complex)
    v[np.abs(v) <= tol] = 0
    return v


def _levels(psi: Basis, L: int, N: int, limit: int):
    """K_p values worth scanning window by window.

    Once (S + L - 1)(1 + tau) >= N + tau L no solution with K_q >= 1 can be
    admitted, and a K_q = 0 solution is Psi^{-1} y itself, so a single direct
    inversion replaces the remaining sweep. The sweep also ends when
    S < 2K: fewer than 2K samples never determine a K-sparse vector.
    """
    tau = psi.tau
    out = []
    for K in range(1, limit + 1):
        S = psi.sampling_factor(K)
        if S >= N or S < 2 * K or not admissible(S, L, 1, tau, N):
            break
        out.append((K, S))
    return out


def gen_prosparse_solve(y, cfg: GenSolveConfig | Dictionary) -> SolutionSet:
    """All admitted (K_p, K_q)-sparse representations of y in the dictionary.

    A preconditioned dictionary [A Psi, A Phi] is handled by solving for
    A^{-1} y in the base dictionary; the coefficients are the same.
    """
    if isinstance(cfg, Dictionary):
        cfg = GenSolveConfig(cfg)
    d = cfg.dictionary
    psi, phi = d.psi, d.phi
    N, L, tau = d.N, phi.local_length, psi.tau
    y = np.asarray(y, dtype=complex)
    if y.shape != (N,):
        raise ValueError(f"expected a signal of length {N}")
    if not np.all(np.isfinite(y)):
        raise ValueError("non-finite samples")
    yt = d.unprecondition(y)
    out = SolutionSet(N)
    calib = getattr(psi, "calibration", None)
    if calib is not None:
        out.meta["calibration"] = calib.to_dict()
    scale = float(np.max(np.abs(yt)))
    if scale == 0:
        out.add(SparseSolution.from_dense(np.zeros(N), np.zeros(N), (0, None, "direct")))
        return out
    atol = cfg.zero_tol * scale

    def admit(c, at, check_bound=True):
        c = _threshold(c, atol)
        x2 = _threshold(phi.analyze(yt - psi.synth(c)), atol)
        kp, kq = int(np.count_nonzero(c)), int(np.count_nonzero(x2))
        if check_bound and (kp == 0 or not admissible(psi.sampling_factor(kp), L, kq, tau, N)):
            return
        err = float(np.max(np.abs(psi.synth(c) + phi.synth(x2) - yt)))
        if err > RESYNTH_TOL * scale:
            return
        out.add(SparseSolution.from_dense(c, x2, at, err))

    admit(np.zeros(N), (0, None, "direct"), check_bound=False)

    limit = N if cfg.kp_limit is None else min(int(cfg.kp_limit), N)
    levels = _levels(psi, L, N, limit)

    def scan(level):
        K, S = level
        starts = psi.window_starts(S)
        if starts.size == 0:
            return []
        res = psi.recover_windows(psi.segments(yt, S, starts), starts, K, cfg.tols)
        return [(int(s), c) for s, c in zip(starts, res) if not isinstance(c, Reject)]

    if cfg.threads > 1 and len(levels) > 1:
        with ThreadPoolExecutor(max_workers=cfg.threads) as pool:
            found = list(pool.map(scan, levels))
    else:
        found = [scan(lv) for lv in levels]

    for (K, _), hits in zip(levels, found):
        seen = set()
        for start, c in hits:
            key = c.tobytes()
            if key in seen:
                continue
            seen.add(key)
            admit(c, (K, start, "direct"))

    if len(levels) < limit:
        K = levels[-1][0] + 1 if levels else 1
        admit(psi.analyze(yt), (K, 0, "direct"))

    for s in out:
        if s.resynthesis_error > RESYNTH_TOL * scale:
            raise SolverInvariantError("returned solution does not resynthesize y")
    return out


def preconditioned_solve(A, y, dictionary: Dictionary, **kw) -> SolutionSet:
    """Solve y = [A Psi, A Phi] x through A^{-1} y and the base dictionary."""
    base = dictionary.base() if dictionary.precondition is not None else dictionary
    return gen_prosparse_solve(y, GenSolveConfig(Dictionary(base.psi, base.phi, A), **kw))
