"""Deterministic instance generators.

``make_bp_counterexample`` and ``make_two_solution_instance`` build signals
with two competing representations in the Fourier + canonical dictionary
from a null vector z = [v; -F v] of D = [F, I], where v is a picket fence.
Each constructor checks its own invariants and raises on any violation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .bases import Dictionary, dictionary_params, make_dictionary
from .solutions import SparseSolution

ATOL = 1e-10


class FixtureError(AssertionError):
    """A constructed fixture failed one of its own invariants."""


def _check(cond, msg):
    if not cond:
        raise FixtureError(msg)


def fc_apply(x) -> np.ndarray:
    """D x for D = [F, I] and x of length 2N."""
    x = np.asarray(x, dtype=complex)
    N = x.size // 2
    return np.fft.ifft(x[:N], norm="ortho") + x[N:]


def make_picket_fence_z(d: int) -> np.ndarray:
    """z = [v; -F v] with v = sqrt(2) on every 2^d-th sample of N = 2^(2d-1)."""
    if d < 2:
        raise ValueError("d must be at least 2")
    N = 2 ** (2 * d - 1)
    m = 2 ** d
    v = np.zeros(N, dtype=complex)
    v[::m] = math.sqrt(2)
    Fv = np.fft.ifft(v, norm="ortho")
    Fv[np.abs(Fv) < 1e-12] = 0
    Fv = np.round(Fv.real, 12) + 0j
    return np.concatenate([v, -Fv])


def l1_gap(d: int) -> float:
    """2 * (sum of the K largest |z|) - ||z||_1 in closed form."""
    h = 2 ** (d - 1)
    return 2 * (h * (math.sqrt(2) / 2 - 1) + math.floor(h * (math.sqrt(2) - 1)))


@dataclass
class CounterexampleBP:
    d: int
    N: int
    K: int
    z: np.ndarray
    x: np.ndarray
    x_tilde: np.ndarray
    y: np.ndarray
    indices: np.ndarray

    @property
    def planted(self) -> SparseSolution:
        return SparseSolution.from_dense(self.x[:self.N], self.x[self.N:])

    @property
    def gap(self) -> float:
        return float(2 * np.sum(np.abs(self.z[self.indices])) - np.sum(np.abs(self.z)))


def top_k_indices(v, K: int) -> np.ndarray:
    """Indices of the K largest |v|, ties broken by ascending index."""
    order = np.lexsort((np.arange(v.size), -np.round(np.abs(v), 12)))
    return np.sort(order[:K])


def make_bp_counterexample(d: int) -> CounterexampleBP:
    """A K-sparse x whose l1 norm exceeds that of another solution x + z."""
    if d < 4:
        raise ValueError(
            f"d={d}: the l1 gap 2(2^(d-1)(sqrt(2)/2 - 1) + floor(2^(d-1)(sqrt(2) - 1)))"
            f" = {l1_gap(d):.3f} is not positive; the construction needs d >= 4")
    z = make_picket_fence_z(d)
    N = z.size // 2
    K = math.isqrt(N)
    idx = top_k_indices(z, K)
    x = np.zeros(2 * N, dtype=complex)
    x[idx] = -2 * z[idx]
    xt = z + x
    y = fc_apply(x)
    inst = CounterexampleBP(d, N, K, z, x, xt, y, idx)

    _check(np.max(np.abs(fc_apply(z))) <= ATOL, "D z != 0")
    _check(np.sum(np.abs(z)) < 2 * np.sum(np.abs(z[idx])), "l1 condition on z fails")
    _check(np.sum(np.abs(xt)) < np.sum(np.abs(x)), "||x~||_1 < ||x||_1 fails")
    _check(np.max(np.abs(fc_apply(xt) - y)) <= ATOL, "D x != D x~")
    _check(abs(inst.gap - l1_gap(d)) <= 1e-9, "gap disagrees with its closed form")
    return inst


@dataclass
class TwoSolutionInstance:
    d: int
    N: int
    K: int
    z: np.ndarray
    x0: np.ndarray
    x1: np.ndarray
    y: np.ndarray
    split_seed: int

    def solutions(self) -> tuple[SparseSolution, SparseSolution]:
        N = self.N
        return (SparseSolution.from_dense(self.x0[:N], self.x0[N:]),
                SparseSolution.from_dense(self.x1[:N], self.x1[N:]))


def make_two_solution_instance(d: int, split_seed: int = 0) -> TwoSolutionInstance:
    """Two L/2-sparse vectors with the same image, L = 2^(d-1) + 2^d."""
    if d < 2:
        raise ValueError("d must be at least 2 so that the nonzero count is even")
    z = make_picket_fence_z(d)
    N = z.size // 2
    nz = np.flatnonzero(z)
    L = nz.size
    K = L // 2
    rng = np.random.default_rng(split_seed)
    pick = np.sort(rng.choice(nz, K, replace=False))
    x0 = np.zeros(2 * N, dtype=complex)
    x0[pick] = z[pick]
    x1 = x0 - z
    inst = TwoSolutionInstance(d, N, K, z, x0, x1, fc_apply(x0), int(split_seed))

    _check(np.count_nonzero(x0) == K and np.count_nonzero(x1) == K, "split is not L/2 : L/2")
    _check(np.max(np.abs(fc_apply(x0) - fc_apply(x1))) <= ATOL, "D x0 != D x1")
    for x in (x0, x1):
        kp, kq = np.count_nonzero(x[:N]), np.count_nonzero(x[N:])
        _check(2 * kp * kq < N, "a split violates 2 K_p K_q < N")
    return inst


@dataclass
class PlantedInstance:
    y: np.ndarray
    planted: SparseSolution
    dictionary: Dictionary
    provenance: dict = field(default_factory=dict)

    def __iter__(self):
        return iter((self.y, self.planted))


def unit_phases(rng, k: int) -> np.ndarray:
    return np.exp(2j * np.pi * rng.random(k))


def make_random_planted(N: int, K_p: int, K_q: int, seed: int = 0,
                        dict_kind: str = "fourier-canonical",
                        dictionary: Dictionary | None = None, **params) -> PlantedInstance:
    """Uniform supports and unit-modulus random-phase coefficients.

    All randomness comes from ``numpy.random.default_rng(seed)``; the
    dictionary itself is built from ``dict_kind`` and ``params`` unless one
    is passed in.
    """
    if K_p < 0 or K_q < 0 or K_p > N or K_q > N:
        raise ValueError(f"cannot place K_p={K_p}, K_q={K_q} atoms in bases of size {N}")
    d = dictionary if dictionary is not None else make_dictionary(dict_kind, N, **params)
    if d.N != N:
        raise ValueError("dictionary dimension does not match N")
    rng = np.random.default_rng(seed)
    xp = np.zeros(N, dtype=complex)
    xq = np.zeros(N, dtype=complex)
    xp[rng.choice(N, K_p, replace=False)] = unit_phases(rng, K_p)
    xq[rng.choice(N, K_q, replace=False)] = unit_phases(rng, K_q)
    y = d.synthesize(xp, xq)
    prov = {"generator": "random", "seed": int(seed), "kp": int(K_p), "kq": int(K_q),
            "dict": {"kind": dict_kind, "params": dictionary_params(d)}}
    return PlantedInstance(y, SparseSolution.from_dense(xp, xq), d, prov)


def make_picket_planted(N: int, K_p: int, K_q: int, seed: int = 0) -> PlantedInstance:
    """Fourier + canonical instance whose K_q spikes are evenly spaced.

    With K_p K_q = N/2 the gaps between spikes are 2K_p - 1 long, so no
    window of 2K_p samples is spike free.
    """
    if not 1 <= K_q <= N:
        raise ValueError("need 1 <= K_q <= N")
    inst = make_random_planted(N, K_p, 0, seed)
    rng = np.random.default_rng([seed, 1])
    offset = int(rng.integers(N))
    spikes = (offset + np.round(np.arange(K_q) * N / K_q).astype(int)) % N
    xq = np.zeros(N, dtype=complex)
    xq[spikes] = unit_phases(rng, K_q)
    xp = inst.planted.x_p
    y = inst.dictionary.synthesize(xp, xq)
    prov = dict(inst.provenance, generator="picket", kq=int(K_q))
    return PlantedInstance(y, SparseSolution.from_dense(xp, xq), inst.dictionary, prov)
