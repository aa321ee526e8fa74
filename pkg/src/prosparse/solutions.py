"""Sparse solution records and the deduplicated, canonically ordered set."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

COEFF_MATCH = 1e-8


class SolverInvariantError(RuntimeError):
    """A solver produced output that violates one of its own contracts."""


@dataclass(frozen=True, eq=False)
class SparseSolution:
    """A (K_p, K_q)-sparse pair: coefficients on Psi (``p``) and on Phi (``q``).

    ``discovered_at`` is ``(K_p pass, window start, pass id)``; the trivial
    seeds use pass 0 and start ``None``.
    """

    N: int
    p_support: tuple[int, ...]
    p_coeffs: np.ndarray
    q_support: tuple[int, ...]
    q_coeffs: np.ndarray
    discovered_at: tuple = (0, None, "direct")
    resynthesis_error: float = 0.0
    meta: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_dense(cls, x_p, x_q, discovered_at=(0, None, "direct"), resynthesis_error=0.0):
        x_p = np.asarray(x_p, dtype=complex)
        x_q = np.asarray(x_q, dtype=complex)
        ps = np.flatnonzero(x_p)
        qs = np.flatnonzero(x_q)
        return cls(x_p.size, tuple(int(i) for i in ps), x_p[ps],
                   tuple(int(i) for i in qs), x_q[qs], discovered_at, resynthesis_error)

    @property
    def kp(self) -> int:
        return len(self.p_support)

    @property
    def kq(self) -> int:
        return len(self.q_support)

    @property
    def key(self):
        return (self.p_support, self.q_support)

    @property
    def sort_key(self):
        return (self.kp + self.kq, self.kp, self.p_support, self.q_support)

    @property
    def x_p(self) -> np.ndarray:
        x = np.zeros(self.N, dtype=complex)
        x[list(self.p_support)] = self.p_coeffs
        return x

    @property
    def x_q(self) -> np.ndarray:
        x = np.zeros(self.N, dtype=complex)
        x[list(self.q_support)] = self.q_coeffs
        return x

    @property
    def is_trivial(self) -> bool:
        return self.kp == 0 or self.kq == 0

    def matches(self, x_p, x_q, rtol: float = 1e-7) -> bool:
        """Same supports as the dense pair and coefficients within ``rtol``."""
        x_p = np.asarray(x_p)
        x_q = np.asarray(x_q)
        if self.p_support != tuple(np.flatnonzero(x_p)) or \
                self.q_support != tuple(np.flatnonzero(x_q)):
            return False
        ref = np.concatenate([x_p[list(self.p_support)], x_q[list(self.q_support)]])
        got = np.concatenate([self.p_coeffs, self.q_coeffs])
        if ref.size == 0:
            return True
        return bool(np.max(np.abs(got - ref)) <= rtol * np.max(np.abs(ref)))


class SolutionSet:
    """Solutions keyed by their support pair, first discovery wins."""

    def __init__(self, N: int):
        self.N = N
        self._by_key: dict = {}
        self.meta: dict = {}

    def add(self, sol: SparseSolution) -> bool:
        prev = self._by_key.get(sol.key)
        if prev is None:
            self._by_key[sol.key] = sol
            return True
        a = np.concatenate([prev.p_coeffs, prev.q_coeffs])
        b = np.concatenate([sol.p_coeffs, sol.q_coeffs])
        scale = max(1.0, float(np.max(np.abs(a), initial=0.0)))
        if a.size and np.max(np.abs(a - b)) > COEFF_MATCH * scale:
            raise SolverInvariantError(
                f"two solutions share supports {sol.key} but differ in coefficients "
                f"by {np.max(np.abs(a - b)):.3e}")
        return False

    @property
    def solutions(self) -> list[SparseSolution]:
        return sorted(self._by_key.values(), key=lambda s: s.sort_key)

    def __iter__(self):
        return iter(self.solutions)

    def __len__(self):
        return len(self._by_key)

    def __contains__(self, key):
        return key in self._by_key

    def get(self, p_support, q_support):
        return self._by_key.get((tuple(p_support), tuple(q_support)))

    def find(self, x_p, x_q, rtol: float = 1e-7) -> SparseSolution | None:
        """The member matching a dense planted pair, or ``None``."""
        key = (tuple(int(i) for i in np.flatnonzero(x_p)),
               tuple(int(i) for i in np.flatnonzero(x_q)))
        sol = self._by_key.get(key)
        if sol is not None and sol.matches(x_p, x_q, rtol):
            return sol
        return None

    def nontrivial(self) -> list[SparseSolution]:
        return [s for s in self.solutions if not s.is_trivial]

    def filtered(self, pred) -> "SolutionSet":
        out = SolutionSet(self.N)
        out.meta = dict(self.meta)
        for s in self.solutions:
            if pred(s):
                out._by_key[s.key] = s
        return out
