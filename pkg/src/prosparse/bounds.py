"""Recovery-bound predicates evaluated exactly.

Coherence enters through mu^2 as a Fraction, so for the Fourier + canonical
pair (mu^2 = 1/N) every predicate is decided in rational arithmetic. The
inequalities with a bare mu are squared after checking that both sides are
non-negative.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

PREDICATES = ("p0_unique", "bp_tight", "bp_simple", "prosparse_product",
              "prosparse_total", "generalized")


def as_mu2(mu=None, N: int | None = None) -> Fraction:
    """mu^2 as an exact Fraction; defaults to 1/N (Fourier + canonical)."""
    if mu is None:
        if N is None:
            raise ValueError("need mu or N")
        return Fraction(1, N)
    if isinstance(mu, str):
        return Fraction(mu) ** 2
    return Fraction(mu) ** 2


def _lt_sqrt(lhs2: Fraction, rhs: Fraction):
    """Compare sqrt(lhs2) with rhs: returns (strictly less, equal)."""
    if rhs < 0:
        return False, False
    return lhs2 < rhs * rhs, lhs2 == rhs * rhs


def p0_unique(K: int, mu2: Fraction):
    """K < 1/mu."""
    v = K * K * mu2
    return v < 1, v == 1


def bp_tight(Kp: int, Kq: int, mu2: Fraction):
    """2 mu^2 Kp Kq + mu max(Kp, Kq) - 1 < 0."""
    rhs = 1 - 2 * mu2 * Kp * Kq
    m = max(Kp, Kq)
    return _lt_sqrt(mu2 * m * m, rhs)


def bp_simple(K: int, mu2: Fraction):
    """K < (sqrt(2) - 1/2) / mu, i.e. K mu < 7/4 - K^2 mu^2."""
    k2 = K * K * mu2
    return _lt_sqrt(k2, Fraction(7, 4) - k2)


def prosparse_product(Kp: int, Kq: int, N: int):
    return 2 * Kp * Kq < N, 2 * Kp * Kq == N


def prosparse_total(K: int, N: int):
    return K * K < 2 * N, K * K == 2 * N


def generalized(Kp: int, Kq: int, N: int, S, L: int, tau: int):
    """(S(Kp) + L - 1)(Kq + tau) < N + tau L."""
    lhs = (S(Kp) + L - 1) * (Kq + tau)
    rhs = N + tau * L
    return lhs < rhs, lhs == rhs


@dataclass
class BoundRow:
    N: int
    kp: int
    kq: int
    p0_unique: bool
    bp_tight: bool
    bp_simple: bool
    prosparse_product: bool
    prosparse_total: bool
    generalized: bool | None = None
    equality: list = field(default_factory=list)


def evaluate_bounds(N: int, mu=None, K_p: int = 0, K_q: int = 0, S=None, L: int | None = None,
                    tau: int | None = None, mu2: Fraction | None = None) -> BoundRow:
    """Every bound at one (K_p, K_q). ``S`` is a sampling-factor callable."""
    if K_p < 0 or K_q < 0:
        raise ValueError("counts must be non-negative")
    m2 = mu2 if mu2 is not None else as_mu2(mu, N)
    if not 0 < m2 <= 1:
        raise ValueError("mu must lie in (0, 1]")
    K = K_p + K_q
    res = {
        "p0_unique": p0_unique(K, m2),
        "bp_tight": bp_tight(K_p, K_q, m2),
        "bp_simple": bp_simple(K, m2),
        "prosparse_product": prosparse_product(K_p, K_q, N),
        "prosparse_total": prosparse_total(K, N),
    }
    if S is not None:
        res["generalized"] = generalized(K_p, K_q, N, S, L if L is not None else 1,
                                         tau if tau is not None else 0)
    row = BoundRow(N, K_p, K_q, **{k: v[0] for k, v in res.items()})
    row.equality = [k for k, v in res.items() if v[1]]
    return row


@dataclass
class BoundReport:
    N: int
    mu2: Fraction
    rows: list

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        gen = any(r.generalized is not None for r in self.rows)
        cols = ["n", "kp", "kq"] + [p for p in PREDICATES if gen or p != "generalized"] + ["equality"]
        w.writerow(cols)
        for r in self.rows:
            d = asdict(r)
            vals = [r.N, r.kp, r.kq] + [int(d[p]) for p in cols[3:-1]] + [";".join(r.equality)]
            w.writerow(vals)
        return buf.getvalue()

    def threshold(self, predicate: str) -> int:
        """Largest K = K_p + K_q such that every split of K passes."""
        best = -1
        by_k: dict = {}
        for r in self.rows:
            by_k.setdefault(r.kp + r.kq, []).append(getattr(r, predicate))
        for k in sorted(by_k):
            if all(by_k[k]):
                best = k
            else:
                break
        return best


def bound_report(N: int, mu=None, kmax: int | None = None, S=None, L=None, tau=None,
                 mu2: Fraction | None = None) -> BoundReport:
    """Rows for every (K_p, K_q) with 0 <= K_p, K_q <= kmax."""
    m2 = mu2 if mu2 is not None else as_mu2(mu, N)
    if kmax is None:
        kmax = math.isqrt(2 * N) + 1
    rows = [evaluate_bounds(N, K_p=a, K_q=b, S=S, L=L, tau=tau, mu2=m2)
            for a in range(kmax + 1) for b in range(kmax + 1)]
    return BoundReport(N, m2, rows)


def boundary_curves(N: int = 144, mu: float | None = None, kp_max: int | None = None):
    """Boundary K_q as a function of integer K_p for each closed form.

    Rows hold ``kp`` and the real-valued K_q at which each bound becomes an
    equality; None where the curve has no non-negative point.
    """
    m = 1 / math.sqrt(N) if mu is None else float(mu)
    if kp_max is None:
        kp_max = int(math.ceil(max(1 / m, math.sqrt(2 * N))))

    def tight(kp):
        if kp == 0:
            return 1 / m
        upper = 1 / (2 * m * m * kp + m)
        if upper >= kp:
            return upper
        lower = (1 - m * kp) / (2 * m * m * kp)
        return lower if lower >= 0 else None

    out = []
    for kp in range(kp_max + 1):
        def nonneg(v):
            return v if v is not None and v >= 0 else None
        out.append({
            "kp": kp,
            "p0_unique": nonneg(1 / m - kp),
            "bp_tight": tight(kp),
            "bp_simple": nonneg((math.sqrt(2) - 0.5) / m - kp),
            "prosparse_product": N / (2 * kp) if kp else None,
            "prosparse_total": nonneg(math.sqrt(2 * N) - kp),
        })
    return out
