"""Planted-instance recovery sweeps written as CSV."""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import __version__
from .bases import make_dictionary
from .core import prosparse_solve
from .fixtures import make_picket_planted, make_random_planted
from .generalized import GenSolveConfig, admissible, gen_prosparse_solve

COLUMNS = ["n", "kp", "kq", "trials", "exact_recovery_rate", "median_ms", "inside_bound"]


def trial_seed(seed: int, *cell) -> int:
    return int(np.random.SeedSequence([seed, *cell]).generate_state(1)[0])


def inside_bound(d, kp: int, kq: int) -> bool:
    psi, phi = d.psi, d.phi
    return admissible(psi.sampling_factor(kp), phi.local_length, kq, psi.tau, d.N)


def _one(d, dict_kind, n, kp, kq, seed, spikes, kp_limit):
    if spikes == "picket":
        inst = make_picket_planted(n, kp, kq, seed)
    else:
        inst = make_random_planted(n, kp, kq, seed, dictionary=d)
    t0 = time.perf_counter()
    if dict_kind == "fourier-canonical":
        sols = prosparse_solve(inst.y)
    else:
        sols = gen_prosparse_solve(inst.y, GenSolveConfig(d, kp_limit=kp_limit))
    ms = 1000 * (time.perf_counter() - t0)
    return sols.find(inst.planted.x_p, inst.planted.x_q, 1e-7) is not None, ms


def run_bench(ns, kps, kqs, trials: int = 10, dict_kind: str = "fourier-canonical",
              seed: int = 0, spikes: str = "random", threads: int = 1, timing: bool = True,
              kp_limit: int | None = None, **dict_params) -> list[dict]:
    """One row per (N, K_p, K_q) cell, sorted by cell."""
    if spikes == "picket" and dict_kind != "fourier-canonical":
        raise ValueError("picket-fence spikes are defined for fourier-canonical only")
    rows = []
    for n in sorted(ns):
        d = make_dictionary(dict_kind, n, **dict_params)
        for kp in sorted(kps):
            for kq in sorted(kqs):
                if kp > n or kq > n:
                    continue
                seeds = [trial_seed(seed, n, kp, kq, t) for t in range(trials)]
                job = lambda s: _one(d, dict_kind, n, kp, kq, s, spikes, kp_limit)  # noqa: E731
                if threads > 1:
                    with ThreadPoolExecutor(max_workers=threads) as pool:
                        res = list(pool.map(job, seeds))
                else:
                    res = [job(s) for s in seeds]
                hits = sum(ok for ok, _ in res)
                rows.append({
                    "n": n, "kp": kp, "kq": kq, "trials": trials,
                    "exact_recovery_rate": hits / trials if trials else float("nan"),
                    "median_ms": round(float(np.median([ms for _, ms in res])), 3) if timing and trials else "",
                    "inside_bound": int(inside_bound(d, kp, kq)),
                })
    return rows


def to_csv(rows, provenance: dict) -> str:
    buf = io.StringIO()
    for k in sorted(provenance):
        buf.write(f"# {k}: {provenance[k]}\n")
    w = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)
    return buf.getvalue()


def provenance(**kw) -> dict:
    return {"generator": f"prosparse {__version__} bench", **kw}
