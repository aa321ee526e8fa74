"""Command-line entry point.

Exit codes: 0 success, 1 malformed input, 2 solver invariant violation,
3 basis pursuit did not converge, 4 no nontrivial solution (solve without
--allow-empty).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from datetime import datetime, timezone
from fractions import Fraction

import numpy as np

from . import __version__, bench, selftest
from .bases import DICT_KINDS, Dictionary, dictionary_params, make_dictionary
from .bounds import bound_report, boundary_curves
from .bp import FourierCanonicalOperator, debias, l1_equality_solve, support
from .core import prosparse_solve
from .fixtures import FixtureError, make_bp_counterexample, make_random_planted, make_two_solution_instance
from .generalized import GenSolveConfig, gen_prosparse_solve
from .prony import Reject, Tolerances, prony_fit
from .serialize import MalformedInput, dumps, instance_to_dict, read_instance, solutions_to_dict
from .solutions import SolverInvariantError, SparseSolution

EXIT_MALFORMED = 1
EXIT_INVARIANT = 2
EXIT_NO_CONVERGENCE = 3
EXIT_EMPTY = 4


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    g = p.add_argument_group("global options")
    g.add_argument("--tol-rank", type=float, default=1e-8, help="relative singular value cutoff")
    g.add_argument("--tol-root", type=float, default=1e-7, help="grid root acceptance")
    g.add_argument("--tol-zero", type=float, default=1e-8, help="relative zero threshold")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--threads", type=int, default=1, help="affects wall time only")
    g.add_argument("--out", default="-", help="output file, '-' for stdout")
    g.add_argument("--format", choices=("json", "csv"), default=None)
    g.add_argument("--stamp", action="store_true", help="record the current UTC time in provenance")
    return p


def _dict_args(p):
    p.add_argument("--dict", dest="dict_kind", choices=DICT_KINDS + ("custom",), default=None)
    p.add_argument("--L", type=int, default=None, help="local support length")
    p.add_argument("--basis-seed", type=int, default=None)
    p.add_argument("--c1", type=float, default=None, help="Gaussian sampling constant")


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = argparse.ArgumentParser(prog="prosparse", description=__doc__.splitlines()[0])
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="cmd", required=True)

    p = sub.add_parser("solve", parents=[common], help="all sparse representations of a signal")
    p.add_argument("--input", default="-")
    _dict_args(p)
    p.add_argument("--precondition", default=None, help="JSON file with an N x N matrix of [re, im]")
    p.add_argument("--kp-limit", type=int, default=None)
    p.add_argument("--allow-empty", action="store_true")

    p = sub.add_parser("prony", parents=[common], help="single-window Prony fit")
    p.add_argument("--input", default="-")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--start", type=int, default=0)
    p.add_argument("--no-grid", action="store_true")

    p = sub.add_parser("bounds", parents=[common], help="recovery-bound table")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", default=None, help="coherence, e.g. 0.0833 or 1/12")
    p.add_argument("--dict", dest="dict_kind", choices=DICT_KINDS[:3], default="fourier-canonical")
    p.add_argument("--L", type=int, default=8)
    p.add_argument("--kmax", type=int, default=None)
    p.add_argument("--curves", action="store_true", help="emit boundary curves instead")

    p = sub.add_parser("generate", parents=[common], help="write an instance file")
    p.add_argument("kind", choices=("counterexample-bp", "two-solutions", "random"))
    p.add_argument("--d", type=int, default=4)
    p.add_argument("--split-seed", type=int, default=None)
    p.add_argument("--n", type=int, default=64)
    p.add_argument("--kp", type=int, default=2)
    p.add_argument("--kq", type=int, default=2)
    _dict_args(p)

    p = sub.add_parser("bp", parents=[common], help="l1 baseline")
    p.add_argument("--input", default="-")
    _dict_args(p)
    p.add_argument("--feas-tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=50000)

    p = sub.add_parser("bench", parents=[common], help="recovery-rate sweep")
    p.add_argument("--n", type=int, nargs="+", default=[64])
    p.add_argument("--kp", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--kq", type=int, nargs="+", default=[1, 2, 3, 4])
    p.add_argument("--trials", type=int, default=10)
    _dict_args(p)
    p.add_argument("--spikes", choices=("random", "picket"), default="random")
    p.add_argument("--kp-limit", type=int, default=None)
    p.add_argument("--no-timing", action="store_true", help="leave median_ms empty")

    sub.add_parser("selftest", parents=[common], help="run the built-in invariant checks")
    return ap


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _write(args, text: str):
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w") as fh:
            fh.write(text)


def _tols(args) -> Tolerances:
    return Tolerances(rank=args.tol_rank, root=args.tol_root)


def _provenance(args, generator: str, **extra) -> dict:
    stamp = datetime.now(timezone.utc).isoformat(timespec="seconds") if args.stamp else None
    return {"generator": generator, "seed": args.seed, "timestamp": stamp,
            "version": __version__, **extra}


def _dict_params(args, base: dict | None = None) -> dict:
    params = dict(base or {})
    for key, val in (("L", args.L), ("basis_seed", args.basis_seed), ("c1", args.c1)):
        if val is not None:
            params[key] = val
    return params


def _build_dict(kind: str, N: int, params: dict) -> Dictionary:
    allowed = {"L", "basis_seed", "c1", "p_floor"}
    return make_dictionary(kind, N, **{k: v for k, v in params.items() if k in allowed})


def _solutions_csv(sols) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["kp", "kq", "fourier_support", "local_support", "pass", "kp_pass", "start",
                "resynthesis_error"])
    for s in sols:
        at = s.discovered_at
        w.writerow([s.kp, s.kq, " ".join(map(str, s.p_support)), " ".join(map(str, s.q_support)),
                    at[2], at[0], "" if at[1] is None else at[1], repr(s.resynthesis_error)])
    return buf.getvalue()


def cmd_solve(args) -> int:
    inst = read_instance(_read(args.input))
    kind = args.dict_kind or inst.dict_kind
    if kind == "custom":
        raise MalformedInput("custom dictionaries are only available through the library API")
    params = _dict_params(args, inst.params if kind == inst.dict_kind else {})
    tols = _tols(args)
    A = None
    if args.precondition:
        raw = json.loads(_read(args.precondition))
        A = np.array([[complex(*e) for e in row] for row in raw], dtype=complex)
        if A.shape != (inst.n, inst.n):
            raise MalformedInput("preconditioner must be N x N")
    if kind == "fourier-canonical" and A is None and args.kp_limit is None:
        sols = prosparse_solve(inst.y, tols=tols, zero_tol=args.tol_zero, threads=args.threads)
    else:
        d = _build_dict(kind, inst.n, params)
        if A is not None:
            d = Dictionary(d.psi, d.phi, A)
        cfg = GenSolveConfig(d, kp_limit=args.kp_limit, tols=tols, zero_tol=args.tol_zero,
                             threads=args.threads)
        sols = gen_prosparse_solve(inst.y, cfg)
    if (args.format or "json") == "csv":
        _write(args, _solutions_csv(sols))
    else:
        _write(args, dumps(solutions_to_dict(sols, kind, params)))
    if not sols.nontrivial() and not args.allow_empty:
        return EXIT_EMPTY
    return 0


def cmd_prony(args) -> int:
    inst = read_instance(_read(args.input))
    y, N, K = inst.y, inst.n, args.k
    if K < 1 or 2 * K > N:
        raise MalformedInput("need 1 <= k <= N/2")
    seg = y[(args.start + np.arange(2 * K)) % N]
    try:
        m = prony_fit(seg, K, N, start=args.start, require_grid=not args.no_grid, tols=_tols(args))
        out = {"status": "accepted", "K": K, "start": args.start,
               "roots": [[float(u.real), float(u.imag)] for u in m.roots],
               "weights": [[float(w.real), float(w.imag)] for w in m.weights],
               "grid_indices": list(m.grid_indices) if m.grid_indices is not None else None}
    except Reject as r:
        out = {"status": "rejected", "K": K, "start": args.start, "reason": r.reason, "rank": r.rank}
    _write(args, dumps(out))
    return 0


def _bounds_setup(args):
    N = args.n
    if args.dict_kind == "fourier-canonical":
        return Fraction(1, N), (lambda k: 2 * k), 1, 0
    if args.dict_kind == "fourier-localfourier":
        return Fraction(args.L, N), (lambda k: 2 * k), args.L, 0
    return Fraction(2, N), (lambda k: 4 * k), 1, 1


def cmd_bounds(args) -> int:
    mu2, S, L, tau = _bounds_setup(args)
    if args.mu is not None:
        mu2 = Fraction(args.mu) ** 2
    if args.curves:
        rows = boundary_curves(args.n, float(mu2) ** 0.5, args.kmax)
        if (args.format or "csv") == "json":
            _write(args, dumps(rows))
        else:
            buf = io.StringIO()
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            for r in rows:
                w.writerow({k: ("" if v is None else repr(float(v)) if k != "kp" else v)
                            for k, v in r.items()})
            _write(args, buf.getvalue())
        return 0
    rep = bound_report(args.n, kmax=args.kmax, S=S, L=L, tau=tau, mu2=mu2)
    if (args.format or "csv") == "json":
        _write(args, dumps({"n": args.n, "mu2": str(mu2),
                            "thresholds": {p: rep.threshold(p) for p in
                                           ("p0_unique", "bp_simple", "prosparse_total")},
                            "rows": [r.__dict__ for r in rep.rows]}))
    else:
        _write(args, rep.to_csv())
    return 0


def cmd_generate(args) -> int:
    if args.kind == "counterexample-bp":
        ce = make_bp_counterexample(args.d)
        N = ce.N
        doc = instance_to_dict(ce.y, "fourier-canonical", {},
                               _provenance(args, "counterexample-bp", d=args.d),
                               planted=ce.planted,
                               alternatives=[SparseSolution.from_dense(ce.x_tilde[:N], ce.x_tilde[N:])])
    elif args.kind == "two-solutions":
        split = args.seed if args.split_seed is None else args.split_seed
        ts = make_two_solution_instance(args.d, split)
        s0, s1 = ts.solutions()
        doc = instance_to_dict(ts.y, "fourier-canonical", {},
                               _provenance(args, "two-solutions", d=args.d, split_seed=split),
                               planted=s0, alternatives=[s1])
    else:
        kind = args.dict_kind or "fourier-canonical"
        params = _dict_params(args)
        d = _build_dict(kind, args.n, params)
        inst = make_random_planted(args.n, args.kp, args.kq, args.seed, kind, dictionary=d)
        doc = instance_to_dict(inst.y, kind, dictionary_params(d),
                               _provenance(args, "random", kp=args.kp, kq=args.kq),
                               planted=inst.planted)
    _write(args, dumps(doc))
    return 0


def cmd_bp(args) -> int:
    inst = read_instance(_read(args.input))
    kind = args.dict_kind or inst.dict_kind
    N = inst.n
    if kind == "fourier-canonical":
        op = FourierCanonicalOperator(N)
        A = None
    else:
        d = _build_dict(kind, N, _dict_params(args, inst.params if kind == inst.dict_kind else {}))
        A = op = d.matrix()
    res = l1_equality_solve(op, inst.y, feas_tol=args.feas_tol, max_iter=args.max_iter)
    supp = support(res.solution)
    x = debias(A if A is not None else op, inst.y, supp)
    ynorm = float(np.linalg.norm(inst.y)) or 1.0
    out = {
        "converged": bool(res.converged),
        "iterations": int(res.iterations),
        "objective": float(res.objective),
        "primal_residual": float(res.primal_residual),
        "relative_residual": float(res.primal_residual) / ynorm,
        "fourier": [{"index": int(i), "coeff": [float(x[i].real), float(x[i].imag)]}
                    for i in supp if i < N],
        "local": [{"index": int(i - N), "coeff": [float(x[i].real), float(x[i].imag)]}
                  for i in supp if i >= N],
    }
    if inst.planted is not None:
        truth = set(inst.planted.p_support) | {N + i for i in inst.planted.q_support}
        out["matches_planted_support"] = set(int(i) for i in supp) == truth
    _write(args, dumps(out))
    return 0 if res.converged else EXIT_NO_CONVERGENCE


def cmd_bench(args) -> int:
    kind = args.dict_kind or "fourier-canonical"
    params = _dict_params(args)
    rows = bench.run_bench(args.n, args.kp, args.kq, trials=args.trials, dict_kind=kind,
                           seed=args.seed, spikes=args.spikes, threads=args.threads,
                           timing=not args.no_timing, kp_limit=args.kp_limit, **params)
    prov = bench.provenance(seed=args.seed, dict=kind, params=json.dumps(params, sort_keys=True),
                            spikes=args.spikes, trials=args.trials,
                            timestamp=_provenance(args, "")["timestamp"])
    if (args.format or "csv") == "json":
        _write(args, dumps({"provenance": prov, "rows": rows}))
    else:
        _write(args, bench.to_csv(rows, prov))
    return 0


def cmd_selftest(args) -> int:
    lines = []
    ok = selftest.run(lines.append)
    _write(args, "\n".join(lines) + "\n")
    return 0 if ok else EXIT_INVARIANT


COMMANDS = {"solve": cmd_solve, "prony": cmd_prony, "bounds": cmd_bounds, "generate": cmd_generate,
            "bp": cmd_bp, "bench": cmd_bench, "selftest": cmd_selftest}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads < 1:
        print("error: --threads must be positive", file=sys.stderr)
        return EXIT_MALFORMED
    try:
        return COMMANDS[args.cmd](args)
    except (MalformedInput, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED
    except (SolverInvariantError, FixtureError) as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_MALFORMED


if __name__ == "__main__":
    sys.exit(main())
