"""JSON instance and solution files.

Complex numbers are ``[re, im]`` pairs; floats go through ``json`` which
writes the shortest decimal that round-trips a binary64 value.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .solutions import SolutionSet, SparseSolution

SCHEMA_VERSION = 1


class MalformedInput(ValueError):
    pass


def _c(z) -> list:
    z = complex(z)
    return [float(z.real), float(z.imag)]


def _from_c(pair) -> complex:
    if not (isinstance(pair, (list, tuple)) and len(pair) == 2):
        raise MalformedInput(f"expected [re, im], got {pair!r}")
    re, im = pair
    if not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in (re, im)):
        raise MalformedInput(f"non-numeric complex entry {pair!r}")
    if not (math.isfinite(re) and math.isfinite(im)):
        raise MalformedInput("non-finite complex entry")
    return complex(re, im)


def solution_to_dict(s: SparseSolution) -> dict:
    at = s.discovered_at
    return {
        "kp": s.kp,
        "kq": s.kq,
        "fourier": [{"index": i, "coeff": _c(c)} for i, c in zip(s.p_support, s.p_coeffs)],
        "local": [{"index": i, "coeff": _c(c)} for i, c in zip(s.q_support, s.q_coeffs)],
        "discovered_at": [at[0], at[1], at[2]],
        "resynthesis_error": float(s.resynthesis_error),
    }


def solution_from_dict(d: dict, N: int) -> SparseSolution:
    try:
        p = sorted((int(e["index"]), _from_c(e["coeff"])) for e in d["fourier"])
        q = sorted((int(e["index"]), _from_c(e["coeff"])) for e in d["local"])
    except (KeyError, TypeError) as exc:
        raise MalformedInput(f"bad solution entry: {exc}") from exc
    for i, _ in p + q:
        if not 0 <= i < N:
            raise MalformedInput(f"index {i} outside [0, {N})")
    at = tuple(d.get("discovered_at", (0, None, "direct")))
    return SparseSolution(N, tuple(i for i, _ in p), np.array([c for _, c in p], complex),
                          tuple(i for i, _ in q), np.array([c for _, c in q], complex),
                          at, float(d.get("resynthesis_error", 0.0)))


def instance_to_dict(y, dict_kind: str, params: dict, provenance: dict,
                     planted: SparseSolution | None = None,
                     alternatives: list | None = None) -> dict:
    y = np.asarray(y, dtype=complex)
    out = {
        "schema_version": SCHEMA_VERSION,
        "n": int(y.size),
        "dict": {"kind": dict_kind, "params": params},
        "samples": [_c(v) for v in y],
        "planted": solution_to_dict(planted) if planted is not None else None,
        "provenance": provenance,
    }
    if alternatives:
        out["alternatives"] = [solution_to_dict(s) for s in alternatives]
    return out


class Instance:
    def __init__(self, data: dict):
        self.data = data
        self.n = data["n"]
        self.y = np.array([_from_c(p) for p in data["samples"]], dtype=complex)
        self.dict_kind = data["dict"]["kind"]
        self.params = dict(data["dict"].get("params") or {})
        pl = data.get("planted")
        self.planted = solution_from_dict(pl, self.n) if pl else None
        self.alternatives = [solution_from_dict(a, self.n) for a in data.get("alternatives", [])]
        self.provenance = data.get("provenance", {})


def _check_header(data):
    if not isinstance(data, dict):
        raise MalformedInput("top level must be a JSON object")
    if data.get("schema_version") != SCHEMA_VERSION:
        raise MalformedInput(f"unsupported schema_version {data.get('schema_version')!r}")
    n = data.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise MalformedInput("n must be a positive integer")
    return n


def read_instance(text: str) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    n = _check_header(data)
    samples = data.get("samples")
    if not isinstance(samples, list) or len(samples) != n:
        raise MalformedInput(f"samples must be a list of {n} [re, im] pairs")
    d = data.get("dict")
    if not isinstance(d, dict) or not isinstance(d.get("kind"), str):
        raise MalformedInput("dict must be an object with a kind")
    try:
        return Instance(data)
    except (KeyError, TypeError) as exc:
        raise MalformedInput(str(exc)) from exc


def solutions_to_dict(sols: SolutionSet, dict_kind: str, params: dict, meta: dict | None = None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "n": sols.N,
        "dict": {"kind": dict_kind, "params": params},
        "solutions": [solution_to_dict(s) for s in sols],
        "meta": {**sols.meta, **(meta or {})},
    }


def read_solutions(text: str) -> SolutionSet:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MalformedInput(f"invalid JSON: {exc}") from exc
    n = _check_header(data)
    out = SolutionSet(n)
    out.meta = data.get("meta", {})
    for s in data.get("solutions", []):
        out.add(solution_from_dict(s, n))
    return out


def dumps(obj) -> str:
    return json.dumps(obj, indent=1, allow_nan=False) + "\n"
