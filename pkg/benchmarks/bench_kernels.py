"""Compare the numba kernels with the numpy / pure-Python fallbacks.

    python benchmarks/bench_kernels.py [--instances N] [--repeat R]

Both paths run on the same inputs; results are checked for equality before
timings are reported.  The first numba call per signature includes JIT
compilation (or a cache load), so it is timed separately as warm-up.
"""
from __future__ import annotations

import argparse
import random
import time

import numpy as np

from dlsat import _kernels
from dlsat.concepts import nnf
from dlsat.generate import random_concept, random_gcis
from dlsat.satenc import encode_trace_cnf
from dlsat.semantics import _Program, _signature
from dlsat.syntax import KnowledgeBase


def enumeration_jobs(n: int):
    jobs = []
    for i in range(n):
        rng = random.Random(f"bench-enum:{i}")
        # unsatisfiable-leaning instances scan the whole space
        c = random_concept(rng, "AB", "r", 25, 2, p_and=0.85)
        kb = KnowledgeBase((), tuple((nnf(l), nnf(r)) for l, r in random_gcis(rng, "AB", "r", 1, 5, 1)))
        atoms, roles = _signature(c, kb)
        prog = _Program(c, kb, atoms, roles)
        d = 3
        bits = len(atoms) * d + len(roles) * d * d
        jobs.append((prog.ops, prog.arg1, prog.arg2, prog.target, prog.ck_kind, prog.ck_a,
                     prog.ck_b, len(atoms), len(roles), d, 0, 1 << bits))
    return jobs


def dpll_jobs(n: int):
    jobs = []
    for i in range(n):
        c = random_concept(random.Random(f"bench-dpll:{i}"), "ABC", "rs", 40, 4, p_and=0.75)
        f = encode_trace_cnf(c)
        lits = np.fromiter((l for cl in f.clauses for l in cl), dtype=np.int64)
        starts = np.zeros(len(f.clauses) + 1, dtype=np.int64)
        np.cumsum([len(cl) for cl in f.clauses], out=starts[1:])
        jobs.append((lits, starts, f.num_vars))
    return jobs


def timed(fn, jobs, repeat):
    best, results = float("inf"), None
    for _ in range(repeat):
        start = time.perf_counter()
        results = [fn(*job) for job in jobs]
        best = min(best, time.perf_counter() - start)
    return best, results


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--instances", type=int, default=200)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args()
    if not _kernels.HAS_NUMBA:
        raise SystemExit("numba is not installed; nothing to compare")

    enum = enumeration_jobs(args.instances)
    start = time.perf_counter()
    _kernels.first_model_numba(*enum[0])
    warm_enum = time.perf_counter() - start
    t_numba, r_numba = timed(lambda *a: int(_kernels.first_model_numba(*a)), enum, args.repeat)
    t_numpy, r_numpy = timed(_kernels.first_model_numpy, enum, args.repeat)
    assert r_numba == r_numpy, "enumeration kernels disagree"

    sat = dpll_jobs(args.instances)
    start = time.perf_counter()
    _kernels.dpll_numba(*sat[0])
    warm_dpll = time.perf_counter() - start
    d_numba, s_numba = timed(_kernels.dpll_numba, sat, args.repeat)
    d_python, s_python = timed(_kernels.dpll_python, sat, args.repeat)
    for (a, va), (b, vb) in zip(s_numba, s_python):
        assert bool(a) == bool(b) and (not a or list(va) == list(vb)), "DPLL kernels disagree"

    found = sum(r >= 0 for r in r_numba)
    print(f"{'kernel':<28}{'numba':>10}{'fallback':>12}{'speedup':>10}")
    print(f"{'enumeration (d=3, x' + str(len(enum)) + ')':<28}{t_numba:>9.3f}s{t_numpy:>11.3f}s"
          f"{t_numpy / t_numba:>9.1f}x")
    print(f"{'dpll (x' + str(len(sat)) + ')':<28}{d_numba:>9.3f}s{d_python:>11.3f}s"
          f"{d_python / d_numba:>9.1f}x")
    print(f"warm-up: enumeration {warm_enum:.2f}s, dpll {warm_dpll:.2f}s; "
          f"{found}/{len(enum)} enumeration jobs found a model")


if __name__ == "__main__":
    main()
