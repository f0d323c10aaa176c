"""The compiled and fallback kernel paths must agree bit for bit."""
import random

import numpy as np
import pytest

from dlsat import _kernels
from dlsat.concepts import nnf
from dlsat.generate import random_concept, random_gcis
from dlsat.satenc import encode_trace_cnf
from dlsat.semantics import _Program, _signature
from dlsat.syntax import KnowledgeBase

needs_numba = pytest.mark.skipif(not _kernels.HAS_NUMBA, reason="numba not installed")


def _program(i):
    rng = random.Random(f"kernel:{i}")
    c = random_concept(rng, "AB", "r", 14, 2)
    gcis = random_gcis(rng, "AB", "r", rng.randint(0, 1), 5, 1)
    kb = KnowledgeBase((), tuple((nnf(l), nnf(r)) for l, r in gcis))
    atoms, roles = _signature(c, kb)
    return _Program(c, kb, atoms, roles), len(atoms), len(roles)


def _args(prog, n_atoms, n_roles, d, start, stop):
    return (prog.ops, prog.arg1, prog.arg2, prog.target, prog.ck_kind, prog.ck_a,
            prog.ck_b, n_atoms, n_roles, d, start, stop)


def test_numpy_matches_python_reference():
    for i in range(40):
        prog, na, nr = _program(i)
        for d in (1, 2):
            bits = na * d + nr * d * d
            args = _args(prog, na, nr, d, 0, 1 << bits)
            assert _kernels.first_model_numpy(*args) == _kernels._first_model_py(*args)


def test_numpy_respects_window():
    prog, na, nr = _program(3)
    d = 2
    stop = 1 << (na * d + nr * d * d)
    first = _kernels.first_model_numpy(*_args(prog, na, nr, d, 0, stop))
    if first >= 0:
        later = _kernels.first_model_numpy(*_args(prog, na, nr, d, first + 1, stop))
        assert later == -1 or later > first


@needs_numba
def test_numba_matches_numpy():
    for i in range(40):
        prog, na, nr = _program(i)
        for d in (1, 2):
            bits = na * d + nr * d * d
            args = _args(prog, na, nr, d, 0, 1 << bits)
            assert int(_kernels.first_model_numba(*args)) == _kernels.first_model_numpy(*args)


def _flat(clauses):
    lits = np.fromiter((l for c in clauses for l in c), dtype=np.int64)
    starts = np.zeros(len(clauses) + 1, dtype=np.int64)
    np.cumsum([len(c) for c in clauses], out=starts[1:])
    return lits, starts


@needs_numba
def test_dpll_paths_agree():
    for i in range(60):
        c = random_concept(random.Random(f"dpll-kernel:{i}"), "ABC", "rs", 30, 3)
        f = encode_trace_cnf(c)
        lits, starts = _flat(f.clauses)
        sat_a, val_a = _kernels.dpll_numba(lits, starts, f.num_vars)
        sat_b, val_b = _kernels.dpll_python(lits, starts, f.num_vars)
        assert bool(sat_a) == bool(sat_b)
        if sat_a:
            assert list(val_a) == list(val_b)


def test_flag_selects_path(monkeypatch):
    monkeypatch.setattr(_kernels, "USE_NUMBA", False)
    lits, starts = _flat([(1, 2), (-1,)])
    sat, value = _kernels.dpll(lits, starts, 2)
    assert sat and list(value[1:]) == [-1, 1]
