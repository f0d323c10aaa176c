"""Hot loops: interpretation enumeration and DPLL.

Each kernel has a numba-compiled path and a pure numpy/Python path.  The
compiled path is used when numba imports and ``DLSAT_NO_NUMBA`` is unset
(or ``0``).  Both paths return identical results.
"""
from __future__ import annotations

import os

import numpy as np

try:
    import numba
    HAS_NUMBA = True
except ImportError:  # pragma: no cover
    numba = None
    HAS_NUMBA = False

USE_NUMBA = HAS_NUMBA and os.environ.get("DLSAT_NO_NUMBA", "0") in ("", "0")

# opcodes of the bitmask evaluation program
OP_ATOM, OP_TOP, OP_BOT, OP_NOT, OP_AND, OP_OR, OP_EXISTS, OP_FORALL = range(8)
# constraint kinds
CHECK_EQUAL, CHECK_SUBSET = 0, 1

NUMPY_BATCH = 1 << 15


def _first_model_py(ops, arg1, arg2, target, ck_kind, ck_a, ck_b,
                    n_atoms, n_roles, d, start, stop):
    """Scan interpretation codes in ``[start, stop)``; first model or -1.

    Code layout: atom ``p`` owns bits ``p*d .. p*d+d-1`` (bit ``i`` is
    element ``i``); role ``q`` owns ``d*d`` bits after all atoms, row-major
    by source element.
    """
    n_ops = ops.shape[0]
    regs = np.zeros(n_ops, np.int64)
    rows = np.zeros((max(n_roles, 1), d), np.int64)
    full = (np.int64(1) << d) - 1
    base = n_atoms * d
    for t in range(start, stop):
        for q in range(n_roles):
            for i in range(d):
                rows[q, i] = (t >> (base + (q * d + i) * d)) & full
        for k in range(n_ops):
            op = ops[k]
            if op == OP_ATOM:
                regs[k] = (t >> (arg1[k] * d)) & full
            elif op == OP_TOP:
                regs[k] = full
            elif op == OP_BOT:
                regs[k] = 0
            elif op == OP_NOT:
                regs[k] = full & ~regs[arg1[k]]
            elif op == OP_AND:
                regs[k] = regs[arg1[k]] & regs[arg2[k]]
            elif op == OP_OR:
                regs[k] = regs[arg1[k]] | regs[arg2[k]]
            elif op == OP_EXISTS:
                m = np.int64(0)
                f = regs[arg1[k]]
                for i in range(d):
                    if rows[arg2[k], i] & f:
                        m |= np.int64(1) << i
                regs[k] = m
            else:
                m = np.int64(0)
                f = regs[arg1[k]]
                for i in range(d):
                    if rows[arg2[k], i] & ~f & full == 0:
                        m |= np.int64(1) << i
                regs[k] = m
        if regs[target] == 0:
            continue
        ok = True
        for j in range(ck_kind.shape[0]):
            a = regs[ck_a[j]]
            b = regs[ck_b[j]]
            if ck_kind[j] == CHECK_EQUAL:
                if a != b:
                    ok = False
                    break
            elif a & ~b & full:
                ok = False
                break
        if ok:
            return t
    return -1


def first_model_numpy(ops, arg1, arg2, target, ck_kind, ck_a, ck_b,
                      n_atoms, n_roles, d, start, stop):
    """Vectorised scan over batches of interpretation codes."""
    full = (1 << d) - 1
    base = n_atoms * d
    for lo in range(start, stop, NUMPY_BATCH):
        t = np.arange(lo, min(stop, lo + NUMPY_BATCH), dtype=np.int64)
        rows = [[(t >> (base + (q * d + i) * d)) & full for i in range(d)]
                for q in range(n_roles)]
        regs: list[np.ndarray] = []
        for k in range(len(ops)):
            op = ops[k]
            if op == OP_ATOM:
                r = (t >> (int(arg1[k]) * d)) & full
            elif op == OP_TOP:
                r = np.full_like(t, full)
            elif op == OP_BOT:
                r = np.zeros_like(t)
            elif op == OP_NOT:
                r = full & ~regs[arg1[k]]
            elif op == OP_AND:
                r = regs[arg1[k]] & regs[arg2[k]]
            elif op == OP_OR:
                r = regs[arg1[k]] | regs[arg2[k]]
            elif op == OP_EXISTS:
                f = regs[arg1[k]]
                r = np.zeros_like(t)
                for i, row in enumerate(rows[arg2[k]]):
                    r |= ((row & f) != 0).astype(np.int64) << i
            else:
                f = regs[arg1[k]]
                r = np.zeros_like(t)
                for i, row in enumerate(rows[arg2[k]]):
                    r |= ((row & ~f & full) == 0).astype(np.int64) << i
            regs.append(r)
        ok = regs[target] != 0
        for j in range(len(ck_kind)):
            a, b = regs[ck_a[j]], regs[ck_b[j]]
            if ck_kind[j] == CHECK_EQUAL:
                ok &= a == b
            else:
                ok &= (a & ~b & full) == 0
        hits = np.flatnonzero(ok)
        if hits.size:
            return int(t[hits[0]])
    return -1


def _dpll_py(lits, starts, num_vars):
    """Complete DPLL: unit propagation to fixpoint, branch on the lowest
    unassigned variable, true first.  Returns ``(sat, values)`` with
    ``values[v]`` in ``{1, -1}`` for a model.
    """
    n_clauses = len(starts) - 1
    value = np.zeros(num_vars + 1, np.int8)
    trail = np.zeros(num_vars + 1, np.int64)
    trail_len = 0
    dec_pos = np.zeros(num_vars + 1, np.int64)
    dec_var = np.zeros(num_vars + 1, np.int64)
    dec_flipped = np.zeros(num_vars + 1, np.int8)
    n_dec = 0
    while True:
        # unit propagation
        conflict = False
        changed = True
        while changed and not conflict:
            changed = False
            for c in range(n_clauses):
                unassigned = 0
                last = 0
                sat = False
                for k in range(starts[c], starts[c + 1]):
                    lit = lits[k]
                    v = lit if lit > 0 else -lit
                    val = value[v]
                    if val == 0:
                        unassigned += 1
                        last = lit
                    elif (val > 0) == (lit > 0):
                        sat = True
                        break
                if sat:
                    continue
                if unassigned == 0:
                    conflict = True
                    break
                if unassigned == 1:
                    v = last if last > 0 else -last
                    value[v] = 1 if last > 0 else -1
                    trail[trail_len] = v
                    trail_len += 1
                    changed = True
        if conflict:
            resumed = False
            while n_dec > 0:
                top = n_dec - 1
                while trail_len > dec_pos[top]:
                    trail_len -= 1
                    value[trail[trail_len]] = 0
                if dec_flipped[top] == 0:
                    dec_flipped[top] = 1
                    v = dec_var[top]
                    value[v] = -1
                    trail[trail_len] = v
                    trail_len += 1
                    resumed = True
                    break
                n_dec -= 1
            if not resumed:
                return False, value
            continue
        v = 0
        for u in range(1, num_vars + 1):
            if value[u] == 0:
                v = u
                break
        if v == 0:
            return True, value
        dec_pos[n_dec] = trail_len
        dec_var[n_dec] = v
        dec_flipped[n_dec] = 0
        n_dec += 1
        value[v] = 1
        trail[trail_len] = v
        trail_len += 1


if HAS_NUMBA:
    first_model_numba = numba.njit(cache=True)(_first_model_py)
    dpll_numba = numba.njit(cache=True)(_dpll_py)
else:  # pragma: no cover
    first_model_numba = None
    dpll_numba = None


def first_model(*args):
    if USE_NUMBA:
        return int(first_model_numba(*args))
    return first_model_numpy(*args)


def dpll_python(lits, starts, num_vars):
    sat, value = _dpll_py(list(map(int, lits)), list(map(int, starts)), num_vars)
    return sat, value


def dpll(lits: np.ndarray, starts: np.ndarray, num_vars: int):
    if USE_NUMBA:
        return dpll_numba(lits, starts, num_vars)
    return dpll_python(lits, starts, num_vars)
